#include "ecalab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ecalab/error.hpp"

namespace ecalab {

namespace {

double distance(const Position2D& a, const Position2D& b) { return std::hypot(a.x - b.x, a.y - b.y); }

// Smallest range treated as a genuine separation; below it the target sits on a site.
constexpr double kMinRange = 1e-9;

void require_separated(const Position2D& u, const NodeGeometry& g) {
  if (distance(u, g.rn) < kMinRange) throw GeometryError("target coincides with the receiving node");
  if (distance(u, g.io) < kMinRange) throw GeometryError("target coincides with the illuminator");
}

}  // namespace

void NodeGeometry::validate() const {
  if (!std::isfinite(io.x) || !std::isfinite(io.y) || !std::isfinite(rn.x) || !std::isfinite(rn.y))
    throw GeometryError("node positions must be finite");
  if (distance(io, rn) < kMinRange) throw GeometryError("receiving node coincides with the illuminator");
  if (!(carrier_angular_frequency > 0.0)) throw GeometryError("carrier angular frequency must be positive");
  if (!(propagation_speed > 0.0)) throw GeometryError("propagation speed must be positive");
}

double bistatic_delay(const Position2D& u, const NodeGeometry& g) {
  const double excess = distance(u, g.rn) + distance(u, g.io) - distance(g.rn, g.io);
  // Rounding can push the collinear case a hair below zero.
  return std::max(excess, 0.0) / g.propagation_speed;
}

double bistatic_delay_rate(const Position2D& u, const Position2D& v, const NodeGeometry& g) {
  require_separated(u, g);
  const double rk = distance(u, g.rn);
  const double r = distance(u, g.io);
  const double along_rn = (v.x * (u.x - g.rn.x) + v.y * (u.y - g.rn.y)) / rk;
  const double along_io = (v.x * (u.x - g.io.x) + v.y * (u.y - g.io.y)) / r;
  return (along_rn + along_io) / g.propagation_speed;
}

std::vector<DelayDoppler> theta_to_delay_doppler(const TargetParams& theta,
                                                 std::span<const NodeGeometry> nodes) {
  std::vector<DelayDoppler> out;
  out.reserve(nodes.size());
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const auto& g = nodes[k];
    try {
      const double tau = bistatic_delay(theta.position(), g);
      const double rate = bistatic_delay_rate(theta.position(), theta.velocity(), g);
      out.push_back({tau, doppler_from_rate(rate, g.carrier_angular_frequency)});
    } catch (const GeometryError& e) {
      throw GeometryError("node " + std::to_string(k) + ": " + e.what());
    }
  }
  return out;
}

GeometryJacobian delay_doppler_jacobian(const TargetParams& theta, const NodeGeometry& g) {
  const Position2D u = theta.position();
  require_separated(u, g);
  const Eigen::Vector2d pos(u.x, u.y);
  const Eigen::Vector2d vel(theta.vx, theta.vy);
  const Eigen::Vector2d to_rn = pos - Eigen::Vector2d(g.rn.x, g.rn.y);
  const Eigen::Vector2d to_io = pos - Eigen::Vector2d(g.io.x, g.io.y);
  const double rk = to_rn.norm();
  const double r = to_io.norm();
  const Eigen::Vector2d ek = to_rn / rk;
  const Eigen::Vector2d e = to_io / r;
  const double c = g.propagation_speed;
  const double wc = g.carrier_angular_frequency;

  GeometryJacobian jac = GeometryJacobian::Zero();
  jac.block<1, 2>(0, 0) = ((ek + e) / c).transpose();

  // d/du of v.(u - p)/|u - p| is (I - e e^T) v / |u - p|.
  const Eigen::Vector2d drate_du =
      ((vel - ek * ek.dot(vel)) / rk + (vel - e * e.dot(vel)) / r) / c;
  jac.block<1, 2>(1, 0) = (-wc * drate_du).transpose();
  jac.block<1, 2>(1, 2) = (-wc / c * (ek + e)).transpose();
  return jac;
}

std::vector<GeometryJacobian> delay_doppler_jacobian(const TargetParams& theta,
                                                     std::span<const NodeGeometry> nodes) {
  std::vector<GeometryJacobian> out;
  out.reserve(nodes.size());
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    try {
      out.push_back(delay_doppler_jacobian(theta, nodes[k]));
    } catch (const GeometryError& e) {
      throw GeometryError("node " + std::to_string(k) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace ecalab
