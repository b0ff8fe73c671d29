#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ecalab/types.hpp"

namespace ecalab {

struct Position2D {
  double x = 0.0;
  double y = 0.0;
};

/// Target state: position (m) and constant velocity (m/s).
struct TargetParams {
  double x = 0.0;
  double y = 0.0;
  double vx = 0.0;
  double vy = 0.0;

  Position2D position() const { return {x, y}; }
  Position2D velocity() const { return {vx, vy}; }
  Eigen::Vector4d as_vector() const { return {x, y, vx, vy}; }
  static TargetParams from_vector(const Eigen::Vector4d& v) { return {v[0], v[1], v[2], v[3]}; }
};

/// One illuminator / receiving-node pair.
struct NodeGeometry {
  Position2D io;
  Position2D rn;
  double carrier_angular_frequency = kTwoPi * 600e6;  // rad/s
  double propagation_speed = kSpeedOfLight;           // m/s

  void validate() const;
};

struct DelayDoppler {
  double tau = 0.0;    // s
  double omega = 0.0;  // rad/s
};

using GeometryJacobian = Eigen::Matrix<double, 2, 4>;

/// Excess path delay (|u - r_k| + |u - r| - |r_k - r|) / c. Never negative.
double bistatic_delay(const Position2D& u, const NodeGeometry& g);

/// d(tau)/dt for a target at u moving with velocity v. Throws GeometryError if u is at the IO or RN.
double bistatic_delay_rate(const Position2D& u, const Position2D& v, const NodeGeometry& g);

inline double doppler_from_rate(double rate, double carrier_angular_frequency) {
  return -rate * carrier_angular_frequency;
}

/// Per-node (tau_k, omega_k). Degenerate-geometry errors name the offending node.
std::vector<DelayDoppler> theta_to_delay_doppler(const TargetParams& theta,
                                                 std::span<const NodeGeometry> nodes);

/// d(tau_k, omega_k) / d(x, y, vx, vy), analytic.
GeometryJacobian delay_doppler_jacobian(const TargetParams& theta, const NodeGeometry& node);
std::vector<GeometryJacobian> delay_doppler_jacobian(const TargetParams& theta,
                                                     std::span<const NodeGeometry> nodes);

}  // namespace ecalab
