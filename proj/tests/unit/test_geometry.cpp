#include <doctest.h>

#include <random>

#include "ecalab/error.hpp"
#include "ecalab/geometry.hpp"
#include "helpers.hpp"

using namespace ecalab;

namespace {

NodeGeometry node(double rx, double ry) { return NodeGeometry{{0.0, 0.0}, {rx, ry}}; }

GeometryJacobian fd_jacobian(const TargetParams& th, const NodeGeometry& g) {
  GeometryJacobian j;
  const Eigen::Vector4d x = th.as_vector();
  for (int i = 0; i < 4; ++i) {
    const double h = 1e-3 * std::max(1.0, std::abs(x[i]));
    const NodeGeometry nodes[] = {g};
    auto at = [&](double s) {
      Eigen::Vector4d xs = x;
      xs[i] += s;
      const auto dd = theta_to_delay_doppler(TargetParams::from_vector(xs), nodes).front();
      return Eigen::Vector2d(dd.tau, dd.omega);
    };
    // Richardson-extrapolated central difference.
    const Eigen::Vector2d d1 = (at(h) - at(-h)) / (2 * h);
    const Eigen::Vector2d d2 = (at(h / 2) - at(-h / 2)) / h;
    j.col(i) = (4.0 * d2 - d1) / 3.0;
  }
  return j;
}

}  // namespace

TEST_CASE("bistatic delay vanishes at the illuminator and on the baseline") {
  const NodeGeometry g = node(-300.0, 300.0);
  CHECK(bistatic_delay({0.0, 0.0}, g) == 0.0);
  CHECK(bistatic_delay({-150.0, 150.0}, g) < 1e-15);
  CHECK(bistatic_delay({-60.0, 60.0}, g) < 1e-15);
}

TEST_CASE("bistatic delay matches a direct path-length evaluation") {
  NodeGeometry g = node(-300.0, 300.0);
  g.propagation_speed = 3e8;
  const double want = (std::hypot(10.0 + 300.0, 10.0 - 300.0) + std::hypot(10.0, 10.0) - std::hypot(300.0, 300.0)) / 3e8;
  CHECK(test::rel_err(bistatic_delay({10.0, 10.0}, g), want) < 1e-14);
}

TEST_CASE("delay rate: stationary and orthogonal velocities give zero") {
  const NodeGeometry g = node(300.0, 0.0);
  CHECK(bistatic_delay_rate({150.0, 100.0}, {0.0, 0.0}, g) == 0.0);
  // On the perpendicular bisector both line-of-sight vectors have equal and opposite x parts.
  CHECK(std::abs(bistatic_delay_rate({150.0, 100.0}, {1.0, 0.0}, g)) < 1e-20);
  CHECK_THROWS_AS(bistatic_delay_rate({300.0, 0.0}, {1.0, 0.0}, g), GeometryError);
  CHECK_THROWS_AS(bistatic_delay_rate({0.0, 0.0}, {1.0, 0.0}, g), GeometryError);
}

TEST_CASE("doppler from rate") {
  CHECK(doppler_from_rate(0.0, 1.0) == 0.0);
  CHECK(test::rel_err(doppler_from_rate(1e-6, kTwoPi * 600e6), -kTwoPi * 600.0) < 1e-14);
  CHECK(doppler_from_rate(1e-7, kTwoPi * 600e6) < 0.0);
}

TEST_CASE("doppler round trip reproduces the delay rate") {
  const NodeGeometry g = node(-300.0, 300.0);
  const double rate = bistatic_delay_rate({40.0, -70.0}, {120.0, 30.0}, g);
  CHECK(test::rel_err(-doppler_from_rate(rate, g.carrier_angular_frequency) / g.carrier_angular_frequency, rate) < 1e-15);
}

TEST_CASE("chosen single-pair geometry gives roughly 1320 rad/s for (70, -190) m/s") {
  const NodeGeometry nodes[] = {node(-300.0, 300.0)};
  const auto dd = theta_to_delay_doppler({-100.0, 270.0, 70.0, -190.0}, nodes).front();
  CHECK(std::abs(dd.omega - 1320.0) / 1320.0 < 0.05);
}

TEST_CASE("theta map: zero velocity, mirror symmetry, node-tagged errors") {
  const std::vector<NodeGeometry> mirrored = {node(300.0, 100.0), node(300.0, -100.0)};
  const auto dd = theta_to_delay_doppler({200.0, 0.0, 0.0, 0.0}, mirrored);
  CHECK(dd[0].omega == 0.0);
  CHECK(dd[1].omega == 0.0);
  CHECK(test::rel_err(dd[0].tau, dd[1].tau) < 1e-14);

  const auto layout = test::three_node_layout();
  try {
    theta_to_delay_doppler({300.0, 300.0, 1.0, 1.0}, layout);
    FAIL("expected a geometry error");
  } catch (const GeometryError& e) {
    CHECK(std::string(e.what()).find("node 1") != std::string::npos);
  }
}

TEST_CASE("three-node layout maps a moving target to distinct pairs") {
  const auto layout = test::three_node_layout();
  const TargetParams th{10.0, 10.0, 100.0 * std::sqrt(2.0), 100.0 * std::sqrt(2.0)};
  const auto dd = theta_to_delay_doppler(th, layout);
  REQUIRE(dd.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) {
    const double want_tau = bistatic_delay(th.position(), layout[k]);
    const double want_omega = -bistatic_delay_rate(th.position(), th.velocity(), layout[k]) * layout[k].carrier_angular_frequency;
    CHECK(dd[k].tau == want_tau);
    CHECK(dd[k].omega == want_omega);
  }
}

TEST_CASE("translation covariance") {
  const auto layout = test::three_node_layout();
  std::vector<NodeGeometry> shifted = layout;
  for (auto& g : shifted) {
    g.io.x += 1234.0;
    g.io.y -= 77.0;
    g.rn.x += 1234.0;
    g.rn.y -= 77.0;
  }
  const TargetParams th{50.0, -20.0, 30.0, 90.0};
  const TargetParams ts{50.0 + 1234.0, -20.0 - 77.0, 30.0, 90.0};
  const auto a = theta_to_delay_doppler(th, layout);
  const auto b = theta_to_delay_doppler(ts, shifted);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(std::abs(a[k].tau - b[k].tau) < 1e-12 * std::max(a[k].tau, 1e-9));
    CHECK(std::abs(a[k].omega - b[k].omega) < 1e-9 * std::max(std::abs(a[k].omega), 1.0));
  }
}

TEST_CASE("jacobian matches central differences on random scenes") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> pos(-500.0, 500.0);
  std::uniform_real_distribution<double> vel(-250.0, 250.0);
  int checked = 0;
  while (checked < 100) {
    const NodeGeometry g{{pos(rng), pos(rng)}, {pos(rng), pos(rng)}};
    const TargetParams th{pos(rng), pos(rng), vel(rng), vel(rng)};
    if (std::hypot(th.x - g.io.x, th.y - g.io.y) < 20.0 || std::hypot(th.x - g.rn.x, th.y - g.rn.y) < 20.0) continue;
    if (std::hypot(g.io.x - g.rn.x, g.io.y - g.rn.y) < 20.0) continue;
    const GeometryJacobian a = delay_doppler_jacobian(th, g);
    const GeometryJacobian f = fd_jacobian(th, g);
    CHECK(a(0, 2) == 0.0);
    CHECK(a(0, 3) == 0.0);
    for (int r = 0; r < 2; ++r) CHECK((a.row(r) - f.row(r)).norm() <= 1e-6 * a.row(r).norm());
    ++checked;
  }
}

TEST_CASE("velocity columns of the Doppler row are -(wc/c)(e_k + e)") {
  const NodeGeometry g = node(-300.0, 300.0);
  const TargetParams th{80.0, 40.0, 0.0, 0.0};
  const GeometryJacobian a = delay_doppler_jacobian(th, g);
  const Eigen::Vector2d ek = Eigen::Vector2d(80.0 + 300.0, 40.0 - 300.0).normalized();
  const Eigen::Vector2d e = Eigen::Vector2d(80.0, 40.0).normalized();
  const Eigen::Vector2d want = -(g.carrier_angular_frequency / g.propagation_speed) * (ek + e);
  CHECK((a.block<1, 2>(1, 2).transpose() - want).norm() < 1e-12 * want.norm());
  // Stationary target: position derivatives of omega vanish, matching the finite-difference oracle.
  const GeometryJacobian f = fd_jacobian(th, g);
  CHECK(std::abs(a(1, 0)) < 1e-12);
  CHECK(std::abs(f(1, 0)) < 1e-6);
}
