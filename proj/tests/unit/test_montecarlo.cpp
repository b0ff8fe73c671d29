#include <doctest.h>

#include <atomic>
#include <cmath>
#include <stdexcept>

#include "ecalab/montecarlo.hpp"
#include "helpers.hpp"

using namespace ecalab;

namespace {

EstimateReport dd_report(double tau, double omega, bool converged = true) {
  EstimateReport r;
  r.mode = EstimationMode::DelayDoppler;
  r.per_node = {DelayDoppler{tau, omega}};
  r.converged = converged;
  return r;
}

}  // namespace

TEST_CASE("parallel_for visits every index once and propagates errors") {
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(1000, 4, [&](std::size_t i) { hits[i].fetch_add(1); });
  for (const auto& h : hits) CHECK(h.load() == 1);
  CHECK_THROWS_AS(parallel_for(50, 3,
                               [](std::size_t i) {
                                 if (i == 17) throw std::runtime_error("boom");
                               }),
                  std::runtime_error);
  parallel_for(0, 2, [](std::size_t) { FAIL("no work expected"); });
}

TEST_CASE("aggregate computes bias and MSE over converged trials") {
  const RVector truth = (RVector(2) << 1.0, 10.0).finished();
  const std::vector<EstimateReport> reports = {dd_report(1.5, 9.0), dd_report(0.5, 13.0), dd_report(1.0, 11.0),
                                               dd_report(100.0, 100.0, false)};
  const Aggregate a = aggregate(reports, truth, EstimationMode::DelayDoppler);
  CHECK(a.trials == 4);
  CHECK(a.used == 3);
  CHECK(a.diverged == 1);
  REQUIRE(a.parameters.size() == 2);
  CHECK(a.parameters[0].label == "tau_s");
  CHECK(std::abs(a.parameters[0].bias) < 1e-15);
  CHECK(std::abs(a.parameters[0].mse - 0.5 / 3.0) < 1e-15);
  CHECK(std::abs(a.parameters[1].bias - 1.0) < 1e-15);
  CHECK(std::abs(a.parameters[1].mse - 11.0 / 3.0) < 1e-14);
  CHECK(std::abs(a.parameters[1].rmse - std::sqrt(11.0 / 3.0)) < 1e-14);
  // Off-diagonal second moment: (0.5*-1 + -0.5*3 + 0*1) / 3.
  CHECK(std::abs(a.error_covariance(0, 1) + 2.0 / 3.0) < 1e-15);
  CHECK_THROWS(aggregate({dd_report(0, 0, false)}, truth, EstimationMode::DelayDoppler));
}

TEST_CASE("trials are deterministic and independent of the thread count") {
  Scenario sc = test::single_node_scenario(256, 40, 3, 17.3, 2.0 * kTwoPi / (256 / 25e6));
  const Scene scene(sc);
  TrialOptions opts;
  opts.trials = 6;
  opts.base_seed = 99;
  opts.threads = 1;
  const auto serial = run_trials(scene, opts);
  opts.threads = 3;
  const auto threaded = run_trials(scene, opts);
  REQUIRE(serial.size() == 6);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(serial[i].per_node[0].tau == threaded[i].per_node[0].tau);
    CHECK(serial[i].per_node[0].omega == threaded[i].per_node[0].omega);
  }
  CHECK(serial[0].per_node[0].tau != serial[1].per_node[0].tau);
  const RVector truth = truth_vector(scene);
  CHECK(truth[0] == scene.truth()[0].tau);
}

TEST_CASE("sweep axis semantics") {
  Scenario sc = test::single_node_scenario(64, 16, 2, 3.0, 100.0);
  sc.noise = {0.5, 2.0};
  const Scenario s1 = apply_axis(sc, SweepAxis::ScSnrDb, 7.0);
  CHECK(std::abs(10 * std::log10(std::norm(s1.amplitudes[0].d) / 2.0) - 7.0) < 1e-12);
  CHECK(std::arg(s1.amplitudes[0].d) == doctest::Approx(std::arg(sc.amplitudes[0].d)));
  CHECK(s1.noise.sigma_e2 == 2.0);

  const Scenario s2 = apply_axis(sc, SweepAxis::RcSnrDb, 80.0);
  CHECK(std::abs(10 * std::log10(std::norm(sc.amplitudes[0].a) / s2.noise.sigma_n2) - 80.0) < 1e-12);
  CHECK(s2.amplitudes[0].a == sc.amplitudes[0].a);

  const Scenario s3 = apply_axis(sc, SweepAxis::MBatches, 4.0);
  CHECK(s3.batching.count == 4);
  CHECK_THROWS(apply_axis(sc, SweepAxis::MBatches, 2.5));

  const Scenario s4 = apply_axis(sc, SweepAxis::TransmitPowerDb, 20.0);
  CHECK(std::abs(s4.amplitudes[0].a - 10.0 * sc.amplitudes[0].a) < 1e-12 * std::abs(s4.amplitudes[0].a));
  CHECK(std::abs(s4.amplitudes[0].d - 10.0 * sc.amplitudes[0].d) < 1e-12 * std::abs(s4.amplitudes[0].d));
  CHECK(test::rel_err_norm(s4.amplitudes[0].c, CVector(10.0 * sc.amplitudes[0].c)) < 1e-12);
  CHECK(s4.noise.sigma_n2 == sc.noise.sigma_n2);

  for (SweepAxis ax : {SweepAxis::ScSnrDb, SweepAxis::RcSnrDb, SweepAxis::MBatches, SweepAxis::TransmitPowerDb})
    CHECK(parse_sweep_axis(to_string(ax)) == ax);
  CHECK_THROWS(parse_sweep_axis("bandwidth"));
}

TEST_CASE("sweep rows and table") {
  Scenario sc = test::single_node_scenario(256, 40, 3, 17.3, 2.0 * kTwoPi / (256 / 25e6));
  SweepSpec spec;
  spec.axis = SweepAxis::ScSnrDb;
  spec.values = {5.0, 15.0};
  spec.trials.trials = 8;
  spec.trials.threads = 1;
  const auto rows = sweep(sc, spec);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].value == 5.0);
  CHECK(rows[0].error.empty());
  CHECK(rows[1].crb_diag[0] < rows[0].crb_diag[0]);
  CHECK(std::abs(rows[0].crb_diag[0] / rows[1].crb_diag[0] - 10.0) < 1e-9);
  const CsvTable t = sweep_table(rows, spec.axis, EstimationMode::DelayDoppler);
  CHECK(t.header.front() == "sc_snr_db");
  CHECK(t.rows.size() == 2);
  for (const char* col : {"mse_tau_s2", "rmse_tau_s", "crb_tau_s2", "asym_tau_s2", "mse_omega_rad_s2", "margin_db",
                          "trials_used", "divergences", "mse_rel_std_error", "error"})
    CHECK_NOTHROW(t.column(col));
  CHECK_NOTHROW(t.validate());
}

TEST_CASE("tracking geometry and trajectory") {
  const auto truths = accelerating_trajectory({0.0, 0.0, 10.0, -5.0}, {2.0, 4.0}, 0.5, 3);
  REQUIRE(truths.size() == 3);
  CHECK(truths[2].x == doctest::Approx(10.0 * 1.0 + 0.5 * 2.0 * 1.0));
  CHECK(truths[2].y == doctest::Approx(-5.0 * 1.0 + 0.5 * 4.0 * 1.0));
  CHECK(truths[2].vx == doctest::Approx(12.0));
  CHECK(truths[2].vy == doctest::Approx(-1.0));

  const auto ring = ring_nodes({0.0, 0.0}, 300.0, 5, 1e9, 3e8);
  REQUIRE(ring.size() == 5);
  for (std::size_t k = 0; k < 5; ++k) {
    CHECK(std::hypot(ring[k].rn.x, ring[k].rn.y) == doctest::Approx(300.0));
    CHECK(std::atan2(ring[k].rn.y, ring[k].rn.x) == doctest::Approx(std::remainder(kTwoPi * k / 5.0, kTwoPi)));
  }
}
