#include "ecalab/montecarlo.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "ecalab/error.hpp"

namespace ecalab {

void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<EstimateReport> run_trials(const Scene& scene, const TrialOptions& options) {
  std::vector<EstimateReport> reports(options.trials);
  parallel_for(options.trials, options.threads, [&](std::size_t t) {
    const auto records = scene.synthesize_all(options.base_seed, t);
    try {
      reports[t] = localize(scene, records, options.estimator);
    } catch (const Error&) {
      reports[t] = EstimateReport{};
      reports[t].converged = false;
      reports[t].mode = scene.scenario().mode;
    }
  });
  return reports;
}

RVector estimate_vector(const EstimateReport& report, EstimationMode mode) {
  if (mode == EstimationMode::DelayDoppler) {
    RVector v(2);
    if (report.per_node.empty()) return RVector::Constant(2, std::nan(""));
    v << report.per_node.front().tau, report.per_node.front().omega;
    return v;
  }
  return report.theta.as_vector();
}

RVector truth_vector(const Scene& scene) {
  const Scenario& sc = scene.scenario();
  if (sc.mode == EstimationMode::DelayDoppler) {
    RVector v(2);
    v << scene.truth().front().tau, scene.truth().front().omega;
    return v;
  }
  return sc.target.as_vector();
}

Aggregate aggregate(const std::vector<EstimateReport>& reports, const RVector& truth, EstimationMode mode) {
  const auto labels = parameter_labels(mode);
  const Eigen::Index p = truth.size();
  Aggregate agg;
  agg.trials = reports.size();
  RVector sum = RVector::Zero(p);
  RMatrix second = RMatrix::Zero(p, p);
  for (const auto& r : reports) {
    if (!r.converged) {
      ++agg.diverged;
      continue;
    }
    const RVector err = estimate_vector(r, mode) - truth;
    sum += err;
    second += err * err.transpose();
    ++agg.used;
  }
  if (agg.used == 0) throw Error("aggregate: every trial diverged");
  const double n = static_cast<double>(agg.used);
  agg.error_covariance = second / n;
  for (Eigen::Index i = 0; i < p; ++i) {
    ParameterStats s;
    s.label = labels[static_cast<std::size_t>(i)];
    s.bias = sum[i] / n;
    s.mse = second(i, i) / n;
    s.rmse = std::sqrt(s.mse);
    agg.parameters.push_back(s);
  }
  return agg;
}

SweepAxis parse_sweep_axis(const std::string& name) {
  if (name == "sc_snr_db") return SweepAxis::ScSnrDb;
  if (name == "rc_snr_db") return SweepAxis::RcSnrDb;
  if (name == "m_batches") return SweepAxis::MBatches;
  if (name == "transmit_power_db") return SweepAxis::TransmitPowerDb;
  throw ConfigError("sweep.axis: unknown axis '" + name + "'");
}

std::string to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::ScSnrDb: return "sc_snr_db";
    case SweepAxis::RcSnrDb: return "rc_snr_db";
    case SweepAxis::MBatches: return "m_batches";
    case SweepAxis::TransmitPowerDb: return "transmit_power_db";
  }
  return "";
}

Scenario apply_axis(const Scenario& base, SweepAxis axis, double value) {
  if (!std::isfinite(value)) throw ConfigError("sweep.values: values must be finite");
  Scenario sc = base;
  switch (axis) {
    case SweepAxis::ScSnrDb: {
      const double ref = sc.noise.sigma_e2 > 0.0 ? sc.noise.sigma_e2 : 1.0;
      for (auto& amp : sc.amplitudes) {
        const cplx phase = std::abs(amp.d) > 0.0 ? amp.d / std::abs(amp.d) : cplx{1.0, 0.0};
        amp.d = std::sqrt(ref * std::pow(10.0, value / 10.0)) * phase;
      }
      break;
    }
    case SweepAxis::RcSnrDb: {
      if (sc.amplitudes.empty()) break;
      // One reference noise level for all nodes, set by the first node's |a|.
      sc.noise.sigma_n2 = std::norm(sc.amplitudes.front().a) / std::pow(10.0, value / 10.0);
      break;
    }
    case SweepAxis::MBatches: {
      if (value < 1.0 || value != std::floor(value)) throw ConfigError("sweep.values: m_batches must be positive integers");
      sc.batching.count = static_cast<std::size_t>(value);
      break;
    }
    case SweepAxis::TransmitPowerDb: {
      const double gain = std::pow(10.0, value / 20.0);
      for (auto& amp : sc.amplitudes) {
        amp.a *= gain;
        amp.b *= gain;
        amp.d *= gain;
        amp.c *= gain;
      }
      break;
    }
  }
  return sc;
}

std::vector<SweepRow> sweep(const Scenario& base, const SweepSpec& spec) {
  const Scene base_scene(base);
  std::vector<SweepRow> rows;
  for (double value : spec.values) {
    SweepRow row;
    row.value = value;
    try {
      const Scene scene(apply_axis(base, spec.axis, value), base_scene.shared_waveform());
      row.margin_db = efficiency_margin(scene.scenario());
      const auto reports = run_trials(scene, spec.trials);
      row.stats = aggregate(reports, truth_vector(scene), scene.scenario().mode);
      try {
        const TheoryReport theory = asymptotic_covariance(scene);
        row.crb_diag = theory.crb.diagonal();
        row.asymptotic_diag = theory.asymptotic.diagonal();
      } catch (const Error& e) {
        row.error = e.what();
      }
    } catch (const Error& e) {
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

CsvTable sweep_table(const std::vector<SweepRow>& rows, SweepAxis axis, EstimationMode mode) {
  const auto labels = parameter_labels(mode);
  CsvTable t;
  t.header = {to_string(axis)};
  for (const auto& l : labels) {
    t.header.push_back("mse_" + l + "2");
    t.header.push_back("rmse_" + l);
    t.header.push_back("crb_" + l + "2");
    t.header.push_back("asym_" + l + "2");
  }
  t.header.insert(t.header.end(), {"margin_db", "trials_used", "divergences", "mse_rel_std_error", "error"});
  const double nan = std::nan("");
  for (const auto& r : rows) {
    std::vector<CsvCell> cells{r.value};
    for (std::size_t i = 0; i < labels.size(); ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      const bool have = i < r.stats.parameters.size();
      cells.emplace_back(have ? r.stats.parameters[i].mse : nan);
      cells.emplace_back(have ? r.stats.parameters[i].rmse : nan);
      cells.emplace_back(r.crb_diag.size() > ii ? r.crb_diag[ii] : nan);
      cells.emplace_back(r.asymptotic_diag.size() > ii ? r.asymptotic_diag[ii] : nan);
    }
    double margin = -std::numeric_limits<double>::infinity();
    for (double m : r.margin_db) margin = std::max(margin, m);
    cells.emplace_back(r.margin_db.empty() ? nan : margin);
    cells.emplace_back(static_cast<std::int64_t>(r.stats.used));
    cells.emplace_back(static_cast<std::int64_t>(r.stats.diverged));
    cells.emplace_back(r.stats.used > 0 ? std::sqrt(2.0 / static_cast<double>(r.stats.used)) : nan);
    cells.emplace_back(r.error);
    t.rows.push_back(std::move(cells));
  }
  return t;
}

std::vector<TargetParams> accelerating_trajectory(const TargetParams& start, const Eigen::Vector2d& acceleration,
                                                  double interval_s, std::size_t count) {
  std::vector<TargetParams> out;
  for (std::size_t i = 0; i < count; ++i) {
    const double t = static_cast<double>(i) * interval_s;
    out.push_back({start.x + start.vx * t + 0.5 * acceleration.x() * t * t,
                   start.y + start.vy * t + 0.5 * acceleration.y() * t * t, start.vx + acceleration.x() * t,
                   start.vy + acceleration.y() * t});
  }
  return out;
}

std::vector<NodeGeometry> ring_nodes(const Position2D& io, double radius, std::size_t count,
                                     double carrier_angular_frequency, double propagation_speed) {
  std::vector<NodeGeometry> nodes;
  for (std::size_t k = 0; k < count; ++k) {
    const double alpha = kTwoPi * static_cast<double>(k) / static_cast<double>(count);
    nodes.push_back({io, {radius * std::cos(alpha), radius * std::sin(alpha)}, carrier_angular_frequency, propagation_speed});
  }
  return nodes;
}

std::vector<TrackInterval> track(const std::function<Scenario(const TargetParams&)>& make_scenario,
                                 const std::vector<TargetParams>& truths, const TrialOptions& options, double level) {
  std::vector<TrackInterval> out;
  std::shared_ptr<const MasterWaveform> waveform;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    Scenario sc = make_scenario(truths[i]);
    sc.target = truths[i];
    const Scene scene(sc, waveform);
    if (!waveform) waveform = scene.shared_waveform();
    TrackInterval iv;
    iv.index = i;
    iv.truth = truths[i];
    TrialOptions opts = options;
    opts.base_seed = derive_seed(options.base_seed, "track", {i});
    iv.estimates = run_trials(scene, opts);
    const TheoryReport theory = asymptotic_covariance(scene);
    iv.asymptotic = theory.asymptotic;
    if (theory.asymptotic.rows() == 4) {
      iv.position_ellipse = confidence_ellipse(theory.asymptotic.block<2, 2>(0, 0), level);
      iv.velocity_ellipse = confidence_ellipse(theory.asymptotic.block<2, 2>(2, 2), level);
    }
    out.push_back(std::move(iv));
  }
  return out;
}

CsvTable track_table(const std::vector<TrackInterval>& intervals, double level) {
  CsvTable t;
  t.header = {"interval", "trial",       "true_x_m",   "true_y_m",      "true_vx_m_s",    "true_vy_m_s",
              "x_m",      "y_m",         "vx_m_s",     "vy_m_s",        "converged",      "pos_major_m",
              "pos_minor_m", "pos_angle_rad", "vel_major_m_s", "vel_minor_m_s", "vel_angle_rad", "level"};
  for (const auto& iv : intervals) {
    for (std::size_t k = 0; k < iv.estimates.size(); ++k) {
      const auto& e = iv.estimates[k];
      t.rows.push_back({static_cast<std::int64_t>(iv.index), static_cast<std::int64_t>(k), iv.truth.x, iv.truth.y,
                        iv.truth.vx, iv.truth.vy, e.theta.x, e.theta.y, e.theta.vx, e.theta.vy,
                        static_cast<std::int64_t>(e.converged ? 1 : 0), iv.position_ellipse.semi_major,
                        iv.position_ellipse.semi_minor, iv.position_ellipse.orientation,
                        iv.velocity_ellipse.semi_major, iv.velocity_ellipse.semi_minor,
                        iv.velocity_ellipse.orientation, level});
    }
  }
  return t;
}

}  // namespace ecalab
