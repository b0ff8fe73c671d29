#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "ecalab/analysis.hpp"
#include "ecalab/config.hpp"
#include "ecalab/csv.hpp"
#include "ecalab/eca.hpp"
#include "ecalab/error.hpp"
#include "ecalab/estimator.hpp"
#include "ecalab/montecarlo.hpp"
#include "ecalab/random.hpp"
#include "ecalab/svg.hpp"

namespace fs = std::filesystem;
using namespace ecalab;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = ".";
  std::vector<std::string> overrides;
  bool svg = false;
  std::optional<std::size_t> trials;
  std::optional<std::size_t> threads;
};

ExperimentConfig load(const Common& c) {
  std::vector<std::string> overrides = c.overrides;
  if (c.seed) overrides.push_back("seed=" + std::to_string(*c.seed));
  ExperimentConfig cfg = parse_config(c.config, overrides);
  if (c.trials) cfg.trials = *c.trials;
  if (c.threads) cfg.threads = *c.threads;
  return cfg;
}

std::string out_path(const Common& c, const std::string& name) {
  fs::create_directories(c.out);
  return (fs::path(c.out) / name).string();
}

void wrote(const std::string& path) { std::cout << "wrote " << path << "\n"; }

CsvTable samples_table(const CVector& v, std::ptrdiff_t first, double dt) {
  CsvTable t;
  t.header = {"n", "t_s", "re", "im"};
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const auto n = first + static_cast<std::ptrdiff_t>(i);
    t.rows.push_back({static_cast<std::int64_t>(n), static_cast<double>(n) * dt, v[i].real(), v[i].imag()});
  }
  return t;
}

CVector samples_from(const CsvTable& t, std::size_t expected, const std::string& what) {
  if (t.rows.size() != expected)
    throw ConfigError(what + ": expected " + std::to_string(expected) + " samples, found " + std::to_string(t.rows.size()));
  const std::size_t re = t.column("re"), im = t.column("im");
  CVector v(static_cast<Eigen::Index>(expected));
  for (std::size_t i = 0; i < expected; ++i)
    v[static_cast<Eigen::Index>(i)] = {cell_as_double(t.rows[i][re]), cell_as_double(t.rows[i][im])};
  return v;
}

std::vector<NodeRecord> records_for(const Scene& scene, const ExperimentConfig& cfg, const std::string& input,
                                    std::uint64_t trial) {
  const Scenario& sc = scene.scenario();
  if (input.empty()) return scene.synthesize_all(trial_options(cfg).base_seed, trial);
  std::vector<NodeRecord> records;
  for (std::size_t k = 0; k < sc.node_count(); ++k) {
    NodeRecord r;
    const fs::path dir(input);
    r.reference = samples_from(read_csv((dir / ("reference_" + std::to_string(k) + ".csv")).string()),
                               sc.samples + sc.max_delay, "reference_" + std::to_string(k));
    r.surveillance = samples_from(read_csv((dir / ("surveillance_" + std::to_string(k) + ".csv")).string()),
                                  sc.samples, "surveillance_" + std::to_string(k));
    r.truth = scene.truth()[k];
    r.d = sc.amplitudes[k].d;
    records.push_back(std::move(r));
  }
  return records;
}

int cmd_simulate(const Common& c, std::uint64_t trial) {
  const ExperimentConfig cfg = load(c);
  const Scene scene(cfg.scenario);
  const Scenario& sc = scene.scenario();
  const auto records = scene.synthesize_all(trial_options(cfg).base_seed, trial);
  CsvTable truth;
  truth.header = {"node", "tau_s", "omega_rad_s", "d_re", "d_im", "rc_snr_db", "sc_snr_db", "dnr_db", "cnr_db"};
  const auto snr = snr_report(sc);
  for (std::size_t k = 0; k < records.size(); ++k) {
    const std::string ks = std::to_string(k);
    std::string p = out_path(c, "reference_" + ks + ".csv");
    emit_csv(samples_table(records[k].reference, -static_cast<std::ptrdiff_t>(sc.max_delay), sc.dt()), p);
    wrote(p);
    p = out_path(c, "surveillance_" + ks + ".csv");
    emit_csv(samples_table(records[k].surveillance, 0, sc.dt()), p);
    wrote(p);
    truth.rows.push_back({static_cast<std::int64_t>(k), records[k].truth.tau, records[k].truth.omega, records[k].d.real(),
                          records[k].d.imag(), snr[k].rc_snr_db, snr[k].sc_snr_db, snr[k].dnr_db, snr[k].cnr_db});
  }
  const std::string p = out_path(c, "truth.csv");
  emit_csv(truth, p);
  wrote(p);
  return 0;
}

int cmd_spectrum(const Common& c, const std::string& input, std::optional<double> omega_min,
                 std::optional<double> omega_max) {
  const ExperimentConfig cfg = load(c);
  const Scene scene(cfg.scenario);
  const Scenario& sc = scene.scenario();
  const auto records = records_for(scene, cfg, input, 0);
  for (std::size_t k = 0; k < records.size(); ++k) {
    const NodeSpectrum spec(records[k], layout_for(sc, k));
    const double cell = doppler_cell(spec.layout());
    const SpectrumGrid grid = default_grid(spec.layout(), omega_min.value_or(-8 * cell), omega_max.value_or(8 * cell));
    const AmbiguitySurface s = spectrum_grid(spec, grid.tau, grid.omega, k);
    CsvTable t;
    t.header = {"tau_s", "omega_rad_s", "spectrum"};
    for (Eigen::Index i = 0; i < s.values.rows(); ++i)
      for (Eigen::Index j = 0; j < s.values.cols(); ++j) t.rows.push_back({s.tau_grid[i], s.omega_grid[j], s.values(i, j)});
    const std::string ks = std::to_string(k);
    std::string p = out_path(c, "spectrum_" + ks + ".csv");
    emit_csv(t, p);
    wrote(p);
    const DelayDoppler peak = peak_pick(s);
    std::cout << "node " << k << ": peak tau " << peak.tau << " s, omega " << peak.omega << " rad/s (truth "
              << scene.truth()[k].tau << " s, " << scene.truth()[k].omega << " rad/s)\n";
    if (c.svg) {
      p = out_path(c, "spectrum_" + ks + ".svg");
      emit_svg_heatmap(s, "ECA spectrum, node " + ks, p);
      wrote(p);
    }
  }
  return 0;
}

std::vector<std::string> estimate_header(EstimationMode mode, std::size_t nodes) {
  std::vector<std::string> h = {"trial", "converged", "iterations", "objective"};
  for (const auto& l : parameter_labels(mode)) h.push_back(l);
  for (std::size_t k = 0; k < nodes; ++k) {
    h.push_back("tau_" + std::to_string(k) + "_s");
    h.push_back("omega_" + std::to_string(k) + "_rad_s");
  }
  return h;
}

std::vector<CsvCell> estimate_row(std::size_t trial, const EstimateReport& r, EstimationMode mode, std::size_t nodes) {
  std::vector<CsvCell> row = {static_cast<std::int64_t>(trial), static_cast<std::int64_t>(r.converged ? 1 : 0),
                              static_cast<std::int64_t>(r.iterations), r.objective};
  const RVector v = estimate_vector(r, mode);
  for (Eigen::Index i = 0; i < v.size(); ++i) row.push_back(v[i]);
  for (std::size_t k = 0; k < nodes; ++k) {
    const bool have = k < r.per_node.size();
    row.push_back(have ? r.per_node[k].tau : std::nan(""));
    row.push_back(have ? r.per_node[k].omega : std::nan(""));
  }
  return row;
}

int cmd_estimate(const Common& c, const std::string& input) {
  const ExperimentConfig cfg = load(c);
  const Scene scene(cfg.scenario);
  const Scenario& sc = scene.scenario();
  CsvTable t;
  t.header = estimate_header(sc.mode, sc.node_count());
  std::vector<EstimateReport> reports;
  if (!input.empty()) {
    reports.push_back(localize(scene, records_for(scene, cfg, input, 0), cfg.estimator));
  } else {
    reports = run_trials(scene, trial_options(cfg));
  }
  for (std::size_t i = 0; i < reports.size(); ++i) t.rows.push_back(estimate_row(i, reports[i], sc.mode, sc.node_count()));
  std::string p = out_path(c, "estimates.csv");
  emit_csv(t, p);
  wrote(p);

  const RVector truth = truth_vector(scene);
  const Aggregate agg = aggregate(reports, truth, sc.mode);
  std::optional<TheoryReport> theory;
  try {
    theory = asymptotic_covariance(scene);
  } catch (const Error& e) {
    std::cerr << "theory unavailable: " << e.what() << "\n";
  }
  CsvTable s;
  s.header = {"parameter", "truth", "bias", "mse", "rmse", "crb", "asymptotic", "trials_used", "divergences"};
  for (std::size_t i = 0; i < agg.parameters.size(); ++i) {
    const auto& ps = agg.parameters[i];
    const auto ii = static_cast<Eigen::Index>(i);
    s.rows.push_back({ps.label, truth[ii], ps.bias, ps.mse, ps.rmse, theory ? theory->crb(ii, ii) : std::nan(""),
                      theory ? theory->asymptotic(ii, ii) : std::nan(""), static_cast<std::int64_t>(agg.used),
                      static_cast<std::int64_t>(agg.diverged)});
    std::cout << std::setw(12) << ps.label << "  rmse " << std::setw(13) << ps.rmse << "  bias " << std::setw(13)
              << ps.bias;
    if (theory) std::cout << "  sqrt(crb) " << std::sqrt(theory->crb(ii, ii)) << "  sqrt(asym) " << std::sqrt(theory->asymptotic(ii, ii));
    std::cout << "\n";
  }
  p = out_path(c, "estimate_summary.csv");
  emit_csv(s, p);
  wrote(p);
  return 0;
}

int cmd_theory(const Common& c) {
  const ExperimentConfig cfg = load(c);
  const Scene scene(cfg.scenario);
  const TheoryReport r = asymptotic_covariance(scene);
  CsvTable t;
  t.header = {"matrix", "row"};
  for (const auto& l : r.labels) t.header.push_back(l);
  auto add = [&](const std::string& name, const RMatrix& m) {
    std::cout << name << "\n";
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      std::vector<CsvCell> row = {name, r.labels[static_cast<std::size_t>(i)]};
      std::cout << "  " << std::setw(12) << r.labels[static_cast<std::size_t>(i)];
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        row.push_back(m(i, j));
        std::cout << std::setw(15) << std::setprecision(6) << m(i, j);
      }
      std::cout << "\n";
      t.rows.push_back(std::move(row));
    }
  };
  add("hessian", r.h);
  add("crb", r.crb);
  add("q", r.q);
  add("excess", r.excess);
  add("asymptotic", r.asymptotic);
  std::string p = out_path(c, "theory.csv");
  emit_csv(t, p);
  wrote(p);

  CsvTable m;
  m.header = {"node", "margin_db"};
  for (std::size_t k = 0; k < r.margin_db.size(); ++k) {
    m.rows.push_back({static_cast<std::int64_t>(k), r.margin_db[k]});
    std::cout << "node " << k << " efficiency margin " << r.margin_db[k] << " dB\n";
  }
  if (r.frame_caveat) std::cout << "note: several batches; the CRB row is the summed per-batch bound\n";
  p = out_path(c, "margins.csv");
  emit_csv(m, p);
  wrote(p);
  return 0;
}

int cmd_sweep(const Common& c) {
  const ExperimentConfig cfg = load(c);
  if (!cfg.sweep_axis || cfg.sweep_values.empty()) throw ConfigError("'sweep.axis' and 'sweep.values' are required for sweep");
  SweepSpec spec;
  spec.axis = *cfg.sweep_axis;
  spec.values = cfg.sweep_values;
  spec.trials = trial_options(cfg);
  const auto rows = sweep(cfg.scenario, spec);
  const EstimationMode mode = cfg.scenario.mode;
  std::string p = out_path(c, "sweep.csv");
  emit_csv(sweep_table(rows, spec.axis, mode), p);
  wrote(p);
  for (const auto& r : rows)
    if (!r.error.empty()) std::cerr << to_string(spec.axis) << "=" << r.value << ": " << r.error << "\n";
  if (c.svg) {
    const auto labels = parameter_labels(mode);
    for (std::size_t i = 0; i < labels.size(); ++i) {
      SvgCurveSpec s;
      s.title = "MSE of " + labels[i];
      s.x_label = to_string(spec.axis);
      s.y_label = "MSE (" + labels[i] + ")^2";
      s.log_y = true;
      SvgSeries mse{"Monte Carlo", {}, {}, true}, crb{"CRB", {}, {}, false}, asym{"asymptotic", {}, {}, false};
      for (const auto& r : rows) {
        if (!r.error.empty()) continue;
        const auto ii = static_cast<Eigen::Index>(i);
        mse.x.push_back(r.value);
        mse.y.push_back(r.stats.parameters[i].mse);
        crb.x.push_back(r.value);
        crb.y.push_back(r.crb_diag[ii]);
        asym.x.push_back(r.value);
        asym.y.push_back(r.asymptotic_diag[ii]);
      }
      if (mse.x.empty()) continue;
      s.series = {mse, crb, asym};
      p = out_path(c, "sweep_" + labels[i] + ".svg");
      emit_svg_curves(s, p);
      wrote(p);
    }
  }
  return 0;
}

int cmd_track(const Common& c) {
  const ExperimentConfig cfg = load(c);
  const TrackConfig& tc = cfg.track;
  const auto truths = accelerating_trajectory(tc.start, tc.acceleration, tc.interval_s, tc.intervals);
  TrialOptions opts = trial_options(cfg);
  opts.trials = c.trials ? *c.trials : tc.trials;
  const auto intervals =
      track([&](const TargetParams& t) { return track_scenario(cfg, t); }, truths, opts, tc.level);
  std::string p = out_path(c, "track.csv");
  emit_csv(track_table(intervals, tc.level), p);
  wrote(p);
  if (c.svg) {
    SvgCurveSpec s;
    s.title = "Track";
    s.x_label = "x (m)";
    s.y_label = "y (m)";
    SvgSeries truth{"truth", {}, {}, false}, est{"estimates", {}, {}, true};
    for (const auto& iv : intervals) {
      truth.x.push_back(iv.truth.x);
      truth.y.push_back(iv.truth.y);
      for (const auto& e : iv.estimates) {
        if (!e.converged) continue;
        est.x.push_back(e.theta.x);
        est.y.push_back(e.theta.y);
      }
    }
    s.series = {truth};
    if (!est.x.empty()) s.series.push_back(est);
    p = out_path(c, "track.svg");
    emit_svg_curves(s, p);
    wrote(p);
  }
  return 0;
}

struct Checker {
  int failures = 0;
  void operator()(const std::string& name, bool ok, const std::string& detail = {}) {
    std::cout << (ok ? "PASS " : "FAIL ") << name;
    if (!detail.empty()) std::cout << " (" << detail << ")";
    std::cout << "\n";
    if (!ok) ++failures;
  }
};

int cmd_validate(const Common& c) {
  Checker check;
  std::optional<ExperimentConfig> cfg;
  try {
    cfg = load(c);
    check("configuration parses and validates", true);
  } catch (const Error& e) {
    check("configuration parses and validates", false, e.what());
    return 1;
  }
  const Scene scene(cfg->scenario);
  const Scenario& sc = scene.scenario();
  const MasterWaveform& wf = scene.waveform();

  const double power = wf.master_samples().squaredNorm() / static_cast<double>(wf.master_samples().size());
  // Unit variance holds in expectation; the realized power scatters by 1/sqrt(in-band bins).
  const double spread = 1.0 / std::sqrt(wf.in_band_fraction() * static_cast<double>(wf.master_samples().size()));
  check("master waveform power is consistent with unit variance", std::abs(power - 1.0) < 5.0 * spread,
        std::to_string(power));

  Scenario quiet = sc;
  quiet.noise = {0.0, 0.0};
  const Scene quiet_scene(quiet, scene.shared_waveform());
  const auto records = quiet_scene.synthesize_all(1, 0);
  const auto noisy = scene.synthesize_all(trial_options(*cfg).base_seed, 0);
  for (std::size_t k = 0; k < sc.node_count(); ++k) {
    const std::string tag = "node " + std::to_string(k) + ": ";
    const BatchLayout lay = layout_for(sc, k);
    const auto batches = batch_split(records[k], lay);
    const InterferenceBasis basis = InterferenceBasis::from_batch(batches.front());
    const CMatrix& u = basis.orthonormal();
    const double orth = (u.adjoint() * u - CMatrix::Identity(u.cols(), u.cols())).norm();
    check(tag + "interference basis is orthonormal", orth < 1e-10, std::to_string(orth));

    const CVector pr = basis.project_out(batches.front().surveillance);
    const double idem = (basis.project_out(pr) - pr).norm() / std::max(pr.norm(), 1e-300);
    check(tag + "projection is idempotent", idem < 1e-10, std::to_string(idem));

    const DelayDoppler t = scene.truth()[k];
    if (t.tau <= lay.max_supported_delay()) {
      const NodeSpectrum s1(noisy[k], lay);
      NodeRecord scaled = noisy[k];
      scaled.reference *= cplx(0.3, -1.7);
      const NodeSpectrum s2(scaled, lay);
      const auto v1 = s1.value(t.tau, t.omega), v2 = s2.value(t.tau, t.omega);
      const bool ok = v1 && v2 && std::abs(*v1 - *v2) <= 1e-10 * std::abs(*v1);
      check(tag + "spectrum is invariant to reference scaling", ok);
    } else {
      check(tag + "true delay inside the supported range", false, "tau beyond (max_delay - 16) samples");
    }

    const TimeGrid grid = contiguous_grid(sc.samples, sc.dt());
    const double cell = kTwoPi / (static_cast<double>(sc.samples) * sc.dt());
    const RVector taus = RVector::LinSpaced(41, std::max(0.0, t.tau - 20 * sc.dt()), t.tau + 20 * sc.dt());
    const RVector omegas = RVector::LinSpaced(21, t.omega - 10 * cell, t.omega + 10 * cell);
    const double amb = unambiguity_scan(wf, grid, t, taus, omegas, 1.01 * sc.dt(), 1.01 * cell);
    check(tag + "steering vector is unambiguous near the truth", amb < 1.0, "max correlation " + std::to_string(amb));
  }

  try {
    const TheoryReport r = asymptotic_covariance(scene);
    const Eigen::SelfAdjointEigenSolver<RMatrix> h(spd_inverse(r.h, r.scales));
    check("Hessian is positive definite", h.eigenvalues().minCoeff() > 0.0);
    const Eigen::SelfAdjointEigenSolver<RMatrix> q(r.q);
    const double qmax = q.eigenvalues().cwiseAbs().maxCoeff();
    check("excess Q is positive semi-definite", q.eigenvalues().minCoeff() >= -1e-12 * std::max(qmax, 1e-300));
    const RMatrix d = r.scales.cwiseInverse().asDiagonal() * (r.asymptotic - r.crb) * r.scales.cwiseInverse().asDiagonal();
    const Eigen::SelfAdjointEigenSolver<RMatrix> diff(d);
    check("asymptotic covariance dominates the CRB", diff.eigenvalues().minCoeff() >= -1e-12 * std::max(d.norm(), 1e-300));
    for (std::size_t k = 0; k < r.margin_db.size(); ++k)
      std::cout << "info node " << k << " efficiency margin " << r.margin_db[k] << " dB\n";
  } catch (const Error& e) {
    check("theory is computable", false, e.what());
  }

  std::cout << (check.failures == 0 ? "all checks passed\n" : std::to_string(check.failures) + " check(s) failed\n");
  return check.failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ECA passive-radar lab: simulate, process, estimate and predict"};
  app.require_subcommand(1);
  Common common;
  std::uint64_t trial = 0;
  std::string input;
  std::optional<double> omega_min, omega_max;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", common.config, "scenario configuration (YAML)")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", common.seed, "override the scenario seed");
    sub->add_option("-o,--out", common.out, "output directory")->capture_default_str();
    sub->add_option("--set", common.overrides, "override a configuration key, key=value (repeatable)");
    sub->add_option("--trials", common.trials, "number of Monte Carlo trials");
    sub->add_option("--threads", common.threads, "worker threads (0 = all cores)");
  };

  auto* simulate = app.add_subcommand("simulate", "write reference and surveillance records as CSV");
  add_common(simulate);
  simulate->add_option("--trial", trial, "noise realization index")->capture_default_str();

  auto* spectrum = app.add_subcommand("spectrum", "evaluate the ECA spectrum on a delay-Doppler grid");
  add_common(spectrum);
  spectrum->add_flag("--svg", common.svg, "also write a heat map");
  spectrum->add_option("--input", input, "directory with records written by simulate");
  spectrum->add_option("--omega-min", omega_min, "lowest Doppler (rad/s)");
  spectrum->add_option("--omega-max", omega_max, "highest Doppler (rad/s)");

  auto* estimate = app.add_subcommand("estimate", "Monte Carlo estimates, or one estimate from --input records");
  add_common(estimate);
  estimate->add_option("--input", input, "directory with records written by simulate");

  auto* theory = app.add_subcommand("theory", "Hessian, CRB, excess and asymptotic covariance");
  add_common(theory);

  auto* sweep_cmd = app.add_subcommand("sweep", "MSE versus the configured sweep axis");
  add_common(sweep_cmd);
  sweep_cmd->add_flag("--svg", common.svg, "also write MSE curves");

  auto* track_cmd = app.add_subcommand("track", "accelerating target over successive intervals");
  add_common(track_cmd);
  track_cmd->add_flag("--svg", common.svg, "also write the track plot");

  auto* validate = app.add_subcommand("validate", "check model invariants on the configured scenario");
  add_common(validate);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*simulate) return cmd_simulate(common, trial);
    if (*spectrum) return cmd_spectrum(common, input, omega_min, omega_max);
    if (*estimate) return cmd_estimate(common, input);
    if (*theory) return cmd_theory(common);
    if (*sweep_cmd) return cmd_sweep(common);
    if (*track_cmd) return cmd_track(common);
    if (*validate) return cmd_validate(common);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
