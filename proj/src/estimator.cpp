#include "ecalab/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ecalab/error.hpp"

namespace ecalab {

namespace {

constexpr double kWorst = -std::numeric_limits<double>::infinity();

double sanitize(double v) { return std::isfinite(v) ? v : kWorst; }

}  // namespace

NelderMeadResult nelder_mead_maximize(const std::function<double(const RVector&)>& f, const RVector& x0,
                                      const RVector& scales, const NelderMeadOptions& options) {
  const Eigen::Index n = x0.size();
  if (scales.size() != n) throw Error("nelder-mead: scale vector size mismatch");
  NelderMeadResult result;
  auto eval = [&](const RVector& z) {
    ++result.evaluations;
    return sanitize(f(z.cwiseProduct(scales)));
  };

  const RVector z0 = x0.cwiseQuotient(scales);
  std::vector<RVector> simplex(static_cast<std::size_t>(n + 1), z0);
  std::vector<double> values(static_cast<std::size_t>(n + 1));
  for (Eigen::Index i = 0; i < n; ++i) simplex[static_cast<std::size_t>(i + 1)][i] += options.initial_step;
  for (std::size_t i = 0; i < simplex.size(); ++i) values[i] = eval(simplex[i]);
  if (!std::isfinite(values[0])) throw Error("nelder-mead: objective is not finite at the initial point");

  std::vector<std::size_t> order(simplex.size());
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
    std::vector<RVector> s2;
    std::vector<double> v2;
    for (auto i : order) {
      s2.push_back(simplex[i]);
      v2.push_back(values[i]);
    }
    simplex = std::move(s2);
    values = std::move(v2);
  };

  sort_simplex();
  while (true) {
    double diameter = 0.0;
    for (std::size_t i = 1; i < simplex.size(); ++i)
      diameter = std::max(diameter, (simplex[i] - simplex[0]).cwiseAbs().maxCoeff());
    const double spread = values.front() - values.back();
    const bool flat = std::isfinite(spread) && values.front() != 0.0 &&
                      spread <= options.f_tolerance * std::abs(values.front());
    if (diameter < options.x_tolerance || flat) {
      result.converged = true;
      break;
    }
    if (result.iterations >= options.max_iterations) break;
    ++result.iterations;

    const std::size_t worst = simplex.size() - 1;
    RVector centroid = RVector::Zero(n);
    for (std::size_t i = 0; i < worst; ++i) centroid += simplex[i];
    centroid /= static_cast<double>(n);

    const RVector reflected = centroid + (centroid - simplex[worst]);
    const double f_reflected = eval(reflected);
    if (f_reflected > values[0]) {
      const RVector expanded = centroid + 2.0 * (centroid - simplex[worst]);
      const double f_expanded = eval(expanded);
      if (f_expanded > f_reflected) {
        simplex[worst] = expanded;
        values[worst] = f_expanded;
      } else {
        simplex[worst] = reflected;
        values[worst] = f_reflected;
      }
    } else if (f_reflected > values[worst - 1]) {
      simplex[worst] = reflected;
      values[worst] = f_reflected;
    } else {
      const bool outside = f_reflected > values[worst];
      const RVector contracted = outside ? RVector(centroid + 0.5 * (reflected - centroid))
                                         : RVector(centroid + 0.5 * (simplex[worst] - centroid));
      const double f_contracted = eval(contracted);
      if (f_contracted > (outside ? f_reflected : values[worst])) {
        simplex[worst] = contracted;
        values[worst] = f_contracted;
      } else {
        for (std::size_t i = 1; i < simplex.size(); ++i) {
          simplex[i] = simplex[0] + 0.5 * (simplex[i] - simplex[0]);
          values[i] = eval(simplex[i]);
        }
      }
    }
    sort_simplex();
  }
  result.x = simplex[0].cwiseProduct(scales);
  result.value = values[0];
  return result;
}

DelayDoppler peak_pick(const AmbiguitySurface& surface) {
  double best = kWorst;
  Eigen::Index bi = -1;
  Eigen::Index bj = -1;
  for (Eigen::Index i = 0; i < surface.values.rows(); ++i)
    for (Eigen::Index j = 0; j < surface.values.cols(); ++j) {
      const double v = surface.values(i, j);
      if (std::isnan(v)) continue;
      // Strict comparison keeps the first (smallest tau, then omega) of equal maxima on ascending grids.
      if (bi < 0 || v > best) {
        best = v;
        bi = i;
        bj = j;
      }
    }
  if (bi < 0) throw Error("peak_pick: surface has no valid points");
  return {surface.tau_grid[bi], surface.omega_grid[bj]};
}

NodeEstimate refine(const NodeSpectrum& spectrum, const DelayDoppler& init, const NelderMeadOptions& options) {
  const BatchLayout& layout = spectrum.layout();
  RVector scales(2);
  scales << layout.dt, kTwoPi / (static_cast<double>(layout.samples) * layout.dt);
  RVector x0(2);
  x0 << init.tau, init.omega;
  const auto objective = [&](const RVector& x) {
    const auto v = spectrum.value(x[0], x[1]);
    return v ? *v : kWorst;
  };
  const auto r = nelder_mead_maximize(objective, x0, scales, options);
  return {{r.x[0], r.x[1]}, r.value, r.iterations, r.converged};
}

GlobalObjective::GlobalObjective(const std::vector<NodeSpectrum>& spectra, std::vector<NodeGeometry> nodes,
                                 std::vector<double> weights)
    : spectra_(spectra), nodes_(std::move(nodes)), weights_(std::move(weights)) {
  if (weights_.empty()) weights_.assign(nodes_.size(), 1.0);
  if (spectra_.size() != nodes_.size() || weights_.size() != nodes_.size())
    throw Error("global objective: node, spectrum and weight counts differ");
}

double GlobalObjective::operator()(const TargetParams& theta) const {
  std::vector<DelayDoppler> dd;
  try {
    dd = theta_to_delay_doppler(theta, nodes_);
  } catch (const GeometryError&) {
    return kWorst;
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    if (weights_[k] == 0.0) continue;
    if (const auto v = spectra_[k].value(dd[k].tau, dd[k].omega)) sum += weights_[k] * *v;
  }
  return sum;
}

TargetParams init_from_peaks(std::span<const DelayDoppler> peaks, std::span<const NodeGeometry> nodes,
                             const SearchBox& box, double tau_cell, double omega_cell) {
  if (!(tau_cell > 0.0) || !(omega_cell > 0.0)) throw Error("init_from_peaks: resolution cells must be positive");
  if (peaks.size() != nodes.size() || nodes.empty()) throw Error("init_from_peaks: peak and node counts differ");
  double best_cost = std::numeric_limits<double>::infinity();
  TargetParams best;
  const auto nx = static_cast<std::size_t>(std::floor((box.x_max - box.x_min) / box.step)) + 1;
  const auto ny = static_cast<std::size_t>(std::floor((box.y_max - box.y_min) / box.step)) + 1;
  for (std::size_t ix = 0; ix < nx; ++ix) {
    for (std::size_t iy = 0; iy < ny; ++iy) {
      const Position2D u{box.x_min + static_cast<double>(ix) * box.step, box.y_min + static_cast<double>(iy) * box.step};
      // omega_k is linear in the velocity: omega_k = -(w_c / c) (e_k + e)^T v.
      Eigen::MatrixXd a(static_cast<Eigen::Index>(nodes.size()), 2);
      RVector rhs(static_cast<Eigen::Index>(nodes.size()));
      double tau_cost = 0.0;
      bool ok = true;
      for (std::size_t k = 0; k < nodes.size(); ++k) {
        const auto& g = nodes[k];
        const double r_io = std::hypot(u.x - g.io.x, u.y - g.io.y);
        const double r_rn = std::hypot(u.x - g.rn.x, u.y - g.rn.y);
        if (r_io < 1e-6 || r_rn < 1e-6) {
          ok = false;
          break;
        }
        const double scale = g.carrier_angular_frequency / g.propagation_speed;
        const auto kk = static_cast<Eigen::Index>(k);
        a(kk, 0) = -scale * ((u.x - g.io.x) / r_io + (u.x - g.rn.x) / r_rn);
        a(kk, 1) = -scale * ((u.y - g.io.y) / r_io + (u.y - g.rn.y) / r_rn);
        rhs[kk] = peaks[k].omega;
        tau_cost += std::pow((bistatic_delay(u, g) - peaks[k].tau) / tau_cell, 2);
      }
      if (!ok) continue;
      const Eigen::Vector2d v = a.colPivHouseholderQr().solve(rhs);
      const double omega_cost = (a * v - rhs).squaredNorm();
      // Both residuals in resolution cells.
      const double cost = tau_cost + omega_cost / (omega_cell * omega_cell);
      if (cost < best_cost) {
        best_cost = cost;
        best = {u.x, u.y, v[0], v[1]};
      }
    }
  }
  if (!std::isfinite(best_cost)) throw Error("init_from_peaks: search box contains no valid position");
  return best;
}

namespace {

DelayDoppler grid_peak(const NodeSpectrum& spectrum, double omega_window) {
  // Symmetric about zero so the grid always holds omega = 0.
  const double step = doppler_cell(spectrum.layout()) / 4.0;
  const double half = std::floor(omega_window / step + 1e-9) * step;
  const SpectrumGrid grid = default_grid(spectrum.layout(), -half, half);
  return peak_pick(spectrum_grid(spectrum, grid.tau, grid.omega));
}

}  // namespace

EstimateReport localize(const Scene& scene, const std::vector<NodeRecord>& records, const EstimatorOptions& options) {
  const Scenario& sc = scene.scenario();
  if (records.size() != sc.node_count()) throw Error("localize: one record per node is required");
  std::vector<NodeSpectrum> spectra;
  spectra.reserve(records.size());
  for (std::size_t k = 0; k < records.size(); ++k) spectra.emplace_back(records[k], layout_for(sc, k));

  EstimateReport report;
  report.init = options.init;
  report.mode = sc.mode;

  if (sc.mode == EstimationMode::DelayDoppler) {
    if (sc.node_count() != 1) throw ConfigError("delay_doppler mode requires exactly one node");
    const DelayDoppler init =
        options.init == InitMode::OracleTruth ? scene.truth().front() : grid_peak(spectra.front(), options.omega_window);
    const auto v0 = spectra.front().value(init.tau, init.omega);
    report.init_objective = v0 ? *v0 : 0.0;
    const NodeEstimate est = refine(spectra.front(), init, options.nelder_mead);
    report.per_node = {est.estimate};
    report.objective = est.value;
    report.iterations = est.iterations;
    report.converged = est.converged;
    return report;
  }

  const GlobalObjective objective(spectra, sc.nodes, sc.weights);
  TargetParams init = sc.target;
  // Metres for position. Velocity gets the same fraction of its resolution cell as a metre is of the
  // c*dt delay-path cell; plain m/s leaves the simplex orders of magnitude too small in velocity.
  const BatchLayout lay = spectra.front().layout();
  const NodeGeometry& g = sc.nodes.front();
  const double v_per_m = doppler_cell(lay) / g.carrier_angular_frequency / lay.dt;
  const RVector scales = Eigen::Vector4d(1.0, 1.0, v_per_m, v_per_m);
  if (options.init == InitMode::PerNodePeaks) {
    std::vector<DelayDoppler> peaks;
    for (const auto& s : spectra) peaks.push_back(grid_peak(s, options.omega_window));
    init = init_from_peaks(peaks, sc.nodes, options.box, lay.dt, doppler_cell(lay));
  }
  report.init_objective = objective(init);
  const auto r = nelder_mead_maximize([&](const RVector& x) { return objective(TargetParams::from_vector(x)); },
                                      init.as_vector(), scales, options.nelder_mead);
  report.theta = TargetParams::from_vector(r.x);
  report.per_node = theta_to_delay_doppler(report.theta, sc.nodes);
  report.objective = r.value;
  report.iterations = r.iterations;
  report.converged = r.converged;
  return report;
}

}  // namespace ecalab
