#pragma once

#include <functional>
#include <vector>

#include "ecalab/eca.hpp"
#include "ecalab/geometry.hpp"
#include "ecalab/scene.hpp"

namespace ecalab {

struct NelderMeadOptions {
  double initial_step = 0.1;    // scaled units
  double x_tolerance = 1e-8;    // scaled simplex diameter
  double f_tolerance = 1e-15;   // relative spread of vertex values
  std::size_t max_iterations = 400;
};

struct NelderMeadResult {
  RVector x;
  double value = 0.0;
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
  bool converged = false;
};

/// Maximizes f with a Nelder-Mead simplex in coordinates x / scales. Non-finite values count
/// as worse than any finite value.
NelderMeadResult nelder_mead_maximize(const std::function<double(const RVector&)>& f, const RVector& x0,
                                      const RVector& scales, const NelderMeadOptions& options = {});

enum class InitMode { OracleTruth, PerNodePeaks };

struct SearchBox {
  double x_min = -500.0;
  double x_max = 500.0;
  double y_min = -500.0;
  double y_max = 500.0;
  double step = 5.0;  // m
};

struct EstimatorOptions {
  InitMode init = InitMode::OracleTruth;
  NelderMeadOptions nelder_mead;
  SearchBox box;
  /// Doppler half-window searched by the grid stage (rad/s).
  double omega_window = 5000.0;
};

/// Argmax over the grid ignoring missing points; ties go to the smaller tau, then smaller omega.
DelayDoppler peak_pick(const AmbiguitySurface& surface);

struct NodeEstimate {
  DelayDoppler estimate;
  double value = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Nelder-Mead refinement of one node's spectrum, tau scaled by dt and omega by 2 pi / (N dt).
NodeEstimate refine(const NodeSpectrum& spectrum, const DelayDoppler& init, const NelderMeadOptions& options = {});

/// sum_k w_k P_k(tau_k(theta), omega_k(theta)); nodes whose mapped point is unavailable add zero.
class GlobalObjective {
 public:
  GlobalObjective(const std::vector<NodeSpectrum>& spectra, std::vector<NodeGeometry> nodes,
                  std::vector<double> weights);

  double operator()(const TargetParams& theta) const;

 private:
  const std::vector<NodeSpectrum>& spectra_;
  std::vector<NodeGeometry> nodes_;
  std::vector<double> weights_;
};

struct EstimateReport {
  std::vector<DelayDoppler> per_node;
  TargetParams theta;
  double objective = 0.0;
  double init_objective = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  InitMode init = InitMode::OracleTruth;
  EstimationMode mode = EstimationMode::Theta;
};

/// Coarse position grid with a least-squares velocity fit to per-node (tau, omega) peaks.
/// Residuals are weighed in resolution cells (delay cell tau_cell, Doppler cell omega_cell).
TargetParams init_from_peaks(std::span<const DelayDoppler> peaks, std::span<const NodeGeometry> nodes,
                             const SearchBox& box, double tau_cell, double omega_cell);

/// Central-node estimate from one trial's records.
EstimateReport localize(const Scene& scene, const std::vector<NodeRecord>& records, const EstimatorOptions& options);

}  // namespace ecalab
