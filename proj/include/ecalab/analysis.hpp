#pragma once

#include <string>
#include <vector>

#include "ecalab/eca.hpp"
#include "ecalab/scene.hpp"

namespace ecalab {

/// P~ V = Pi V - b (b^H Pi V) / |b|^2 with Pi the projector off span(S_I) and b = Pi a.
CMatrix ptilde_apply(const CMatrix& interference, const CVector& steering, const CMatrix& vectors);

/// Z J as a band: row q couples to reference-noise sample g_q - l with weight zeta_{q,l},
/// zeta_{q,0} = b + d exp(j omega t_q), zeta_{q,l} = c_l. Noise samples are indexed from
/// g_min - L upwards.
class BandedZJ {
 public:
  BandedZJ(cplx b, const CVector& c, cplx d, double omega, const TimeGrid& grid);

  std::size_t rows() const { return grid_.count; }
  std::size_t cols() const { return cols_; }
  std::size_t taps() const { return static_cast<std::size_t>(bands_.cols()) - 1; }
  std::ptrdiff_t noise_first() const { return noise_first_; }
  cplx band(std::size_t q, std::size_t l) const { return bands_(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(l)); }
  std::size_t column_of(std::size_t q, std::size_t l) const;

  CVector apply(const CVector& noise) const;
  /// (Z J)^H G.
  CMatrix adjoint_apply(const CMatrix& g) const;
  CMatrix dense() const;

 private:
  TimeGrid grid_;
  CMatrix bands_;
  std::ptrdiff_t noise_first_ = 0;
  std::size_t cols_ = 0;
};

BandedZJ build_banded_zj(cplx b, const CVector& c, cplx d, double omega, const TimeGrid& grid);

/// Batch grids of a layout (same partition as batch_split).
std::vector<TimeGrid> batch_grids(const BatchLayout& layout);

/// Per-node, per-batch pieces of the theory, in the scenario's estimation mode.
struct BatchTheory {
  CMatrix d;       // steering Jacobian
  CMatrix g;       // P~ D
  RMatrix h;       // 2 |d|^2 Re{G^H G}
  RMatrix q;       // 2 sigma_n^2 |d|^2 / |a|^2 Re{W^H W}, W = (Z J)^H G
};

BatchTheory batch_theory(const Scene& scene, std::size_t node, const TimeGrid& grid);

struct TheoryReport {
  EstimationMode mode = EstimationMode::Theta;
  RMatrix h;
  RMatrix crb;
  RMatrix q;
  RMatrix excess;      // H^-1 Q H^-1
  RMatrix asymptotic;  // CRB + excess (weighted sandwich when weights differ from one)
  std::vector<double> margin_db;
  bool frame_caveat = false;  // several batches: the CRB label is nominal
  std::vector<std::string> labels;
  RVector scales;  // parameter scales used for the inversion
};

std::vector<std::string> parameter_labels(EstimationMode mode);
RVector parameter_scales(const Scenario& scenario);

/// Inverse of a symmetric positive-definite matrix in scaled coordinates.
RMatrix spd_inverse(const RMatrix& m, const RVector& scales);

std::pair<RMatrix, RMatrix> hessian_and_crb(const Scene& scene);
RMatrix excess_q(const Scene& scene);
TheoryReport asymptotic_covariance(const Scene& scene);

/// 10 log10[(L+1)(|b|^2+|d|^2+|c|^2)/sigma_e^2] - 10 log10[|a|^2/sigma_n^2] per node.
std::vector<double> efficiency_margin(const Scenario& scenario);
double efficiency_margin(const NodeAmplitudes& amp, const NoiseSpec& noise, std::size_t clutter_taps);

/// Max normalized |a(tau0,omega0)^H a(tau,omega)| over the grid outside the open exclusion box (zero radii exclude nothing).
double unambiguity_scan(const MasterWaveform& wf, const TimeGrid& grid, const DelayDoppler& truth,
                        const RVector& tau_grid, const RVector& omega_grid, double tau_exclusion,
                        double omega_exclusion);

struct Ellipse {
  double semi_major = 0.0;
  double semi_minor = 0.0;
  double orientation = 0.0;  // rad, major axis from +x
};

double chi2_quantile_2dof(double level);
Ellipse confidence_ellipse(const Eigen::Matrix2d& cov, double level);

}  // namespace ecalab
