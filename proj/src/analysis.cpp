#include "ecalab/analysis.hpp"

#include <cmath>
#include <limits>

#include "ecalab/error.hpp"
#include "ecalab/waveform.hpp"

namespace ecalab {

namespace {

constexpr double kDegenerate = 1e-8;

CMatrix interference_columns(const MasterWaveform& wf, const TimeGrid& grid, std::size_t taps) {
  CMatrix s(static_cast<Eigen::Index>(grid.count), static_cast<Eigen::Index>(taps + 1));
  for (std::size_t l = 0; l <= taps; ++l)
    s.col(static_cast<Eigen::Index>(l)) = wf.lattice_delayed(grid, static_cast<double>(l) * grid.dt, 0);
  return s;
}

bool unit_weights(const Scenario& sc) {
  for (double w : sc.weights)
    if (w != 1.0) return false;
  return true;
}

double weight(const Scenario& sc, std::size_t k) { return sc.weights.empty() ? 1.0 : sc.weights[k]; }

}  // namespace

CMatrix ptilde_apply(const CMatrix& interference, const CVector& steering, const CMatrix& vectors) {
  const InterferenceBasis basis(interference);
  const CVector b = basis.project_out(steering);
  const double bb = b.squaredNorm();
  if (!(bb >= kDegenerate * steering.squaredNorm()) || bb == 0.0)
    throw DegenerateSteeringError("true steering vector lies inside the interference span");
  const CMatrix pv = basis.project_out(vectors);
  return pv - b * (b.adjoint() * pv) / bb;
}

BandedZJ::BandedZJ(cplx b, const CVector& c, cplx d, double omega, const TimeGrid& grid) : grid_(grid) {
  if (grid.stride <= 0) throw Error("banded ZJ needs an increasing time grid");
  const auto taps = static_cast<std::size_t>(c.size());
  bands_.resize(static_cast<Eigen::Index>(grid.count), static_cast<Eigen::Index>(taps + 1));
  for (std::size_t q = 0; q < grid.count; ++q) {
    const auto qi = static_cast<Eigen::Index>(q);
    bands_(qi, 0) = b + d * std::polar(1.0, omega * grid.time(q));
    for (std::size_t l = 1; l <= taps; ++l) bands_(qi, static_cast<Eigen::Index>(l)) = c[static_cast<Eigen::Index>(l - 1)];
  }
  noise_first_ = grid.first - static_cast<std::ptrdiff_t>(taps);
  cols_ = grid.count == 0 ? 0 : static_cast<std::size_t>(grid.last_index() - noise_first_ + 1);
}

std::size_t BandedZJ::column_of(std::size_t q, std::size_t l) const {
  return static_cast<std::size_t>(grid_.index(q) - static_cast<std::ptrdiff_t>(l) - noise_first_);
}

CVector BandedZJ::apply(const CVector& noise) const {
  if (static_cast<std::size_t>(noise.size()) != cols_) throw Error("banded ZJ: noise length mismatch");
  CVector out = CVector::Zero(static_cast<Eigen::Index>(rows()));
  for (std::size_t q = 0; q < rows(); ++q)
    for (std::size_t l = 0; l <= taps(); ++l)
      out[static_cast<Eigen::Index>(q)] += band(q, l) * noise[static_cast<Eigen::Index>(column_of(q, l))];
  return out;
}

CMatrix BandedZJ::adjoint_apply(const CMatrix& g) const {
  if (static_cast<std::size_t>(g.rows()) != rows()) throw Error("banded ZJ: row count mismatch");
  CMatrix w = CMatrix::Zero(static_cast<Eigen::Index>(cols_), g.cols());
  for (std::size_t q = 0; q < rows(); ++q)
    for (std::size_t l = 0; l <= taps(); ++l)
      w.row(static_cast<Eigen::Index>(column_of(q, l))) += std::conj(band(q, l)) * g.row(static_cast<Eigen::Index>(q));
  return w;
}

CMatrix BandedZJ::dense() const {
  CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(rows()), static_cast<Eigen::Index>(cols_));
  for (std::size_t q = 0; q < rows(); ++q)
    for (std::size_t l = 0; l <= taps(); ++l)
      m(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(column_of(q, l))) += band(q, l);
  return m;
}

BandedZJ build_banded_zj(cplx b, const CVector& c, cplx d, double omega, const TimeGrid& grid) {
  return BandedZJ(b, c, d, omega, grid);
}

std::vector<TimeGrid> batch_grids(const BatchLayout& layout) {
  if (layout.count == 0 || layout.samples % layout.count != 0) throw ConfigError("batch count must divide the record length");
  const std::size_t q_len = layout.samples / layout.count;
  std::vector<TimeGrid> grids;
  for (std::size_t m = 0; m < layout.count; ++m) {
    if (layout.count == 1 || layout.mode == BatchMode::Consecutive)
      grids.push_back({static_cast<std::ptrdiff_t>(m * q_len), 1, q_len, layout.dt});
    else
      grids.push_back({static_cast<std::ptrdiff_t>(m), static_cast<std::ptrdiff_t>(layout.count), q_len, layout.dt});
  }
  return grids;
}

BatchTheory batch_theory(const Scene& scene, std::size_t node, const TimeGrid& grid) {
  const Scenario& sc = scene.scenario();
  const MasterWaveform& wf = scene.waveform();
  const DelayDoppler truth = scene.truth().at(node);
  const NodeAmplitudes& amp = sc.amplitudes.at(node);

  SteeringRequest req = sc.steering_request(truth, grid);
  req.carrier = sc.carrier(node);
  const CVector a = steering(wf, req);
  BatchTheory t;
  if (sc.mode == EstimationMode::DelayDoppler)
    t.d = steering_jacobian(wf, req);
  else
    t.d = steering_jacobian(wf, req, delay_doppler_jacobian(sc.target, sc.nodes.at(node)));
  t.g = ptilde_apply(interference_columns(wf, grid, sc.clutter_taps), a, t.d);
  t.h = 2.0 * std::norm(amp.d) * (t.g.adjoint() * t.g).real();

  const auto p = t.d.cols();
  if (sc.noise.sigma_n2 == 0.0) {
    t.q = RMatrix::Zero(p, p);
  } else {
    if (std::norm(amp.a) == 0.0) throw ConfigError("node " + std::to_string(node) + ": reference amplitude is zero");
    const BandedZJ zj(amp.b, amp.c, amp.d, truth.omega, grid);
    const CMatrix w = zj.adjoint_apply(t.g);
    t.q = 2.0 * sc.noise.sigma_n2 * std::norm(amp.d) / std::norm(amp.a) * (w.adjoint() * w).real();
  }
  return t;
}

std::vector<std::string> parameter_labels(EstimationMode mode) {
  if (mode == EstimationMode::DelayDoppler) return {"tau_s", "omega_rad_s"};
  return {"x_m", "y_m", "vx_m_s", "vy_m_s"};
}

RVector parameter_scales(const Scenario& scenario) {
  if (scenario.mode == EstimationMode::DelayDoppler) {
    RVector s(2);
    s << scenario.dt(), kTwoPi / (static_cast<double>(scenario.samples) * scenario.dt());
    return s;
  }
  return RVector::Ones(4);
}

RMatrix spd_inverse(const RMatrix& m, const RVector& scales) {
  const RMatrix scaled = scales.asDiagonal() * m * scales.asDiagonal();
  const RMatrix sym = 0.5 * (scaled + scaled.transpose());
  Eigen::LLT<RMatrix> llt(sym);
  if (llt.info() != Eigen::Success) throw SingularMatrixError("Hessian is singular or indefinite (unidentifiable configuration)");
  const RMatrix inv = llt.solve(RMatrix::Identity(m.rows(), m.cols()));
  const RMatrix out = scales.asDiagonal() * inv * scales.asDiagonal();
  return 0.5 * (out + out.transpose());
}

namespace {

struct Sums {
  RMatrix h;   // sum w H
  RMatrix hw;  // sum w^2 H
  RMatrix q;   // sum w^2 Q
};

Sums accumulate(const Scene& scene, bool with_q) {
  const Scenario& sc = scene.scenario();
  if (sc.mode == EstimationMode::DelayDoppler && sc.node_count() != 1)
    throw ConfigError("delay_doppler mode requires exactly one node");
  const Eigen::Index p = sc.mode == EstimationMode::DelayDoppler ? 2 : 4;
  Sums s{RMatrix::Zero(p, p), RMatrix::Zero(p, p), RMatrix::Zero(p, p)};
  for (std::size_t k = 0; k < sc.node_count(); ++k) {
    const double w = weight(sc, k);
    if (w == 0.0) continue;
    for (const TimeGrid& grid : batch_grids(layout_for(sc, k))) {
      const BatchTheory t = batch_theory(scene, k, grid);
      s.h += w * t.h;
      s.hw += w * w * t.h;
      if (with_q) s.q += w * w * t.q;
    }
  }
  return s;
}

}  // namespace

std::pair<RMatrix, RMatrix> hessian_and_crb(const Scene& scene) {
  const Sums s = accumulate(scene, false);
  const RMatrix hinv = spd_inverse(s.h, parameter_scales(scene.scenario()));
  return {s.h, scene.scenario().noise.sigma_e2 * hinv};
}

RMatrix excess_q(const Scene& scene) { return accumulate(scene, true).q; }

TheoryReport asymptotic_covariance(const Scene& scene) {
  const Scenario& sc = scene.scenario();
  const Sums s = accumulate(scene, true);
  TheoryReport r;
  r.mode = sc.mode;
  r.labels = parameter_labels(sc.mode);
  r.scales = parameter_scales(sc);
  r.h = s.h;
  r.q = s.q;
  const RMatrix hinv = spd_inverse(s.h, r.scales);
  r.crb = sc.noise.sigma_e2 * hinv;
  r.excess = hinv * s.q * hinv;
  r.excess = 0.5 * (r.excess + r.excess.transpose());
  if (unit_weights(sc)) {
    r.asymptotic = r.crb + r.excess;
  } else {
    r.asymptotic = hinv * (sc.noise.sigma_e2 * s.hw + s.q) * hinv;
    r.asymptotic = 0.5 * (r.asymptotic + r.asymptotic.transpose());
  }
  r.margin_db = efficiency_margin(sc);
  r.frame_caveat = sc.batching.count > 1;
  return r;
}

double efficiency_margin(const NodeAmplitudes& amp, const NoiseSpec& noise, std::size_t clutter_taps) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (noise.sigma_n2 == 0.0) return -inf;
  if (noise.sigma_e2 == 0.0 || std::norm(amp.a) == 0.0) return inf;
  const double interference =
      static_cast<double>(clutter_taps + 1) * (std::norm(amp.b) + std::norm(amp.d) + amp.c.squaredNorm()) / noise.sigma_e2;
  const double rc_snr = std::norm(amp.a) / noise.sigma_n2;
  return 10.0 * std::log10(interference) - 10.0 * std::log10(rc_snr);
}

std::vector<double> efficiency_margin(const Scenario& scenario) {
  std::vector<double> out;
  for (const auto& amp : scenario.amplitudes) out.push_back(efficiency_margin(amp, scenario.noise, scenario.clutter_taps));
  return out;
}

double unambiguity_scan(const MasterWaveform& wf, const TimeGrid& grid, const DelayDoppler& truth,
                        const RVector& tau_grid, const RVector& omega_grid, double tau_exclusion,
                        double omega_exclusion) {
  const CVector a0 = wf.lattice_delayed(grid, truth.tau, 0).cwiseProduct(dft_vector(truth.omega, grid));
  const double n0 = a0.norm();
  double best = 0.0;
  for (Eigen::Index i = 0; i < tau_grid.size(); ++i) {
    const double tau = tau_grid[i];
    const bool tau_near = std::abs(tau - truth.tau) < tau_exclusion;
    bool any = false;
    for (Eigen::Index j = 0; j < omega_grid.size() && !any; ++j)
      any = !(tau_near && std::abs(omega_grid[j] - truth.omega) < omega_exclusion);
    if (!any) continue;
    const CVector s = wf.lattice_delayed(grid, tau, 0);
    const double ns = s.norm();
    const CVector cross = a0.conjugate().cwiseProduct(s);
    for (Eigen::Index j = 0; j < omega_grid.size(); ++j) {
      const double omega = omega_grid[j];
      if (tau_near && std::abs(omega - truth.omega) < omega_exclusion) continue;
      const cplx inner = cross.dot(dft_vector(-omega, grid));
      best = std::max(best, std::abs(inner) / (n0 * ns));
    }
  }
  return best;
}

double chi2_quantile_2dof(double level) {
  if (!(level > 0.0 && level < 1.0)) throw Error("confidence level must lie in (0, 1)");
  return -2.0 * std::log1p(-level);
}

Ellipse confidence_ellipse(const Eigen::Matrix2d& cov, double level) {
  if (!cov.allFinite() || std::abs(cov(0, 1) - cov(1, 0)) > 1e-12 * cov.cwiseAbs().maxCoeff())
    throw Error("confidence ellipse needs a finite symmetric covariance");
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(cov);
  const Eigen::Vector2d lambda = eig.eigenvalues();
  if (lambda[0] < -1e-12 * std::max(1.0, std::abs(lambda[1]))) throw Error("confidence ellipse needs a PSD covariance");
  const double k = chi2_quantile_2dof(level);
  Ellipse e;
  e.semi_major = std::sqrt(k * std::max(0.0, lambda[1]));
  e.semi_minor = std::sqrt(k * std::max(0.0, lambda[0]));
  const Eigen::Vector2d major = eig.eigenvectors().col(1);
  double angle = std::atan2(major.y(), major.x());
  if (angle <= -kPi / 2) angle += kPi;
  if (angle > kPi / 2) angle -= kPi;
  e.orientation = angle;
  return e;
}

}  // namespace ecalab
