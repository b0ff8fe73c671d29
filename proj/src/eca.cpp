#include "ecalab/eca.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "ecalab/error.hpp"

namespace ecalab {

namespace {

constexpr double kRankTolerance = 1e-10;
constexpr double kDegenerateSteering = 1e-8;
constexpr double kOnLattice = 1e-9;
constexpr int kTaps = 2 * kInterpolationHalfWidth;

using KernelWeights = std::array<double, kTaps>;

// Weights for reading x at fractional index floor(c) + (1 - frac): taps j = -15..16 relative
// to floor(c) sit at offsets 1 - frac - j.
KernelWeights kernel_for_fraction(double frac) {
  KernelWeights w{};
  for (int j = 0; j < kTaps; ++j) w[static_cast<std::size_t>(j)] = kaiser_sinc(1.0 - frac - (j - (kInterpolationHalfWidth - 1)));
  return w;
}

cplx interpolate_at(const Batch& batch, std::ptrdiff_t base, const KernelWeights& w) {
  cplx acc{};
  for (int j = 0; j < kTaps; ++j)
    acc += w[static_cast<std::size_t>(j)] * batch.reference_at(base + j - (kInterpolationHalfWidth - 1));
  return acc;
}

}  // namespace

double BatchLayout::max_supported_delay() const {
  return (static_cast<double>(max_delay) - kInterpolationHalfWidth) * dt;
}

BatchLayout layout_for(const Scenario& scenario, std::size_t node) {
  BatchLayout layout;
  layout.samples = scenario.samples;
  layout.max_delay = scenario.max_delay;
  layout.clutter_taps = scenario.clutter_taps;
  layout.dt = scenario.dt();
  layout.count = scenario.batching.count;
  layout.mode = scenario.batching.mode;
  layout.migration = scenario.migration;
  layout.carrier = scenario.carrier(node);
  return layout;
}

cplx Batch::reference_at(std::ptrdiff_t i) const {
  const std::ptrdiff_t j = i - ref_first;
  if (j < 0 || j >= reference.size()) return {};
  return reference[j];
}

std::vector<Batch> batch_split(const NodeRecord& record, const BatchLayout& layout) {
  const std::size_t n = layout.samples;
  const std::size_t m_delay = layout.max_delay;
  if (static_cast<std::size_t>(record.surveillance.size()) != n ||
      static_cast<std::size_t>(record.reference.size()) != n + m_delay)
    throw ConfigError("record lengths do not match the batch layout");
  if (layout.count == 0 || n % layout.count != 0) throw ConfigError("batch count must divide the record length");
  const std::size_t q_len = n / layout.count;
  const auto md = static_cast<std::ptrdiff_t>(m_delay);

  std::vector<Batch> out;
  for (std::size_t m = 0; m < layout.count; ++m) {
    Batch b;
    b.layout = layout;
    if (layout.count == 1 || layout.mode == BatchMode::Consecutive) {
      const auto first = static_cast<std::ptrdiff_t>(m * q_len);
      b.grid = TimeGrid{first, 1, q_len, layout.dt};
      b.surveillance = record.surveillance.segment(first, static_cast<Eigen::Index>(q_len));
      // Up to half a kernel of trailing samples so interpolation near the batch end sees real data.
      const std::ptrdiff_t last =
          std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(n) - 1,
                                   first + static_cast<std::ptrdiff_t>(q_len) - 1 + kInterpolationHalfWidth);
      b.ref_first = first - md;
      b.reference = record.reference.segment(b.ref_first + md, last - b.ref_first + 1);
    } else {
      b.grid = TimeGrid{static_cast<std::ptrdiff_t>(m), static_cast<std::ptrdiff_t>(layout.count), q_len, layout.dt};
      b.surveillance.resize(static_cast<Eigen::Index>(q_len));
      for (std::size_t q = 0; q < q_len; ++q) b.surveillance[static_cast<Eigen::Index>(q)] = record.surveillance[b.grid.index(q)];
      b.ref_first = -md;
      b.reference = record.reference;
    }
    out.push_back(std::move(b));
  }
  return out;
}

double kaiser_sinc(double u) {
  const double half = kInterpolationHalfWidth;
  if (std::abs(u) > half) return 0.0;
  const double r = u / half;
  const double window = std::cyl_bessel_i(0.0, kInterpolationBeta * std::sqrt(std::max(0.0, 1.0 - r * r))) /
                        std::cyl_bessel_i(0.0, kInterpolationBeta);
  const double sinc = u == 0.0 ? 1.0 : std::sin(kPi * u) / (kPi * u);
  return sinc * window;
}

InterferenceBasis::InterferenceBasis(CMatrix columns) : columns_(std::move(columns)) {
  const Eigen::Index rows = columns_.rows();
  const Eigen::Index cols = columns_.cols();
  if (cols > rows) throw RankDeficiencyError("interference basis has more columns than samples");
  const double scale = cols > 0 ? columns_.colwise().norm().maxCoeff() : 0.0;
  Eigen::HouseholderQR<CMatrix> qr(columns_);
  for (Eigen::Index i = 0; i < cols; ++i)
    if (!(std::abs(qr.matrixQR()(i, i)) > kRankTolerance * scale))
      throw RankDeficiencyError("interference basis is rank deficient (column " + std::to_string(i) + ")");
  q_ = qr.householderQ() * CMatrix::Identity(rows, cols);
}

InterferenceBasis InterferenceBasis::from_batch(const Batch& batch) {
  const std::size_t taps = batch.layout.clutter_taps;
  CMatrix cols(static_cast<Eigen::Index>(batch.grid.count), static_cast<Eigen::Index>(taps + 1));
  for (std::size_t q = 0; q < batch.grid.count; ++q)
    for (std::size_t l = 0; l <= taps; ++l)
      cols(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(l)) =
          batch.reference_at(batch.grid.index(q) - static_cast<std::ptrdiff_t>(l));
  return InterferenceBasis(std::move(cols));
}

CVector InterferenceBasis::project_out(const CVector& v) const { return v - q_ * (q_.adjoint() * v); }

CMatrix InterferenceBasis::project_out(const CMatrix& v) const { return v - q_ * (q_.adjoint() * v); }

CVector rc_steering(const Batch& batch, double tau, double omega) {
  const BatchLayout& layout = batch.layout;
  const double slack = 1e-9 * layout.dt;
  if (!std::isfinite(tau) || tau < -slack || tau > layout.max_supported_delay() + slack)
    throw RangeError("delay " + std::to_string(tau / layout.dt) + " samples is outside the supported range [0, " +
                     std::to_string(layout.max_supported_delay() / layout.dt) + "]");
  const TimeGrid& grid = batch.grid;
  CVector out(static_cast<Eigen::Index>(grid.count));

  const bool migrating = layout.migration == Migration::Migrating && omega != 0.0;
  if (!migrating) {
    const double shift = tau / layout.dt;
    const double rounded = std::round(shift);
    if (std::abs(shift - rounded) < kOnLattice) {
      const auto m = static_cast<std::ptrdiff_t>(rounded);
      for (std::size_t q = 0; q < grid.count; ++q) out[static_cast<Eigen::Index>(q)] = batch.reference_at(grid.index(q) - m);
    } else {
      const double whole = std::floor(shift);
      const auto m = static_cast<std::ptrdiff_t>(whole);
      const KernelWeights w = kernel_for_fraction(shift - whole);
      for (std::size_t q = 0; q < grid.count; ++q)
        out[static_cast<Eigen::Index>(q)] = interpolate_at(batch, grid.index(q) - m - 1, w);
    }
  } else {
    const double slope = omega / layout.carrier;
    for (std::size_t q = 0; q < grid.count; ++q) {
      const double g = static_cast<double>(grid.index(q));
      const double c = g - tau / layout.dt + slope * g;
      const double base = std::floor(c);
      const auto bi = static_cast<std::ptrdiff_t>(base);
      if (bi - (kInterpolationHalfWidth - 1) < batch.ref_first)
        throw RangeError("migrating steering reads before the start of the reference record");
      const double frac = c - base;
      if (frac < kOnLattice) {
        out[static_cast<Eigen::Index>(q)] = batch.reference_at(bi);
      } else {
        out[static_cast<Eigen::Index>(q)] = interpolate_at(batch, bi, kernel_for_fraction(1.0 - frac));
      }
    }
  }
  if (omega != 0.0) out = out.cwiseProduct(dft_vector(omega, grid));
  return out;
}

std::optional<double> spectrum_value_projected(const CVector& y_projected, const InterferenceBasis& basis,
                                               const CVector& steering) {
  const CVector b = basis.project_out(steering);
  const double den = b.squaredNorm();
  if (!(den >= kDegenerateSteering * steering.squaredNorm()) || den == 0.0) return std::nullopt;
  return std::norm(b.dot(y_projected)) / den;
}

double spectrum_value(const CVector& y, const InterferenceBasis& basis, const CVector& steering) {
  const auto v = spectrum_value_projected(basis.project_out(y), basis, steering);
  if (!v) throw DegenerateSteeringError("steering vector lies inside the interference span");
  return *v;
}

BatchSpectrum::BatchSpectrum(Batch batch)
    : batch_(std::move(batch)), basis_(InterferenceBasis::from_batch(batch_)),
      y_projected_(basis_.project_out(batch_.surveillance)) {}

std::optional<double> BatchSpectrum::value(double tau, double omega) const {
  CVector a;
  try {
    a = rc_steering(batch_, tau, omega);
  } catch (const RangeError&) {
    return std::nullopt;
  }
  return spectrum_value_projected(y_projected_, basis_, a);
}

NodeSpectrum::NodeSpectrum(const NodeRecord& record, const BatchLayout& layout) : layout_(layout) {
  for (auto& b : batch_split(record, layout)) batches_.emplace_back(std::move(b));
}

std::optional<double> NodeSpectrum::value(double tau, double omega) const {
  double sum = 0.0;
  bool any = false;
  for (const auto& b : batches_) {
    if (const auto v = b.value(tau, omega)) {
      sum += *v;
      any = true;
    }
  }
  if (!any) return std::nullopt;
  return sum;
}

double frame_spectrum(const std::vector<BatchSpectrum>& batches, double tau, double omega) {
  double sum = 0.0;
  for (const auto& b : batches)
    if (const auto v = b.value(tau, omega)) sum += *v;
  return sum;
}

double doppler_cell(const BatchLayout& layout) {
  const std::size_t span = layout.mode == BatchMode::Sparse || layout.count == 1 ? layout.samples
                                                                                 : layout.samples / layout.count;
  return kTwoPi / (static_cast<double>(span) * layout.dt);
}

SpectrumGrid default_grid(const BatchLayout& layout, double omega_min, double omega_max) {
  SpectrumGrid g;
  const double tau_step = layout.dt / 4.0;
  const double tau_max = layout.max_supported_delay();
  const auto n_tau = tau_max >= 0.0 ? static_cast<Eigen::Index>(std::floor(tau_max / tau_step + 1e-9)) + 1 : 0;
  g.tau = RVector::LinSpaced(n_tau, 0.0, static_cast<double>(n_tau - 1) * tau_step);
  const double omega_step = doppler_cell(layout) / 4.0;
  const auto n_omega = static_cast<Eigen::Index>(std::floor((omega_max - omega_min) / omega_step + 1e-9)) + 1;
  g.omega = RVector::LinSpaced(n_omega, omega_min, omega_min + static_cast<double>(n_omega - 1) * omega_step);
  return g;
}

AmbiguitySurface spectrum_grid(const NodeSpectrum& spectrum, const RVector& tau_grid, const RVector& omega_grid,
                               std::size_t node) {
  AmbiguitySurface s;
  s.tau_grid = tau_grid;
  s.omega_grid = omega_grid;
  s.node = node;
  s.values.resize(tau_grid.size(), omega_grid.size());
  for (Eigen::Index i = 0; i < tau_grid.size(); ++i)
    for (Eigen::Index j = 0; j < omega_grid.size(); ++j) {
      const auto v = spectrum.value(tau_grid[i], omega_grid[j]);
      s.values(i, j) = v ? *v : std::numeric_limits<double>::quiet_NaN();
    }
  return s;
}

}  // namespace ecalab
