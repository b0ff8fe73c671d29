#include "ecalab/waveform.hpp"

#include <cmath>
#include <random>
#include <unsupported/Eigen/FFT>

#include "ecalab/csv.hpp"
#include "ecalab/error.hpp"

namespace ecalab {

namespace {

// Delays closer than this (in samples) to an integer are treated as lattice shifts.
constexpr double kLatticeTolerance = 1e-9;

std::ptrdiff_t wrap(std::ptrdiff_t i, std::size_t period) {
  const auto p = static_cast<std::ptrdiff_t>(period);
  const std::ptrdiff_t r = i % p;
  return r < 0 ? r + p : r;
}

std::ptrdiff_t folded_index(std::size_t p, std::size_t length) {
  return 2 * p < length ? static_cast<std::ptrdiff_t>(p)
                        : static_cast<std::ptrdiff_t>(p) - static_cast<std::ptrdiff_t>(length);
}

}  // namespace

void WaveformSpec::validate() const {
  if (!(sample_rate > 0.0)) throw ConfigError("waveform sample rate must be positive");
  if (!(bandwidth > 0.0) || bandwidth > sample_rate)
    throw ConfigError("waveform bandwidth must satisfy 0 < B <= Fs");
  if (master_length < 16) throw ConfigError("waveform master length must be at least 16");
}

CVector inverse_dft(const CVector& in) {
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::Unscaled);
  std::vector<cplx> src(in.data(), in.data() + in.size());
  std::vector<cplx> dst;
  fft.inv(dst, src);
  return Eigen::Map<const CVector>(dst.data(), static_cast<Eigen::Index>(dst.size()));
}

MasterWaveform::MasterWaveform(const WaveformSpec& spec, CVector bins) : spec_(spec), bins_(std::move(bins)) {
  spec_.validate();
  if (static_cast<std::size_t>(bins_.size()) != spec_.master_length)
    throw ConfigError("waveform bin vector length must equal the master length");
  const double scale = 1.0 / std::sqrt(static_cast<double>(length()));
  CVector weighted(bins_.size());
  for (Eigen::Index p = 0; p < bins_.size(); ++p)
    weighted[p] = bins_[p] * kJ * (kTwoPi * bin_frequency(static_cast<std::size_t>(p)));
  samples_ = inverse_dft(bins_) * scale;
  derivative_ = inverse_dft(weighted) * scale;
  window_lo_ = -0.25 * period();
  window_hi_ = 0.25 * period();
}

MasterWaveform MasterWaveform::generate(const WaveformSpec& spec) {
  spec.validate();
  const std::size_t n = spec.master_length;
  std::size_t in_band_count = 0;
  {
    const MasterWaveform probe(spec, CVector::Zero(static_cast<Eigen::Index>(n)));
    for (std::size_t p = 0; p < n; ++p) in_band_count += probe.in_band(p) ? 1 : 0;
  }
  if (in_band_count == 0) throw ConfigError("waveform bandwidth selects no frequency bins");

  // Bin variance P / n_in gives unit expected power in the time domain.
  const double bin_sigma = std::sqrt(static_cast<double>(n) / static_cast<double>(in_band_count) / 2.0);
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, bin_sigma);
  CVector bins = CVector::Zero(static_cast<Eigen::Index>(n));
  const MasterWaveform probe(spec, bins);
  for (std::size_t p = 0; p < n; ++p) {
    if (!probe.in_band(p)) continue;
    const double re = gauss(rng);
    const double im = gauss(rng);
    bins[static_cast<Eigen::Index>(p)] = {re, im};
  }
  return MasterWaveform(spec, std::move(bins));
}

double MasterWaveform::bin_frequency(std::size_t p) const {
  return static_cast<double>(folded_index(p, length())) * spec_.sample_rate / static_cast<double>(length());
}

bool MasterWaveform::in_band(std::size_t p) const {
  return std::abs(bin_frequency(p)) <= 0.5 * spec_.bandwidth * (1.0 + 1e-12);
}

double MasterWaveform::in_band_fraction() const {
  std::size_t count = 0;
  for (std::size_t p = 0; p < length(); ++p) count += in_band(p) ? 1 : 0;
  return static_cast<double>(count) / static_cast<double>(length());
}

void MasterWaveform::set_window(double lo, double hi) {
  if (!(hi > lo)) throw WindowOverrunError("guard window must have positive length");
  if (hi - lo > 0.5 * period())
    throw WindowOverrunError("guard window exceeds half the master period; increase the master length");
  window_lo_ = lo;
  window_hi_ = hi;
}

void MasterWaveform::check_window(double t_min, double t_max) const {
  const double slack = 1e-9 * dt();
  if (t_min < window_lo_ - slack || t_max > window_hi_ + slack)
    throw WindowOverrunError("waveform evaluation at [" + std::to_string(t_min) + ", " + std::to_string(t_max) +
                             "] s leaves the guard window [" + std::to_string(window_lo_) + ", " +
                             std::to_string(window_hi_) + "] s");
}

CVector MasterWaveform::sum_at(std::span<const double> times, int order) const {
  if (times.empty()) return CVector(0);
  double t_min = times.front();
  double t_max = times.front();
  for (double t : times) {
    t_min = std::min(t_min, t);
    t_max = std::max(t_max, t);
  }
  check_window(t_min, t_max);

  // In-band bins are contiguous in folded index; walk them with a phasor recurrence that is
  // re-anchored periodically to keep rounding drift negligible.
  std::ptrdiff_t k_min = 0;
  std::ptrdiff_t k_max = -1;
  for (std::size_t p = 0; p < length(); ++p) {
    if (bins_[static_cast<Eigen::Index>(p)] == cplx{}) continue;
    const std::ptrdiff_t k = folded_index(p, length());
    if (k_max < k_min) {
      k_min = k_max = k;
    } else {
      k_min = std::min(k_min, k);
      k_max = std::max(k_max, k);
    }
  }
  CVector out = CVector::Zero(static_cast<Eigen::Index>(times.size()));
  if (k_max < k_min) return out;

  const double df = spec_.sample_rate / static_cast<double>(length());
  const std::size_t span = static_cast<std::size_t>(k_max - k_min + 1);
  std::vector<cplx> coef(span);
  for (std::size_t i = 0; i < span; ++i) {
    const std::ptrdiff_t k = k_min + static_cast<std::ptrdiff_t>(i);
    const cplx bin = bins_[wrap(k, length())];
    coef[i] = order == 0 ? bin : bin * kJ * (kTwoPi * df * static_cast<double>(k));
  }

  constexpr std::size_t kReanchor = 64;
  const double scale = 1.0 / std::sqrt(static_cast<double>(length()));
  for (std::size_t n = 0; n < times.size(); ++n) {
    const double t = times[n];
    const cplx step = std::polar(1.0, kTwoPi * df * t);
    cplx acc{};
    cplx phasor;
    for (std::size_t i = 0; i < span; ++i) {
      if (i % kReanchor == 0)
        phasor = std::polar(1.0, kTwoPi * df * t * static_cast<double>(k_min + static_cast<std::ptrdiff_t>(i)));
      acc += coef[i] * phasor;
      phasor *= step;
    }
    out[static_cast<Eigen::Index>(n)] = acc * scale;
  }
  return out;
}

CVector MasterWaveform::lattice_delayed(const TimeGrid& grid, double tau, int order) const {
  CVector out(static_cast<Eigen::Index>(grid.count));
  if (grid.count == 0) return out;
  const double t0 = grid.time(0) - tau;
  const double t1 = grid.time(grid.count - 1) - tau;
  check_window(std::min(t0, t1), std::max(t0, t1));

  const double shift = tau * spec_.sample_rate;
  const double rounded = std::round(shift);
  if (std::abs(shift - rounded) < kLatticeTolerance) {
    const auto m = static_cast<std::ptrdiff_t>(rounded);
    const CVector& source = order == 0 ? samples_ : derivative_;
    for (std::size_t q = 0; q < grid.count; ++q)
      out[static_cast<Eigen::Index>(q)] = source[wrap(grid.index(q) - m, length())];
    return out;
  }

  CVector ramped(bins_.size());
  for (Eigen::Index p = 0; p < bins_.size(); ++p) {
    const double f = bin_frequency(static_cast<std::size_t>(p));
    cplx v = bins_[p] * std::polar(1.0, -kTwoPi * f * tau);
    if (order == 1) v *= kJ * (kTwoPi * f);
    ramped[p] = v;
  }
  const CVector delayed = inverse_dft(ramped) / std::sqrt(static_cast<double>(length()));
  for (std::size_t q = 0; q < grid.count; ++q)
    out[static_cast<Eigen::Index>(q)] = delayed[wrap(grid.index(q), length())];
  return out;
}

void MasterWaveform::write_csv(const std::string& path) const {
  CsvTable table;
  table.header = {"index", "re", "im"};
  for (Eigen::Index n = 0; n < samples_.size(); ++n)
    table.rows.push_back({static_cast<std::int64_t>(n), samples_[n].real(), samples_[n].imag()});
  emit_csv(table, path);
}

void SteeringRequest::validate(double sample_rate) const {
  if (!std::isfinite(tau) || !std::isfinite(omega)) throw ConfigError("steering request must be finite");
  if (std::abs(omega) >= kPi * sample_rate)
    throw ConfigError("Doppler " + std::to_string(omega) + " rad/s is outside the non-ambiguous range");
  if (migration == Migration::Migrating && !(carrier > 0.0))
    throw ConfigError("migrating steering requires a positive carrier");
}

namespace {

bool uses_migration(const SteeringRequest& req) { return req.migration == Migration::Migrating && req.omega != 0.0; }

std::vector<double> migrated_times(const SteeringRequest& req) {
  std::vector<double> times(req.grid.count);
  const double slope = req.omega / req.carrier;
  for (std::size_t q = 0; q < req.grid.count; ++q) {
    const double t = req.grid.time(q);
    times[q] = t - req.tau + slope * t;
  }
  return times;
}

}  // namespace

CVector eval(const MasterWaveform& wf, const SteeringRequest& req) {
  req.validate(wf.sample_rate());
  if (!uses_migration(req)) return wf.lattice_delayed(req.grid, req.tau, 0);
  return wf.sum_at(migrated_times(req), 0);
}

CVector eval_derivative(const MasterWaveform& wf, const SteeringRequest& req) {
  req.validate(wf.sample_rate());
  if (!uses_migration(req)) return -wf.lattice_delayed(req.grid, req.tau, 1);
  return -wf.sum_at(migrated_times(req), 1);
}

CVector dft_vector(double omega, const TimeGrid& grid) {
  CVector v(static_cast<Eigen::Index>(grid.count));
  for (std::size_t q = 0; q < grid.count; ++q) v[static_cast<Eigen::Index>(q)] = std::polar(1.0, omega * grid.time(q));
  return v;
}

CVector steering(const MasterWaveform& wf, const SteeringRequest& req) {
  return eval(wf, req).cwiseProduct(dft_vector(req.omega, req.grid));
}

CMatrix steering_jacobian(const MasterWaveform& wf, const SteeringRequest& req) {
  const CVector v = dft_vector(req.omega, req.grid);
  const CVector s = eval(wf, req);
  const CVector ds_dtau = eval_derivative(wf, req);  // = -s'
  const auto n = static_cast<Eigen::Index>(req.grid.count);
  CMatrix jac(n, 2);
  jac.col(0) = ds_dtau.cwiseProduct(v);
  for (Eigen::Index q = 0; q < n; ++q) {
    const double t = req.grid.time(static_cast<std::size_t>(q));
    cplx col = kJ * t * s[q];
    if (req.migration == Migration::Migrating) col += -ds_dtau[q] * (t / req.carrier);
    jac(q, 1) = col * v[q];
  }
  return jac;
}

CMatrix steering_jacobian(const MasterWaveform& wf, const SteeringRequest& req,
                          const Eigen::Matrix<double, 2, 4>& geometry_jacobian) {
  return steering_jacobian(wf, req) * geometry_jacobian.cast<cplx>();
}

}  // namespace ecalab
