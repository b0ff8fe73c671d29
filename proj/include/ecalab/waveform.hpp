#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "ecalab/types.hpp"

namespace ecalab {

struct WaveformSpec {
  std::uint64_t seed = 1;
  double bandwidth = 16e6;    // Hz
  double sample_rate = 25e6;  // Hz
  std::size_t master_length = 16384;

  void validate() const;
};

/// Periodic band-limited complex Gaussian process defined by its DFT bins:
///
///   s(t) = P^{-1/2} * sum_p S_p exp(j 2 pi f_p t),   f_p = p Fs / P (folded to [-Fs/2, Fs/2)).
///
/// Bins outside [-B/2, B/2] are exactly zero and the expected power is one. Because the
/// process is a finite sum of tones it can be evaluated exactly at any time, which gives
/// exact fractional delays, range-migrated samples and analytic time derivatives.
///
/// Evaluations are confined to a guard window no longer than half a period so that an
/// experiment never sees the process wrap around.
class MasterWaveform {
 public:
  static MasterWaveform generate(const WaveformSpec& spec);

  /// Wrap explicit bins (natural FFT order). Used by tests and for superposition.
  MasterWaveform(const WaveformSpec& spec, CVector bins);

  const WaveformSpec& spec() const { return spec_; }
  std::size_t length() const { return spec_.master_length; }
  double sample_rate() const { return spec_.sample_rate; }
  double dt() const { return 1.0 / spec_.sample_rate; }
  double period() const { return static_cast<double>(length()) / spec_.sample_rate; }

  const CVector& bins() const { return bins_; }
  double bin_frequency(std::size_t p) const;
  bool in_band(std::size_t p) const;
  double in_band_fraction() const;

  /// Samples s(n dt), n = 0..P-1.
  const CVector& master_samples() const { return samples_; }
  /// Time derivative ds/dt on the master grid.
  const CVector& master_derivative() const { return derivative_; }

  void set_window(double lo, double hi);
  double window_lo() const { return window_lo_; }
  double window_hi() const { return window_hi_; }
  void check_window(double t_min, double t_max) const;

  /// Exact s(t) (order 0) or ds/dt (order 1) at arbitrary instants by direct bin summation.
  CVector sum_at(std::span<const double> times, int order) const;

  /// s((first + q stride) dt - tau) for q = 0..count-1; order 1 returns ds/dt at those instants.
  CVector lattice_delayed(const TimeGrid& grid, double tau, int order) const;

  void write_csv(const std::string& path) const;

 private:
  WaveformSpec spec_;
  CVector bins_;
  CVector samples_;
  CVector derivative_;
  double window_lo_ = 0.0;
  double window_hi_ = 0.0;
};

struct SteeringRequest {
  double tau = 0.0;    // s
  double omega = 0.0;  // rad/s
  TimeGrid grid;
  Migration migration = Migration::Static;
  double carrier = 0.0;  // rad/s, required when migrating

  void validate(double sample_rate) const;
};

/// Delayed waveform samples s(t_n - tau), or s(t_n - tau + (omega / carrier) t_n) when migrating.
CVector eval(const MasterWaveform& wf, const SteeringRequest& req);

/// d/d(tau) of eval(), i.e. -s'(.) at the same instants.
CVector eval_derivative(const MasterWaveform& wf, const SteeringRequest& req);

/// v(omega): component n is exp(j omega t_n).
CVector dft_vector(double omega, const TimeGrid& grid);

/// a(tau, omega) = eval(wf, req) (.) v(omega).
CVector steering(const MasterWaveform& wf, const SteeringRequest& req);

/// Columns [da/dtau, da/domega].
CMatrix steering_jacobian(const MasterWaveform& wf, const SteeringRequest& req);

/// Chain rule onto target parameters: [da/dtau, da/domega] * d(tau, omega)/d(theta).
CMatrix steering_jacobian(const MasterWaveform& wf, const SteeringRequest& req,
                          const Eigen::Matrix<double, 2, 4>& geometry_jacobian);

/// Inverse DFT without scaling: out[n] = sum_p in[p] exp(j 2 pi p n / P).
CVector inverse_dft(const CVector& in);

}  // namespace ecalab
