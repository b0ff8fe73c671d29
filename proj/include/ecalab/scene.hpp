#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "ecalab/geometry.hpp"
#include "ecalab/random.hpp"
#include "ecalab/types.hpp"
#include "ecalab/waveform.hpp"

namespace ecalab {

/// Complex amplitudes of one node: reference a, DPI b, target d, clutter taps c (length L).
struct NodeAmplitudes {
  cplx a{1.0, 0.0};
  cplx b{0.0, 0.0};
  cplx d{1.0, 0.0};
  CVector c;
};

struct NoiseSpec {
  double sigma_n2 = 1.0;  // reference channel
  double sigma_e2 = 1.0;  // surveillance channel
};

struct BatchingSpec {
  std::size_t count = 1;
  BatchMode mode = BatchMode::Consecutive;
};

/// Signal-to-noise levels used to draw explicit amplitudes (dB, relative to the configured
/// noise variances, or to unit variance where a variance is zero).
struct SnrLevels {
  double rc_snr_db = 60.0;
  double sc_snr_db = 10.0;
  double dnr_db = 30.0;
  double cnr_db = 20.0;
};

struct RadarEquationModel {
  double transmit_power_w = 10e3;
  double tx_gain_db = 0.0;
  double rx_gain_db = 0.0;
  double rcs_m2 = 0.02;
  double sidelobe_db = -40.0;   // DPI leakage relative to the direct path
  double reference_power_w = 1e-12;
  double cnr_db = 20.0;
};

struct Scenario {
  std::uint64_t seed = 1;
  WaveformSpec waveform;
  std::vector<NodeGeometry> nodes;
  std::vector<double> weights;
  TargetParams target;
  /// Direct per-node truth, bypassing the geometry (single-node delay/Doppler studies).
  std::optional<DelayDoppler> direct_truth;
  std::size_t samples = 1024;    // N
  std::size_t max_delay = 64;    // M_delay
  std::size_t clutter_taps = 4;  // L
  std::vector<NodeAmplitudes> amplitudes;
  NoiseSpec noise;
  BatchingSpec batching;
  Migration migration = Migration::Static;
  EstimationMode mode = EstimationMode::Theta;

  std::size_t node_count() const { return nodes.size(); }
  double dt() const { return 1.0 / waveform.sample_rate; }
  std::vector<DelayDoppler> truth() const;
  /// Surveillance instants t_0..t_{N-1}.
  TimeGrid surveillance_grid() const { return TimeGrid{0, 1, samples, dt()}; }
  /// Reference instants t_{-M}..t_{N-1}.
  TimeGrid reference_grid() const {
    return TimeGrid{-static_cast<std::ptrdiff_t>(max_delay), 1, samples + max_delay, dt()};
  }
  SteeringRequest steering_request(const DelayDoppler& dd, const TimeGrid& grid) const;
  double carrier(std::size_t k) const { return nodes.at(k).carrier_angular_frequency; }

  void validate() const;
};

struct NodeRecord {
  CVector reference;     // x(t_{-M}) .. x(t_{N-1})
  CVector surveillance;  // y(t_0) .. y(t_{N-1})
  DelayDoppler truth;
  cplx d{};
};

/// Per-node amplitudes drawn at the given SNR levels with uniform random phases.
std::vector<NodeAmplitudes> amplitudes_from_snr(const SnrLevels& levels, const NoiseSpec& noise, std::size_t nodes,
                                                std::size_t clutter_taps, std::uint64_t seed);

std::vector<NodeAmplitudes> amplitudes_from_radar_equation(const RadarEquationModel& model,
                                                           std::span<const NodeGeometry> nodes,
                                                           const TargetParams& target, const NoiseSpec& noise,
                                                           std::size_t clutter_taps, std::uint64_t seed);

struct SnrReport {
  double rc_snr_db;
  double sc_snr_db;
  double dnr_db;
  double cnr_db;
};

std::vector<SnrReport> snr_report(const Scenario& scenario);

/// Column l-1 holds s(t_n - l dt), l = 1..L, n over the grid.
CMatrix clutter_matrix(const MasterWaveform& wf, const TimeGrid& grid, std::size_t taps);

/// Guard window covering every instant the scene, the estimators and the theory evaluate.
std::pair<double, double> scene_window(const Scenario& scenario);

/// Waveform plus cached noise-free channel components for a scenario. Trials only add noise.
class Scene {
 public:
  explicit Scene(const Scenario& scenario, std::shared_ptr<const MasterWaveform> waveform = nullptr);

  const Scenario& scenario() const { return scenario_; }
  const MasterWaveform& waveform() const { return *waveform_; }
  std::shared_ptr<const MasterWaveform> shared_waveform() const { return waveform_; }
  const std::vector<DelayDoppler>& truth() const { return truth_; }

  const CVector& clean_reference(std::size_t k) const { return clean_reference_.at(k); }
  const CVector& clean_surveillance(std::size_t k) const { return clean_surveillance_.at(k); }

  /// Record for node k with noise drawn from the (trial, node) stream of the given base seed.
  NodeRecord synthesize(std::size_t k, std::uint64_t base_seed, std::uint64_t trial) const;
  NodeRecord synthesize_with_rng(std::size_t k, Rng& rng) const;
  std::vector<NodeRecord> synthesize_all(std::uint64_t base_seed, std::uint64_t trial) const;

 private:
  Scenario scenario_;
  std::shared_ptr<const MasterWaveform> waveform_;
  std::vector<DelayDoppler> truth_;
  std::vector<CVector> clean_reference_;
  std::vector<CVector> clean_surveillance_;
};

NodeRecord synthesize_node(const Scenario& scenario, std::size_t k, std::uint64_t noise_seed);

}  // namespace ecalab
