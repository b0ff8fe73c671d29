#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ecalab/analysis.hpp"
#include "ecalab/csv.hpp"
#include "ecalab/estimator.hpp"
#include "ecalab/scene.hpp"

namespace ecalab {

/// Runs body(i) for i in [0, n) on up to `threads` workers (0 = hardware concurrency).
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& body);

struct TrialOptions {
  std::size_t trials = 300;
  std::uint64_t base_seed = 1;
  std::size_t threads = 0;
  EstimatorOptions estimator;
};

/// Waveform and clutter fixed by the scene; trial t draws noise from the (base seed, node, t)
/// streams, so two scenes sharing a waveform see common random numbers.
std::vector<EstimateReport> run_trials(const Scene& scene, const TrialOptions& options);

/// Estimated parameter vector in the scenario's estimation mode.
RVector estimate_vector(const EstimateReport& report, EstimationMode mode);
RVector truth_vector(const Scene& scene);

struct ParameterStats {
  std::string label;
  double bias = 0.0;
  double mse = 0.0;
  double rmse = 0.0;
};

struct Aggregate {
  std::vector<ParameterStats> parameters;
  RMatrix error_covariance;  // second moment of the errors about the truth
  std::size_t trials = 0;
  std::size_t used = 0;
  std::size_t diverged = 0;
};

/// Moments over converged trials; throws if every trial diverged.
Aggregate aggregate(const std::vector<EstimateReport>& reports, const RVector& truth, EstimationMode mode);

enum class SweepAxis { ScSnrDb, RcSnrDb, MBatches, TransmitPowerDb };

SweepAxis parse_sweep_axis(const std::string& name);
std::string to_string(SweepAxis axis);

/// Scenario at one sweep value. sc_snr_db moves |d| with sigma_e fixed, rc_snr_db moves sigma_n
/// with |a| fixed, m_batches sets the batch count, transmit_power_db scales a, b, d and c
/// jointly by the given dB offset.
Scenario apply_axis(const Scenario& base, SweepAxis axis, double value);

struct SweepSpec {
  SweepAxis axis = SweepAxis::ScSnrDb;
  std::vector<double> values;
  TrialOptions trials;
};

struct SweepRow {
  double value = 0.0;
  Aggregate stats;
  RVector crb_diag;
  RVector asymptotic_diag;
  std::vector<double> margin_db;
  std::string error;
};

std::vector<SweepRow> sweep(const Scenario& base, const SweepSpec& spec);
CsvTable sweep_table(const std::vector<SweepRow>& rows, SweepAxis axis, EstimationMode mode);

struct TrackInterval {
  std::size_t index = 0;
  TargetParams truth;
  std::vector<EstimateReport> estimates;
  RMatrix asymptotic;
  Ellipse position_ellipse;
  Ellipse velocity_ellipse;
};

/// Constant-acceleration truth sampled once per sensing interval.
std::vector<TargetParams> accelerating_trajectory(const TargetParams& start, const Eigen::Vector2d& acceleration,
                                                  double interval_s, std::size_t count);

/// Receivers on a circle: (r cos a_k, r sin a_k), a_k = 2 pi k / count.
std::vector<NodeGeometry> ring_nodes(const Position2D& io, double radius, std::size_t count,
                                     double carrier_angular_frequency, double propagation_speed);

std::vector<TrackInterval> track(const std::function<Scenario(const TargetParams&)>& make_scenario,
                                 const std::vector<TargetParams>& truths, const TrialOptions& options,
                                 double level = 0.95);
CsvTable track_table(const std::vector<TrackInterval>& intervals, double level);

}  // namespace ecalab
