#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ecalab/estimator.hpp"
#include "ecalab/montecarlo.hpp"
#include "ecalab/scene.hpp"

namespace ecalab {

enum class AmplitudeMode { Explicit, RadarEquation };

/// Per-node dB overrides on top of the global explicit SNR levels.
struct NodeSnrOverride {
  std::optional<double> rc_snr_db, sc_snr_db, dnr_db, cnr_db;
};

struct AmplitudeConfig {
  AmplitudeMode mode = AmplitudeMode::Explicit;
  SnrLevels levels;
  std::vector<NodeSnrOverride> per_node;
  RadarEquationModel radar;
};

struct TrackConfig {
  std::size_t nodes = 5;
  double radius_m = 300.0;
  TargetParams start{-400.0, -60.0, 10.0, 25.0};
  Eigen::Vector2d acceleration{-2.0, 2.0};
  double interval_s = 1.0;
  std::size_t intervals = 8;
  std::size_t trials = 5;
  double level = 0.95;
};

struct ExperimentConfig {
  Scenario scenario;
  AmplitudeConfig amplitudes;
  EstimatorOptions estimator;
  std::size_t trials = 300;
  std::size_t threads = 0;
  std::optional<SweepAxis> sweep_axis;
  std::vector<double> sweep_values;
  TrackConfig track;
};

/// Every schema path, dotted, with `*` standing for a list index.
const std::vector<std::string>& config_schema_paths();

/// Parses YAML text, applies `key=value` overrides (values parsed as YAML scalars or flow
/// sequences), rejects unknown keys and validates the resulting scenario.
ExperimentConfig parse_config_text(const std::string& text, const std::vector<std::string>& overrides = {});
ExperimentConfig parse_config(const std::string& path, const std::vector<std::string>& overrides = {});

/// Amplitudes for the configured mode and a given target (radar-equation amplitudes depend on it).
std::vector<NodeAmplitudes> resolve_amplitudes(const AmplitudeConfig& config, const Scenario& scenario);

/// Copy of the scenario with the target replaced and amplitudes re-resolved.
Scenario scenario_for_target(const ExperimentConfig& config, const TargetParams& target);

/// Ring geometry of the tracking experiment applied to the configured scenario.
Scenario track_scenario(const ExperimentConfig& config, const TargetParams& target);

TrialOptions trial_options(const ExperimentConfig& config);

}  // namespace ecalab
