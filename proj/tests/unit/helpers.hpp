#pragma once

#include <cmath>
#include <random>

#include "ecalab/scene.hpp"

namespace ecalab::test {

inline double rel_err(double got, double want) { return std::abs(got - want) / std::max(std::abs(want), 1e-300); }

template <typename A, typename B>
double rel_err_norm(const A& got, const B& want) {
  return (got - want).norm() / std::max(want.norm(), 1e-300);
}

/// Single-node scene with explicitly chosen amplitudes and a direct (tau, omega) truth.
inline Scenario single_node_scenario(std::size_t n, std::size_t m_delay, std::size_t taps, double tau_samples,
                                     double omega, std::uint64_t seed = 7) {
  Scenario sc;
  sc.seed = seed;
  sc.waveform.seed = seed;
  sc.waveform.master_length = 1;
  while (sc.waveform.master_length < 2 * (n + m_delay + 40)) sc.waveform.master_length *= 2;
  sc.nodes = {NodeGeometry{{0.0, 0.0}, {-300.0, 300.0}}};
  sc.weights = {1.0};
  sc.samples = n;
  sc.max_delay = m_delay;
  sc.clutter_taps = taps;
  sc.direct_truth = DelayDoppler{tau_samples * sc.dt(), omega};
  sc.mode = EstimationMode::DelayDoppler;
  sc.noise = {1.0, 1.0};
  SnrLevels levels;
  levels.rc_snr_db = 60.0;
  levels.sc_snr_db = 10.0;
  levels.dnr_db = 30.0;
  levels.cnr_db = 20.0;
  sc.amplitudes = amplitudes_from_snr(levels, sc.noise, 1, taps, seed);
  return sc;
}

/// The three-receiver layout with the illuminator at the origin.
inline std::vector<NodeGeometry> three_node_layout() {
  return {NodeGeometry{{0.0, 0.0}, {-300.0, 300.0}}, NodeGeometry{{0.0, 0.0}, {300.0, 300.0}},
          NodeGeometry{{0.0, 0.0}, {-300.0, -300.0}}};
}

/// Multistatic theta-mode scene on the three-receiver layout.
inline Scenario theta_scenario(std::size_t n, std::size_t m_delay, std::size_t taps, const TargetParams& target,
                               std::uint64_t seed = 11) {
  Scenario sc = single_node_scenario(n, m_delay, taps, 0.0, 0.0, seed);
  sc.direct_truth.reset();
  sc.nodes = three_node_layout();
  sc.weights = {1.0, 1.0, 1.0};
  sc.target = target;
  sc.mode = EstimationMode::Theta;
  SnrLevels levels;
  levels.rc_snr_db = 60.0;
  levels.sc_snr_db = 10.0;
  levels.dnr_db = 30.0;
  levels.cnr_db = 20.0;
  sc.amplitudes = amplitudes_from_snr(levels, sc.noise, 3, taps, seed);
  return sc;
}

}  // namespace ecalab::test
