#include "ecalab/scene.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ecalab/error.hpp"

namespace ecalab {

namespace {

double db_to_power(double db) { return std::pow(10.0, db / 10.0); }

double power_to_db(double num, double den) {
  if (den <= 0.0) return num > 0.0 ? std::numeric_limits<double>::infinity() : std::numeric_limits<double>::quiet_NaN();
  if (num <= 0.0) return -std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(num / den);
}

double distance(const Position2D& p, const Position2D& q) { return std::hypot(p.x - q.x, p.y - q.y); }

CVector draw_clutter(Rng& rng, std::size_t taps, double norm2) {
  if (taps == 0) return CVector(0);
  CVector c = complex_gaussian(rng, taps, 1.0);
  return c * std::sqrt(norm2) / c.norm();
}

}  // namespace

std::vector<DelayDoppler> Scenario::truth() const {
  if (direct_truth) return std::vector<DelayDoppler>(nodes.size(), *direct_truth);
  return theta_to_delay_doppler(target, nodes);
}

SteeringRequest Scenario::steering_request(const DelayDoppler& dd, const TimeGrid& grid) const {
  SteeringRequest req;
  req.tau = dd.tau;
  req.omega = dd.omega;
  req.grid = grid;
  req.migration = migration;
  req.carrier = nodes.empty() ? 0.0 : nodes.front().carrier_angular_frequency;
  return req;
}

void Scenario::validate() const {
  waveform.validate();
  if (nodes.empty()) throw ConfigError("nodes: at least one receiving node is required");
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    try {
      nodes[k].validate();
    } catch (const Error& e) {
      throw ConfigError("nodes[" + std::to_string(k) + "]: " + e.what());
    }
  }
  if (!weights.empty() && weights.size() != nodes.size())
    throw ConfigError("nodes: weight count does not match node count");
  for (double w : weights)
    if (!(w >= 0.0) || !std::isfinite(w)) throw ConfigError("nodes.weight: weights must be finite and non-negative");
  if (amplitudes.size() != nodes.size()) throw ConfigError("amplitudes: one amplitude set per node is required");
  for (std::size_t k = 0; k < amplitudes.size(); ++k)
    if (static_cast<std::size_t>(amplitudes[k].c.size()) != clutter_taps)
      throw ConfigError("amplitudes: node " + std::to_string(k) + " clutter tap count differs from record.clutter_taps");
  if (samples == 0) throw ConfigError("record.samples must be positive");
  if (clutter_taps > max_delay)
    throw ConfigError("record.clutter_taps (" + std::to_string(clutter_taps) + ") exceeds record.max_delay (" +
                      std::to_string(max_delay) + ")");
  if (!(noise.sigma_n2 >= 0.0) || !(noise.sigma_e2 >= 0.0))
    throw ConfigError("noise: variances must be non-negative");
  if (batching.count == 0 || samples % batching.count != 0)
    throw ConfigError("batching.count must divide record.samples");
  if (direct_truth && nodes.size() != 1) throw ConfigError("target.tau_s/omega_rad_s require exactly one node");
  if (migration == Migration::Migrating && direct_truth == std::nullopt) {
    const double wc = nodes.front().carrier_angular_frequency;
    for (const auto& n : nodes)
      if (n.carrier_angular_frequency != wc) throw ConfigError("nodes: all nodes must share one carrier frequency");
  }

  const auto dd = truth();
  const double limit = batching.mode == BatchMode::Sparse ? kPi * waveform.sample_rate / static_cast<double>(batching.count)
                                                          : kPi * waveform.sample_rate;
  for (std::size_t k = 0; k < dd.size(); ++k) {
    if (dd[k].tau < 0.0 || dd[k].tau > static_cast<double>(max_delay) * dt())
      throw ConfigError("node " + std::to_string(k) + ": target delay " + std::to_string(dd[k].tau / dt()) +
                        " samples lies outside [0, record.max_delay]");
    if (std::abs(dd[k].omega) >= limit)
      throw ConfigError("node " + std::to_string(k) + ": Doppler " + std::to_string(dd[k].omega) +
                        " rad/s is ambiguous for the configured sampling/batching");
  }
  const auto [lo, hi] = scene_window(*this);
  if (hi - lo > 0.5 * waveform.master_length * dt())
    throw ConfigError("waveform.master_length " + std::to_string(waveform.master_length) +
                      " is too short for the record; need at least " +
                      std::to_string(static_cast<std::size_t>(std::ceil(2.0 * (hi - lo) / dt()))));
}

std::pair<double, double> scene_window(const Scenario& scenario) {
  const double dt = scenario.dt();
  double drift = 0.0;
  if (scenario.migration == Migration::Migrating && !scenario.nodes.empty()) {
    double omega_max = 0.0;
    try {
      for (const auto& dd : scenario.truth()) omega_max = std::max(omega_max, std::abs(dd.omega));
    } catch (const Error&) {
    }
    const double span = static_cast<double>(scenario.samples + scenario.max_delay) * dt;
    drift = 2.0 * omega_max / scenario.nodes.front().carrier_angular_frequency * span + 2.0 * dt;
  }
  const double lo = -static_cast<double>(scenario.max_delay + 2) * dt - drift;
  const double hi = static_cast<double>(scenario.samples + 17) * dt + drift;
  return {lo, hi};
}

std::vector<NodeAmplitudes> amplitudes_from_snr(const SnrLevels& levels, const NoiseSpec& noise, std::size_t nodes,
                                                std::size_t clutter_taps, std::uint64_t seed) {
  const double ref_n = noise.sigma_n2 > 0.0 ? noise.sigma_n2 : 1.0;
  const double ref_e = noise.sigma_e2 > 0.0 ? noise.sigma_e2 : 1.0;
  std::vector<NodeAmplitudes> out(nodes);
  for (std::size_t k = 0; k < nodes; ++k) {
    Rng rng(derive_seed(seed, "amplitudes", {k}));
    auto& amp = out[k];
    amp.a = std::sqrt(ref_n * db_to_power(levels.rc_snr_db)) * random_phase(rng);
    amp.b = std::sqrt(ref_e * db_to_power(levels.dnr_db)) * random_phase(rng);
    amp.d = std::sqrt(ref_e * db_to_power(levels.sc_snr_db)) * random_phase(rng);
    amp.c = draw_clutter(rng, clutter_taps, ref_e * db_to_power(levels.cnr_db));
  }
  return out;
}

std::vector<NodeAmplitudes> amplitudes_from_radar_equation(const RadarEquationModel& model,
                                                           std::span<const NodeGeometry> nodes,
                                                           const TargetParams& target, const NoiseSpec& noise,
                                                           std::size_t clutter_taps, std::uint64_t seed) {
  if (!(model.transmit_power_w >= 0.0) || !(model.rcs_m2 >= 0.0) || !(model.reference_power_w > 0.0))
    throw ConfigError("amplitudes.radar_equation: powers and RCS must be non-negative, reference power positive");
  const double ref_e = noise.sigma_e2 > 0.0 ? noise.sigma_e2 : 1.0;
  const double gains = db_to_power(model.tx_gain_db) * db_to_power(model.rx_gain_db);
  std::vector<NodeAmplitudes> out(nodes.size());
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const auto& g = nodes[k];
    const double lambda = kTwoPi * g.propagation_speed / g.carrier_angular_frequency;
    const double r_direct = distance(g.io, g.rn);
    const double r_tx = distance(target.position(), g.io);
    const double r_rx = distance(target.position(), g.rn);
    if (r_direct <= 0.0 || r_tx <= 0.0 || r_rx <= 0.0)
      throw GeometryError("node " + std::to_string(k) + ": zero-length propagation path in the radar equation");
    const double link = model.transmit_power_w * gains * lambda * lambda;
    const double a2 = link / (std::pow(4.0 * kPi, 2) * r_direct * r_direct) / model.reference_power_w;
    const double d2 =
        link * model.rcs_m2 / (std::pow(4.0 * kPi, 3) * r_tx * r_tx * r_rx * r_rx) / model.reference_power_w;

    Rng rng(derive_seed(seed, "amplitudes", {k}));
    auto& amp = out[k];
    amp.a = std::sqrt(a2) * random_phase(rng);
    amp.b = std::sqrt(a2 * db_to_power(model.sidelobe_db)) * random_phase(rng);
    amp.d = std::sqrt(d2) * random_phase(rng);
    amp.c = draw_clutter(rng, clutter_taps, ref_e * db_to_power(model.cnr_db));
  }
  return out;
}

std::vector<SnrReport> snr_report(const Scenario& scenario) {
  std::vector<SnrReport> out;
  for (const auto& amp : scenario.amplitudes) {
    const double e = scenario.noise.sigma_e2;
    out.push_back({power_to_db(std::norm(amp.a), scenario.noise.sigma_n2), power_to_db(std::norm(amp.d), e),
                   power_to_db(std::norm(amp.b), e), power_to_db(amp.c.squaredNorm(), e)});
  }
  return out;
}

CMatrix clutter_matrix(const MasterWaveform& wf, const TimeGrid& grid, std::size_t taps) {
  CMatrix s(static_cast<Eigen::Index>(grid.count), static_cast<Eigen::Index>(taps));
  for (std::size_t l = 1; l <= taps; ++l)
    s.col(static_cast<Eigen::Index>(l - 1)) = wf.lattice_delayed(grid, static_cast<double>(l) * grid.dt, 0);
  return s;
}

Scene::Scene(const Scenario& scenario, std::shared_ptr<const MasterWaveform> waveform) : scenario_(scenario) {
  scenario_.validate();
  auto wf = waveform ? std::make_shared<MasterWaveform>(*waveform)
                     : std::make_shared<MasterWaveform>(MasterWaveform::generate(scenario_.waveform));
  const auto [lo, hi] = scene_window(scenario_);
  wf->set_window(lo, hi);
  waveform_ = wf;
  truth_ = scenario_.truth();

  const TimeGrid surv = scenario_.surveillance_grid();
  const CVector s_ref = waveform_->lattice_delayed(scenario_.reference_grid(), 0.0, 0);
  const CVector s_surv = s_ref.tail(static_cast<Eigen::Index>(scenario_.samples));
  const CMatrix clutter = clutter_matrix(*waveform_, surv, scenario_.clutter_taps);
  for (std::size_t k = 0; k < scenario_.node_count(); ++k) {
    const auto& amp = scenario_.amplitudes[k];
    clean_reference_.push_back(amp.a * s_ref);
    SteeringRequest req = scenario_.steering_request(truth_[k], surv);
    req.carrier = scenario_.carrier(k);
    CVector y = amp.b * s_surv + amp.d * steering(*waveform_, req);
    if (scenario_.clutter_taps > 0) y += clutter * amp.c;
    clean_surveillance_.push_back(std::move(y));
  }
}

NodeRecord Scene::synthesize_with_rng(std::size_t k, Rng& rng) const {
  NodeRecord rec;
  rec.reference = clean_reference_.at(k) + complex_gaussian(rng, scenario_.samples + scenario_.max_delay,
                                                            scenario_.noise.sigma_n2);
  rec.surveillance = clean_surveillance_.at(k) + complex_gaussian(rng, scenario_.samples, scenario_.noise.sigma_e2);
  rec.truth = truth_.at(k);
  rec.d = scenario_.amplitudes.at(k).d;
  return rec;
}

NodeRecord Scene::synthesize(std::size_t k, std::uint64_t base_seed, std::uint64_t trial) const {
  Rng rng(derive_seed(base_seed, "noise", {k, trial}));
  return synthesize_with_rng(k, rng);
}

std::vector<NodeRecord> Scene::synthesize_all(std::uint64_t base_seed, std::uint64_t trial) const {
  std::vector<NodeRecord> out;
  out.reserve(scenario_.node_count());
  for (std::size_t k = 0; k < scenario_.node_count(); ++k) out.push_back(synthesize(k, base_seed, trial));
  return out;
}

NodeRecord synthesize_node(const Scenario& scenario, std::size_t k, std::uint64_t noise_seed) {
  const Scene scene(scenario);
  Rng rng(noise_seed);
  return scene.synthesize_with_rng(k, rng);
}

}  // namespace ecalab
