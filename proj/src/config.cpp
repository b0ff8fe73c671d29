#include "ecalab/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "ecalab/error.hpp"

namespace ecalab {

namespace {

const std::set<std::string>& schema() {
  static const std::set<std::string> paths = {
      "seed",
      "propagation_speed_m_s",
      "carrier_hz",
      "mode",
      "migration",
      "waveform",
      "waveform.seed",
      "waveform.bandwidth_hz",
      "waveform.sample_rate_hz",
      "waveform.master_length",
      "record",
      "record.samples",
      "record.max_delay",
      "record.clutter_taps",
      "batching",
      "batching.count",
      "batching.mode",
      "noise",
      "noise.sigma_n2",
      "noise.sigma_e2",
      "io",
      "io.position",
      "nodes",
      "nodes.*",
      "nodes.*.position",
      "nodes.*.weight",
      "nodes.*.rc_snr_db",
      "nodes.*.sc_snr_db",
      "nodes.*.dnr_db",
      "nodes.*.cnr_db",
      "target",
      "target.position",
      "target.velocity",
      "target.tau_s",
      "target.omega_rad_s",
      "amplitudes",
      "amplitudes.mode",
      "amplitudes.rc_snr_db",
      "amplitudes.sc_snr_db",
      "amplitudes.dnr_db",
      "amplitudes.cnr_db",
      "amplitudes.radar_equation",
      "amplitudes.radar_equation.transmit_power_w",
      "amplitudes.radar_equation.tx_gain_db",
      "amplitudes.radar_equation.rx_gain_db",
      "amplitudes.radar_equation.rcs_m2",
      "amplitudes.radar_equation.sidelobe_db",
      "amplitudes.radar_equation.reference_power_w",
      "amplitudes.radar_equation.cnr_db",
      "estimator",
      "estimator.init",
      "estimator.max_iterations",
      "estimator.x_tolerance",
      "estimator.f_tolerance",
      "estimator.initial_step",
      "estimator.omega_window_rad_s",
      "estimator.box",
      "estimator.box.x_min",
      "estimator.box.x_max",
      "estimator.box.y_min",
      "estimator.box.y_max",
      "estimator.box.step",
      "montecarlo",
      "montecarlo.trials",
      "montecarlo.threads",
      "sweep",
      "sweep.axis",
      "sweep.values",
      "track",
      "track.nodes",
      "track.radius_m",
      "track.start",
      "track.start.position",
      "track.start.velocity",
      "track.acceleration",
      "track.interval_s",
      "track.intervals",
      "track.trials",
      "track.level",
  };
  return paths;
}

// Keys whose values are lists of numbers rather than nested configuration.
bool is_value_list(const std::string& path) {
  static const std::set<std::string> lists = {"io.position",          "nodes.*.position",     "target.position",
                                              "target.velocity",      "sweep.values",         "track.start.position",
                                              "track.start.velocity", "track.acceleration"};
  return lists.count(path) > 0;
}

std::string join(const std::string& prefix, const std::string& key) { return prefix.empty() ? key : prefix + "." + key; }

void check_keys(const YAML::Node& node, const std::string& path) {
  if (!path.empty() && schema().count(path) == 0) throw ConfigError("unknown key '" + path + "'");
  if (is_value_list(path)) return;
  if (node.IsMap()) {
    for (const auto& kv : node) check_keys(kv.second, join(path, kv.first.as<std::string>()));
  } else if (node.IsSequence()) {
    for (const auto& item : node) check_keys(item, join(path, "*"));
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

bool is_index(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

void apply_override(YAML::Node& root, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "' must look like key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  const auto parts = split(key, '.');
  std::string pattern;
  for (const auto& p : parts) pattern = join(pattern, is_index(p) ? "*" : p);
  if (schema().count(pattern) == 0) throw ConfigError("override key '" + key + "' is not a configuration key");

  YAML::Node value;
  try {
    value = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError("override '" + key + "': cannot parse value '" + text + "'");
  }
  std::vector<YAML::Node> chain{root};
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    YAML::Node parent = chain.back();
    YAML::Node child = is_index(parts[i]) ? parent[std::stoul(parts[i])] : parent[parts[i]];
    if (is_index(parts[i]) && !child.IsDefined())
      throw ConfigError("override '" + key + "': list index " + parts[i] + " does not exist");
    chain.push_back(child);
  }
  YAML::Node parent = chain.back();
  if (is_index(parts.back()))
    parent[std::stoul(parts.back())] = value;
  else
    parent[parts.back()] = value;
}

template <typename T>
T read(const YAML::Node& node, const std::string& path) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError("'" + path + "': value has the wrong type");
  }
}

template <typename T>
void read_into(const YAML::Node& parent, const std::string& key, const std::string& path, T& out) {
  const YAML::Node n = parent[key];
  if (n && !n.IsNull()) out = read<T>(n, join(path, key));
}

Eigen::Vector2d read_pair(const YAML::Node& node, const std::string& path) {
  if (!node.IsSequence() || node.size() != 2) throw ConfigError("'" + path + "': expected a two-element list [x, y]");
  return {read<double>(node[0], path), read<double>(node[1], path)};
}

std::size_t read_count(const YAML::Node& node, const std::string& path) {
  const auto v = read<long long>(node, path);
  if (v < 0) throw ConfigError("'" + path + "': must be non-negative");
  return static_cast<std::size_t>(v);
}

void read_count_into(const YAML::Node& parent, const std::string& key, const std::string& path, std::size_t& out) {
  const YAML::Node n = parent[key];
  if (n && !n.IsNull()) out = read_count(n, join(path, key));
}

void read_optional(const YAML::Node& parent, const std::string& key, const std::string& path,
                   std::optional<double>& out) {
  const YAML::Node n = parent[key];
  if (n && !n.IsNull()) out = read<double>(n, join(path, key));
}

ExperimentConfig build(const YAML::Node& root) {
  if (!root.IsMap()) throw ConfigError("configuration root must be a mapping");
  check_keys(root, "");

  ExperimentConfig cfg;
  Scenario& sc = cfg.scenario;
  read_into(root, "seed", "", sc.seed);
  sc.waveform.seed = sc.seed;

  double speed = kSpeedOfLight;
  double carrier_hz = 600e6;
  read_into(root, "propagation_speed_m_s", "", speed);
  read_into(root, "carrier_hz", "", carrier_hz);
  if (!(speed > 0.0)) throw ConfigError("'propagation_speed_m_s': must be positive");
  if (!(carrier_hz > 0.0)) throw ConfigError("'carrier_hz': must be positive");

  if (const auto w = root["waveform"]) {
    read_into(w, "seed", "waveform", sc.waveform.seed);
    read_into(w, "bandwidth_hz", "waveform", sc.waveform.bandwidth);
    read_into(w, "sample_rate_hz", "waveform", sc.waveform.sample_rate);
    read_count_into(w, "master_length", "waveform", sc.waveform.master_length);
  }
  if (const auto r = root["record"]) {
    read_count_into(r, "samples", "record", sc.samples);
    read_count_into(r, "max_delay", "record", sc.max_delay);
    read_count_into(r, "clutter_taps", "record", sc.clutter_taps);
  }
  if (const auto b = root["batching"]) {
    read_count_into(b, "count", "batching", sc.batching.count);
    std::string mode = "consecutive";
    read_into(b, "mode", "batching", mode);
    if (mode == "consecutive")
      sc.batching.mode = BatchMode::Consecutive;
    else if (mode == "sparse")
      sc.batching.mode = BatchMode::Sparse;
    else
      throw ConfigError("'batching.mode': expected consecutive or sparse");
  }
  if (const auto n = root["noise"]) {
    read_into(n, "sigma_n2", "noise", sc.noise.sigma_n2);
    read_into(n, "sigma_e2", "noise", sc.noise.sigma_e2);
  }
  {
    std::string migration = "static";
    read_into(root, "migration", "", migration);
    if (migration == "static")
      sc.migration = Migration::Static;
    else if (migration == "migrating")
      sc.migration = Migration::Migrating;
    else
      throw ConfigError("'migration': expected static or migrating");
  }

  Position2D io{0.0, 0.0};
  if (const auto i = root["io"]) {
    if (const auto p = i["position"]) {
      const auto v = read_pair(p, "io.position");
      io = {v.x(), v.y()};
    }
  }

  const YAML::Node nodes = root["nodes"];
  if (!nodes || !nodes.IsSequence() || nodes.size() == 0) throw ConfigError("'nodes': at least one node is required");
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const std::string path = "nodes." + std::to_string(k);
    const YAML::Node n = nodes[k];
    if (!n.IsMap() || !n["position"]) throw ConfigError("'" + path + ".position': required");
    const auto p = read_pair(n["position"], path + ".position");
    sc.nodes.push_back({io, {p.x(), p.y()}, kTwoPi * carrier_hz, speed});
    double weight = 1.0;
    read_into(n, "weight", path, weight);
    sc.weights.push_back(weight);
    NodeSnrOverride o;
    read_optional(n, "rc_snr_db", path, o.rc_snr_db);
    read_optional(n, "sc_snr_db", path, o.sc_snr_db);
    read_optional(n, "dnr_db", path, o.dnr_db);
    read_optional(n, "cnr_db", path, o.cnr_db);
    cfg.amplitudes.per_node.push_back(o);
  }

  const YAML::Node target = root["target"];
  if (!target || !target.IsMap()) throw ConfigError("'target': required");
  const bool direct = target["tau_s"] || target["omega_rad_s"];
  if (direct) {
    if (target["position"] || target["velocity"])
      throw ConfigError("'target': give either position/velocity or tau_s/omega_rad_s, not both");
    DelayDoppler dd;
    read_into(target, "tau_s", "target", dd.tau);
    read_into(target, "omega_rad_s", "target", dd.omega);
    sc.direct_truth = dd;
  } else {
    if (!target["position"]) throw ConfigError("'target.position': required");
    const auto p = read_pair(target["position"], "target.position");
    Eigen::Vector2d v{0.0, 0.0};
    if (target["velocity"]) v = read_pair(target["velocity"], "target.velocity");
    sc.target = {p.x(), p.y(), v.x(), v.y()};
  }

  {
    std::string mode = sc.nodes.size() == 1 ? "delay_doppler" : "theta";
    read_into(root, "mode", "", mode);
    if (mode == "delay_doppler")
      sc.mode = EstimationMode::DelayDoppler;
    else if (mode == "theta")
      sc.mode = EstimationMode::Theta;
    else
      throw ConfigError("'mode': expected delay_doppler or theta");
    if (sc.mode == EstimationMode::DelayDoppler && sc.nodes.size() != 1)
      throw ConfigError("'mode': delay_doppler requires exactly one node");
    if (sc.mode == EstimationMode::Theta && sc.direct_truth)
      throw ConfigError("'mode': theta requires target.position, not tau_s/omega_rad_s");
  }

  if (const auto a = root["amplitudes"]) {
    std::string mode = "explicit";
    read_into(a, "mode", "amplitudes", mode);
    if (mode == "explicit")
      cfg.amplitudes.mode = AmplitudeMode::Explicit;
    else if (mode == "radar_equation")
      cfg.amplitudes.mode = AmplitudeMode::RadarEquation;
    else
      throw ConfigError("'amplitudes.mode': expected explicit or radar_equation");
    read_into(a, "rc_snr_db", "amplitudes", cfg.amplitudes.levels.rc_snr_db);
    read_into(a, "sc_snr_db", "amplitudes", cfg.amplitudes.levels.sc_snr_db);
    read_into(a, "dnr_db", "amplitudes", cfg.amplitudes.levels.dnr_db);
    read_into(a, "cnr_db", "amplitudes", cfg.amplitudes.levels.cnr_db);
    if (const auto r = a["radar_equation"]) {
      const std::string p = "amplitudes.radar_equation";
      auto& m = cfg.amplitudes.radar;
      read_into(r, "transmit_power_w", p, m.transmit_power_w);
      read_into(r, "tx_gain_db", p, m.tx_gain_db);
      read_into(r, "rx_gain_db", p, m.rx_gain_db);
      read_into(r, "rcs_m2", p, m.rcs_m2);
      read_into(r, "sidelobe_db", p, m.sidelobe_db);
      read_into(r, "reference_power_w", p, m.reference_power_w);
      read_into(r, "cnr_db", p, m.cnr_db);
    }
  }

  if (const auto e = root["estimator"]) {
    std::string init = "oracle";
    read_into(e, "init", "estimator", init);
    if (init == "oracle")
      cfg.estimator.init = InitMode::OracleTruth;
    else if (init == "per_node_peaks")
      cfg.estimator.init = InitMode::PerNodePeaks;
    else
      throw ConfigError("'estimator.init': expected oracle or per_node_peaks");
    read_count_into(e, "max_iterations", "estimator", cfg.estimator.nelder_mead.max_iterations);
    read_into(e, "x_tolerance", "estimator", cfg.estimator.nelder_mead.x_tolerance);
    read_into(e, "f_tolerance", "estimator", cfg.estimator.nelder_mead.f_tolerance);
    read_into(e, "initial_step", "estimator", cfg.estimator.nelder_mead.initial_step);
    read_into(e, "omega_window_rad_s", "estimator", cfg.estimator.omega_window);
    if (const auto b = e["box"]) {
      auto& box = cfg.estimator.box;
      read_into(b, "x_min", "estimator.box", box.x_min);
      read_into(b, "x_max", "estimator.box", box.x_max);
      read_into(b, "y_min", "estimator.box", box.y_min);
      read_into(b, "y_max", "estimator.box", box.y_max);
      read_into(b, "step", "estimator.box", box.step);
      if (!(box.step > 0.0) || box.x_max < box.x_min || box.y_max < box.y_min)
        throw ConfigError("'estimator.box': needs min <= max and a positive step");
    }
  }

  if (const auto m = root["montecarlo"]) {
    read_count_into(m, "trials", "montecarlo", cfg.trials);
    read_count_into(m, "threads", "montecarlo", cfg.threads);
  }

  if (const auto s = root["sweep"]) {
    if (const auto axis = s["axis"]) cfg.sweep_axis = parse_sweep_axis(read<std::string>(axis, "sweep.axis"));
    if (const auto values = s["values"]) {
      if (!values.IsSequence()) throw ConfigError("'sweep.values': expected a list");
      for (const auto& v : values) cfg.sweep_values.push_back(read<double>(v, "sweep.values"));
    }
  }

  if (const auto t = root["track"]) {
    auto& tr = cfg.track;
    read_count_into(t, "nodes", "track", tr.nodes);
    read_into(t, "radius_m", "track", tr.radius_m);
    if (const auto s = t["start"]) {
      if (s["position"]) {
        const auto p = read_pair(s["position"], "track.start.position");
        tr.start.x = p.x();
        tr.start.y = p.y();
      }
      if (s["velocity"]) {
        const auto v = read_pair(s["velocity"], "track.start.velocity");
        tr.start.vx = v.x();
        tr.start.vy = v.y();
      }
    }
    if (t["acceleration"]) tr.acceleration = read_pair(t["acceleration"], "track.acceleration");
    read_into(t, "interval_s", "track", tr.interval_s);
    read_count_into(t, "intervals", "track", tr.intervals);
    read_count_into(t, "trials", "track", tr.trials);
    read_into(t, "level", "track", tr.level);
    if (tr.nodes == 0 || !(tr.radius_m > 0.0)) throw ConfigError("'track': needs at least one node and a positive radius");
    if (!(tr.level > 0.0 && tr.level < 1.0)) throw ConfigError("'track.level': must lie in (0, 1)");
  }

  sc.amplitudes = resolve_amplitudes(cfg.amplitudes, sc);
  sc.validate();
  return cfg;
}

}  // namespace

const std::vector<std::string>& config_schema_paths() {
  static const std::vector<std::string> paths(schema().begin(), schema().end());
  return paths;
}

std::vector<NodeAmplitudes> resolve_amplitudes(const AmplitudeConfig& config, const Scenario& scenario) {
  const std::size_t k_nodes = scenario.node_count();
  if (config.mode == AmplitudeMode::RadarEquation) {
    if (scenario.direct_truth) throw ConfigError("'amplitudes.mode': radar_equation needs a target position");
    return amplitudes_from_radar_equation(config.radar, scenario.nodes, scenario.target, scenario.noise,
                                          scenario.clutter_taps, scenario.seed);
  }
  auto out = amplitudes_from_snr(config.levels, scenario.noise, k_nodes, scenario.clutter_taps, scenario.seed);
  for (std::size_t k = 0; k < k_nodes && k < config.per_node.size(); ++k) {
    const auto& o = config.per_node[k];
    if (!o.rc_snr_db && !o.sc_snr_db && !o.dnr_db && !o.cnr_db) continue;
    SnrLevels levels = config.levels;
    if (o.rc_snr_db) levels.rc_snr_db = *o.rc_snr_db;
    if (o.sc_snr_db) levels.sc_snr_db = *o.sc_snr_db;
    if (o.dnr_db) levels.dnr_db = *o.dnr_db;
    if (o.cnr_db) levels.cnr_db = *o.cnr_db;
    // Same per-node stream as the global draw, so only the magnitudes change.
    const auto node_amp = amplitudes_from_snr(levels, scenario.noise, k + 1, scenario.clutter_taps, scenario.seed);
    out[k] = node_amp[k];
  }
  return out;
}

ExperimentConfig parse_config_text(const std::string& text, const std::vector<std::string>& overrides) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("configuration is not valid YAML: ") + e.what());
  }
  if (!root || root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
  for (const auto& o : overrides) apply_override(root, o);
  return build(root);
}

ExperimentConfig parse_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), overrides);
}

Scenario scenario_for_target(const ExperimentConfig& config, const TargetParams& target) {
  Scenario sc = config.scenario;
  sc.target = target;
  sc.direct_truth.reset();
  sc.amplitudes = resolve_amplitudes(config.amplitudes, sc);
  return sc;
}

Scenario track_scenario(const ExperimentConfig& config, const TargetParams& target) {
  ExperimentConfig c = config;
  const auto& first = config.scenario.nodes.front();
  c.scenario.nodes = ring_nodes(first.io, config.track.radius_m, config.track.nodes, first.carrier_angular_frequency,
                                first.propagation_speed);
  c.scenario.weights.assign(config.track.nodes, 1.0);
  c.scenario.mode = EstimationMode::Theta;
  c.amplitudes.per_node.clear();
  return scenario_for_target(c, target);
}

TrialOptions trial_options(const ExperimentConfig& config) {
  TrialOptions t;
  t.trials = config.trials;
  t.threads = config.threads;
  t.base_seed = derive_seed(config.scenario.seed, "trials");
  t.estimator = config.estimator;
  return t;
}

}  // namespace ecalab
