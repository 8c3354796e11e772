#include "mcast/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace mcast {

namespace {

std::string join(const std::string& base, const std::string& key) { return base.empty() ? key : base + "." + key; }

// Field-path aware view over a YAML map.
class Section {
 public:
  Section(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path)) {
    if (node_ && !node_.IsNull() && !node_.IsMap()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected a mapping");
  }

  bool has(const std::string& key) const { return node_ && node_.IsMap() && node_[key]; }
  std::string path(const std::string& key) const { return join(path_, key); }
  YAML::Node raw(const std::string& key) const { return has(key) ? node_[key] : YAML::Node(); }
  Section sub(const std::string& key) const { return Section(raw(key), path(key)); }

  template <typename T>
  T get(const std::string& key, T fallback) const {
    if (!has(key)) return fallback;
    try {
      return node_[key].as<T>();
    } catch (const YAML::Exception&) {
      throw ConfigError(path(key), "has the wrong type");
    }
  }

  template <typename T>
  T require(const std::string& key) const {
    if (!has(key)) throw ConfigError(path(key), "is required");
    return get<T>(key, T{});
  }

  void only(std::initializer_list<const char*> keys) const {
    if (!node_ || !node_.IsMap()) return;
    std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& kv : node_) {
      const auto k = kv.first.as<std::string>();
      if (!allowed.count(k)) throw ConfigError(path(k), "unknown key");
    }
  }

 private:
  YAML::Node node_;
  std::string path_;
};

std::vector<double> read_levels(const Section& system) {
  const auto node = system.raw("power_levels");
  const std::string path = system.path("power_levels");
  if (!node) throw ConfigError(path, "is required");
  if (node.IsSequence()) {
    try {
      return node.as<std::vector<double>>();
    } catch (const YAML::Exception&) {
      throw ConfigError(path, "must be a list of numbers");
    }
  }
  Section spec(node, path);
  spec.only({"min", "max", "count"});
  const int count = spec.require<int>("count");
  if (count < 1) throw ConfigError(spec.path("count"), "must be >= 1");
  return evenly_spaced_levels(spec.require<double>("min"), spec.require<double>("max"), count);
}

int read_attempts(const Section& system) {
  if (!system.has("max_attempts")) return 1;
  const auto text = system.get<std::string>("max_attempts", "1");
  if (text == "inf" || text == "infinity" || text == "unlimited") return kUnlimitedAttempts;
  return system.get<int>("max_attempts", 1);
}

std::vector<ChannelModel> read_channels(const YAML::Node& node, int num_users) {
  std::vector<ChannelModel> out;
  if (!node) throw ConfigError("channels", "is required");
  if (!node.IsSequence()) throw ConfigError("channels", "must be a list of channel groups");
  for (std::size_t g = 0; g < node.size(); ++g) {
    Section group(node[g], "channels[" + std::to_string(g) + "]");
    group.only({"users", "kind", "values", "probs", "mean"});
    const int users = group.get<int>("users", 1);
    if (users < 1) throw ConfigError(group.path("users"), "must be >= 1");
    const auto kind = group.require<std::string>("kind");
    ChannelModel model;
    if (kind == "discrete") {
      DiscreteChannel d;
      d.gains = group.require<std::vector<double>>("values");
      if (group.has("probs")) {
        d.probs = group.get<std::vector<double>>("probs", {});
      } else if (!d.gains.empty()) {
        d.probs.assign(d.gains.size(), 1.0 / static_cast<double>(d.gains.size()));
      }
      model = d;
    } else if (kind == "exponential") {
      model = ExponentialChannel{group.require<double>("mean")};
    } else {
      throw ConfigError(group.path("kind"), "must be 'discrete' or 'exponential'");
    }
    for (int u = 0; u < users; ++u) out.push_back(model);
  }
  if (static_cast<int>(out.size()) != num_users)
    throw ConfigError("channels", "groups cover " + std::to_string(out.size()) + " users, system has " +
                                      std::to_string(num_users));
  return out;
}

StepSchedule read_step(const Section& s, StepSchedule fallback) {
  s.only({"mode", "initial", "decay", "exponent"});
  StepSchedule out = fallback;
  const auto mode = s.get<std::string>("mode", fallback.mode == StepMode::kConstant ? "constant" : "decaying");
  if (mode == "constant") out.mode = StepMode::kConstant;
  else if (mode == "decaying") out.mode = StepMode::kDecaying;
  else throw ConfigError(s.path("mode"), "must be 'constant' or 'decaying'");
  out.initial = s.get<double>("initial", fallback.initial);
  out.decay = s.get<double>("decay", fallback.decay);
  out.exponent = s.get<double>("exponent", fallback.exponent);
  return out;
}

AgentHyperparams read_agent(const Section& s) {
  s.only({"mode", "gamma", "epsilon", "value_lr", "lagrange_lr", "initial_beta", "minibatch", "target_period",
          "power_window", "replay_capacity", "hidden_layers", "replay_rewards"});
  AgentHyperparams hp;
  const auto mode = s.get<std::string>("mode", "stationary");
  if (mode == "stationary") hp.mode = AgentMode::kStationary;
  else if (mode == "tracking") hp.mode = AgentMode::kTracking;
  else throw ConfigError(s.path("mode"), "must be 'stationary' or 'tracking'");
  hp.gamma = s.get<double>("gamma", hp.gamma);
  const Section eps = s.sub("epsilon");
  eps.only({"initial", "decay", "floor"});
  hp.exploration.initial = eps.get<double>("initial", hp.exploration.initial);
  hp.exploration.decay = eps.get<double>("decay", hp.exploration.decay);
  hp.exploration.floor = eps.get<double>("floor", hp.exploration.floor);
  hp.value_lr = read_step(s.sub("value_lr"), hp.value_lr);
  hp.lagrange_lr = read_step(s.sub("lagrange_lr"), hp.lagrange_lr);
  hp.initial_beta = s.get<double>("initial_beta", hp.initial_beta);
  hp.minibatch = s.get<int>("minibatch", hp.minibatch);
  hp.target_period = s.get<int>("target_period", hp.target_period);
  hp.power_window = s.get<int>("power_window", hp.power_window);
  const auto replay_rewards = s.get<std::string>("replay_rewards", "stored");
  if (replay_rewards == "reshaped") hp.reshape_replay = true;
  else if (replay_rewards != "stored") throw ConfigError(s.path("replay_rewards"), "must be 'stored' or 'reshaped'");
  const auto capacity = s.get<long long>("replay_capacity", static_cast<long long>(hp.replay_capacity));
  if (capacity < 1) throw ConfigError(s.path("replay_capacity"), "must be >= 1");
  hp.replay_capacity = static_cast<std::size_t>(capacity);
  hp.hidden_layers = s.get<std::vector<int>>("hidden_layers", hp.hidden_layers);
  return hp;
}

}  // namespace

Algorithm parse_algorithm(const std::string& name) {
  if (name == "constant") return Algorithm::kConstant;
  if (name == "dqn") return Algorithm::kDqn;
  if (name == "acdqn") return Algorithm::kAcDqn;
  if (name == "oracle") return Algorithm::kOracle;
  throw ConfigError("algorithm", "unknown algorithm '" + name + "' (constant, dqn, acdqn, oracle)");
}

std::string to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kConstant: return "constant";
    case Algorithm::kDqn: return "dqn";
    case Algorithm::kAcDqn: return "acdqn";
    case Algorithm::kOracle: return "oracle";
  }
  return "unknown";
}

Scenario parse_scenario(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError("<root>", std::string("YAML parse error: ") + e.what());
  }
  Section top(root, "");
  top.only({"name", "algorithm", "horizon", "seeds", "output_dir", "metrics_window", "system", "channels", "agent",
            "arrival_schedule", "oracle"});

  Scenario sc;
  sc.name = top.get<std::string>("name", sc.name);
  sc.algorithm = parse_algorithm(top.get<std::string>("algorithm", "acdqn"));
  sc.horizon = top.get<long long>("horizon", sc.horizon);
  sc.seeds = top.get<std::vector<std::uint64_t>>("seeds", sc.seeds);
  sc.output_dir = top.get<std::string>("output_dir", sc.output_dir);
  sc.metrics_window = top.get<int>("metrics_window", sc.metrics_window);

  const Section sys = top.sub("system");
  sys.only({"num_users", "catalog_size", "file_size_bits", "tx_rate_bps", "bandwidth_hz", "spectral_ratio",
            "noise_power", "arrival_rate", "zipf_exponent", "max_attempts", "power_levels", "avg_power_constraint",
            "gain_scale"});
  SystemConfig& c = sc.system;
  c.num_users = sys.require<int>("num_users");
  c.catalog_size = sys.require<int>("catalog_size");
  c.file_size_bits = sys.get<double>("file_size_bits", c.file_size_bits);
  c.tx_rate_bps = sys.get<double>("tx_rate_bps", c.tx_rate_bps);
  c.bandwidth_hz = sys.get<double>("bandwidth_hz", c.bandwidth_hz);
  c.spectral_ratio = sys.get<double>("spectral_ratio", c.spectral_ratio);
  c.noise_power = sys.get<double>("noise_power", c.noise_power);
  c.arrival_rate = sys.get<double>("arrival_rate", c.arrival_rate);
  c.zipf_exponent = sys.get<double>("zipf_exponent", c.zipf_exponent);
  c.max_attempts = read_attempts(sys);
  c.power_levels = read_levels(sys);
  c.avg_power_constraint = sys.require<double>("avg_power_constraint");
  c.gain_scale = sys.get<double>("gain_scale", c.gain_scale);
  c.channels = read_channels(root["channels"], c.num_users);

  sc.agent = read_agent(top.sub("agent"));

  if (const auto sched = root["arrival_schedule"]) {
    if (!sched.IsSequence()) throw ConfigError("arrival_schedule", "must be a list of {duration, rate}");
    for (std::size_t i = 0; i < sched.size(); ++i) {
      Section seg(sched[i], "arrival_schedule[" + std::to_string(i) + "]");
      seg.only({"duration", "rate"});
      sc.arrival_schedule.push_back({seg.require<double>("duration"), seg.require<double>("rate")});
    }
  }

  const Section oracle = top.sub("oracle");
  oracle.only({"samples", "rounds"});
  sc.oracle_samples = oracle.get<long long>("samples", sc.oracle_samples);
  sc.oracle_rounds = oracle.get<int>("rounds", sc.oracle_rounds);

  validate(sc);
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open scenario file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::vector<ConfigError> validation_errors(const Scenario& sc) {
  auto errors = validation_errors(sc.system);
  if (sc.algorithm == Algorithm::kDqn || sc.algorithm == Algorithm::kAcDqn) {
    auto agent = validation_errors(sc.agent);
    errors.insert(errors.end(), agent.begin(), agent.end());
  }
  if (sc.horizon < 1) errors.emplace_back("horizon", "must be >= 1");
  if (sc.seeds.empty()) errors.emplace_back("seeds", "must list at least one seed");
  if (sc.metrics_window < 1) errors.emplace_back("metrics_window", "must be >= 1");
  for (std::size_t i = 0; i < sc.arrival_schedule.size(); ++i) {
    const auto& seg = sc.arrival_schedule[i];
    const std::string p = "arrival_schedule[" + std::to_string(i) + "]";
    if (!(seg.duration > 0.0)) errors.emplace_back(p + ".duration", "must be > 0");
    if (!(seg.rate >= 0.0)) errors.emplace_back(p + ".rate", "must be >= 0");
  }
  if (sc.algorithm == Algorithm::kOracle) {
    if (!all_channels_discrete(sc.system)) errors.emplace_back("algorithm", "oracle needs discrete channels for every user");
    if (sc.oracle_samples < 10000) errors.emplace_back("oracle.samples", "must be >= 10000");
    if (sc.oracle_rounds < 1) errors.emplace_back("oracle.rounds", "must be >= 1");
  }
  return errors;
}

void validate(const Scenario& sc) {
  auto errors = validation_errors(sc);
  if (!errors.empty()) throw errors.front();
}

}  // namespace mcast
