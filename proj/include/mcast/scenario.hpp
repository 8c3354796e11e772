#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mcast/agent.hpp"
#include "mcast/arrivals.hpp"
#include "mcast/config.hpp"

namespace mcast {

// One experiment: system, learner settings, algorithm, horizon and seeds.
struct Scenario {
  std::string name = "scenario";
  SystemConfig system;
  AgentHyperparams agent;
  Algorithm algorithm = Algorithm::kAcDqn;
  std::int64_t horizon = 100000;
  std::vector<RateSegment> arrival_schedule;  // empty: constant system.arrival_rate
  std::vector<std::uint64_t> seeds{1};
  std::string output_dir = "out";
  int metrics_window = 1000;
  std::int64_t oracle_samples = 100000;
  int oracle_rounds = 3;
};

Algorithm parse_algorithm(const std::string& name);
std::string to_string(Algorithm algorithm);

// Parses YAML scenario text. Throws ConfigError naming the offending field.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);

// System, agent and experiment-level checks combined.
std::vector<ConfigError> validation_errors(const Scenario& scenario);
void validate(const Scenario& scenario);

}  // namespace mcast
