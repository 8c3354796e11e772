#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "mcast/agent.hpp"
#include "mcast/oracle.hpp"
#include "mcast/scenario.hpp"
#include "mcast/simulator.hpp"
#include "mcast/trace.hpp"

namespace mcast {

struct RunOutput {
  RunSummary summary;
  SimulationResult simulation;
  std::vector<TraceRow> trace;
  std::unique_ptr<DqnAgent> agent;          // set for dqn / acdqn
  std::unique_ptr<OracleSolution> oracle;   // set for oracle
};

// Runs one seed of a scenario in memory.
RunOutput run_once(const Scenario& scenario, std::uint64_t seed, bool check_invariants = false);

// Runs every seed and writes <output_dir>/<name>_<algorithm>_seed<k>.csv plus a
// matching .summary.json. `jobs` > 1 runs seeds concurrently.
std::vector<RunSummary> run_scenario(const Scenario& scenario, int jobs = 1);

struct SweepRow {
  double arrival_rate = 0.0;
  Algorithm algorithm = Algorithm::kConstant;
  int seeds = 0;
  double mean_sojourn = 0.0;  // seed average of the second-half mean sojourn
  double avg_power = 0.0;     // seed average of the second-half mean power
};

struct SweepResultTable {
  std::vector<SweepRow> rows;          // one per (lambda, algorithm)
  std::vector<RunSummary> per_seed;    // every individual run
};

// Delay-vs-rate curves: for each lambda and algorithm, runs every seed of
// the base scenario at that constant rate.
SweepResultTable sweep_arrivals(const Scenario& base, std::span<const double> rates,
                                std::span<const Algorithm> algorithms, int jobs = 1);

std::string sweep_csv(const SweepResultTable& table);

struct WindowDelta {
  std::int64_t first = 0;  // transmission index range [first, last)
  std::int64_t last = 0;
  double power_a = 0.0;
  double power_b = 0.0;
  double sojourn_a = 0.0;  // moving-average sojourn at the window's last row
  double sojourn_b = 0.0;
};

struct CompareReport {
  std::vector<WindowDelta> windows;
  double mean_power_a = 0.0;
  double mean_power_b = 0.0;
  double final_sojourn_a = 0.0;
  double final_sojourn_b = 0.0;
  double sojourn_improvement_pct = 0.0;  // (a - b) / a * 100, over the window means
  double power_delta = 0.0;              // mean_power_b - mean_power_a
};

// Per-window comparison of two traces with identical length. Throws
// std::invalid_argument on mismatched horizons.
CompareReport compare_runs(const std::vector<TraceRow>& a, const std::vector<TraceRow>& b, int window);
std::string compare_csv(const CompareReport& report);

}  // namespace mcast
