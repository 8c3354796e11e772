#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mcast/simulator.hpp"

namespace mcast {

// One CSV row per transmission. Column order is fixed by kTraceHeader.
struct TraceRow {
  std::int64_t transmission_index = 0;
  double sim_time_s = 0.0;
  double action_power_w = 0.0;
  double reward = 0.0;
  int successes = 0;
  double avg_power_window = 0.0;     // mean power over the last `window` transmissions
  double beta = 0.0;
  double epsilon = 0.0;
  double mean_sojourn_window = 0.0;  // mean of the last `window` completed sojourns; NaN before the first
};

inline constexpr const char* kTraceHeader =
    "transmission_index,sim_time_s,action_power_w,reward,successes,avg_power_window,beta,epsilon,mean_sojourn_window";

std::vector<TraceRow> build_trace(const SimulationResult& result, int window);

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows);
void write_trace_csv(const std::string& path, const std::vector<TraceRow>& rows);
// Throws std::runtime_error on a header or row that does not match the schema.
std::vector<TraceRow> read_trace_csv(std::istream& in);
std::vector<TraceRow> read_trace_csv(const std::string& path);

// Per-run aggregate. The *_second_half fields only count transmissions (and
// completions) with index >= transmissions / 2.
struct RunSummary {
  std::string scenario;
  std::string algorithm;
  std::uint64_t seed = 0;
  double arrival_rate = 0.0;
  std::int64_t transmissions = 0;
  double sim_time_s = 0.0;
  std::int64_t completed = 0;
  std::int64_t pending = 0;
  // Sojourn means count requests still queued at the end with their age at
  // end_time; otherwise a policy that starves some users looks fast.
  double mean_sojourn = 0.0;
  double mean_sojourn_second_half = 0.0;  // completions from transmission n/2 on, plus outstanding
  double mean_sojourn_completed = 0.0;    // delivered requests only
  double avg_power = 0.0;
  double avg_power_second_half = 0.0;
  double final_beta = 0.0;
  double wall_clock_s = 0.0;
};

RunSummary summarize(const SimulationResult& result);

// Mean sojourn of completions whose service index is in [first, last).
double mean_sojourn_between(const SimulationResult& result, std::int64_t first, std::int64_t last);
// Mean sojourn of completions delivered at sim time >= from_time, plus the
// requests outstanding at the end, counted with age end_time - arrival.
double mean_sojourn_after(const SimulationResult& result, double from_time);
// Same, for completions with service index >= first.
double mean_sojourn_from(const SimulationResult& result, std::int64_t first);
// Mean power of transmissions with index in [first, last).
double mean_power_between(const SimulationResult& result, std::int64_t first, std::int64_t last);

std::string summary_json(const RunSummary& summary);
void write_summary_json(const std::string& path, const RunSummary& summary);

}  // namespace mcast
