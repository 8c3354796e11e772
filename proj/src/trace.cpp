#include "mcast/trace.hpp"

#include <cmath>
#include <deque>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "json.hpp"

namespace mcast {

std::vector<TraceRow> build_trace(const SimulationResult& result, int window) {
  if (window < 1) throw std::invalid_argument("build_trace: window must be >= 1");
  const auto w = static_cast<std::size_t>(window);
  std::vector<TraceRow> rows;
  rows.reserve(result.records.size());

  std::deque<double> powers;
  double power_sum = 0.0;
  std::deque<double> sojourns;
  double sojourn_sum = 0.0;
  std::size_t next_completion = 0;
  const auto& done = result.completions;

  for (const auto& r : result.records) {
    powers.push_back(r.power);
    power_sum += r.power;
    if (powers.size() > w) {
      power_sum -= powers.front();
      powers.pop_front();
    }
    while (next_completion < done.size() && done[next_completion].transmission <= r.index) {
      const double s = done[next_completion++].sojourn();
      sojourns.push_back(s);
      sojourn_sum += s;
      if (sojourns.size() > w) {
        sojourn_sum -= sojourns.front();
        sojourns.pop_front();
      }
    }
    TraceRow row;
    row.transmission_index = r.index;
    row.sim_time_s = r.time;
    row.action_power_w = r.power;
    row.reward = r.reward;
    row.successes = r.successes;
    row.avg_power_window = power_sum / static_cast<double>(powers.size());
    row.beta = r.beta;
    row.epsilon = r.epsilon;
    row.mean_sojourn_window =
        sojourns.empty() ? std::numeric_limits<double>::quiet_NaN() : sojourn_sum / static_cast<double>(sojourns.size());
    rows.push_back(row);
  }
  return rows;
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows) {
  out << kTraceHeader << '\n';
  for (const auto& r : rows) {
    // {} prints the shortest round-trip representation.
    fmt::print(out, "{},{},{},{},{},{},{},{},{}\n", r.transmission_index, r.sim_time_s, r.action_power_w, r.reward,
               r.successes, r.avg_power_window, r.beta, r.epsilon, r.mean_sojourn_window);
  }
}

void write_trace_csv(const std::string& path, const std::vector<TraceRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_trace_csv: cannot open " + path);
  write_trace_csv(out, rows);
}

std::vector<TraceRow> read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kTraceHeader)
    throw std::runtime_error("read_trace_csv: header does not match the trace schema");
  std::vector<TraceRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 9) throw std::runtime_error("read_trace_csv: line " + std::to_string(lineno) + " has " +
                                                    std::to_string(cells.size()) + " columns, expected 9");
    try {
      TraceRow r;
      r.transmission_index = std::stoll(cells[0]);
      r.sim_time_s = std::stod(cells[1]);
      r.action_power_w = std::stod(cells[2]);
      r.reward = std::stod(cells[3]);
      r.successes = std::stoi(cells[4]);
      r.avg_power_window = std::stod(cells[5]);
      r.beta = std::stod(cells[6]);
      r.epsilon = std::stod(cells[7]);
      r.mean_sojourn_window = std::stod(cells[8]);
      rows.push_back(r);
    } catch (const std::exception&) {
      throw std::runtime_error("read_trace_csv: unparsable value on line " + std::to_string(lineno));
    }
  }
  return rows;
}

std::vector<TraceRow> read_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_trace_csv: cannot open " + path);
  return read_trace_csv(in);
}

double mean_sojourn_between(const SimulationResult& result, std::int64_t first, std::int64_t last) {
  double sum = 0.0;
  std::int64_t n = 0;
  for (const auto& c : result.completions) {
    if (c.transmission >= first && c.transmission < last) {
      sum += c.sojourn();
      ++n;
    }
  }
  return n ? sum / static_cast<double>(n) : std::numeric_limits<double>::quiet_NaN();
}

namespace {

template <class Keep>
double censored_mean(const SimulationResult& result, Keep keep) {
  double sum = 0.0;
  std::int64_t n = 0;
  for (const auto& c : result.completions) {
    if (keep(c)) {
      sum += c.sojourn();
      ++n;
    }
  }
  for (double a : result.pending_arrival_times) sum += result.end_time - a;
  n += static_cast<std::int64_t>(result.pending_arrival_times.size());
  return n ? sum / static_cast<double>(n) : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

double mean_sojourn_after(const SimulationResult& result, double from_time) {
  return censored_mean(result, [&](const Completion& c) { return c.completion_time >= from_time; });
}

double mean_sojourn_from(const SimulationResult& result, std::int64_t first) {
  return censored_mean(result, [&](const Completion& c) { return c.transmission >= first; });
}

double mean_power_between(const SimulationResult& result, std::int64_t first, std::int64_t last) {
  double sum = 0.0;
  std::int64_t n = 0;
  for (const auto& r : result.records) {
    if (r.index >= first && r.index < last) {
      sum += r.power;
      ++n;
    }
  }
  return n ? sum / static_cast<double>(n) : std::numeric_limits<double>::quiet_NaN();
}

RunSummary summarize(const SimulationResult& result) {
  RunSummary s;
  const auto n = static_cast<std::int64_t>(result.records.size());
  s.transmissions = n;
  s.sim_time_s = result.end_time;
  s.completed = static_cast<std::int64_t>(result.completions.size());
  s.pending = static_cast<std::int64_t>(result.pending_at_end);
  s.mean_sojourn = mean_sojourn_from(result, 0);
  s.mean_sojourn_second_half = mean_sojourn_from(result, n / 2);
  s.mean_sojourn_completed = mean_sojourn_between(result, 0, n);
  s.avg_power = mean_power_between(result, 0, n);
  s.avg_power_second_half = mean_power_between(result, n / 2, n);
  s.final_beta = result.records.empty() ? 0.0 : result.records.back().beta;
  return s;
}

namespace {

nlohmann::json number_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

}  // namespace

std::string summary_json(const RunSummary& s) {
  nlohmann::ordered_json j;
  j["scenario"] = s.scenario;
  j["algorithm"] = s.algorithm;
  j["seed"] = s.seed;
  j["arrival_rate"] = s.arrival_rate;
  j["transmissions"] = s.transmissions;
  j["sim_time_s"] = s.sim_time_s;
  j["completed"] = s.completed;
  j["pending"] = s.pending;
  j["mean_sojourn_s"] = number_or_null(s.mean_sojourn);
  j["mean_sojourn_second_half_s"] = number_or_null(s.mean_sojourn_second_half);
  j["mean_sojourn_completed_s"] = number_or_null(s.mean_sojourn_completed);
  j["avg_power_w"] = number_or_null(s.avg_power);
  j["avg_power_second_half_w"] = number_or_null(s.avg_power_second_half);
  j["final_beta"] = s.final_beta;
  j["wall_clock_s"] = s.wall_clock_s;
  return j.dump(2);
}

void write_summary_json(const std::string& path, const RunSummary& summary) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_summary_json: cannot open " + path);
  out << summary_json(summary) << '\n';
}

}  // namespace mcast
