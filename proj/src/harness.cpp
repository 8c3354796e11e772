#include "mcast/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>

namespace mcast {

namespace {

// Runs task(i) for i in [0, n) on up to `jobs` threads.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& task) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  std::vector<std::thread> pool;
  for (int w = 0; w < std::min<int>(jobs, static_cast<int>(n)); ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          task(i);
        } catch (...) {
          std::lock_guard lock(failure_mu);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

double nan_mean(const std::vector<double>& v) {
  double sum = 0.0;
  int n = 0;
  for (double x : v)
    if (std::isfinite(x)) {
      sum += x;
      ++n;
    }
  return n ? sum / n : std::nan("");
}

}  // namespace

RunOutput run_once(const Scenario& scenario, std::uint64_t seed, bool check_invariants) {
  validate(scenario);
  const auto start = std::chrono::steady_clock::now();
  const SystemConfig& config = scenario.system;

  SimulationOptions opts;
  opts.horizon = scenario.horizon;
  opts.schedule = scenario.arrival_schedule;
  opts.seed = seed;
  opts.check_invariants = check_invariants;

  RunOutput out;
  switch (scenario.algorithm) {
    case Algorithm::kConstant: {
      ConstantController controller(constant_policy(config.avg_power_constraint));
      out.simulation = run_simulation(config, controller, opts);
      break;
    }
    case Algorithm::kOracle: {
      DiscreteStateSpace space(config);
      out.oracle = std::make_unique<OracleSolution>(
          solve_oracle(config, space, scenario.oracle_samples, scenario.oracle_rounds, seed));
      if (!out.oracle->sweep.feasible)
        throw std::runtime_error("oracle: infeasible, even minimum power exceeds the average power constraint");
      TabularController controller(config, space, out.oracle->sweep.policy);
      out.simulation = run_simulation(config, controller, opts);
      break;
    }
    case Algorithm::kDqn:
    case Algorithm::kAcDqn: {
      out.agent = std::make_unique<DqnAgent>(2 * config.num_users, static_cast<int>(config.num_actions()),
                                             scenario.agent, scenario.algorithm, config.avg_power_constraint, seed);
      AgentController controller(config, *out.agent);
      out.simulation = run_simulation(config, controller, opts);
      break;
    }
  }

  out.trace = build_trace(out.simulation, scenario.metrics_window);
  out.summary = summarize(out.simulation);
  out.summary.scenario = scenario.name;
  out.summary.algorithm = to_string(scenario.algorithm);
  out.summary.seed = seed;
  out.summary.arrival_rate = config.arrival_rate;
  out.summary.wall_clock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

std::vector<RunSummary> run_scenario(const Scenario& scenario, int jobs) {
  validate(scenario);
  namespace fs = std::filesystem;
  fs::create_directories(scenario.output_dir);
  std::vector<RunSummary> summaries(scenario.seeds.size());
  parallel_for(scenario.seeds.size(), jobs, [&](std::size_t i) {
    const auto seed = scenario.seeds[i];
    RunOutput run = run_once(scenario, seed);
    const std::string stem = fmt::format("{}_{}_seed{}", scenario.name, to_string(scenario.algorithm), seed);
    write_trace_csv((fs::path(scenario.output_dir) / (stem + ".csv")).string(), run.trace);
    write_summary_json((fs::path(scenario.output_dir) / (stem + ".summary.json")).string(), run.summary);
    summaries[i] = run.summary;
  });
  return summaries;
}

SweepResultTable sweep_arrivals(const Scenario& base, std::span<const double> rates,
                                std::span<const Algorithm> algorithms, int jobs) {
  if (rates.empty()) throw std::invalid_argument("sweep_arrivals: no arrival rates");
  if (algorithms.empty()) throw std::invalid_argument("sweep_arrivals: no algorithms");
  struct Job {
    double rate;
    Algorithm algorithm;
    std::uint64_t seed;
  };
  std::vector<Job> work;
  for (double r : rates)
    for (Algorithm a : algorithms)
      for (auto s : base.seeds) work.push_back({r, a, s});

  SweepResultTable table;
  table.per_seed.resize(work.size());
  parallel_for(work.size(), jobs, [&](std::size_t i) {
    Scenario sc = base;
    sc.system.arrival_rate = work[i].rate;
    sc.arrival_schedule.clear();
    sc.algorithm = work[i].algorithm;
    table.per_seed[i] = run_once(sc, work[i].seed).summary;
  });

  for (double r : rates) {
    for (Algorithm a : algorithms) {
      std::vector<double> sojourn;
      std::vector<double> power;
      for (std::size_t i = 0; i < work.size(); ++i) {
        if (work[i].rate == r && work[i].algorithm == a) {
          sojourn.push_back(table.per_seed[i].mean_sojourn_second_half);
          power.push_back(table.per_seed[i].avg_power_second_half);
        }
      }
      table.rows.push_back({r, a, static_cast<int>(sojourn.size()), nan_mean(sojourn), nan_mean(power)});
    }
  }
  return table;
}

std::string sweep_csv(const SweepResultTable& table) {
  std::ostringstream out;
  out << "arrival_rate,algorithm,seeds,mean_sojourn_s,avg_power_w\n";
  for (const auto& r : table.rows)
    out << fmt::format("{},{},{},{},{}\n", r.arrival_rate, to_string(r.algorithm), r.seeds, r.mean_sojourn, r.avg_power);
  return out.str();
}

CompareReport compare_runs(const std::vector<TraceRow>& a, const std::vector<TraceRow>& b, int window) {
  if (window < 1) throw std::invalid_argument("compare_runs: window must be >= 1");
  if (a.size() != b.size())
    throw std::invalid_argument(fmt::format("compare_runs: mismatched horizons ({} vs {} transmissions)", a.size(), b.size()));
  if (a.empty()) throw std::invalid_argument("compare_runs: empty traces");

  CompareReport rep;
  const auto w = static_cast<std::size_t>(window);
  std::vector<double> soj_a;
  std::vector<double> soj_b;
  double total_a = 0.0;
  double total_b = 0.0;
  for (std::size_t start = 0; start < a.size(); start += w) {
    const std::size_t end = std::min(a.size(), start + w);
    WindowDelta d;
    d.first = static_cast<std::int64_t>(start);
    d.last = static_cast<std::int64_t>(end);
    for (std::size_t i = start; i < end; ++i) {
      d.power_a += a[i].action_power_w;
      d.power_b += b[i].action_power_w;
    }
    total_a += d.power_a;
    total_b += d.power_b;
    d.power_a /= static_cast<double>(end - start);
    d.power_b /= static_cast<double>(end - start);
    d.sojourn_a = a[end - 1].mean_sojourn_window;
    d.sojourn_b = b[end - 1].mean_sojourn_window;
    soj_a.push_back(d.sojourn_a);
    soj_b.push_back(d.sojourn_b);
    rep.windows.push_back(d);
  }
  rep.mean_power_a = total_a / static_cast<double>(a.size());
  rep.mean_power_b = total_b / static_cast<double>(b.size());
  rep.power_delta = rep.mean_power_b - rep.mean_power_a;
  rep.final_sojourn_a = a.back().mean_sojourn_window;
  rep.final_sojourn_b = b.back().mean_sojourn_window;
  const double ma = nan_mean(soj_a);
  const double mb = nan_mean(soj_b);
  rep.sojourn_improvement_pct = ma > 0.0 ? (ma - mb) / ma * 100.0 : 0.0;
  return rep;
}

std::string compare_csv(const CompareReport& rep) {
  std::ostringstream out;
  out << "first,last,power_a,power_b,power_delta,sojourn_a,sojourn_b,sojourn_delta\n";
  for (const auto& d : rep.windows) {
    out << fmt::format("{},{},{},{},{},{},{},{}\n", d.first, d.last, d.power_a, d.power_b, d.power_b - d.power_a,
                       d.sojourn_a, d.sojourn_b, d.sojourn_b - d.sojourn_a);
  }
  return out.str();
}

}  // namespace mcast
