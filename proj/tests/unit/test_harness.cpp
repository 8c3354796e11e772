#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "mcast/harness.hpp"

using namespace mcast;

namespace {

const std::string kScenarios = std::string(MCAST_SOURCE_DIR) + "/scenarios/";

const char* kMinimal = R"(
name: tiny
algorithm: acdqn
horizon: 3000
seeds: [5]
system:
  num_users: 2
  catalog_size: 10
  file_size_bits: 1.0
  tx_rate_bps: 1.0
  arrival_rate: 0.8
  avg_power_constraint: 7.0
  gain_scale: 0.9
  power_levels: {min: 1.0, max: 50.0, count: 20}
channels:
  - {users: 1, kind: discrete, values: [0.1, 0.3]}
  - {users: 1, kind: discrete, values: [0.7, 0.9], probs: [0.25, 0.75]}
agent:
  hidden_layers: [16, 8]
  value_lr: {mode: decaying, initial: 1.0e-2, decay: 1.0e-5, exponent: 0.6}
  lagrange_lr: {mode: decaying, initial: 1.0e-4, decay: 1.0e-3, exponent: 1.0}
oracle: {samples: 10000, rounds: 1}
)";

std::string field_of(const std::string& yaml) {
  try {
    parse_scenario(yaml);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
  const auto at = s.find(from);
  REQUIRE(at != std::string::npos);
  return s.replace(at, from.size(), to);
}

std::string trace_text(const std::vector<TraceRow>& rows) {
  std::ostringstream out;
  write_trace_csv(out, rows);
  return out.str();
}

}  // namespace

TEST_SUITE("harness-cli") {

TEST_CASE("bundled scenarios load and validate") {
  for (const char* name : {"small-4user", "large-20user", "tracking-24h", "tracking-48h", "tracking-48h-decaying"}) {
    CAPTURE(name);
    const auto sc = load_scenario(kScenarios + name + ".yaml");
    CHECK(sc.name == name);
    CHECK(validation_errors(sc).empty());
  }
  const auto small = load_scenario(kScenarios + "small-4user.yaml");
  CHECK(small.system.num_users == 4);
  CHECK(small.system.avg_power_constraint == 7.0);
  CHECK(small.system.zipf_exponent == 0.0);
  CHECK(small.system.power_levels.size() == 20);
  CHECK(small.system.service_time() == 1.0);

  const auto large = load_scenario(kScenarios + "large-20user.yaml");
  CHECK(large.system.num_users == 20);
  CHECK(large.system.zipf_exponent == 1.0);
  CHECK(std::holds_alternative<ExponentialChannel>(large.system.channels[0]));

  const auto track = load_scenario(kScenarios + "tracking-24h.yaml");
  REQUIRE(track.arrival_schedule.size() == 4);
  CHECK(track.arrival_schedule[2].rate == 0.2);
  CHECK(track.agent.mode == AgentMode::kTracking);
  CHECK(track.agent.reshape_replay);
  const auto t48 = load_scenario(kScenarios + "tracking-48h.yaml");
  CHECK(t48.system.avg_power_constraint == 5.0);
  CHECK(t48.arrival_schedule.front().duration == 86400.0);
}

TEST_CASE("scenario parsing") {
  const auto sc = parse_scenario(kMinimal);
  CHECK(sc.name == "tiny");
  CHECK(sc.system.max_attempts == 1);
  const auto& ch = std::get<DiscreteChannel>(sc.system.channels[0]);
  CHECK(ch.probs == std::vector<double>{0.5, 0.5});
  CHECK(std::get<DiscreteChannel>(sc.system.channels[1]).probs[1] == 0.75);
  CHECK(sc.agent.value_lr.exponent == 0.6);
  CHECK_FALSE(sc.agent.reshape_replay);
  CHECK(parse_scenario(replace(kMinimal, "  hidden_layers: [16, 8]", "  hidden_layers: [16, 8]\n  replay_rewards: reshaped"))
            .agent.reshape_replay);
  CHECK(parse_scenario(replace(kMinimal, "  arrival_rate: 0.8", "  arrival_rate: 0.8\n  max_attempts: inf"))
            .system.max_attempts == kUnlimitedAttempts);
}

TEST_CASE("configuration errors name the offending field") {
  CHECK(field_of(replace(kMinimal, "  num_users: 2", "  num_users: 2\n  colour: red")) == "system.colour");
  CHECK(field_of(replace(kMinimal, "count: 20", "count: 0")).find("power_levels") != std::string::npos);
  CHECK(field_of(replace(kMinimal, "values: [0.7, 0.9], probs", "values: [0.7, 0.9], kindx: 1, probs")) ==
        "channels[1].kindx");
  CHECK(field_of(replace(kMinimal, "{users: 1, kind: discrete, values: [0.1, 0.3]}",
                         "{users: 1, kind: weird, values: [0.1, 0.3]}")) == "channels[0].kind");
  CHECK(field_of(replace(kMinimal, "algorithm: acdqn", "algorithm: ppo")) == "algorithm");
  CHECK(field_of(replace(kMinimal, "horizon: 3000", "horizon: 0")) == "horizon");
  CHECK(field_of(replace(kMinimal, "exponent: 1.0}", "exponent: 0.6}")) == "agent.lagrange_lr.exponent");
  CHECK(field_of(replace(kMinimal, "seeds: [5]", "seeds: [5]\narrival_schedule:\n  - {duration: -1, rate: 1}")) ==
        "arrival_schedule[0].duration");
  CHECK(field_of(replace(kMinimal, "  hidden_layers: [16, 8]", "  hidden_layers: [16, 8]\n  replay_rewards: fresh")) ==
        "agent.replay_rewards");
  CHECK(field_of(std::string(kMinimal) + "\nextra_section: 1\n") == "extra_section");
  CHECK(field_of("{{{") == "<root>");
  CHECK_THROWS_AS(load_scenario("/nonexistent/scenario.yaml"), ConfigError);
}

TEST_CASE("same seed gives a byte-identical trace") {
  const auto sc = parse_scenario(kMinimal);
  const auto a = run_once(sc, 5);
  const auto b = run_once(sc, 5);
  CHECK(trace_text(a.trace) == trace_text(b.trace));
  const auto c = run_once(sc, 6);
  CHECK(trace_text(a.trace) != trace_text(c.trace));
}

TEST_CASE("trace CSV schema and round trip") {
  auto sc = parse_scenario(kMinimal);
  sc.horizon = 500;
  const auto run = run_once(sc, 5);
  const std::string text = trace_text(run.trace);
  CHECK(text.rfind(std::string(kTraceHeader) + "\n", 0) == 0);
  CHECK(std::string(kTraceHeader) ==
        "transmission_index,sim_time_s,action_power_w,reward,successes,avg_power_window,beta,epsilon,"
        "mean_sojourn_window");
  std::istringstream in(text);
  const auto back = read_trace_csv(in);
  REQUIRE(back.size() == run.trace.size());
  CHECK(trace_text(back) == text);

  std::istringstream bad("a,b,c\n1,2,3\n");
  CHECK_THROWS(read_trace_csv(bad));
}

TEST_CASE("summary agrees with the raw trace and completions") {
  auto sc = parse_scenario(kMinimal);
  sc.metrics_window = 100;
  const auto run = run_once(sc, 5);
  const auto& rows = run.trace;
  const auto n = static_cast<std::int64_t>(rows.size());
  REQUIRE(n > 0);

  double power = 0.0;
  double power2 = 0.0;
  for (const auto& r : rows) {
    power += r.action_power_w;
    if (r.transmission_index >= n / 2) power2 += r.action_power_w;
  }
  CHECK(std::abs(run.summary.avg_power - power / static_cast<double>(n)) <= 1e-9);
  CHECK(std::abs(run.summary.avg_power_second_half - power2 / static_cast<double>(n - n / 2)) <= 1e-9);
  CHECK(run.summary.final_beta == rows.back().beta);
  CHECK(run.summary.transmissions == n);

  // Sojourn: delivered requests plus outstanding ones aged to the end.
  const auto& sim = run.simulation;
  double sum = 0.0;
  for (const auto& c : sim.completions) sum += c.completion_time - c.arrival_time;
  for (double a : sim.pending_arrival_times) sum += sim.end_time - a;
  const double want = sum / static_cast<double>(sim.completions.size() + sim.pending_arrival_times.size());
  CHECK(std::abs(run.summary.mean_sojourn - want) <= 1e-9);

  // Windowed columns: last row's power window over the final 100 rows.
  double tail = 0.0;
  for (std::int64_t i = n - 100; i < n; ++i) tail += rows[static_cast<std::size_t>(i)].action_power_w;
  CHECK(std::abs(rows.back().avg_power_window - tail / 100.0) <= 1e-9);
}

TEST_CASE("run_scenario writes one trace and summary per seed") {
  auto sc = parse_scenario(kMinimal);
  sc.horizon = 300;
  sc.seeds = {1, 2};
  sc.algorithm = Algorithm::kConstant;
  const auto dir = std::filesystem::temp_directory_path() / "mcast_run_test";
  std::filesystem::remove_all(dir);
  sc.output_dir = dir.string();
  const auto out = run_scenario(sc, 2);
  REQUIRE(out.size() == 2);
  CHECK(std::filesystem::exists(dir / "tiny_constant_seed1.csv"));
  CHECK(std::filesystem::exists(dir / "tiny_constant_seed2.summary.json"));
  CHECK(out[0].avg_power == doctest::Approx(7.0));
  std::filesystem::remove_all(dir);
}

TEST_CASE("sweep emits one row per rate and algorithm") {
  auto sc = parse_scenario(kMinimal);
  sc.horizon = 400;
  const std::vector<double> rates{0.4, 1.2, 2.0, 2.8, 3.6};
  const std::vector<Algorithm> algs{Algorithm::kConstant, Algorithm::kOracle, Algorithm::kAcDqn};
  const auto table = sweep_arrivals(sc, rates, algs);
  CHECK(table.rows.size() == 15);
  CHECK(table.per_seed.size() == 15);
  const auto csv = sweep_csv(table);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 16);
  CHECK_THROWS(sweep_arrivals(sc, std::vector<double>{}, algs));
}

TEST_CASE("compare: identical traces give zero deltas, mismatched horizons fail") {
  auto sc = parse_scenario(kMinimal);
  sc.horizon = 1000;
  const auto run = run_once(sc, 5);
  const auto rep = compare_runs(run.trace, run.trace, 100);
  CHECK(rep.windows.size() == 10);
  for (const auto& w : rep.windows) {
    CHECK(w.power_b - w.power_a == 0.0);
    if (std::isfinite(w.sojourn_a)) CHECK(w.sojourn_b - w.sojourn_a == 0.0);
  }
  CHECK(rep.power_delta == 0.0);
  CHECK(rep.sojourn_improvement_pct == 0.0);

  auto shorter = run.trace;
  shorter.pop_back();
  CHECK_THROWS_AS(compare_runs(run.trace, shorter, 100), std::invalid_argument);
  CHECK_THROWS(compare_runs(run.trace, run.trace, 0));
}

TEST_CASE("oracle requires discrete channels") {
  auto sc = load_scenario(kScenarios + "large-20user.yaml");
  sc.algorithm = Algorithm::kOracle;
  CHECK_FALSE(validation_errors(sc).empty());
}

}  // TEST_SUITE
