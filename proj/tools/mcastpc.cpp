// mcastpc: multicast power-control simulator and learner.
//
//   mcastpc run <scenario.yaml> [--seed N]... [--horizon N] [--out DIR] [--algorithm A] [--lambda X]
//   mcastpc sweep <scenario.yaml> --lambdas 0.4,1.2 --algorithms constant,oracle,acdqn [--out FILE]
//   mcastpc compare <a.csv> <b.csv> [--window 1000] [--out FILE]
//   mcastpc oracle <scenario.yaml> [--seed N] [--samples N] [--rounds N] [--out FILE]
//
// Exit codes: 0 ok, 1 runtime failure, 2 invalid configuration, 3 infeasible.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "mcast/harness.hpp"

namespace {

constexpr int kRuntimeFailure = 1;
constexpr int kInvalidConfig = 2;
constexpr int kInfeasible = 3;

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

void apply_overrides(mcast::Scenario& sc, const std::vector<std::uint64_t>& seeds, long long horizon,
                     const std::string& out_dir, const std::string& algorithm, double lambda) {
  if (!seeds.empty()) sc.seeds = seeds;
  if (horizon > 0) sc.horizon = horizon;
  if (!out_dir.empty()) sc.output_dir = out_dir;
  if (!algorithm.empty()) sc.algorithm = mcast::parse_algorithm(algorithm);
  if (lambda >= 0.0) {
    sc.system.arrival_rate = lambda;
    sc.arrival_schedule.clear();
  }
  mcast::validate(sc);
}

std::string oracle_report(const mcast::Scenario& sc, const mcast::DiscreteStateSpace& space,
                          const mcast::OracleSolution& sol) {
  nlohmann::ordered_json j;
  j["scenario"] = sc.name;
  j["feasible"] = sol.sweep.feasible;
  j["rounds"] = sol.rounds;
  j["samples_per_round"] = sol.estimate.samples;
  j["value"] = sol.sweep.value;
  j["power"] = sol.sweep.power;
  j["budget"] = sol.problem.budget;
  j["multiplier"] = sol.sweep.multiplier;
  j["dual_bound"] = sol.sweep.dual_bound;
  j["value_gap_bound"] = sol.sweep.dual_bound - sol.sweep.value;
  auto& states = j["policy"] = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < space.size(); ++k) {
    if (sol.estimate.q[k] <= 0.0) continue;
    const auto v = space.requested(k);
    states.push_back({{"gains", space.gains(k)},
                      {"requested", std::vector<int>(v.begin(), v.end())},
                      {"q", sol.estimate.q[k]},
                      {"power", sc.system.power_levels[static_cast<std::size_t>(sol.sweep.policy.actions[k])]}});
  }
  return j.dump(2) + "\n";
}

std::vector<double> parse_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(std::stod(cell));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multicast downlink power control: simulation, DQN / AC-DQN learning, and exact baselines"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::vector<std::uint64_t> seeds;
  long long horizon = 0;
  std::string out_dir;
  std::string algorithm;
  double lambda = -1.0;
  int jobs = 1;

  auto* run = app.add_subcommand("run", "Run every seed of a scenario and write traces + summaries");
  run->add_option("scenario", scenario_path, "Scenario YAML")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", seeds, "Seed(s), overriding the scenario");
  run->add_option("--horizon", horizon, "Maximum transmissions");
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--algorithm", algorithm, "constant | dqn | acdqn | oracle");
  run->add_option("--lambda", lambda, "Constant arrival rate (drops any schedule)");
  run->add_option("--jobs", jobs, "Concurrent seeds");

  std::string lambdas = "0.4,1.2,2.0,2.8,3.6";
  std::string algorithms = "constant,oracle,acdqn";
  std::string out_file;
  auto* sweep = app.add_subcommand("sweep", "Delay-vs-rate table over arrival rates and algorithms");
  sweep->add_option("scenario", scenario_path, "Base scenario YAML")->required()->check(CLI::ExistingFile);
  sweep->add_option("--lambdas", lambdas, "Comma-separated arrival rates");
  sweep->add_option("--algorithms", algorithms, "Comma-separated algorithms");
  sweep->add_option("--seed", seeds, "Seed(s), overriding the scenario");
  sweep->add_option("--horizon", horizon, "Maximum transmissions");
  sweep->add_option("--out", out_file, "CSV output file (default stdout)");
  sweep->add_option("--jobs", jobs, "Concurrent runs");

  std::string trace_a;
  std::string trace_b;
  int window = 1000;
  auto* compare = app.add_subcommand("compare", "Per-window power and sojourn deltas between two traces");
  compare->add_option("trace_a", trace_a, "Reference trace CSV")->required()->check(CLI::ExistingFile);
  compare->add_option("trace_b", trace_b, "Candidate trace CSV")->required()->check(CLI::ExistingFile);
  compare->add_option("--window", window, "Window length in transmissions");
  compare->add_option("--out", out_file, "CSV output file (default stdout)");

  long long samples = 0;
  int rounds = 0;
  auto* oracle = app.add_subcommand("oracle", "Solve the stationary power-allocation problem exactly");
  oracle->add_option("scenario", scenario_path, "Scenario YAML (discrete channels)")->required()->check(CLI::ExistingFile);
  oracle->add_option("--seed", seeds, "Seed for the stationary estimate");
  oracle->add_option("--samples", samples, "Transmissions per estimation round");
  oracle->add_option("--rounds", rounds, "Fixed-point rounds");
  oracle->add_option("--lambda", lambda, "Arrival rate override");
  oracle->add_option("--out", out_file, "JSON report file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      auto sc = mcast::load_scenario(scenario_path);
      apply_overrides(sc, seeds, horizon, out_dir, algorithm, lambda);
      for (const auto& s : mcast::run_scenario(sc, jobs)) std::cout << mcast::summary_json(s) << '\n';
    } else if (*sweep) {
      auto sc = mcast::load_scenario(scenario_path);
      apply_overrides(sc, seeds, horizon, "", "", -1.0);
      std::vector<mcast::Algorithm> algs;
      std::stringstream ss(algorithms);
      for (std::string name; std::getline(ss, name, ',');) algs.push_back(mcast::parse_algorithm(name));
      const auto rates = parse_list(lambdas);
      emit(mcast::sweep_csv(mcast::sweep_arrivals(sc, rates, algs, jobs)), out_file);
    } else if (*compare) {
      const auto a = mcast::read_trace_csv(trace_a);
      const auto b = mcast::read_trace_csv(trace_b);
      const auto rep = mcast::compare_runs(a, b, window);
      emit(mcast::compare_csv(rep), out_file);
      std::cerr << fmt::format("mean power a={:.4f} b={:.4f} (delta {:+.4f}); sojourn improvement {:.2f}%\n",
                               rep.mean_power_a, rep.mean_power_b, rep.power_delta, rep.sojourn_improvement_pct);
    } else if (*oracle) {
      auto sc = mcast::load_scenario(scenario_path);
      if (samples > 0) sc.oracle_samples = samples;
      if (rounds > 0) sc.oracle_rounds = rounds;
      if (lambda >= 0.0) sc.system.arrival_rate = lambda;
      sc.algorithm = mcast::Algorithm::kOracle;
      mcast::validate(sc);
      mcast::DiscreteStateSpace space(sc.system);
      const auto sol = mcast::solve_oracle(sc.system, space, sc.oracle_samples, sc.oracle_rounds,
                                           seeds.empty() ? sc.seeds.front() : seeds.front());
      if (!sol.sweep.feasible) {
        std::cerr << "oracle: infeasible, minimum power exceeds the average power constraint\n";
        return kInfeasible;
      }
      emit(oracle_report(sc, space, sol), out_file);
    }
  } catch (const mcast::ConfigError& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return kInvalidConfig;
  } catch (const mcast::UnsupportedForBaseline& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return kInvalidConfig;
  } catch (const std::exception& e) {
    const std::string what = e.what();
    std::cerr << "error: " << what << '\n';
    return what.find("infeasible") != std::string::npos ? kInfeasible : kRuntimeFailure;
  }
  return 0;
}
