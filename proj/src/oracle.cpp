#include "mcast/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mcast/channel.hpp"

namespace mcast {

DiscreteStateSpace::DiscreteStateSpace(const SystemConfig& config) {
  if (!all_channels_discrete(config))
    throw UnsupportedForBaseline("baseline oracle needs discrete channel models for every user");
  if (config.num_users > 16) throw UnsupportedForBaseline("baseline oracle supports at most 16 users");
  for (const auto& model : config.channels) {
    gain_values_.push_back(std::get<DiscreteChannel>(model).gains);
    num_gain_combos_ *= gain_values_.back().size();
  }
  num_masks_ = (std::size_t{1} << config.num_users) - 1;
}

std::size_t DiscreteStateSpace::index(std::span<const double> gains, std::span<const std::uint8_t> requested) const {
  const std::size_t users = gain_values_.size();
  if (gains.size() != users || requested.size() != users)
    throw std::invalid_argument("DiscreteStateSpace::index: vector length != num_users");
  std::size_t combo = 0;
  std::size_t radix = 1;
  std::size_t mask = 0;
  for (std::size_t j = 0; j < users; ++j) {
    const auto& values = gain_values_[j];
    const auto it = std::find(values.begin(), values.end(), gains[j]);
    if (it == values.end()) throw std::invalid_argument("DiscreteStateSpace::index: gain not in the user's support");
    combo += static_cast<std::size_t>(it - values.begin()) * radix;
    radix *= values.size();
    if (requested[j]) mask |= std::size_t{1} << j;
  }
  if (mask == 0) throw std::invalid_argument("DiscreteStateSpace::index: no requesting user");
  return combo * num_masks_ + (mask - 1);
}

std::vector<double> DiscreteStateSpace::gains(std::size_t k) const {
  std::size_t combo = k / num_masks_;
  std::vector<double> out;
  for (const auto& values : gain_values_) {
    out.push_back(values[combo % values.size()]);
    combo /= values.size();
  }
  return out;
}

std::vector<std::uint8_t> DiscreteStateSpace::requested(std::size_t k) const {
  const std::size_t mask = k % num_masks_ + 1;
  std::vector<std::uint8_t> out(gain_values_.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = (mask >> j) & 1U;
  return out;
}

std::vector<std::vector<double>> reward_table(const DiscreteStateSpace& space, const SystemConfig& config) {
  std::vector<std::vector<double>> table(space.size(), std::vector<double>(config.power_levels.size(), 0.0));
  for (std::size_t k = 0; k < space.size(); ++k) {
    const auto h = space.gains(k);
    const auto v = space.requested(k);
    for (std::size_t a = 0; a < config.power_levels.size(); ++a) {
      int successes = 0;
      for (std::size_t j = 0; j < h.size(); ++j)
        if (v[j] && config.power_levels[a] > p_req(h[j], config)) ++successes;
      table[k][a] = successes;
    }
  }
  return table;
}

double policy_value(const AllocationProblem& p, const TabularPolicy& policy) {
  double v = 0.0;
  for (std::size_t k = 0; k < p.q.size(); ++k) v += p.q[k] * p.reward[k][static_cast<std::size_t>(policy.actions[k])];
  return v;
}

double policy_power(const AllocationProblem& p, const TabularPolicy& policy) {
  double v = 0.0;
  for (std::size_t k = 0; k < p.q.size(); ++k) v += p.q[k] * p.powers[static_cast<std::size_t>(policy.actions[k])];
  return v;
}

TabularPolicy lagrangian_policy(const AllocationProblem& p, double mu) {
  TabularPolicy policy;
  policy.actions.resize(p.q.size());
  for (std::size_t k = 0; k < p.q.size(); ++k) {
    int best = 0;
    double best_score = p.reward[k][0] - mu * p.powers[0];
    for (std::size_t a = 1; a < p.powers.size(); ++a) {
      const double score = p.reward[k][a] - mu * p.powers[a];
      if (score > best_score) {
        best_score = score;
        best = static_cast<int>(a);
      }
    }
    policy.actions[k] = best;
  }
  return policy;
}

namespace {

void check_problem(const AllocationProblem& p) {
  if (p.powers.empty()) throw std::invalid_argument("allocation problem: no actions");
  if (p.reward.size() != p.q.size()) throw std::invalid_argument("allocation problem: reward rows != states");
  for (const auto& row : p.reward)
    if (row.size() != p.powers.size()) throw std::invalid_argument("allocation problem: reward columns != actions");
  for (std::size_t a = 1; a < p.powers.size(); ++a)
    if (!(p.powers[a] > p.powers[a - 1])) throw std::invalid_argument("allocation problem: powers must increase");
}

constexpr double kFeasTol = 1e-12;

}  // namespace

SweepResult lagrangian_sweep(const AllocationProblem& p) {
  check_problem(p);
  SweepResult out;
  out.dual_bound = std::numeric_limits<double>::infinity();

  auto consider = [&](double mu) {
    TabularPolicy policy = lagrangian_policy(p, mu);
    const double value = policy_value(p, policy);
    const double power = policy_power(p, policy);
    ++out.evaluations;
    out.dual_bound = std::min(out.dual_bound, value - mu * (power - p.budget));
    const bool feasible = power <= p.budget + kFeasTol;
    if (feasible && (!out.feasible || value > out.value || (value == out.value && power < out.power))) {
      out.feasible = true;
      out.policy = std::move(policy);
      out.value = value;
      out.power = power;
      out.multiplier = mu;
    }
    return feasible;
  };

  if (consider(0.0)) return out;

  // Above this multiplier the minimum power wins every state.
  double hi = 0.0;
  for (const auto& row : p.reward)
    for (std::size_t a = 1; a < p.powers.size(); ++a)
      hi = std::max(hi, (row[a] - row[0]) / (p.powers[a] - p.powers[0]));
  hi += 1.0;
  if (!consider(hi)) {
    // Even the all-minimum policy violates the budget.
    out.feasible = false;
    return out;
  }
  double lo = 0.0;
  for (int iter = 0; iter < 200 && hi - lo > 1e-13 * std::max(1.0, hi); ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (consider(mid)) hi = mid;
    else lo = mid;
  }
  return out;
}

BruteForceResult brute_force(const AllocationProblem& p, std::size_t max_states, std::size_t max_actions) {
  check_problem(p);
  const std::size_t states = p.q.size();
  const std::size_t actions = p.powers.size();
  if (states > max_states || actions > max_actions)
    throw InstanceTooLarge("brute_force: instance exceeds " + std::to_string(max_states) + " states / " +
                           std::to_string(max_actions) + " actions");

  BruteForceResult out;
  std::vector<int> digits(states, 0);
  double value = 0.0;
  double power = 0.0;
  for (std::size_t k = 0; k < states; ++k) {
    value += p.q[k] * p.reward[k][0];
    power += p.q[k] * p.powers[0];
  }
  while (true) {
    ++out.policies_checked;
    if (power <= p.budget + kFeasTol &&
        (!out.feasible || value > out.value + 1e-15 || (std::abs(value - out.value) <= 1e-15 && power < out.power))) {
      out.feasible = true;
      out.policy.actions = digits;
      out.value = value;
      out.power = power;
    }
    // Odometer increment with incremental sums.
    std::size_t k = 0;
    for (; k < states; ++k) {
      const auto old = static_cast<std::size_t>(digits[k]);
      const std::size_t next = (old + 1) % actions;
      value += p.q[k] * (p.reward[k][next] - p.reward[k][old]);
      power += p.q[k] * (p.powers[next] - p.powers[old]);
      digits[k] = static_cast<int>(next);
      if (next != 0) break;
    }
    if (k == states) break;
  }
  // Recompute exactly to shed accumulated rounding.
  if (out.feasible) {
    out.value = policy_value(p, out.policy);
    out.power = policy_power(p, out.policy);
  }
  return out;
}

double constant_policy(double budget) { return budget; }

double constant_policy(std::span<const double> levels, double budget) {
  if (levels.empty()) throw std::invalid_argument("constant_policy: no power levels");
  double best = levels[0];
  for (double l : levels)
    if (std::abs(l - budget) < std::abs(best - budget)) best = l;
  return best;
}

TabularController::TabularController(const SystemConfig& config, const DiscreteStateSpace& space,
                                     TabularPolicy policy)
    : config_(config), space_(space), policy_(std::move(policy)) {
  if (policy_.actions.size() != space_.size()) throw std::invalid_argument("TabularController: policy size != states");
}

double TabularController::choose(const DecisionPoint& d) {
  const std::size_t k = space_.index(d.gains, d.requested);
  return config_.power_levels[static_cast<std::size_t>(policy_.actions[k])];
}

namespace {

class CountingController : public PowerController {
 public:
  CountingController(const DiscreteStateSpace& space, PowerController& inner)
      : space_(space), inner_(inner), counts_(space.size(), 0) {}

  double choose(const DecisionPoint& d) override {
    ++counts_[space_.index(d.gains, d.requested)];
    ++total_;
    return inner_.choose(d);
  }
  double observe(const ServiceOutcome& o) override { return inner_.observe(o); }

  StationaryEstimate estimate() const {
    StationaryEstimate e;
    e.samples = total_;
    e.q.resize(counts_.size());
    for (std::size_t k = 0; k < counts_.size(); ++k)
      e.q[k] = static_cast<double>(counts_[k]) / static_cast<double>(total_);
    return e;
  }

 private:
  const DiscreteStateSpace& space_;
  PowerController& inner_;
  std::vector<std::int64_t> counts_;
  std::int64_t total_ = 0;
};

}  // namespace

StationaryEstimate estimate_stationary(const SystemConfig& config, const DiscreteStateSpace& space,
                                       PowerController& policy, std::int64_t num_samples, std::uint64_t seed) {
  if (!all_channels_discrete(config)) throw UnsupportedForBaseline("estimate_stationary: continuous channels");
  if (num_samples < 10000) throw std::invalid_argument("estimate_stationary: need at least 1e4 samples");
  CountingController counter(space, policy);
  SimulationOptions opts;
  opts.horizon = num_samples;
  opts.seed = seed;
  const auto result = run_simulation(config, counter, opts);
  if (result.records.empty()) throw std::runtime_error("estimate_stationary: no transmissions (arrival rate 0?)");
  return counter.estimate();
}

OracleSolution solve_oracle(const SystemConfig& config, const DiscreteStateSpace& space, std::int64_t num_samples,
                            int rounds, std::uint64_t seed) {
  if (rounds < 1) throw std::invalid_argument("solve_oracle: rounds must be >= 1");
  OracleSolution sol;
  sol.problem.reward = reward_table(space, config);
  sol.problem.powers = config.power_levels;
  sol.problem.budget = config.avg_power_constraint;

  ConstantController constant(constant_policy(config.avg_power_constraint));
  sol.estimate = estimate_stationary(config, space, constant, num_samples, seed);
  for (int r = 1; r <= rounds; ++r) {
    if (r > 1) {
      TabularController previous(config, space, sol.sweep.policy);
      sol.estimate = estimate_stationary(config, space, previous, num_samples, seed + static_cast<std::uint64_t>(r));
    }
    sol.problem.q = sol.estimate.q;
    sol.sweep = lagrangian_sweep(sol.problem);
    sol.rounds = r;
    if (!sol.sweep.feasible) break;
  }
  return sol;
}

}  // namespace mcast
