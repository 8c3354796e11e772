#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mcast/config.hpp"
#include "mcast/simulator.hpp"

namespace mcast {

class UnsupportedForBaseline : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InstanceTooLarge : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Enumerates the (H, V) states of a system whose channels are all discrete.
// V = 0 is excluded: no decision is taken with nothing to serve.
//
// k = gain_combo * (2^L - 1) + (mask - 1), gain_combo in mixed radix over
// users (user 0 least significant).
class DiscreteStateSpace {
 public:
  // Throws UnsupportedForBaseline for continuous channels or L > 16.
  explicit DiscreteStateSpace(const SystemConfig& config);

  std::size_t size() const { return num_gain_combos_ * num_masks_; }
  int num_users() const { return static_cast<int>(gain_values_.size()); }

  std::size_t index(std::span<const double> gains, std::span<const std::uint8_t> requested) const;
  std::vector<double> gains(std::size_t k) const;
  std::vector<std::uint8_t> requested(std::size_t k) const;

 private:
  std::vector<std::vector<double>> gain_values_;
  std::size_t num_gain_combos_ = 1;
  std::size_t num_masks_ = 1;
};

struct StationaryEstimate {
  std::vector<double> q;  // indexed by DiscreteStateSpace index
  std::int64_t samples = 0;
};

// Power level index chosen in each enumerated state.
struct TabularPolicy {
  std::vector<int> actions;
};

// max sum_k q_k R_k(a_k)  s.t.  sum_k q_k P(a_k) <= budget, one action per state.
struct AllocationProblem {
  std::vector<double> q;
  std::vector<std::vector<double>> reward;  // [state][action]
  std::vector<double> powers;               // per action, increasing
  double budget = 0.0;
};

struct SweepResult {
  bool feasible = false;
  TabularPolicy policy;
  double value = 0.0;
  double power = 0.0;
  double multiplier = 0.0;
  // Smallest Lagrangian value seen; an upper bound on the true optimum.
  double dual_bound = 0.0;
  int evaluations = 0;
};

struct BruteForceResult {
  bool feasible = false;
  TabularPolicy policy;
  double value = 0.0;
  double power = 0.0;
  std::uint64_t policies_checked = 0;
};

// R_k(a) = sum_j V_{j,k} 1{P_a > P_req(H_{j,k})}.
std::vector<std::vector<double>> reward_table(const DiscreteStateSpace& space, const SystemConfig& config);

double policy_value(const AllocationProblem& problem, const TabularPolicy& policy);
double policy_power(const AllocationProblem& problem, const TabularPolicy& policy);

// Per-state argmax_a R_k(a) - mu * P(a), ties to the lower power.
TabularPolicy lagrangian_policy(const AllocationProblem& problem, double multiplier);

// Bisection on the multiplier; returns the best feasible deterministic policy
// seen (including mu = 0). feasible = false when even all-minimum power
// exceeds the budget.
SweepResult lagrangian_sweep(const AllocationProblem& problem);

// Exhaustive search over all |A|^|S| tabular policies. Throws
// InstanceTooLarge beyond max_states states or max_actions actions.
BruteForceResult brute_force(const AllocationProblem& problem, std::size_t max_states = 12,
                             std::size_t max_actions = 4);

// Fixed transmit power P_bar.
double constant_policy(double budget);
// Fixed transmit power snapped to the nearest level (ties to the lower one).
double constant_policy(std::span<const double> levels, double budget);

class ConstantController : public PowerController {
 public:
  explicit ConstantController(double power) : power_(power) {}
  double choose(const DecisionPoint&) override { return power_; }

 private:
  double power_;
};

class TabularController : public PowerController {
 public:
  TabularController(const SystemConfig& config, const DiscreteStateSpace& space, TabularPolicy policy);
  double choose(const DecisionPoint& decision) override;

 private:
  const SystemConfig& config_;
  const DiscreteStateSpace& space_;
  TabularPolicy policy_;
};

// Empirical (H, V) frequencies at service starts under `policy`, from a
// num_samples-transmission run at config.arrival_rate. Throws
// UnsupportedForBaseline for continuous channels and std::invalid_argument
// for num_samples < 1e4.
StationaryEstimate estimate_stationary(const SystemConfig& config, const DiscreteStateSpace& space,
                                       PowerController& policy, std::int64_t num_samples, std::uint64_t seed);

struct OracleSolution {
  StationaryEstimate estimate;
  AllocationProblem problem;
  SweepResult sweep;
  int rounds = 0;
};

// Round 1 estimates q under constant power P_bar and sweeps; each further
// round re-estimates q under the previous round's policy.
OracleSolution solve_oracle(const SystemConfig& config, const DiscreteStateSpace& space, std::int64_t num_samples,
                            int rounds, std::uint64_t seed);

}  // namespace mcast
