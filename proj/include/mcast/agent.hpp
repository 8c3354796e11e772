#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "mcast/config.hpp"
#include "mcast/mdp.hpp"
#include "mcast/network.hpp"
#include "mcast/replay.hpp"
#include "mcast/schedule.hpp"
#include "mcast/simulator.hpp"

namespace mcast {

enum class Algorithm { kConstant, kDqn, kAcDqn, kOracle };

// stationary: decaying steps, two-timescale ratio -> 0.
// tracking:   constant steps with eta2 << eta1, persistent exploration.
enum class AgentMode { kStationary, kTracking };

struct AgentHyperparams {
  double gamma = 0.9;
  ExplorationSchedule exploration{1.0, 0.98, 0.01};
  StepSchedule value_lr{1e-3, 1e-5, 1.0, StepMode::kDecaying};
  StepSchedule lagrange_lr{1e-4, 1e-5, 1.0, StepMode::kDecaying};
  double initial_beta = 0.0;
  int minibatch = 64;
  int target_period = 100;
  int power_window = 200;
  std::size_t replay_capacity = 30000;
  std::vector<int> hidden_layers{128, 64};
  AgentMode mode = AgentMode::kStationary;
  // AC-DQN only: recompute replayed rewards as successes - beta * power with
  // the current beta instead of the beta in force when they were stored.
  bool reshape_replay = false;
};

// Field-path errors for inconsistent hyperparameters, including the
// timescale requirements of each mode.
std::vector<ConfigError> validation_errors(const AgentHyperparams& hp);

// Index of the largest q-value; ties go to the lowest index.
int greedy_action(const Eigen::VectorXd& q_values);

// Epsilon-greedy choice over q_values.
int act(const QNetwork& net, const StateVector& state, double epsilon, Rng& rng);

// Y_i = r_i + gamma * max_a' Q_target(S_{i+1}, a').
Eigen::VectorXd compute_targets(const QNetwork& target, std::span<const Transition* const> batch, double gamma);

// beta' = max(0, beta + eta2 * (C_P - P_bar)).
inline double lagrange_step(double beta, double window_power, double budget, double eta2) {
  const double next = beta + eta2 * (window_power - budget);
  return next > 0.0 ? next : 0.0;
}

// DQN and AC-DQN learner. One call to step() per transmission.
class DqnAgent {
 public:
  DqnAgent(int state_size, int num_actions, AgentHyperparams hp, Algorithm algorithm, double power_budget,
           std::uint64_t seed);

  int act(const StateVector& state);

  // Algorithm-appropriate update: dqn_step for DQN, acdqn_step for AC-DQN.
  void step(Transition transition);

  // Store, train once on a minibatch when the memory holds >= n samples, and
  // sync the target every target_period steps.
  void dqn_step(Transition transition);

  // dqn_step followed by the Lagrange multiplier update.
  void acdqn_step(Transition transition);

  double beta() const { return beta_; }
  double epsilon() const { return hp_.exploration.at(t_); }
  std::int64_t steps() const { return t_; }
  double last_loss() const { return last_loss_; }
  Algorithm algorithm() const { return algorithm_; }
  const AgentHyperparams& hyperparams() const { return hp_; }

  const QNetwork& online() const { return online_; }
  const QNetwork& target() const { return target_; }
  const ReplayMemory& memory() const { return memory_; }

  // Writes online.qnet, target.qnet and meta.json into `dir`.
  void save_checkpoint(const std::string& dir) const;
  // Restores networks, beta and the step counter. The replay memory is not
  // part of a checkpoint.
  void load_checkpoint(const std::string& dir);

 private:
  AgentHyperparams hp_;
  Algorithm algorithm_;
  double budget_;
  QNetwork online_;
  QNetwork target_;
  ReplayMemory memory_;
  Rng explore_rng_;
  Rng replay_rng_;
  double beta_;
  std::int64_t t_ = 0;
  double last_loss_ = 0.0;

  // Minibatch scratch.
  Eigen::MatrixXd batch_states_;
  std::vector<int> batch_actions_;
};

// Adapts a DqnAgent to the simulator. Transitions are completed when the next
// decision state is observed.
class AgentController : public PowerController {
 public:
  AgentController(const SystemConfig& config, DqnAgent& agent);

  double choose(const DecisionPoint& decision) override;
  double observe(const ServiceOutcome& outcome) override;
  ControllerStatus status() const override { return status_; }

 private:
  const SystemConfig& config_;
  DqnAgent& agent_;
  PowerWindow window_;
  std::optional<Transition> pending_;
  ControllerStatus status_;
};

}  // namespace mcast
