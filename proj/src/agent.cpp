#include "mcast/agent.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>

#include "json.hpp"

namespace mcast {

namespace {

std::vector<int> layer_sizes(int state_size, int num_actions, const std::vector<int>& hidden) {
  std::vector<int> sizes{state_size};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(num_actions);
  return sizes;
}

void check_step(const StepSchedule& s, const std::string& path, bool allow_zero, std::vector<ConfigError>& errors) {
  if (allow_zero ? !(s.initial >= 0.0) : !(s.initial > 0.0))
    errors.emplace_back(path + ".initial", allow_zero ? "must be >= 0" : "must be > 0");
  if (!(s.decay >= 0.0)) errors.emplace_back(path + ".decay", "must be >= 0");
  if (!(s.exponent > 0.5 && s.exponent <= 1.0)) errors.emplace_back(path + ".exponent", "must lie in (0.5, 1]");
}

}  // namespace

std::vector<ConfigError> validation_errors(const AgentHyperparams& hp) {
  std::vector<ConfigError> errors;
  if (!(hp.gamma >= 0.0 && hp.gamma < 1.0)) errors.emplace_back("agent.gamma", "must lie in [0, 1)");
  if (!(hp.exploration.initial >= 0.0 && hp.exploration.initial <= 1.0))
    errors.emplace_back("agent.epsilon.initial", "must lie in [0, 1]");
  if (!(hp.exploration.decay > 0.0 && hp.exploration.decay <= 1.0))
    errors.emplace_back("agent.epsilon.decay", "must lie in (0, 1]");
  if (!(hp.exploration.floor >= 0.0 && hp.exploration.floor <= 1.0))
    errors.emplace_back("agent.epsilon.floor", "must lie in [0, 1]");
  check_step(hp.value_lr, "agent.value_lr", false, errors);
  check_step(hp.lagrange_lr, "agent.lagrange_lr", true, errors);
  if (!(hp.initial_beta >= 0.0)) errors.emplace_back("agent.initial_beta", "must be >= 0");
  if (hp.minibatch < 1) errors.emplace_back("agent.minibatch", "must be >= 1");
  if (hp.target_period < 1) errors.emplace_back("agent.target_period", "must be >= 1");
  if (hp.power_window < 1) errors.emplace_back("agent.power_window", "must be >= 1");
  if (hp.replay_capacity < static_cast<std::size_t>(std::max(hp.minibatch, 1)))
    errors.emplace_back("agent.replay_capacity", "must be >= minibatch");
  for (std::size_t i = 0; i < hp.hidden_layers.size(); ++i)
    if (hp.hidden_layers[i] < 1) errors.emplace_back("agent.hidden_layers[" + std::to_string(i) + "]", "must be >= 1");

  const auto& v = hp.value_lr;
  const auto& l = hp.lagrange_lr;
  if (hp.mode == AgentMode::kStationary) {
    if (v.mode != StepMode::kDecaying || v.decay <= 0.0)
      errors.emplace_back("agent.value_lr", "stationary mode needs a decaying schedule with decay > 0");
    if (l.mode != StepMode::kDecaying || l.decay <= 0.0)
      errors.emplace_back("agent.lagrange_lr", "stationary mode needs a decaying schedule with decay > 0");
    // eta2/eta1 ~ t^(exp1 - exp2) -> 0 only if the slow schedule decays faster.
    if (!(l.exponent > v.exponent))
      errors.emplace_back("agent.lagrange_lr.exponent",
                          "stationary mode needs lagrange_lr.exponent > value_lr.exponent so eta2/eta1 -> 0");
  } else {
    if (v.mode != StepMode::kConstant) errors.emplace_back("agent.value_lr.mode", "tracking mode needs constant steps");
    if (l.mode != StepMode::kConstant) errors.emplace_back("agent.lagrange_lr.mode", "tracking mode needs constant steps");
    if (!(l.initial <= 0.1 * v.initial))
      errors.emplace_back("agent.lagrange_lr.initial", "tracking mode needs eta2 <= 0.1 * eta1");
  }
  return errors;
}

int greedy_action(const Eigen::VectorXd& q) {
  if (q.size() == 0) throw std::invalid_argument("greedy_action: empty q-vector");
  Eigen::Index best = 0;
  for (Eigen::Index a = 1; a < q.size(); ++a)
    if (q[a] > q[best]) best = a;
  return static_cast<int>(best);
}

int act(const QNetwork& net, const StateVector& state, double epsilon, Rng& rng) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("act: epsilon must lie in [0, 1]");
  if (epsilon > 0.0 && std::uniform_real_distribution<double>(0.0, 1.0)(rng) < epsilon) {
    return std::uniform_int_distribution<int>(0, net.output_size() - 1)(rng);
  }
  return greedy_action(net.forward(state.values));
}

Eigen::VectorXd compute_targets(const QNetwork& target, std::span<const Transition* const> batch, double gamma) {
  if (batch.empty()) throw std::invalid_argument("compute_targets: empty batch");
  const auto n = static_cast<Eigen::Index>(batch.size());
  Eigen::MatrixXd next(target.input_size(), n);
  for (Eigen::Index j = 0; j < n; ++j) next.col(j) = batch[static_cast<std::size_t>(j)]->next_state.values;
  const Eigen::MatrixXd q = target.forward_batch(next);
  Eigen::VectorXd y(n);
  for (Eigen::Index j = 0; j < n; ++j) y[j] = batch[static_cast<std::size_t>(j)]->reward + gamma * q.col(j).maxCoeff();
  return y;
}

DqnAgent::DqnAgent(int state_size, int num_actions, AgentHyperparams hp, Algorithm algorithm, double power_budget,
                   std::uint64_t seed)
    : hp_(std::move(hp)),
      algorithm_(algorithm),
      budget_(power_budget),
      memory_(hp_.replay_capacity),
      explore_rng_(make_stream(seed, Stream::kExploration)),
      replay_rng_(make_stream(seed, Stream::kReplay)),
      beta_(hp_.initial_beta) {
  if (algorithm_ != Algorithm::kDqn && algorithm_ != Algorithm::kAcDqn)
    throw std::invalid_argument("DqnAgent: algorithm must be dqn or acdqn");
  if (hp_.minibatch < 1 || hp_.target_period < 1) throw std::invalid_argument("DqnAgent: bad minibatch/target period");
  Rng init_rng = make_stream(seed, Stream::kInit);
  online_ = QNetwork::initialize(layer_sizes(state_size, num_actions, hp_.hidden_layers), init_rng);
  target_ = online_;
  batch_actions_.resize(static_cast<std::size_t>(hp_.minibatch));
  batch_states_.resize(state_size, hp_.minibatch);
}

int DqnAgent::act(const StateVector& state) { return mcast::act(online_, state, epsilon(), explore_rng_); }

void DqnAgent::step(Transition transition) {
  if (algorithm_ == Algorithm::kAcDqn) acdqn_step(std::move(transition));
  else dqn_step(std::move(transition));
}

void DqnAgent::dqn_step(Transition transition) {
  memory_.push(std::move(transition));
  const auto n = static_cast<std::size_t>(hp_.minibatch);
  if (memory_.size() >= n) {
    const auto batch = memory_.sample(n, replay_rng_);
    Eigen::VectorXd y = compute_targets(target_, batch, hp_.gamma);
    if (hp_.reshape_replay && algorithm_ == Algorithm::kAcDqn)
      for (std::size_t j = 0; j < n; ++j)
        y[static_cast<Eigen::Index>(j)] += lagrangian_reward(batch[j]->successes, batch[j]->power, beta_) - batch[j]->reward;
    for (std::size_t j = 0; j < n; ++j) {
      batch_states_.col(static_cast<Eigen::Index>(j)) = batch[j]->state.values;
      batch_actions_[j] = batch[j]->action;
    }
    last_loss_ = online_.train_minibatch(batch_states_, batch_actions_, y, hp_.value_lr.at(t_));
  }
  ++t_;
  if (t_ % hp_.target_period == 0) target_ = online_;
}

void DqnAgent::acdqn_step(Transition transition) {
  const double window_power = transition.window_power;
  const double eta2 = hp_.lagrange_lr.at(t_);
  dqn_step(std::move(transition));
  beta_ = lagrange_step(beta_, window_power, budget_, eta2);
}

void DqnAgent::save_checkpoint(const std::string& dir) const {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  online_.save((fs::path(dir) / "online.qnet").string());
  target_.save((fs::path(dir) / "target.qnet").string());
  nlohmann::json meta{{"format", "mcast-checkpoint"},
                      {"version", 1},
                      {"algorithm", algorithm_ == Algorithm::kAcDqn ? "acdqn" : "dqn"},
                      {"beta", beta_},
                      {"t", t_},
                      {"epsilon", epsilon()}};
  std::ofstream out(fs::path(dir) / "meta.json");
  if (!out) throw std::runtime_error("save_checkpoint: cannot write meta.json in " + dir);
  out << meta.dump(2) << '\n';
}

void DqnAgent::load_checkpoint(const std::string& dir) {
  namespace fs = std::filesystem;
  std::ifstream in(fs::path(dir) / "meta.json");
  if (!in) throw std::runtime_error("load_checkpoint: missing meta.json in " + dir);
  const auto meta = nlohmann::json::parse(in);
  if (meta.at("format") != "mcast-checkpoint" || meta.at("version") != 1)
    throw std::runtime_error("load_checkpoint: unsupported checkpoint format");
  QNetwork online = QNetwork::load((fs::path(dir) / "online.qnet").string());
  QNetwork target = QNetwork::load((fs::path(dir) / "target.qnet").string());
  if (online.layer_shapes() != online_.layer_shapes() || target.layer_shapes() != online_.layer_shapes())
    throw std::runtime_error("load_checkpoint: network shape does not match this agent");
  online_ = std::move(online);
  target_ = std::move(target);
  beta_ = meta.at("beta").get<double>();
  t_ = meta.at("t").get<std::int64_t>();
}

AgentController::AgentController(const SystemConfig& config, DqnAgent& agent)
    : config_(config), agent_(agent), window_(static_cast<std::size_t>(agent.hyperparams().power_window)) {}

double AgentController::choose(const DecisionPoint& decision) {
  StateVector s = encode_state(decision.gains, decision.requested, config_.gain_scale);
  if (pending_) {
    pending_->next_state = s;
    agent_.step(std::move(*pending_));
    pending_.reset();
  }
  status_.epsilon = agent_.epsilon();
  const int a = agent_.act(s);
  pending_ = Transition{std::move(s), a, 0.0, 0.0, {}};
  return config_.power_levels[static_cast<std::size_t>(a)];
}

double AgentController::observe(const ServiceOutcome& outcome) {
  window_.push(outcome.power);
  status_.beta = agent_.beta();
  pending_->reward = lagrangian_reward(outcome.reward_successes, outcome.power, status_.beta);
  pending_->window_power = window_.mean();
  pending_->successes = outcome.reward_successes;
  pending_->power = outcome.power;
  return pending_->reward;
}

}  // namespace mcast
