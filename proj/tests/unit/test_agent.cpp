#include <cmath>
#include <filesystem>
#include <vector>

#include "doctest.h"
#include "mcast/agent.hpp"
#include "mcast/mdp.hpp"
#include "mcast/replay.hpp"

using namespace mcast;

namespace {

StateVector state_of(std::initializer_list<double> v) {
  StateVector s;
  s.values = Eigen::VectorXd(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) s.values[i++] = x;
  return s;
}

Transition transition(int id) {
  return Transition{state_of({double(id), 0.0}), id % 3, double(id), 7.0, state_of({double(id + 1), 0.0})};
}

// 99th percentile of chi-square with k degrees of freedom (Wilson-Hilferty).
double chi2_critical_99(double k) {
  const double z = 2.326347874;
  const double a = 2.0 / (9.0 * k);
  return k * std::pow(1.0 - a + z * std::sqrt(a), 3.0);
}

AgentHyperparams small_hp() {
  AgentHyperparams hp;
  hp.hidden_layers = {16, 8};
  hp.minibatch = 4;
  hp.target_period = 10;
  hp.replay_capacity = 100;
  return hp;
}

}  // namespace

TEST_SUITE("agent") {

TEST_CASE("greedy action and tie-breaking") {
  Eigen::VectorXd q(3);
  q << 1.0, 3.0, 2.0;
  CHECK(greedy_action(q) == 1);
  q << 2.0, 2.0, 1.0;
  CHECK(greedy_action(q) == 0);
  Eigen::VectorXd r(5);
  r << 0.3, -1.0, 0.9, 0.2, 0.9;
  const int a = greedy_action(r);
  CHECK(a == 2);
  CHECK(greedy_action((r.array() + 123.4).matrix()) == a);
  CHECK(greedy_action((r.array() - 7.0).matrix()) == a);
  CHECK_THROWS(greedy_action(Eigen::VectorXd()));
}

TEST_CASE("epsilon-greedy: epsilon 0 is greedy, epsilon 1 is uniform") {
  Rng rng(1);
  auto net = QNetwork::zeros({2, 4, 20});
  net.set_parameter(net.num_parameters() - 20 + 13, 5.0);  // output bias of action 13
  const auto s = state_of({0.5, 1.0});
  for (int i = 0; i < 100; ++i) CHECK(act(net, s, 0.0, rng) == 13);

  std::vector<int> count(20, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++count[static_cast<std::size_t>(act(net, s, 1.0, rng))];
  for (int c : count) CHECK(std::abs(c / double(n) - 0.05) <= 0.005);
  CHECK_THROWS(act(net, s, 1.5, rng));
}

TEST_CASE("exploration schedule") {
  CHECK(epsilon_schedule(2, 1.0, 0.98, 0.01) == doctest::Approx(0.9604));
  CHECK(epsilon_schedule(0, 1.0, 0.98, 0.01) == 1.0);
  CHECK(epsilon_schedule(100000, 1.0, 0.98, 0.01) == 0.01);
  for (std::int64_t t : {0, 50, 100000}) CHECK(epsilon_schedule(t, 0.05, 1.0, 0.05) == 0.05);
}

TEST_CASE("bellman targets") {
  auto target = QNetwork::zeros({2, 3, 2});
  Transition tr = transition(0);
  tr.reward = 1.5;
  const std::vector<const Transition*> batch{&tr};
  // Zero target network: Y = r.
  CHECK(compute_targets(target, batch, 0.9)[0] == doctest::Approx(1.5));
  // Output biases 2.0 and -1.0: max Q = 2.0, Y = 1.5 + 0.9 * 2 = 3.3.
  const std::size_t last = target.num_parameters();
  target.set_parameter(last - 2, 2.0);
  target.set_parameter(last - 1, -1.0);
  CHECK(compute_targets(target, batch, 0.9)[0] == doctest::Approx(3.3));
  CHECK(compute_targets(target, batch, 0.0)[0] == doctest::Approx(1.5));
  CHECK_THROWS(compute_targets(target, std::vector<const Transition*>{}, 0.9));
}

TEST_CASE("lagrange step") {
  CHECK(lagrange_step(0.1, 9.0, 7.0, 1e-4) == doctest::Approx(0.1002));
  CHECK(lagrange_step(0.3, 7.0, 7.0, 1e-4) == 0.3);
  CHECK(lagrange_step(0.0, 3.0, 7.0, 1e-4) == 0.0);
  CHECK(lagrange_step(1e-5, 0.0, 7.0, 1e-3) == 0.0);
}

TEST_CASE("replay memory evicts oldest first") {
  ReplayMemory m(3);
  CHECK(m.empty());
  for (int i = 0; i < 5; ++i) m.push(transition(i));
  CHECK(m.size() == 3);
  CHECK(m.capacity() == 3);
  CHECK(m.at(0).reward == 2.0);
  CHECK(m.at(2).reward == 4.0);
  CHECK_THROWS(m.at(3));
  CHECK_THROWS(ReplayMemory(0));

  Rng rng(4);
  ReplayMemory r(50);
  std::uniform_int_distribution<int> k(1, 7);
  for (int i = 0; i < 1000; i += k(rng)) {
    r.push(transition(i));
    REQUIRE(r.size() <= 50);
    for (std::size_t j = 1; j < r.size(); ++j) REQUIRE(r.at(j - 1).reward < r.at(j).reward);
  }
}

TEST_CASE("replay sampling is uniform") {
  const std::size_t cap = 100;
  ReplayMemory m(cap);
  for (int i = 0; i < 250; ++i) m.push(transition(i));
  Rng rng(12);
  std::vector<double> hits(cap, 0.0);
  const int draws = 100000;
  for (int i = 0; i < draws / 64 + 1; ++i)
    for (auto idx : m.sample_indices(64, rng)) hits[idx] += 1.0;
  double total = 0.0;
  for (double h : hits) total += h;
  const double expect = total / cap;
  double chi2 = 0.0;
  for (double h : hits) chi2 += (h - expect) * (h - expect) / expect;
  CHECK(chi2 < chi2_critical_99(cap - 1));
  CHECK_THROWS(ReplayMemory(4).sample(1, rng));
}

TEST_CASE("no training before the memory holds a minibatch") {
  auto hp = small_hp();
  DqnAgent agent(2, 3, hp, Algorithm::kDqn, 7.0, 5);
  const auto start = agent.online();
  for (int i = 0; i < hp.minibatch - 1; ++i) {
    agent.step(transition(i));
    CHECK(agent.online() == start);
  }
  agent.step(transition(99));
  CHECK_FALSE(agent.online() == start);
}

TEST_CASE("target network is frozen between syncs") {
  auto hp = small_hp();
  DqnAgent agent(2, 3, hp, Algorithm::kDqn, 7.0, 6);
  auto frozen = agent.target();
  for (int t = 1; t <= 5 * hp.target_period; ++t) {
    agent.step(transition(t));
    if (t % hp.target_period == 0) {
      CHECK(agent.target() == agent.online());
      frozen = agent.target();
    } else {
      REQUIRE(agent.target() == frozen);
    }
  }
}

TEST_CASE("lagrange multiplier: nonnegative, constant when eta2 = 0") {
  auto hp = small_hp();
  hp.lagrange_lr = {0.0, 0.0, 1.0, StepMode::kConstant};
  hp.initial_beta = 0.25;
  DqnAgent fixed(2, 3, hp, Algorithm::kAcDqn, 7.0, 7);
  for (int i = 0; i < 50; ++i) fixed.step(transition(i));
  CHECK(fixed.beta() == 0.25);

  hp.lagrange_lr = {0.01, 0.0, 1.0, StepMode::kConstant};
  hp.initial_beta = 0.0;
  DqnAgent moving(2, 3, hp, Algorithm::kAcDqn, 7.0, 7);
  for (int i = 0; i < 50; ++i) {
    Transition tr = transition(i);
    tr.window_power = (i / 10) % 2 ? 1.0 : 12.0;
    moving.step(tr);
    REQUIRE(moving.beta() >= 0.0);
  }
  // DQN never moves beta.
  DqnAgent dqn(2, 3, hp, Algorithm::kDqn, 7.0, 7);
  for (int i = 0; i < 20; ++i) dqn.step(transition(i));
  CHECK(dqn.beta() == 0.0);
}

TEST_CASE("reshaped replay rewards follow the current beta") {
  auto hp = small_hp();
  hp.initial_beta = 0.2;
  const auto shaped = [](int i, double beta) {
    Transition tr = transition(i);
    tr.successes = i % 3;
    tr.power = 1.0 + i % 5;
    tr.reward = lagrangian_reward(tr.successes, tr.power, beta);
    tr.window_power = 12.0;
    return tr;
  };

  // Fixed beta: stored rewards already match, so both modes train identically.
  hp.lagrange_lr = {0.0, 0.0, 1.0, StepMode::kConstant};
  DqnAgent stored(2, 3, hp, Algorithm::kAcDqn, 7.0, 8);
  hp.reshape_replay = true;
  DqnAgent reshaped(2, 3, hp, Algorithm::kAcDqn, 7.0, 8);
  for (int i = 0; i < 40; ++i) {
    stored.step(shaped(i, 0.2));
    reshaped.step(shaped(i, 0.2));
  }
  CHECK(stored.online() == reshaped.online());

  // Moving beta: stored rewards go stale and the two diverge.
  hp.lagrange_lr = {0.01, 0.0, 1.0, StepMode::kConstant};
  hp.reshape_replay = false;
  DqnAgent a(2, 3, hp, Algorithm::kAcDqn, 7.0, 8);
  hp.reshape_replay = true;
  DqnAgent b(2, 3, hp, Algorithm::kAcDqn, 7.0, 8);
  for (int i = 0; i < 40; ++i) {
    a.step(shaped(i, a.beta()));
    b.step(shaped(i, b.beta()));
  }
  CHECK(a.beta() == b.beta());
  CHECK_FALSE(a.online() == b.online());
}

TEST_CASE("bandit reduction: Q converges to mean rewards") {
  AgentHyperparams hp;
  hp.gamma = 0.0;
  hp.hidden_layers = {16, 8};
  hp.minibatch = 32;
  hp.replay_capacity = 2000;
  hp.value_lr = {0.02, 0.0, 1.0, StepMode::kConstant};
  DqnAgent agent(2, 3, hp, Algorithm::kDqn, 7.0, 11);
  const double mean[3] = {1.0, 2.0, 3.0};
  Rng rng(13);
  std::uniform_int_distribution<int> pick(0, 2);
  std::uniform_real_distribution<double> noise(-0.5, 0.5);
  const auto s = state_of({0.5, 1.0});
  for (int t = 0; t < 10000; ++t) {
    const int a = pick(rng);
    agent.step(Transition{s, a, mean[a] + noise(rng), 0.0, s});
  }
  const Eigen::VectorXd q = agent.online().forward(s.values);
  for (int a = 0; a < 3; ++a) CHECK(std::abs(q[a] - mean[a]) <= 0.05 * mean[a]);
}

TEST_CASE("hyperparameter validation") {
  AgentHyperparams hp;
  hp.value_lr = {1e-3, 1e-5, 0.8, StepMode::kDecaying};
  hp.lagrange_lr = {1e-4, 1e-5, 1.0, StepMode::kDecaying};
  CHECK(validation_errors(hp).empty());

  // Equal exponents: eta2/eta1 does not vanish.
  hp.value_lr.exponent = 1.0;
  auto errs = validation_errors(hp);
  REQUIRE(errs.size() == 1);
  CHECK(errs[0].field() == "agent.lagrange_lr.exponent");

  AgentHyperparams track;
  track.mode = AgentMode::kTracking;
  track.value_lr = {1e-3, 0.0, 1.0, StepMode::kConstant};
  track.lagrange_lr = {3e-5, 0.0, 1.0, StepMode::kConstant};
  CHECK(validation_errors(track).empty());
  track.lagrange_lr.initial = 5e-4;
  CHECK_FALSE(validation_errors(track).empty());
  track.lagrange_lr = {3e-5, 1e-5, 1.0, StepMode::kDecaying};
  CHECK_FALSE(validation_errors(track).empty());

  AgentHyperparams bad;
  bad.gamma = 1.0;
  bad.minibatch = 0;
  CHECK(validation_errors(bad).size() >= 2);
}

TEST_CASE("checkpoint round trip") {
  auto hp = small_hp();
  hp.lagrange_lr = {0.01, 0.0, 1.0, StepMode::kConstant};
  hp.value_lr = {0.01, 0.0, 1.0, StepMode::kConstant};
  hp.mode = AgentMode::kTracking;
  DqnAgent a(2, 3, hp, Algorithm::kAcDqn, 7.0, 21);
  for (int i = 0; i < 37; ++i) {
    Transition tr = transition(i);
    tr.window_power = 9.0;
    a.step(tr);
  }
  const auto dir = (std::filesystem::temp_directory_path() / "mcast_ckpt_test").string();
  std::filesystem::remove_all(dir);
  a.save_checkpoint(dir);

  DqnAgent b(2, 3, hp, Algorithm::kAcDqn, 7.0, 99);
  b.load_checkpoint(dir);
  CHECK(b.online() == a.online());
  CHECK(b.target() == a.target());
  CHECK(b.beta() == a.beta());
  CHECK(b.steps() == a.steps());
  CHECK(b.epsilon() == a.epsilon());

  DqnAgent wrong(2, 4, hp, Algorithm::kAcDqn, 7.0, 1);
  CHECK_THROWS(wrong.load_checkpoint(dir));
  std::filesystem::remove_all(dir);
}

}  // TEST_SUITE
