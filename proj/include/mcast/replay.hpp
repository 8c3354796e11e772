#pragma once

#include <cstddef>
#include <vector>

#include "mcast/config.hpp"
#include "mcast/mdp.hpp"

namespace mcast {

// One MDP step: (S_t, A_t, r_t, C_P(S_t), S_{t+1}).
struct Transition {
  StateVector state;
  int action = 0;
  double reward = 0.0;  // already shaped with the beta in force at time t
  double window_power = 0.0;
  StateVector next_state;
  // Raw parts of the reward, for re-shaping with a later beta.
  int successes = 0;
  double power = 0.0;
};

// Bounded FIFO of transitions. Once full, each push evicts the oldest.
class ReplayMemory {
 public:
  explicit ReplayMemory(std::size_t capacity);

  void push(Transition t);

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return buf_.size(); }
  bool empty() const { return size_ == 0; }

  // i = 0 is the oldest stored transition.
  const Transition& at(std::size_t i) const;

  // n draws, uniform with replacement; returns age-order indices.
  std::vector<std::size_t> sample_indices(std::size_t n, Rng& rng) const;
  std::vector<const Transition*> sample(std::size_t n, Rng& rng) const;

 private:
  std::vector<Transition> buf_;
  std::size_t head_ = 0;  // slot of the oldest element
  std::size_t size_ = 0;
};

}  // namespace mcast
