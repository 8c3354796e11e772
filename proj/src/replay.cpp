#include "mcast/replay.hpp"

#include <random>
#include <stdexcept>

namespace mcast {

ReplayMemory::ReplayMemory(std::size_t capacity) : buf_(capacity) {
  if (capacity == 0) throw std::invalid_argument("ReplayMemory: capacity must be >= 1");
}

void ReplayMemory::push(Transition t) {
  if (size_ < buf_.size()) {
    buf_[(head_ + size_) % buf_.size()] = std::move(t);
    ++size_;
  } else {
    buf_[head_] = std::move(t);
    head_ = (head_ + 1) % buf_.size();
  }
}

const Transition& ReplayMemory::at(std::size_t i) const {
  if (i >= size_) throw std::out_of_range("ReplayMemory::at: index out of range");
  return buf_[(head_ + i) % buf_.size()];
}

std::vector<std::size_t> ReplayMemory::sample_indices(std::size_t n, Rng& rng) const {
  if (size_ == 0) throw std::logic_error("ReplayMemory::sample: memory is empty");
  std::uniform_int_distribution<std::size_t> pick(0, size_ - 1);
  std::vector<std::size_t> idx(n);
  for (auto& i : idx) i = pick(rng);
  return idx;
}

std::vector<const Transition*> ReplayMemory::sample(std::size_t n, Rng& rng) const {
  std::vector<const Transition*> out;
  out.reserve(n);
  for (std::size_t i : sample_indices(n, rng)) out.push_back(&at(i));
  return out;
}

}  // namespace mcast
