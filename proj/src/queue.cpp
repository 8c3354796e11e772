#include "mcast/queue.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "mcast/channel.hpp"

namespace mcast {

std::vector<std::uint8_t> QueueEntry::requested_mask(int num_users) const {
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(num_users), 0);
  for (const auto& r : pending) mask.at(static_cast<std::size_t>(r.user_id)) = 1;
  return mask;
}

MulticastQueue::MulticastQueue(int catalog_size) {
  if (catalog_size < 1) throw std::invalid_argument("MulticastQueue: catalog_size must be >= 1");
  index_.resize(static_cast<std::size_t>(catalog_size));
  present_.assign(static_cast<std::size_t>(catalog_size), 0);
}

void MulticastQueue::check_file(int file_id) const {
  if (file_id < 0 || file_id >= catalog_size())
    throw std::out_of_range("MulticastQueue: file_id " + std::to_string(file_id) + " outside catalog");
}

void MulticastQueue::enqueue(int file_id, int user_id, double now) {
  check_file(file_id);
  const auto f = static_cast<std::size_t>(file_id);
  if (present_[f]) {
    index_[f]->pending.push_back({user_id, now});
    return;
  }
  entries_.push_back(QueueEntry{file_id, {{user_id, now}}, 0});
  index_[f] = std::prev(entries_.end());
  present_[f] = 1;
}

void MulticastQueue::requeue(QueueEntry entry) {
  check_file(entry.file_id);
  if (entry.pending.empty()) return;
  const auto f = static_cast<std::size_t>(entry.file_id);
  if (present_[f]) {
    auto& existing = index_[f]->pending;
    existing.insert(existing.end(), entry.pending.begin(), entry.pending.end());
    std::stable_sort(existing.begin(), existing.end(),
                     [](const PendingRequest& a, const PendingRequest& b) { return a.arrival_time < b.arrival_time; });
    return;
  }
  entry.attempts = 0;
  entries_.push_back(std::move(entry));
  index_[f] = std::prev(entries_.end());
  present_[f] = 1;
}

const QueueEntry& MulticastQueue::head() const {
  if (entries_.empty()) throw std::logic_error("MulticastQueue: head of empty queue");
  return entries_.front();
}

QueueEntry& MulticastQueue::head() {
  if (entries_.empty()) throw std::logic_error("MulticastQueue: head of empty queue");
  return entries_.front();
}

QueueEntry MulticastQueue::pop_head() {
  if (entries_.empty()) throw std::logic_error("MulticastQueue: pop from empty queue");
  QueueEntry e = std::move(entries_.front());
  entries_.pop_front();
  present_[static_cast<std::size_t>(e.file_id)] = 0;
  return e;
}

const QueueEntry* MulticastQueue::find(int file_id) const {
  check_file(file_id);
  const auto f = static_cast<std::size_t>(file_id);
  return present_[f] ? &*index_[f] : nullptr;
}

std::size_t MulticastQueue::pending_count() const {
  std::size_t n = 0;
  for (const auto& e : entries_) n += e.pending.size();
  return n;
}

void MulticastQueue::check_invariants() const {
  if (entries_.size() > index_.size()) throw std::logic_error("MulticastQueue: length exceeds catalog size");
  std::vector<std::uint8_t> seen(index_.size(), 0);
  for (const auto& e : entries_) {
    const auto f = static_cast<std::size_t>(e.file_id);
    if (seen[f]) throw std::logic_error("MulticastQueue: duplicate entry for file " + std::to_string(e.file_id));
    if (!present_[f] || &*index_[f] != &e) throw std::logic_error("MulticastQueue: stale file index");
    if (e.pending.empty()) throw std::logic_error("MulticastQueue: empty entry for file " + std::to_string(e.file_id));
    seen[f] = 1;
  }
  const auto marked = std::count(present_.begin(), present_.end(), std::uint8_t{1});
  if (static_cast<std::size_t>(marked) != entries_.size()) throw std::logic_error("MulticastQueue: presence mismatch");
}

ServiceOutcome serve_head(MulticastQueue& queue, std::span<const double> gains, double power,
                          const SystemConfig& config, double now) {
  if (queue.empty()) throw std::logic_error("serve_head: queue is empty");
  const int num_users = config.num_users;
  if (gains.size() != static_cast<std::size_t>(num_users))
    throw std::invalid_argument("serve_head: gain vector length != num_users");

  QueueEntry& head = queue.head();
  ServiceOutcome out;
  out.file_id = head.file_id;
  out.power = power;
  out.served_users = head.requested_mask(num_users);
  out.success_mask.assign(static_cast<std::size_t>(num_users), 0);
  for (int j = 0; j < num_users; ++j) {
    const auto u = static_cast<std::size_t>(j);
    if (out.served_users[u] && power > p_req(gains[u], config)) {
      out.success_mask[u] = 1;
      ++out.reward_successes;
    }
  }

  const double done = now + config.service_time();
  std::vector<PendingRequest> failed;
  for (const auto& r : head.pending) {
    if (out.success_mask[static_cast<std::size_t>(r.user_id)]) {
      out.completed.push_back({r.user_id, head.file_id, r.arrival_time, done, -1});
    } else {
      failed.push_back(r);
    }
  }

  if (failed.empty()) {
    queue.pop_head();
    return out;
  }
  head.pending = std::move(failed);
  ++head.attempts;
  if (head.attempts < config.max_attempts) {
    out.retransmit_at_head = true;
    return out;
  }
  QueueEntry residual = queue.pop_head();
  residual.attempts = 0;
  queue.requeue(std::move(residual));
  out.looped_back = true;
  return out;
}

}  // namespace mcast
