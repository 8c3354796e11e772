#pragma once

#include <cstdint>
#include <list>
#include <span>
#include <vector>

#include "mcast/config.hpp"

namespace mcast {

struct PendingRequest {
  int user_id = 0;
  double arrival_time = 0.0;
};

// All outstanding requests for one file, merged across users. A user may hold
// several timestamps if they re-requested before being served.
struct QueueEntry {
  int file_id = 0;
  std::vector<PendingRequest> pending;
  int attempts = 0;

  // V: 1 for every user with at least one pending timestamp.
  std::vector<std::uint8_t> requested_mask(int num_users) const;
};

// Single FIFO queue holding at most one entry per file. New requests merge
// into an existing entry in place; otherwise they go to the tail.
class MulticastQueue {
 public:
  using const_iterator = std::list<QueueEntry>::const_iterator;

  explicit MulticastQueue(int catalog_size);

  void enqueue(int file_id, int user_id, double now);

  // Re-inserts a residual entry at the tail, or merges its requests into the
  // existing entry for the same file.
  void requeue(QueueEntry entry);

  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  int catalog_size() const { return static_cast<int>(index_.size()); }

  const QueueEntry& head() const;
  QueueEntry& head();
  QueueEntry pop_head();

  const QueueEntry* find(int file_id) const;
  std::size_t pending_count() const;

  const_iterator begin() const { return entries_.begin(); }
  const_iterator end() const { return entries_.end(); }

  // Throws std::logic_error if length > M, a file appears twice, or an entry
  // is empty.
  void check_invariants() const;

 private:
  void check_file(int file_id) const;

  std::list<QueueEntry> entries_;
  std::vector<std::list<QueueEntry>::iterator> index_;
  std::vector<std::uint8_t> present_;
};

struct Completion {
  int user_id = 0;
  int file_id = 0;
  double arrival_time = 0.0;
  double completion_time = 0.0;
  std::int64_t transmission = -1;  // index of the successful service

  double sojourn() const { return completion_time - arrival_time; }
};

struct ServiceOutcome {
  int file_id = 0;
  double power = 0.0;
  std::vector<std::uint8_t> served_users;  // V
  std::vector<std::uint8_t> success_mask;
  int reward_successes = 0;
  std::vector<Completion> completed;
  bool retransmit_at_head = false;
  bool looped_back = false;
};

// Transmits the head file at `power` under channel gains H. User j succeeds
// iff power > p_req(H_j). Successful timestamps complete at now + T. Failed
// users stay at the head while attempts < N, otherwise loop back to the tail
// with attempts reset. Throws std::logic_error on an empty queue.
ServiceOutcome serve_head(MulticastQueue& queue, std::span<const double> gains, double power,
                          const SystemConfig& config, double now);

}  // namespace mcast
