#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mcast/arrivals.hpp"
#include "mcast/config.hpp"
#include "mcast/queue.hpp"

namespace mcast {

// What a controller sees at the start of a service.
struct DecisionPoint {
  std::int64_t transmission = 0;
  double now = 0.0;
  int file_id = 0;
  std::span<const double> gains;              // H
  std::span<const std::uint8_t> requested;    // V
};

struct ControllerStatus {
  double beta = 0.0;
  double epsilon = 0.0;
};

// Chooses the transmit power at each service start and receives the result.
class PowerController {
 public:
  virtual ~PowerController() = default;

  virtual double choose(const DecisionPoint& decision) = 0;

  // Returns the reward to log for this transmission (shaped, if the
  // controller shapes rewards).
  virtual double observe(const ServiceOutcome& outcome) { return outcome.reward_successes; }

  virtual ControllerStatus status() const { return {}; }
};

struct TransmissionRecord {
  std::int64_t index = 0;
  double time = 0.0;  // service start, seconds
  double power = 0.0;
  double reward = 0.0;
  int successes = 0;
  int requested = 0;  // |V|
  double beta = 0.0;
  double epsilon = 0.0;
};

struct SimulationOptions {
  std::int64_t horizon = 1;            // maximum transmissions
  std::vector<RateSegment> schedule;   // empty: constant config.arrival_rate
  std::vector<QueueEntry> initial_entries;
  std::uint64_t seed = 1;
  bool check_invariants = false;       // queue + conservation checks after every event
};

struct SimulationResult {
  std::vector<TransmissionRecord> records;
  std::vector<Completion> completions;
  std::int64_t arrivals = 0;
  std::int64_t initial_requests = 0;
  std::size_t pending_at_end = 0;
  std::vector<double> pending_arrival_times;  // requests still queued at end_time
  std::size_t max_queue_length = 0;
  double end_time = 0.0;
  bool idle_forever = false;  // stopped because no arrival will ever come
};

// Event loop: serve while the queue is non-empty, otherwise jump to the next
// arrival. Arrivals during a service are enqueued at its end, after any
// loop-back, in arrival order. Stops after `horizon` transmissions, at the
// end of the arrival schedule, or when idle with no future arrivals.
SimulationResult run_simulation(const SystemConfig& config, PowerController& controller,
                                const SimulationOptions& options);

}  // namespace mcast
