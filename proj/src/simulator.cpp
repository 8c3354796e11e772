#include "mcast/simulator.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "mcast/channel.hpp"

namespace mcast {

namespace {

void check_conservation(const MulticastQueue& queue, const SimulationResult& r) {
  const auto done = static_cast<std::int64_t>(r.completions.size());
  const auto pending = static_cast<std::int64_t>(queue.pending_count());
  if (done + pending != r.arrivals + r.initial_requests) {
    throw std::logic_error("run_simulation: request conservation violated (" + std::to_string(done) + " + " +
                           std::to_string(pending) + " != " + std::to_string(r.arrivals + r.initial_requests) + ")");
  }
}

}  // namespace

SimulationResult run_simulation(const SystemConfig& config, PowerController& controller,
                                const SimulationOptions& options) {
  validate(config);
  if (options.horizon < 1) throw std::invalid_argument("run_simulation: horizon must be >= 1");

  Rng arrival_rng = make_stream(options.seed, Stream::kArrivals);
  Rng channel_rng = make_stream(options.seed, Stream::kChannels);
  ArrivalProcess arrivals(config, options.schedule);
  ChannelSampler channels(config);
  MulticastQueue queue(config.catalog_size);

  SimulationResult result;
  for (const auto& entry : options.initial_entries) {
    result.initial_requests += static_cast<std::int64_t>(entry.pending.size());
    queue.requeue(entry);
  }

  const double service_time = config.service_time();
  const double end_time = arrivals.schedule_end();
  double now = 0.0;
  auto next = arrivals.next(arrival_rng, now);

  std::vector<double> gains(static_cast<std::size_t>(config.num_users));
  result.records.reserve(static_cast<std::size_t>(std::min<std::int64_t>(options.horizon, 1 << 22)));

  std::int64_t t = 0;
  while (t < options.horizon) {
    if (queue.empty()) {
      if (!next) {
        result.idle_forever = true;
        break;
      }
      now = next->time;
      queue.enqueue(next->file_id, next->user_id, next->time);
      ++result.arrivals;
      next = arrivals.next(arrival_rng, now);
      result.max_queue_length = std::max(result.max_queue_length, queue.size());
      if (options.check_invariants) {
        queue.check_invariants();
        check_conservation(queue, result);
      }
      continue;
    }
    if (now >= end_time) break;

    channels.sample(channel_rng, gains);
    const auto requested = queue.head().requested_mask(config.num_users);
    DecisionPoint decision{t, now, queue.head().file_id, gains, requested};
    const double power = controller.choose(decision);

    ServiceOutcome outcome = serve_head(queue, gains, power, config, now);
    for (auto& c : outcome.completed) {
      c.transmission = t;
      result.completions.push_back(c);
    }
    const double reward = controller.observe(outcome);
    const ControllerStatus status = controller.status();

    const double done = now + service_time;
    while (next && next->time <= done) {
      queue.enqueue(next->file_id, next->user_id, next->time);
      ++result.arrivals;
      next = arrivals.next(arrival_rng, next->time);
    }

    TransmissionRecord rec;
    rec.index = t;
    rec.time = now;
    rec.power = power;
    rec.reward = reward;
    rec.successes = outcome.reward_successes;
    rec.requested = static_cast<int>(std::count(requested.begin(), requested.end(), std::uint8_t{1}));
    rec.beta = status.beta;
    rec.epsilon = status.epsilon;
    result.records.push_back(rec);

    now = done;
    ++t;
    result.max_queue_length = std::max(result.max_queue_length, queue.size());
    if (options.check_invariants) {
      queue.check_invariants();
      check_conservation(queue, result);
    }
  }

  result.pending_at_end = queue.pending_count();
  for (const auto& entry : queue)
    for (const auto& req : entry.pending) result.pending_arrival_times.push_back(req.arrival_time);
  std::sort(result.pending_arrival_times.begin(), result.pending_arrival_times.end());
  result.end_time = now;
  return result;
}

}  // namespace mcast
