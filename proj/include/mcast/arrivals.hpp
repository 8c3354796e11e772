#pragma once

#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "mcast/config.hpp"

namespace mcast {

struct Arrival {
  int file_id = 0;
  int user_id = 0;
  double time = 0.0;
};

// Piecewise-constant total arrival rate. Rates switch abruptly at segment
// boundaries.
struct RateSegment {
  double duration = 0.0;  // seconds
  double rate = 0.0;      // requests/s
};

// P(file i) proportional to (i + 1)^-exponent.
std::vector<double> zipf_probabilities(int catalog_size, double exponent);

// Poisson request stream with lambda_ij = lambda * zipf(i) / L.
//
// With an empty schedule the rate is config.arrival_rate forever. With a
// schedule, no arrivals occur after the last segment ends.
class ArrivalProcess {
 public:
  explicit ArrivalProcess(const SystemConfig& config, std::vector<RateSegment> schedule = {});

  // First arrival strictly after `now`, or nullopt if the stream is exhausted
  // (zero rate with no later segment).
  std::optional<Arrival> next(Rng& rng, double now);

  double rate_at(double t) const;
  double schedule_end() const { return end_; }
  const std::vector<RateSegment>& schedule() const { return schedule_; }

 private:
  std::vector<RateSegment> schedule_;
  std::vector<double> starts_;
  double end_ = std::numeric_limits<double>::infinity();
  std::discrete_distribution<int> file_pick_;
  std::uniform_int_distribution<int> user_pick_;
};

// One draw from a stationary stream at rate config.arrival_rate; nullopt when
// lambda = 0.
std::optional<Arrival> sample_arrival(const SystemConfig& config, Rng& rng, double now);

}  // namespace mcast
