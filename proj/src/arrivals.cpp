#include "mcast/arrivals.hpp"

#include <cmath>
#include <stdexcept>

namespace mcast {

std::vector<double> zipf_probabilities(int catalog_size, double exponent) {
  if (catalog_size < 1) throw std::invalid_argument("zipf_probabilities: catalog_size must be >= 1");
  std::vector<double> p(static_cast<std::size_t>(catalog_size));
  double total = 0.0;
  for (int i = 0; i < catalog_size; ++i) {
    p[static_cast<std::size_t>(i)] = std::pow(static_cast<double>(i + 1), -exponent);
    total += p[static_cast<std::size_t>(i)];
  }
  for (auto& v : p) v /= total;
  return p;
}

ArrivalProcess::ArrivalProcess(const SystemConfig& config, std::vector<RateSegment> schedule)
    : schedule_(std::move(schedule)), user_pick_(0, config.num_users - 1) {
  if (schedule_.empty()) {
    schedule_.push_back({std::numeric_limits<double>::infinity(), config.arrival_rate});
  }
  double t = 0.0;
  for (const auto& seg : schedule_) {
    if (!(seg.duration > 0.0)) throw std::invalid_argument("ArrivalProcess: segment duration must be > 0");
    if (!(seg.rate >= 0.0)) throw std::invalid_argument("ArrivalProcess: segment rate must be >= 0");
    starts_.push_back(t);
    t += seg.duration;
  }
  end_ = t;
  const auto weights = zipf_probabilities(config.catalog_size, config.zipf_exponent);
  file_pick_ = std::discrete_distribution<int>(weights.begin(), weights.end());
}

double ArrivalProcess::rate_at(double t) const {
  for (std::size_t k = 0; k < schedule_.size(); ++k) {
    if (t < starts_[k] + schedule_[k].duration) return schedule_[k].rate;
  }
  return 0.0;
}

std::optional<Arrival> ArrivalProcess::next(Rng& rng, double now) {
  double t = now;
  for (std::size_t k = 0; k < schedule_.size(); ++k) {
    const double seg_end = starts_[k] + schedule_[k].duration;
    if (t >= seg_end) continue;
    const double rate = schedule_[k].rate;
    if (rate > 0.0) {
      // Memorylessness lets us restart the clock at each boundary.
      const double dt = std::exponential_distribution<double>(rate)(rng);
      if (t + dt < seg_end) {
        Arrival a;
        a.time = t + dt;
        a.file_id = file_pick_(rng);
        a.user_id = user_pick_(rng);
        return a;
      }
    }
    t = seg_end;
  }
  return std::nullopt;
}

std::optional<Arrival> sample_arrival(const SystemConfig& config, Rng& rng, double now) {
  if (!(config.arrival_rate > 0.0)) return std::nullopt;
  return ArrivalProcess(config).next(rng, now);
}

}  // namespace mcast
