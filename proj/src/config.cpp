#include "mcast/config.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mcast {

namespace {

std::string indexed(const std::string& base, std::size_t i) {
  return base + "[" + std::to_string(i) + "]";
}

void check_channel(const ChannelModel& model, const std::string& path,
                   std::vector<ConfigError>& errors) {
  if (const auto* d = std::get_if<DiscreteChannel>(&model)) {
    if (d->gains.empty()) {
      errors.emplace_back(path + ".values", "must be non-empty");
      return;
    }
    if (d->gains.size() != d->probs.size()) {
      errors.emplace_back(path + ".probs", "length must match values");
      return;
    }
    for (std::size_t i = 0; i < d->gains.size(); ++i) {
      if (!(d->gains[i] > 0.0)) errors.emplace_back(indexed(path + ".values", i), "gain must be > 0");
      if (!(d->probs[i] >= 0.0)) errors.emplace_back(indexed(path + ".probs", i), "probability must be >= 0");
    }
    const double total = std::accumulate(d->probs.begin(), d->probs.end(), 0.0);
    if (std::abs(total - 1.0) > 1e-12) errors.emplace_back(path + ".probs", "must sum to 1");
  } else {
    const auto& e = std::get<ExponentialChannel>(model);
    if (!(e.mean > 0.0)) errors.emplace_back(path + ".mean", "must be > 0");
  }
}

}  // namespace

std::vector<ConfigError> validation_errors(const SystemConfig& c) {
  std::vector<ConfigError> errors;
  if (c.num_users < 1) errors.emplace_back("system.num_users", "must be >= 1");
  if (c.catalog_size < 1) errors.emplace_back("system.catalog_size", "must be >= 1");
  if (!(c.file_size_bits > 0.0)) errors.emplace_back("system.file_size_bits", "must be > 0");
  if (!(c.tx_rate_bps > 0.0)) errors.emplace_back("system.tx_rate_bps", "must be > 0");
  if (!(c.bandwidth_hz > 0.0)) errors.emplace_back("system.bandwidth_hz", "must be > 0");
  if (!(c.noise_power > 0.0)) errors.emplace_back("system.noise_power", "must be > 0");
  if (!(c.arrival_rate >= 0.0)) errors.emplace_back("system.arrival_rate", "must be >= 0");
  if (!(c.zipf_exponent >= 0.0)) errors.emplace_back("system.zipf_exponent", "must be >= 0");
  if (c.max_attempts < 1) errors.emplace_back("system.max_attempts", "must be >= 1");
  if (!(c.gain_scale > 0.0)) errors.emplace_back("system.gain_scale", "must be > 0");

  if (c.power_levels.empty()) {
    errors.emplace_back("system.power_levels", "must be non-empty");
  } else {
    for (std::size_t i = 0; i < c.power_levels.size(); ++i) {
      if (!(c.power_levels[i] >= 0.0)) errors.emplace_back(indexed("system.power_levels", i), "must be >= 0");
      if (i > 0 && !(c.power_levels[i] > c.power_levels[i - 1]))
        errors.emplace_back(indexed("system.power_levels", i), "levels must be strictly increasing");
    }
    const double lo = c.power_levels.front();
    const double hi = c.power_levels.back();
    if (!(c.avg_power_constraint >= lo && c.avg_power_constraint <= hi))
      errors.emplace_back("system.avg_power_constraint", "must lie within [min, max] of power_levels");
  }

  if (c.num_users >= 1 && c.channels.size() != static_cast<std::size_t>(c.num_users)) {
    errors.emplace_back("channels", "need exactly one channel model per user (got " +
                                        std::to_string(c.channels.size()) + ")");
  }
  for (std::size_t j = 0; j < c.channels.size(); ++j) check_channel(c.channels[j], indexed("channels", j), errors);
  return errors;
}

void validate(const SystemConfig& config) {
  auto errors = validation_errors(config);
  if (!errors.empty()) throw errors.front();
}

std::vector<double> evenly_spaced_levels(double lo, double hi, int count) {
  if (count < 1) throw std::invalid_argument("evenly_spaced_levels: count must be >= 1");
  if (count == 1) return {lo};
  std::vector<double> levels(static_cast<std::size_t>(count));
  const double step = (hi - lo) / (count - 1);
  for (int i = 0; i < count; ++i) levels[static_cast<std::size_t>(i)] = lo + step * i;
  levels.back() = hi;
  return levels;
}

bool all_channels_discrete(const SystemConfig& config) {
  return std::all_of(config.channels.begin(), config.channels.end(),
                     [](const ChannelModel& m) { return std::holds_alternative<DiscreteChannel>(m); });
}

Rng make_stream(std::uint64_t seed, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return Rng(seq);
}

}  // namespace mcast
