#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace mcast {

using Rng = std::mt19937_64;

// Finite-support gain distribution.
struct DiscreteChannel {
  std::vector<double> gains;
  std::vector<double> probs;
};

// Gain ~ Exponential with the given mean (not rate).
struct ExponentialChannel {
  double mean = 1.0;
};

using ChannelModel = std::variant<DiscreteChannel, ExponentialChannel>;

inline constexpr int kUnlimitedAttempts = std::numeric_limits<int>::max();

// Physical and traffic description of one downlink scenario.
//
// Users and files are 0-based: user j in [0, L), file i in [0, M). Zipf
// popularity uses rank i + 1.
struct SystemConfig {
  int num_users = 1;
  int catalog_size = 1;
  double file_size_bits = 1.0;
  double tx_rate_bps = 1.0;
  double bandwidth_hz = 1.0;
  double spectral_ratio = 1.0;  // C/B in the Shannon threshold exponent
  double noise_power = 1.0;
  double arrival_rate = 0.0;  // total lambda, requests/s
  double zipf_exponent = 0.0;
  int max_attempts = 1;  // N; kUnlimitedAttempts for N = infinity
  std::vector<double> power_levels;
  double avg_power_constraint = 0.0;
  std::vector<ChannelModel> channels;  // one per user
  double gain_scale = 1.0;  // state normalization for the agent

  double service_time() const { return file_size_bits / tx_rate_bps; }
  std::size_t num_actions() const { return power_levels.size(); }
};

// Raised for invalid configuration. `field` is a dotted path like
// "system.power_levels[3]".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// Collects every violated invariant. Empty when the config is valid.
std::vector<ConfigError> validation_errors(const SystemConfig& config);

// Throws the first validation error, if any.
void validate(const SystemConfig& config);

std::vector<double> evenly_spaced_levels(double lo, double hi, int count);

bool all_channels_discrete(const SystemConfig& config);

// Independent random streams, one per concern, all derived from one seed.
enum class Stream : std::uint64_t { kArrivals = 1, kChannels = 2, kExploration = 3, kReplay = 4, kInit = 5 };

Rng make_stream(std::uint64_t seed, Stream stream);

}  // namespace mcast
