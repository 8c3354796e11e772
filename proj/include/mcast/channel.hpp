#pragma once

#include <random>
#include <span>
#include <variant>
#include <vector>

#include "mcast/config.hpp"

namespace mcast {

// Shannon-threshold power needed to decode at gain h:
//   P_req = N_g / h^2 * (2^(C/B) - 1).
// Throws std::domain_error when h <= 0.
double p_req(double gain, const SystemConfig& config);

// Draws independent per-user gains, one vector per service.
class ChannelSampler {
 public:
  explicit ChannelSampler(const SystemConfig& config);

  void sample(Rng& rng, std::span<double> out);
  std::vector<double> sample(Rng& rng);

  std::size_t num_users() const { return users_.size(); }

 private:
  struct Discrete {
    std::vector<double> gains;
    std::discrete_distribution<std::size_t> pick;
  };
  using UserSampler = std::variant<Discrete, std::exponential_distribution<double>>;
  std::vector<UserSampler> users_;
};

std::vector<double> sample_channels(const SystemConfig& config, Rng& rng);

}  // namespace mcast
