#include "mcast/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace mcast {

double p_req(double gain, const SystemConfig& config) {
  if (!(gain > 0.0)) throw std::domain_error("p_req: channel gain must be > 0");
  return config.noise_power / (gain * gain) * (std::exp2(config.spectral_ratio) - 1.0);
}

ChannelSampler::ChannelSampler(const SystemConfig& config) {
  users_.reserve(config.channels.size());
  for (const auto& model : config.channels) {
    if (const auto* d = std::get_if<DiscreteChannel>(&model)) {
      users_.emplace_back(Discrete{d->gains, std::discrete_distribution<std::size_t>(d->probs.begin(), d->probs.end())});
    } else {
      users_.emplace_back(std::exponential_distribution<double>(1.0 / std::get<ExponentialChannel>(model).mean));
    }
  }
}

void ChannelSampler::sample(Rng& rng, std::span<double> out) {
  if (out.size() != users_.size()) throw std::invalid_argument("ChannelSampler: output length != num_users");
  for (std::size_t j = 0; j < users_.size(); ++j) {
    if (auto* d = std::get_if<Discrete>(&users_[j])) {
      out[j] = d->gains[d->pick(rng)];
    } else {
      auto& exp = std::get<std::exponential_distribution<double>>(users_[j]);
      double h = 0.0;
      // exponential_distribution can return exactly 0; gains must stay positive.
      do {
        h = exp(rng);
      } while (!(h > 0.0));
      out[j] = h;
    }
  }
}

std::vector<double> ChannelSampler::sample(Rng& rng) {
  std::vector<double> out(users_.size());
  sample(rng, out);
  return out;
}

std::vector<double> sample_channels(const SystemConfig& config, Rng& rng) {
  return ChannelSampler(config).sample(rng);
}

}  // namespace mcast
