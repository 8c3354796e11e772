#pragma once

#include <vector>

#include "mcast/config.hpp"

namespace mcast::testing {

// T = 1 s, C/B = 1, N_g = 1, so p_req(h) = 1 / h^2.
inline SystemConfig unit_config(int users, int files, double lambda) {
  SystemConfig c;
  c.num_users = users;
  c.catalog_size = files;
  c.file_size_bits = 8e7;
  c.tx_rate_bps = 8e7;
  c.bandwidth_hz = 1e7;
  c.arrival_rate = lambda;
  c.power_levels = evenly_spaced_levels(1.0, 50.0, 20);
  c.avg_power_constraint = 7.0;
  c.channels.assign(static_cast<std::size_t>(users), DiscreteChannel{{1.0}, {1.0}});
  return c;
}

// The bundled small case, built by hand rather than parsed.
inline SystemConfig small_case(double lambda) {
  SystemConfig c = unit_config(4, 100, lambda);
  c.gain_scale = 0.9;
  c.channels = {DiscreteChannel{{0.1, 0.2, 0.3}, {}}, DiscreteChannel{{0.1, 0.2, 0.3}, {}},
                DiscreteChannel{{0.7, 0.8, 0.9}, {}}, DiscreteChannel{{0.7, 0.8, 0.9}, {}}};
  for (auto& ch : c.channels) std::get<DiscreteChannel>(ch).probs.assign(3, 1.0 / 3.0);
  return c;
}

}  // namespace mcast::testing
