#include "mcast/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mcast {

double lr_schedule(std::int64_t t, double eta0, double decay, StepMode mode, double exponent) {
  if (mode == StepMode::kConstant) return eta0;
  if (decay < 0.0) throw std::invalid_argument("lr_schedule: decay must be >= 0");
  const double base = 1.0 + decay * static_cast<double>(t);
  return exponent == 1.0 ? eta0 / base : eta0 / std::pow(base, exponent);
}

double epsilon_schedule(std::int64_t t, double eps0, double decay, double floor) {
  if (!(decay > 0.0 && decay <= 1.0)) throw std::invalid_argument("epsilon_schedule: decay must be in (0, 1]");
  return std::max(floor, eps0 * std::pow(decay, static_cast<double>(t)));
}

}  // namespace mcast
