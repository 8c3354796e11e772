#pragma once

#include <cstdint>

namespace mcast {

enum class StepMode { kDecaying, kConstant };

// Step size at transmission t.
//   decaying: eta0 / (1 + decay * t)^exponent
//   constant: eta0
// exponent defaults to 1 (inverse-time). Any exponent in (1/2, 1] keeps
// sum eta = inf and sum eta^2 < inf; giving the fast schedule a smaller
// exponent than the slow one makes eta_slow / eta_fast -> 0.
double lr_schedule(std::int64_t t, double eta0, double decay, StepMode mode, double exponent = 1.0);

struct StepSchedule {
  double initial = 1e-3;
  double decay = 0.0;
  double exponent = 1.0;
  StepMode mode = StepMode::kDecaying;

  double at(std::int64_t t) const { return lr_schedule(t, initial, decay, mode, exponent); }
};

// epsilon_t = max(floor, eps0 * decay^t).
double epsilon_schedule(std::int64_t t, double eps0, double decay, double floor);

struct ExplorationSchedule {
  double initial = 1.0;
  double decay = 0.98;
  double floor = 0.01;

  double at(std::int64_t t) const { return epsilon_schedule(t, initial, decay, floor); }
};

}  // namespace mcast
