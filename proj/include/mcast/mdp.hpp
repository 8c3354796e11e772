#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "mcast/config.hpp"

namespace mcast {

// Network input: L normalized gains followed by L request indicators.
struct StateVector {
  Eigen::VectorXd values;

  std::size_t size() const { return static_cast<std::size_t>(values.size()); }
  bool operator==(const StateVector& other) const { return values == other.values; }
};

// Gains are divided by gain_scale; V is copied as 0/1. Throws
// std::invalid_argument when |H| != |V|.
StateVector encode_state(std::span<const double> gains, std::span<const std::uint8_t> requested, double gain_scale);

// r = successes - beta * power.
inline double lagrangian_reward(double successes, double power, double beta) { return successes - beta * power; }

// Mean of the last min(T_W, n) chosen powers. Transmissions only; idle time
// does not enter.
class PowerWindow {
 public:
  explicit PowerWindow(std::size_t window);

  void push(double power);
  double mean() const;
  bool warm() const { return count_ >= buf_.size(); }
  bool empty() const { return count_ == 0; }
  std::size_t window() const { return buf_.size(); }

 private:
  std::vector<double> buf_;
  std::size_t next_ = 0;
  std::size_t count_ = 0;
  double sum_ = 0.0;
};

struct WindowPower {
  double value = 0.0;
  bool warm_up = false;  // fewer than T_W samples (including none)
};

WindowPower window_power(std::span<const double> history, std::size_t window);

}  // namespace mcast
