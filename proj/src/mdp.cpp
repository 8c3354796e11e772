#include "mcast/mdp.hpp"

#include <stdexcept>

namespace mcast {

StateVector encode_state(std::span<const double> gains, std::span<const std::uint8_t> requested, double gain_scale) {
  if (gains.size() != requested.size()) throw std::invalid_argument("encode_state: |H| != |V|");
  if (!(gain_scale > 0.0)) throw std::invalid_argument("encode_state: gain_scale must be > 0");
  const auto n = static_cast<Eigen::Index>(gains.size());
  StateVector s{Eigen::VectorXd(2 * n)};
  for (Eigen::Index j = 0; j < n; ++j) {
    s.values[j] = gains[static_cast<std::size_t>(j)] / gain_scale;
    s.values[n + j] = requested[static_cast<std::size_t>(j)] ? 1.0 : 0.0;
  }
  return s;
}

PowerWindow::PowerWindow(std::size_t window) : buf_(window, 0.0) {
  if (window < 1) throw std::invalid_argument("PowerWindow: window must be >= 1");
}

void PowerWindow::push(double power) {
  if (count_ >= buf_.size()) {
    sum_ -= buf_[next_];
  } else {
    ++count_;
  }
  buf_[next_] = power;
  sum_ += power;
  next_ = (next_ + 1) % buf_.size();
  // Periodic exact resum keeps the running sum from drifting.
  if (next_ == 0) {
    sum_ = 0.0;
    for (double p : buf_) sum_ += p;
  }
}

double PowerWindow::mean() const { return count_ == 0 ? 0.0 : sum_ / static_cast<double>(count_); }

WindowPower window_power(std::span<const double> history, std::size_t window) {
  if (window < 1) throw std::invalid_argument("window_power: T_W must be >= 1");
  if (history.empty()) return {0.0, true};
  const std::size_t n = std::min(window, history.size());
  double sum = 0.0;
  for (std::size_t i = history.size() - n; i < history.size(); ++i) sum += history[i];
  return {sum / static_cast<double>(n), history.size() < window};
}

}  // namespace mcast
