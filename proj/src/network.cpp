#include "mcast/network.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace mcast {

namespace {

void check_sizes(const std::vector<int>& sizes) {
  if (sizes.size() < 2) throw std::invalid_argument("QNetwork: need at least input and output sizes");
  for (int s : sizes)
    if (s <= 0) throw std::invalid_argument("QNetwork: layer sizes must be positive");
}

void check_batch(const QNetwork& net, const Eigen::MatrixXd& states, std::span<const int> actions,
                 const Eigen::VectorXd& targets) {
  if (states.rows() != net.input_size()) throw std::invalid_argument("QNetwork: state length != input size");
  if (states.cols() < 1) throw std::invalid_argument("QNetwork: empty batch");
  if (static_cast<Eigen::Index>(actions.size()) != states.cols() || targets.size() != states.cols())
    throw std::invalid_argument("QNetwork: batch component sizes differ");
  for (int a : actions)
    if (a < 0 || a >= net.output_size()) throw std::invalid_argument("QNetwork: action index out of range");
}

}  // namespace

QNetwork QNetwork::zeros(const std::vector<int>& sizes) {
  check_sizes(sizes);
  QNetwork net;
  for (std::size_t k = 0; k + 1 < sizes.size(); ++k) {
    net.layers_.push_back({Eigen::MatrixXd::Zero(sizes[k + 1], sizes[k]), Eigen::VectorXd::Zero(sizes[k + 1])});
  }
  return net;
}

QNetwork QNetwork::initialize(const std::vector<int>& sizes, Rng& rng) {
  QNetwork net = zeros(sizes);
  for (std::size_t k = 0; k < net.layers_.size(); ++k) {
    const bool relu_follows = k + 1 < net.layers_.size();
    const double fan_in = sizes[k];
    std::normal_distribution<double> dist(0.0, std::sqrt((relu_follows ? 2.0 : 1.0) / fan_in));
    auto& w = net.layers_[k].weights;
    for (Eigen::Index c = 0; c < w.cols(); ++c)
      for (Eigen::Index r = 0; r < w.rows(); ++r) w(r, c) = dist(rng);
  }
  return net;
}

int QNetwork::input_size() const { return layers_.empty() ? 0 : static_cast<int>(layers_.front().weights.cols()); }
int QNetwork::output_size() const { return layers_.empty() ? 0 : static_cast<int>(layers_.back().weights.rows()); }

std::vector<std::pair<int, int>> QNetwork::layer_shapes() const {
  std::vector<std::pair<int, int>> shapes;
  for (const auto& l : layers_) shapes.emplace_back(static_cast<int>(l.weights.cols()), static_cast<int>(l.weights.rows()));
  return shapes;
}

Eigen::VectorXd QNetwork::forward(const Eigen::VectorXd& state) const {
  if (state.size() != input_size()) throw std::invalid_argument("QNetwork::forward: state length != input size");
  Eigen::VectorXd a = state;
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    Eigen::VectorXd z = layers_[k].weights * a + layers_[k].bias;
    a = (k + 1 < layers_.size()) ? Eigen::VectorXd(z.cwiseMax(0.0)) : z;
  }
  return a;
}

Eigen::MatrixXd QNetwork::forward_batch(const Eigen::MatrixXd& states) const {
  if (states.rows() != input_size()) throw std::invalid_argument("QNetwork::forward_batch: state length != input size");
  Eigen::MatrixXd a = states;
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    Eigen::MatrixXd z = layers_[k].weights * a;
    z.colwise() += layers_[k].bias;
    if (k + 1 < layers_.size()) z = z.cwiseMax(0.0);
    a = std::move(z);
  }
  return a;
}

double QNetwork::loss(const Eigen::MatrixXd& states, std::span<const int> actions,
                      const Eigen::VectorXd& targets) const {
  check_batch(*this, states, actions, targets);
  const Eigen::MatrixXd q = forward_batch(states);
  double sum = 0.0;
  for (Eigen::Index j = 0; j < states.cols(); ++j) {
    const double d = targets[j] - q(actions[static_cast<std::size_t>(j)], j);
    sum += d * d;
  }
  return sum / static_cast<double>(states.cols());
}

double QNetwork::loss_and_gradient(const Eigen::MatrixXd& states, std::span<const int> actions,
                                   const Eigen::VectorXd& targets, Gradients& grad) const {
  check_batch(*this, states, actions, targets);
  const std::size_t depth = layers_.size();
  const Eigen::Index n = states.cols();

  // Keep every activation for the backward pass; acts[0] is the input.
  std::vector<Eigen::MatrixXd> acts(depth + 1);
  acts[0] = states;
  for (std::size_t k = 0; k < depth; ++k) {
    Eigen::MatrixXd z = layers_[k].weights * acts[k];
    z.colwise() += layers_[k].bias;
    if (k + 1 < depth) z = z.cwiseMax(0.0);
    acts[k + 1] = std::move(z);
  }

  const Eigen::MatrixXd& q = acts[depth];
  Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(q.rows(), n);
  double sum = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const int a = actions[static_cast<std::size_t>(j)];
    const double err = q(a, j) - targets[j];
    sum += err * err;
    delta(a, j) = 2.0 * err / static_cast<double>(n);
  }

  grad.layers.resize(depth);
  for (std::size_t k = depth; k-- > 0;) {
    grad.layers[k].weights.noalias() = delta * acts[k].transpose();
    grad.layers[k].bias = delta.rowwise().sum();
    if (k > 0) {
      Eigen::MatrixXd back = layers_[k].weights.transpose() * delta;
      // ReLU gate: post-activation > 0 iff pre-activation > 0.
      delta = (acts[k].array() > 0.0).select(back, 0.0);
    }
  }
  return sum / static_cast<double>(n);
}

void QNetwork::apply_gradient(const Gradients& grad, double learning_rate) {
  if (grad.layers.size() != layers_.size()) throw std::invalid_argument("QNetwork: gradient depth mismatch");
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    layers_[k].weights.noalias() -= learning_rate * grad.layers[k].weights;
    layers_[k].bias.noalias() -= learning_rate * grad.layers[k].bias;
  }
}

double QNetwork::train_minibatch(const Eigen::MatrixXd& states, std::span<const int> actions,
                                 const Eigen::VectorXd& targets, double learning_rate) {
  if (!targets.allFinite()) throw std::invalid_argument("QNetwork::train_minibatch: non-finite target");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("QNetwork::train_minibatch: learning rate must be > 0");
  Gradients grad;
  const double l = loss_and_gradient(states, actions, targets, grad);
  apply_gradient(grad, learning_rate);
  return l;
}

std::size_t QNetwork::num_parameters() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += static_cast<std::size_t>(l.weights.size() + l.bias.size());
  return n;
}

const double* QNetwork::locate(std::size_t i) const {
  for (const auto& l : layers_) {
    const auto w = static_cast<std::size_t>(l.weights.size());
    if (i < w) return l.weights.data() + i;
    i -= w;
    const auto b = static_cast<std::size_t>(l.bias.size());
    if (i < b) return l.bias.data() + i;
    i -= b;
  }
  throw std::out_of_range("QNetwork: parameter index out of range");
}

double* QNetwork::locate(std::size_t i) { return const_cast<double*>(std::as_const(*this).locate(i)); }

double QNetwork::parameter(std::size_t i) const { return *locate(i); }
void QNetwork::set_parameter(std::size_t i, double value) { *locate(i) = value; }

double QNetwork::gradient_entry(const Gradients& grad, std::size_t i) const {
  for (const auto& l : grad.layers) {
    const auto w = static_cast<std::size_t>(l.weights.size());
    if (i < w) return l.weights.data()[i];
    i -= w;
    const auto b = static_cast<std::size_t>(l.bias.size());
    if (i < b) return l.bias.data()[i];
    i -= b;
  }
  throw std::out_of_range("QNetwork: gradient index out of range");
}

bool QNetwork::all_finite() const {
  for (const auto& l : layers_)
    if (!l.weights.allFinite() || !l.bias.allFinite()) return false;
  return true;
}

void QNetwork::save(std::ostream& out) const {
  fmt::print(out, "mcast-qnetwork 1\nlayers {}\n", layers_.size());
  for (const auto& l : layers_) fmt::print(out, "dense {} {}\n", l.weights.cols(), l.weights.rows());
  for (const auto& l : layers_) {
    for (Eigen::Index r = 0; r < l.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weights.cols(); ++c) fmt::print(out, c ? " {}" : "{}", l.weights(r, c));
      out << '\n';
    }
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) fmt::print(out, r ? " {}" : "{}", l.bias[r]);
    out << '\n';
  }
}

QNetwork QNetwork::load(std::istream& in) {
  std::string tag;
  int version = 0;
  std::size_t depth = 0;
  if (!(in >> tag >> version) || tag != "mcast-qnetwork" || version != 1)
    throw std::runtime_error("QNetwork::load: bad header");
  if (!(in >> tag >> depth) || tag != "layers" || depth == 0) throw std::runtime_error("QNetwork::load: bad layer count");
  std::vector<int> sizes;
  for (std::size_t k = 0; k < depth; ++k) {
    int fan_in = 0;
    int fan_out = 0;
    if (!(in >> tag >> fan_in >> fan_out) || tag != "dense") throw std::runtime_error("QNetwork::load: bad layer shape");
    if (k == 0) sizes.push_back(fan_in);
    else if (sizes.back() != fan_in) throw std::runtime_error("QNetwork::load: layer shapes do not chain");
    sizes.push_back(fan_out);
  }
  QNetwork net = zeros(sizes);
  for (auto& l : net.layers_) {
    for (Eigen::Index r = 0; r < l.weights.rows(); ++r)
      for (Eigen::Index c = 0; c < l.weights.cols(); ++c)
        if (!(in >> l.weights(r, c))) throw std::runtime_error("QNetwork::load: truncated weights");
    for (Eigen::Index r = 0; r < l.bias.size(); ++r)
      if (!(in >> l.bias[r])) throw std::runtime_error("QNetwork::load: truncated bias");
  }
  return net;
}

void QNetwork::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("QNetwork::save: cannot open " + path);
  save(out);
}

QNetwork QNetwork::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("QNetwork::load: cannot open " + path);
  return load(in);
}

}  // namespace mcast
