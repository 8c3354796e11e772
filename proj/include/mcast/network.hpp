#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "mcast/config.hpp"

namespace mcast {

struct DenseLayer {
  Eigen::MatrixXd weights;  // fan_out x fan_in
  Eigen::VectorXd bias;     // fan_out

  bool operator==(const DenseLayer& o) const { return weights == o.weights && bias == o.bias; }
};

// Fully connected Q-network. Hidden layers use ReLU; the output layer is
// linear with one unit per action. Batches are column-major: one sample per
// column.
class QNetwork {
 public:
  struct Gradients {
    std::vector<DenseLayer> layers;
  };

  QNetwork() = default;

  // He-normal weights (variance 2/fan_in) for ReLU layers, variance 1/fan_in
  // for the linear head, zero biases. layer_sizes = {input, hidden..., actions}.
  static QNetwork initialize(const std::vector<int>& layer_sizes, Rng& rng);
  static QNetwork zeros(const std::vector<int>& layer_sizes);

  Eigen::VectorXd forward(const Eigen::VectorXd& state) const;
  Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& states) const;

  // Mean squared error over the taken action only:
  //   (1/n) sum_j (Y_j - Q(S_j, A_j))^2
  double loss(const Eigen::MatrixXd& states, std::span<const int> actions, const Eigen::VectorXd& targets) const;
  double loss_and_gradient(const Eigen::MatrixXd& states, std::span<const int> actions,
                           const Eigen::VectorXd& targets, Gradients& grad) const;

  // theta <- theta - lr * grad. Returns the loss before the update. Throws
  // std::invalid_argument on non-finite targets.
  double train_minibatch(const Eigen::MatrixXd& states, std::span<const int> actions,
                         const Eigen::VectorXd& targets, double learning_rate);

  void apply_gradient(const Gradients& grad, double learning_rate);

  int input_size() const;
  int output_size() const;
  // (fan_in, fan_out) per layer.
  std::vector<std::pair<int, int>> layer_shapes() const;
  const std::vector<DenseLayer>& layers() const { return layers_; }

  // Flat parameter view, layer by layer: weights (column-major), then bias.
  std::size_t num_parameters() const;
  double parameter(std::size_t i) const;
  void set_parameter(std::size_t i, double value);
  double gradient_entry(const Gradients& grad, std::size_t i) const;

  bool all_finite() const;
  bool operator==(const QNetwork& o) const { return layers_ == o.layers_; }

  // Text snapshot; see README for the layout.
  void save(std::ostream& out) const;
  static QNetwork load(std::istream& in);
  void save(const std::string& path) const;
  static QNetwork load(const std::string& path);

 private:
  double* locate(std::size_t i);
  const double* locate(std::size_t i) const;

  std::vector<DenseLayer> layers_;
};

}  // namespace mcast
