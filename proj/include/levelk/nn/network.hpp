#pragma once

#include "levelk/core/rng.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace levelk::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Fully-connected layout: rectifier on hidden layers, identity on the output.
struct NetworkSpec {
  std::vector<int> layer_sizes;

  int input_size() const { return layer_sizes.front(); }
  int output_size() const { return layer_sizes.back(); }
  int num_layers() const { return static_cast<int>(layer_sizes.size()) - 1; }
  void validate() const;

  friend bool operator==(const NetworkSpec&, const NetworkSpec&) = default;
};

/// The Q-network layout: 9 observation inputs, hidden 256-256-128.
NetworkSpec q_network_spec(int n_out);

/// Weights (out x in) and biases per layer. Also used to hold gradients and
/// Adam moments, which share the shape.
struct NetworkParams {
  NetworkSpec spec;
  std::vector<Matrix> weights;
  std::vector<Vector> biases;

  static NetworkParams zeros(const NetworkSpec& spec);
  std::size_t parameter_count() const;
  bool all_finite() const;

  /// Flattened copy, layer by layer: W row-major then b.
  std::vector<double> flatten() const;
  void assign_flat(std::span<const double> values);

  friend bool operator==(const NetworkParams& a, const NetworkParams& b);
};

/// Xavier-uniform weights U(-b, b) with b = sqrt(6 / (fan_in + fan_out));
/// zero biases.
NetworkParams xavier_init(const NetworkSpec& spec, RandomStream& rng);

/// Q-values of a single input. Throws ContractViolation on non-finite input
/// or a size mismatch.
Vector forward(const NetworkParams& params, std::span<const double> input);

/// Batched forward pass; inputs are columns.
Matrix forward_batch(const NetworkParams& params, const Matrix& inputs);

/// One regression target on one output unit.
struct TdSample {
  int action = 0;
  double target = 0.0;
};

struct LossAndGradient {
  double loss = 0.0;
  NetworkParams gradient;
};

/// Mean squared TD loss (1/P) sum_i (y_i - Q(s_i)[a_i])^2 and its exact
/// gradient. inputs holds the P states as columns.
LossAndGradient td_gradient(const NetworkParams& params, const Matrix& inputs,
                            std::span<const TdSample> samples);

double td_loss(const NetworkParams& params, const Matrix& inputs,
               std::span<const TdSample> samples);

/// Index of the largest value; ties resolve to the first index.
int argmax(const Vector& values);

}  // namespace levelk::nn
