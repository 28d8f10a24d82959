#include "levelk/nn/network.hpp"

#include "levelk/core/errors.hpp"

#include <cmath>
#include <string>

namespace levelk::nn {

void NetworkSpec::validate() const {
  if (layer_sizes.size() < 2) throw ContractViolation("network needs at least two layer sizes");
  for (int n : layer_sizes) {
    if (n <= 0) throw ContractViolation("layer sizes must be positive");
  }
}

NetworkSpec q_network_spec(int n_out) { return NetworkSpec{{9, 256, 256, 128, n_out}}; }

NetworkParams NetworkParams::zeros(const NetworkSpec& spec) {
  spec.validate();
  NetworkParams p;
  p.spec = spec;
  for (int l = 0; l < spec.num_layers(); ++l) {
    p.weights.push_back(Matrix::Zero(spec.layer_sizes[l + 1], spec.layer_sizes[l]));
    p.biases.push_back(Vector::Zero(spec.layer_sizes[l + 1]));
  }
  return p;
}

std::size_t NetworkParams::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) n += weights[l].size() + biases[l].size();
  return n;
}

bool NetworkParams::all_finite() const {
  for (std::size_t l = 0; l < weights.size(); ++l) {
    if (!weights[l].allFinite() || !biases[l].allFinite()) return false;
  }
  return true;
}

std::vector<double> NetworkParams::flatten() const {
  std::vector<double> out;
  out.reserve(parameter_count());
  for (std::size_t l = 0; l < weights.size(); ++l) {
    const Matrix& w = weights[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) out.push_back(w(r, c));
    }
    for (Eigen::Index r = 0; r < biases[l].size(); ++r) out.push_back(biases[l](r));
  }
  return out;
}

void NetworkParams::assign_flat(std::span<const double> values) {
  if (values.size() != parameter_count()) throw ContractViolation("flat parameter size mismatch");
  std::size_t k = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    Matrix& w = weights[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = values[k++];
    }
    for (Eigen::Index r = 0; r < biases[l].size(); ++r) biases[l](r) = values[k++];
  }
}

bool operator==(const NetworkParams& a, const NetworkParams& b) {
  if (!(a.spec == b.spec)) return false;
  for (std::size_t l = 0; l < a.weights.size(); ++l) {
    if (a.weights[l] != b.weights[l] || a.biases[l] != b.biases[l]) return false;
  }
  return true;
}

NetworkParams xavier_init(const NetworkSpec& spec, RandomStream& rng) {
  NetworkParams p = NetworkParams::zeros(spec);
  for (auto& w : p.weights) {
    const double bound = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = rng.uniform(-bound, bound);
    }
  }
  return p;
}

Matrix forward_batch(const NetworkParams& params, const Matrix& inputs) {
  if (inputs.rows() != params.spec.input_size()) {
    throw ContractViolation("input size " + std::to_string(inputs.rows()) + " does not match " +
                            std::to_string(params.spec.input_size()));
  }
  Matrix a = inputs;
  const std::size_t last = params.weights.size() - 1;
  for (std::size_t l = 0; l <= last; ++l) {
    Matrix z = params.weights[l] * a;
    z.colwise() += params.biases[l];
    a = l == last ? std::move(z) : Matrix(z.cwiseMax(0.0));
  }
  return a;
}

Vector forward(const NetworkParams& params, std::span<const double> input) {
  for (double v : input) {
    if (!std::isfinite(v)) throw ContractViolation("non-finite network input");
  }
  const Eigen::Map<const Matrix> x(input.data(), static_cast<Eigen::Index>(input.size()), 1);
  return forward_batch(params, x).col(0);
}

namespace {

void check_samples(const NetworkParams& params, const Matrix& inputs,
                   std::span<const TdSample> samples) {
  if (static_cast<std::size_t>(inputs.cols()) != samples.size() || samples.empty()) {
    throw ContractViolation("td batch: one sample per input column required");
  }
  for (const auto& s : samples) {
    if (s.action < 0 || s.action >= params.spec.output_size()) {
      throw ContractViolation("td batch: action index out of range");
    }
    if (!std::isfinite(s.target)) throw ContractViolation("td batch: non-finite target");
  }
}

}  // namespace

double td_loss(const NetworkParams& params, const Matrix& inputs,
               std::span<const TdSample> samples) {
  check_samples(params, inputs, samples);
  const Matrix q = forward_batch(params, inputs);
  double sum = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double err = samples[i].target - q(samples[i].action, static_cast<Eigen::Index>(i));
    sum += err * err;
  }
  return sum / static_cast<double>(samples.size());
}

LossAndGradient td_gradient(const NetworkParams& params, const Matrix& inputs,
                            std::span<const TdSample> samples) {
  check_samples(params, inputs, samples);
  const std::size_t layers = params.weights.size();
  const auto batch = static_cast<double>(samples.size());

  // activations[0] = input, activations[l+1] = output of layer l
  std::vector<Matrix> activations;
  activations.reserve(layers + 1);
  activations.push_back(inputs);
  for (std::size_t l = 0; l < layers; ++l) {
    Matrix z = params.weights[l] * activations.back();
    z.colwise() += params.biases[l];
    if (l + 1 < layers) z = z.cwiseMax(0.0);
    activations.push_back(std::move(z));
  }

  LossAndGradient out;
  out.gradient = NetworkParams::zeros(params.spec);
  const Matrix& q = activations.back();
  Matrix delta = Matrix::Zero(q.rows(), q.cols());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto col = static_cast<Eigen::Index>(i);
    const double err = q(samples[i].action, col) - samples[i].target;
    out.loss += err * err;
    delta(samples[i].action, col) = 2.0 * err / batch;
  }
  out.loss /= batch;

  for (std::size_t l = layers; l-- > 0;) {
    out.gradient.weights[l].noalias() = delta * activations[l].transpose();
    out.gradient.biases[l] = delta.rowwise().sum();
    if (l == 0) break;
    Matrix back = params.weights[l].transpose() * delta;
    // rectifier derivative: the stored activation is positive iff the unit was active
    delta = back.cwiseProduct((activations[l].array() > 0.0).cast<double>().matrix());
  }
  return out;
}

int argmax(const Vector& values) {
  int best = 0;
  for (int i = 1; i < values.size(); ++i) {
    if (values(i) > values(best)) best = i;
  }
  return best;
}

}  // namespace levelk::nn
