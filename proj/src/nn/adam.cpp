#include "levelk/nn/adam.hpp"

#include "levelk/core/errors.hpp"

#include <cmath>

namespace levelk::nn {

AdamState AdamState::for_params(const NetworkParams& params, AdamConfig config) {
  AdamState s;
  s.config = config;
  s.first_moment = NetworkParams::zeros(params.spec);
  s.second_moment = NetworkParams::zeros(params.spec);
  return s;
}

void adam_step(NetworkParams& params, AdamState& state, const NetworkParams& gradient) {
  if (!(params.spec == gradient.spec) || !(params.spec == state.first_moment.spec)) {
    throw ContractViolation("adam_step: parameter, gradient and moment shapes differ");
  }
  const AdamConfig& c = state.config;
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(c.beta1, t);
  const double correction2 = 1.0 - std::pow(c.beta2, t);

  const double b1 = c.beta1, b2 = c.beta2, lr = c.learning_rate, eps = c.epsilon;
  const double inv1 = 1.0 / correction1, inv2 = 1.0 / correction2;
  // Moments of units whose gradient stays zero decay geometrically into the
  // subnormal range, where arithmetic is orders of magnitude slower. Values
  // below kFlush are far under epsilon and are set to zero instead.
  constexpr double kFlush = 1e-150;
  // one fused pass per tensor keeps the three buffers streaming through cache once
  auto update = [&](auto& theta, auto& m, auto& v, const auto& g) {
    double* th = theta.data();
    double* mm = m.data();
    double* vv = v.data();
    const double* gg = g.data();
    const Eigen::Index n = theta.size();
    for (Eigen::Index i = 0; i < n; ++i) {
      const double m1 = b1 * mm[i] + (1.0 - b1) * gg[i];
      const double v1 = b2 * vv[i] + (1.0 - b2) * (gg[i] * gg[i]);
      mm[i] = std::abs(m1) < kFlush ? 0.0 : m1;
      vv[i] = v1 < kFlush ? 0.0 : v1;
      th[i] -= lr * (mm[i] * inv1) / (std::sqrt(vv[i] * inv2) + eps);
    }
  };
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    update(params.weights[l], state.first_moment.weights[l], state.second_moment.weights[l],
           gradient.weights[l]);
    update(params.biases[l], state.first_moment.biases[l], state.second_moment.biases[l],
           gradient.biases[l]);
  }
}

}  // namespace levelk::nn
