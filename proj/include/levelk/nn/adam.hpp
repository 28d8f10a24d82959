#pragma once

#include "levelk/nn/network.hpp"

#include <cstdint>

namespace levelk::nn {

struct AdamConfig {
  double learning_rate = 0.0013;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  AdamConfig config;
  NetworkParams first_moment;
  NetworkParams second_moment;
  std::uint64_t step = 0;

  static AdamState for_params(const NetworkParams& params, AdamConfig config = {});
};

/// One bias-corrected Adam update of params in place.
void adam_step(NetworkParams& params, AdamState& state, const NetworkParams& gradient);

}  // namespace levelk::nn
