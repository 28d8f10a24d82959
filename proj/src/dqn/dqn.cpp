#include "levelk/dqn/dqn.hpp"

#include "levelk/core/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace levelk::dqn {

ReplayMemory::ReplayMemory(std::size_t capacity, std::size_t warmup)
    : buffer_(capacity), warmup_(warmup) {
  if (capacity == 0) throw ContractViolation("replay capacity must be positive");
  if (warmup == 0 || warmup > capacity) {
    throw ContractViolation("replay warm-up must lie in [1, capacity]");
  }
}

void ReplayMemory::push(const Experience& e) {
  buffer_[head_] = e;
  head_ = (head_ + 1) % buffer_.size();
  size_ = std::min(size_ + 1, buffer_.size());
}

const Experience& ReplayMemory::at(std::size_t i) const {
  if (i >= size_) throw ContractViolation("replay index out of range");
  const std::size_t oldest = (head_ + buffer_.size() - size_) % buffer_.size();
  return buffer_[(oldest + i) % buffer_.size()];
}

std::vector<std::size_t> ReplayMemory::sample_indices(std::size_t batch, RandomStream& rng) const {
  if (!ready()) {
    throw ContractViolation("replay sampled with " + std::to_string(size_) +
                            " experiences, warm-up is " + std::to_string(warmup_));
  }
  std::vector<std::size_t> idx(batch);
  for (auto& i : idx) i = rng.index(size_);
  return idx;
}

std::vector<Experience> ReplayMemory::sample_batch(std::size_t batch, RandomStream& rng) const {
  std::vector<Experience> out;
  out.reserve(batch);
  for (std::size_t i : sample_indices(batch, rng)) out.push_back(at(i));
  return out;
}

std::vector<double> boltzmann_probabilities(std::span<const double> q, double temperature) {
  if (q.empty()) throw ContractViolation("boltzmann over an empty action set");
  if (!(temperature > 0)) throw ContractViolation("boltzmann temperature must be positive");
  const double top = *std::max_element(q.begin(), q.end());
  std::vector<double> p(q.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    p[i] = std::exp((q[i] - top) / temperature);
    sum += p[i];
  }
  for (auto& v : p) v /= sum;
  return p;
}

int boltzmann_sample(std::span<const double> q, double temperature, RandomStream& rng) {
  const auto p = boltzmann_probabilities(q, temperature);
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    acc += p[i];
    if (u < acc) return static_cast<int>(i);
  }
  // rounding left u above the accumulated mass: take the last positive entry
  for (std::size_t i = p.size(); i-- > 0;) {
    if (p[i] > 0) return static_cast<int>(i);
  }
  return 0;
}

namespace {

nn::Matrix stack_states(std::span<const Experience> batch, bool next) {
  nn::Matrix m(kStateSize, static_cast<Eigen::Index>(batch.size()));
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const State& s = next ? batch[i].s_next : batch[i].s;
    for (int k = 0; k < kStateSize; ++k) m(k, static_cast<Eigen::Index>(i)) = s[k];
  }
  return m;
}

}  // namespace

std::vector<double> td_targets(std::span<const Experience> batch, const nn::NetworkParams& target,
                               double gamma) {
  std::vector<double> y(batch.size());
  if (batch.empty()) return y;
  const nn::Matrix q_next = nn::forward_batch(target, stack_states(batch, true));
  for (std::size_t i = 0; i < batch.size(); ++i) {
    y[i] = batch[i].reward;
    if (!batch[i].terminal) y[i] += gamma * q_next.col(static_cast<Eigen::Index>(i)).maxCoeff();
  }
  return y;
}

void TrainerConfig::validate() const {
  if (batch_size == 0 || target_update == 0) throw ConfigError("batch size and target update must be positive");
  if (warmup == 0 || warmup > memory_capacity) throw ConfigError("warm-up must lie in [1, memory capacity]");
  if (!(gamma >= 0 && gamma <= 1)) throw ConfigError("discount must lie in [0, 1]");
  if (!(initial_temperature >= 1)) throw ConfigError("initial temperature must be >= 1");
  if (!(temperature_decay > 0 && temperature_decay < 1)) throw ConfigError("temperature decay must lie in (0, 1)");
  if (!(adam.learning_rate > 0)) throw ConfigError("learning rate must be positive");
}

Learner::Learner(nn::NetworkParams initial, TrainerConfig config, std::uint64_t seed)
    : config_(config),
      primary_(std::move(initial)),
      target_(primary_),
      adam_(nn::AdamState::for_params(primary_, config.adam)),
      memory_(config.memory_capacity, config.warmup),
      batch_rng_(derive_seed(seed, "replay")) {
  config_.validate();
  if (primary_.spec.input_size() != kStateSize) {
    throw ContractViolation("learner networks take a 9-dimensional state");
  }
}

std::optional<double> Learner::train_tick() {
  ++ticks_;
  std::optional<double> loss;
  if (memory_.ready()) {
    const auto batch = memory_.sample_batch(config_.batch_size, batch_rng_);
    const auto y = td_targets(batch, target_, config_.gamma);
    std::vector<nn::TdSample> samples(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) samples[i] = {batch[i].action, y[i]};
    auto lg = nn::td_gradient(primary_, stack_states(batch, false), samples);
    nn::adam_step(primary_, adam_, lg.gradient);
    loss = lg.loss;
  }
  if (ticks_ % config_.target_update == 0) target_ = primary_;
  return loss;
}

}  // namespace levelk::dqn
