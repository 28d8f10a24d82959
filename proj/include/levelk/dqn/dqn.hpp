#pragma once

#include "levelk/core/rng.hpp"
#include "levelk/nn/adam.hpp"
#include "levelk/nn/network.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace levelk::dqn {

inline constexpr int kStateSize = 9;
using State = std::array<double, kStateSize>;

struct Experience {
  State s{};
  int action = 0;
  double reward = 0.0;
  State s_next{};
  bool terminal = false;

  friend bool operator==(const Experience&, const Experience&) = default;
};

/// Bounded FIFO of transitions with uniform sampling (with replacement).
class ReplayMemory {
 public:
  ReplayMemory(std::size_t capacity, std::size_t warmup);

  void push(const Experience& e);
  std::size_t size() const { return size_; }
  std::size_t capacity() const { return buffer_.size(); }
  std::size_t warmup() const { return warmup_; }
  bool ready() const { return size_ >= warmup_; }
  /// i-th stored experience counting from the oldest.
  const Experience& at(std::size_t i) const;

  /// Throws ContractViolation before the warm-up threshold is reached.
  std::vector<Experience> sample_batch(std::size_t batch, RandomStream& rng) const;
  /// Same draw, as indices (oldest = 0).
  std::vector<std::size_t> sample_indices(std::size_t batch, RandomStream& rng) const;

 private:
  std::vector<Experience> buffer_;
  std::size_t warmup_;
  std::size_t head_ = 0;  // next write position
  std::size_t size_ = 0;
};

/// Softmax of q / temperature with max subtraction.
std::vector<double> boltzmann_probabilities(std::span<const double> q, double temperature);
int boltzmann_sample(std::span<const double> q, double temperature, RandomStream& rng);

struct BoltzmannSchedule {
  double temperature = 50.0;
  double decay = 0.998;
  double floor = 1.0;

  /// End-of-episode annealing: T <- max(T * decay, floor).
  void anneal() { temperature = std::max(temperature * decay, floor); }
};

/// y = r for terminal transitions, r + gamma * max_a Q_target(s', a) otherwise.
std::vector<double> td_targets(std::span<const Experience> batch, const nn::NetworkParams& target,
                               double gamma);

struct TrainerConfig {
  std::size_t memory_capacity = 50000;
  std::size_t warmup = 5000;
  std::size_t batch_size = 32;
  std::uint64_t target_update = 1000;
  double gamma = 0.95;
  double initial_temperature = 50.0;
  double temperature_decay = 0.998;
  nn::AdamConfig adam;

  void validate() const;
};

/// Primary/target network pair with its optimizer and replay memory.
class Learner {
 public:
  Learner(nn::NetworkParams initial, TrainerConfig config, std::uint64_t seed);

  const nn::NetworkParams& primary() const { return primary_; }
  const nn::NetworkParams& target() const { return target_; }
  const nn::AdamState& adam() const { return adam_; }
  const ReplayMemory& memory() const { return memory_; }
  const TrainerConfig& config() const { return config_; }
  std::uint64_t ticks() const { return ticks_; }

  void remember(const Experience& e) { memory_.push(e); }

  /// One update per environment step: an Adam step on a sampled batch once the
  /// memory is warm, and a target sync every target_update ticks. Returns the
  /// batch loss when an update happened.
  std::optional<double> train_tick();

 private:
  TrainerConfig config_;
  nn::NetworkParams primary_;
  nn::NetworkParams target_;
  nn::AdamState adam_;
  ReplayMemory memory_;
  RandomStream batch_rng_;
  std::uint64_t ticks_ = 0;
};

}  // namespace levelk::dqn
