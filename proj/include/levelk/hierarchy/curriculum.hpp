#pragma once

#include "levelk/core/rng.hpp"
#include "levelk/core/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace levelk::hierarchy {

/// Three-phase population schedule: a fixed small population, then a triangle
/// wave over the population set changing every block, then a uniformly random
/// population per block.
struct Curriculum {
  int initial_episodes = 200;
  int sinusoidal_end = 5000;
  int total_episodes = 6000;
  int block = 100;
  int initial_population = 4;
  std::vector<int> populations{4, 8, 12, 16, 20, 24, 28};

  void validate() const;
};

/// Vehicle count (ego included) for an episode. Phase-3 draws are a pure
/// function of (seed, block).
int population_schedule(int episode, const Curriculum& curriculum, std::uint64_t seed);

/// Composition of the environment traffic.
class TrafficComposition {
 public:
  enum class Kind { AllLevel, AllDynamic, MixedUniform };

  static TrafficComposition all_level(int k);
  static TrafficComposition all_dynamic() { return TrafficComposition(Kind::AllDynamic, 0); }
  /// Each vehicle independently uniform over level-0..level-3.
  static TrafficComposition mixed() { return TrafficComposition(Kind::MixedUniform, 0); }
  static TrafficComposition parse(std::string_view text);

  Kind kind() const { return kind_; }
  int level() const { return level_; }
  std::string name() const;
  /// Policies the composition can produce.
  std::vector<PolicyId> support() const;

  /// An assignment tuple for n_env environment vehicles.
  std::vector<PolicyId> assign(int n_env, RandomStream& rng) const;

  friend bool operator==(const TrafficComposition&, const TrafficComposition&) = default;

 private:
  TrafficComposition(Kind kind, int level) : kind_(kind), level_(level) {}
  Kind kind_;
  int level_;
};

}  // namespace levelk::hierarchy
