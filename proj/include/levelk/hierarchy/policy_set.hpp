#pragma once

#include "levelk/core/rng.hpp"
#include "levelk/core/types.hpp"
#include "levelk/level0/level0.hpp"
#include "levelk/nn/network.hpp"
#include "levelk/sim/environment.hpp"

#include <array>
#include <memory>
#include <optional>

namespace levelk::hierarchy {

inline constexpr int kLevelOutputs = kNumActionSlots;          // driving actions
inline constexpr int kDynamicOutputs = PolicyId::kMaxLevel;    // levels 1..3

/// How a learned policy turns Q-values into a choice.
struct ActMode {
  bool greedy = true;
  double temperature = 1.0;

  static ActMode argmax() { return {true, 1.0}; }
  static ActMode explore(double t) { return {false, t}; }
};

/// Picks an output slot: argmax (first index on ties) or Boltzmann.
int choose_slot(const nn::Vector& q, ActMode mode, RandomStream& rng);

/// Driving action of a level-k network for a vehicle in the given lane.
DriveAction level_k_act(const nn::NetworkParams& net, const sim::Observation& obs,
                        const sim::Surroundings& s, ActMode mode, RandomStream& rng);

struct DynamicChoice {
  int level = 1;  // 1..3
  DriveAction action = DriveAction::Maintain;
};

/// Two-step choice of the dynamic policy: a reasoning level from the dynamic
/// network, then a driving action from that level's network. Both steps use
/// the same mode.
DynamicChoice dynamic_act(const sim::Observation& obs, const sim::Surroundings& s,
                          const nn::NetworkParams& dynamic_net,
                          const std::array<const nn::NetworkParams*, 3>& level_nets, ActMode mode,
                          RandomStream& rng);

/// Read-only collection of the policies that can drive a vehicle.
class PolicySet {
 public:
  explicit PolicySet(level0::Level0Params level0 = {}) : level0_(level0) {}

  void set_level(int k, std::shared_ptr<const nn::NetworkParams> net);
  void set_dynamic(std::shared_ptr<const nn::NetworkParams> net);

  bool has(PolicyId id) const;
  const nn::NetworkParams& level(int k) const;
  const nn::NetworkParams& dynamic() const;
  const level0::Level0Params& level0_params() const { return level0_; }
  std::array<const nn::NetworkParams*, 3> level_nets() const;

  /// Action of a vehicle driven by `id`. Learned policies act greedily unless
  /// mode says otherwise; level-0 draws its merge gate from rng.
  DriveAction act(PolicyId id, const sim::Observation& obs, const sim::Surroundings& s,
                  RandomStream& rng, ActMode mode = ActMode::argmax(),
                  std::optional<int>* chosen_level = nullptr) const;

  /// Environment-vehicle callback dispatching on each vehicle's policy id.
  sim::VehiclePolicy traffic_policy(RandomStream& rng) const;

 private:
  level0::Level0Params level0_;
  std::array<std::shared_ptr<const nn::NetworkParams>, 3> levels_{};
  std::shared_ptr<const nn::NetworkParams> dynamic_;
};

}  // namespace levelk::hierarchy
