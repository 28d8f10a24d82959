#pragma once

#include "levelk/core/rng.hpp"
#include "levelk/core/types.hpp"
#include "levelk/sim/config.hpp"
#include "levelk/sim/observation.hpp"
#include "levelk/sim/reward.hpp"
#include "levelk/sim/vehicle.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace levelk::sim {

enum class EpisodeOutcome : std::uint8_t { Running, Collision, Exit, StepCap };

std::string_view to_string(EpisodeOutcome outcome);

/// Chooses the action of an environment vehicle from its own view of the
/// pre-step state.
using VehiclePolicy =
    std::function<DriveAction(const VehicleState&, const Surroundings&, const Observation&)>;

/// Realizes a longitudinal action as an acceleration.
using AccelerationSampler = std::function<double(DriveAction, RandomStream&)>;

/// Per-vehicle collision classification after a simultaneous step. At most
/// one type per vehicle, Type1 taking precedence over Type2 over Type3; both
/// parties of a Type2 or Type3 event are flagged.
std::vector<CollisionType> detect_collisions(std::span<const VehicleState> before,
                                             std::span<const VehicleState> after,
                                             std::span<const bool> merged,
                                             const RoadGeometry& road);

/// Spawn roll after a departure: nullopt if no vehicle is added, otherwise the
/// entry lane. A ramp roll is redirected to the main lane when the ramp holds
/// max_ramp_cars vehicles. Always consumes two uniform draws.
std::optional<Lane> roll_spawn(int ramp_count, const EnvConfig& config, RandomStream& rng);

struct VehicleStep {
  int id = 0;
  PolicyId policy = PolicyId::level(0);
  VehicleState before;
  VehicleState after;
  DriveAction action = DriveAction::Maintain;
  double accel = 0.0;
  CollisionType collision = CollisionType::None;
};

struct StepResult {
  Observation observation;  // ego, post-step
  Surroundings surroundings;
  RewardTerms terms;
  double reward = 0.0;
  bool done = false;
  EpisodeOutcome outcome = EpisodeOutcome::Running;
  CollisionType ego_collision = CollisionType::None;
  std::vector<VehicleStep> vehicles;  // every vehicle that took part in the step
  std::vector<int> departed;          // environment vehicles that left the road
  std::vector<int> removed;           // environment vehicles removed after a collision
  std::vector<int> spawned;
};

/// The merging scenario: one ego vehicle (id 0) plus environment vehicles
/// driven by a VehiclePolicy. Single-threaded; every random draw comes from
/// streams derived from the construction seed.
class Environment {
 public:
  /// Random initial placement of config.n_vehicles vehicles. Environment
  /// vehicle i (id i+1) gets assignment[i]. Throws PlacementError when the
  /// spacing constraints cannot be met.
  Environment(EnvConfig config, Lane ego_lane, std::vector<PolicyId> assignment,
              std::uint64_t seed);

  /// Fixture constructor: vehicles[0] is the ego; ids are taken as given.
  static Environment from_vehicles(EnvConfig config, std::vector<VehicleState> vehicles,
                                   std::uint64_t seed);

  StepResult step(DriveAction ego_action, const VehiclePolicy& policy);

  void set_acceleration_sampler(AccelerationSampler sampler) { sampler_ = std::move(sampler); }

  const EnvConfig& config() const { return config_; }
  std::span<const VehicleState> vehicles() const { return vehicles_; }
  const VehicleState& ego() const { return vehicles_.front(); }
  int ramp_count() const;
  int pending_spawns() const { return static_cast<int>(pending_.size()); }
  int step_count() const { return steps_; }
  bool done() const { return done_; }
  EpisodeOutcome outcome() const { return outcome_; }

  Surroundings surroundings(std::size_t index) const;
  Observation observation(std::size_t index) const;
  Observation ego_observation() const { return observation(0); }

  /// Roll and (if possible) place a replacement for a departed vehicle.
  void spawn_replacement(PolicyId policy);

 private:
  Environment(EnvConfig config, std::uint64_t seed);

  struct PendingSpawn {
    Lane lane;
    PolicyId policy;
  };

  void place_initial(Lane ego_lane, const std::vector<PolicyId>& assignment);
  double sample_entry_speed();
  bool entry_free(Lane lane) const;
  std::vector<int> place_pending();

  EnvConfig config_;
  std::vector<VehicleState> vehicles_;
  std::vector<PendingSpawn> pending_;
  RandomStream placement_rng_;
  RandomStream dynamics_rng_;
  AccelerationSampler sampler_;
  int next_id_ = 0;
  int steps_ = 0;
  bool done_ = false;
  EpisodeOutcome outcome_ = EpisodeOutcome::Running;
};

/// Legal action for a Q-network output slot. Slots 0-4 are the longitudinal
/// actions; on the ramp inside the merging region slot 3 means Merge in place
/// of HardAccelerate.
DriveAction action_for_slot(int slot, Lane lane, bool in_merge_region);
int slot_for_action(DriveAction action);

}  // namespace levelk::sim
