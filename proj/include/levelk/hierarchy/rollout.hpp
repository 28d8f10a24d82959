#pragma once

#include "levelk/hierarchy/curriculum.hpp"
#include "levelk/hierarchy/policy_set.hpp"
#include "levelk/sim/environment.hpp"

#include <functional>
#include <optional>

namespace levelk::hierarchy {

struct EpisodeSetup {
  sim::EnvConfig env;  // n_vehicles is the population
  Lane ego_lane = Lane::Main;
  std::vector<PolicyId> assignment;
  std::uint64_t seed = 0;
};

/// Ego lane and environment assignment for one episode, drawn from `seed`.
EpisodeSetup make_setup(const sim::EnvConfig& base, int population,
                        const TrafficComposition& traffic, std::uint64_t seed);

struct EpisodeSummary {
  sim::EpisodeOutcome outcome = sim::EpisodeOutcome::Running;
  CollisionType collision = CollisionType::None;
  int steps = 0;
  double total_reward = 0.0;
  int env_collisions = 0;
  int population = 0;
  Lane ego_lane = Lane::Main;
};

/// Called after reset (step == nullptr) and after every step. ego_level is the
/// level chosen by a dynamic ego on that step.
using StepHook = std::function<void(const sim::Environment&, const sim::StepResult* step,
                                    std::optional<int> ego_level)>;

/// Runs one episode with the ego driven by `ego` from `policies`.
EpisodeSummary run_episode(const PolicySet& policies, PolicyId ego, ActMode mode,
                           const EpisodeSetup& setup, const StepHook& hook = {});

}  // namespace levelk::hierarchy
