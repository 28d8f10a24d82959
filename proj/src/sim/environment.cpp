#include "levelk/sim/environment.hpp"

#include "levelk/core/errors.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <string>

namespace levelk::sim {

std::string_view to_string(EpisodeOutcome outcome) {
  switch (outcome) {
    case EpisodeOutcome::Running: return "running";
    case EpisodeOutcome::Collision: return "collision";
    case EpisodeOutcome::Exit: return "exit";
    case EpisodeOutcome::StepCap: return "step_cap";
  }
  return "running";
}

DriveAction action_for_slot(int slot, Lane lane, bool in_merge_region) {
  if (slot < 0 || slot >= kNumActionSlots) throw ContractViolation("action slot out of range");
  if (slot == slot_for_action(DriveAction::Merge) && lane == Lane::Ramp && in_merge_region) {
    return DriveAction::Merge;
  }
  return static_cast<DriveAction>(slot);
}

int slot_for_action(DriveAction action) {
  if (action == DriveAction::Merge) return static_cast<int>(DriveAction::HardAccelerate);
  return static_cast<int>(action);
}

namespace {

void assign(std::vector<CollisionType>& out, std::size_t i, CollisionType type) {
  // lower enum value wins, None excepted
  if (out[i] == CollisionType::None || static_cast<int>(type) < static_cast<int>(out[i])) {
    out[i] = type;
  }
}

}  // namespace

std::vector<CollisionType> detect_collisions(std::span<const VehicleState> before,
                                             std::span<const VehicleState> after,
                                             std::span<const bool> merged,
                                             const RoadGeometry& road) {
  const std::size_t n = after.size();
  if (before.size() != n || merged.size() != n) {
    throw ContractViolation("detect_collisions: mismatched state sizes");
  }
  const double len = road.car_length;
  std::vector<CollisionType> out(n, CollisionType::None);

  for (std::size_t i = 0; i < n; ++i) {
    if (after[i].lane == Lane::Ramp && !merged[i] && after[i].x + 0.5 * len >= road.merge_end_x) {
      assign(out, i, CollisionType::Type1_RampEndBarrier);
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (!merged[i]) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || after[j].lane != Lane::Main) continue;
      if (std::abs(after[i].x - after[j].x) < len) {
        assign(out, i, CollisionType::Type2_MergeIntoCar);
        assign(out, j, CollisionType::Type2_MergeIntoCar);
      }
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (after[i].lane != after[j].lane) continue;
      const bool overlap = std::abs(after[i].x - after[j].x) - len <= 0.0;
      // a follower that jumped past its leader within one step
      const bool passed = before[i].lane == before[j].lane &&
                          ((before[i].x < before[j].x) != (after[i].x < after[j].x)) &&
                          before[i].x != before[j].x;
      if (overlap || passed) {
        assign(out, i, CollisionType::Type3_RearEnd);
        assign(out, j, CollisionType::Type3_RearEnd);
      }
    }
  }
  return out;
}

std::optional<Lane> roll_spawn(int ramp_count, const EnvConfig& config, RandomStream& rng) {
  const double add = rng.uniform();
  const double lane = rng.uniform();
  if (add >= config.respawn_prob) return std::nullopt;
  if (lane < config.main_lane_prob || ramp_count >= config.max_ramp_cars) return Lane::Main;
  return Lane::Ramp;
}

Environment::Environment(EnvConfig config, std::uint64_t seed)
    : config_(std::move(config)),
      placement_rng_(derive_seed(seed, "placement")),
      dynamics_rng_(derive_seed(seed, "dynamics")),
      sampler_(&sample_acceleration) {
  config_.validate();
}

Environment::Environment(EnvConfig config, Lane ego_lane, std::vector<PolicyId> assignment,
                         std::uint64_t seed)
    : Environment(std::move(config), seed) {
  if (static_cast<int>(assignment.size()) != config_.n_vehicles - 1) {
    throw ContractViolation("environment assignment must have n_vehicles - 1 entries");
  }
  place_initial(ego_lane, assignment);
}

Environment Environment::from_vehicles(EnvConfig config, std::vector<VehicleState> vehicles,
                                       std::uint64_t seed) {
  if (vehicles.empty()) throw ContractViolation("fixture needs at least the ego vehicle");
  Environment env(std::move(config), seed);
  env.vehicles_ = std::move(vehicles);
  for (const auto& v : env.vehicles_) env.next_id_ = std::max(env.next_id_, v.id + 1);
  return env;
}

double Environment::sample_entry_speed() {
  return placement_rng_.uniform(config_.v_nom - config_.init_speed_spread,
                                config_.v_nom + config_.init_speed_spread);
}

namespace {

// k sorted positions uniformly over the configurations in [lo, hi] whose
// consecutive distances are all >= spacing.
std::vector<double> spaced_positions(std::size_t k, double lo, double hi, double spacing,
                                     RandomStream& rng) {
  std::vector<double> xs(k);
  if (k == 0) return xs;
  const double slack = hi - lo - static_cast<double>(k - 1) * spacing;
  if (slack < 0.0) throw PlacementError("not enough road for the requested vehicles");
  for (auto& x : xs) x = rng.uniform(0.0, slack);
  std::sort(xs.begin(), xs.end());
  for (std::size_t i = 0; i < k; ++i) xs[i] += lo + static_cast<double>(i) * spacing;
  return xs;
}

std::size_t capacity(double lo, double hi, double spacing) {
  if (hi < lo) return 0;
  return static_cast<std::size_t>(std::floor((hi - lo) / spacing + 1e-9)) + 1;
}

}  // namespace

void Environment::place_initial(Lane ego_lane, const std::vector<PolicyId>& assignment) {
  const RoadGeometry& road = config_.road;
  const double spacing = config_.min_spacing;

  VehicleState ego;
  ego.id = next_id_++;
  ego.lane = ego_lane;
  ego.x = ego_lane == Lane::Main ? 0.0 : road.ramp_start_x;
  ego.v = sample_entry_speed();
  ego.policy = PolicyId::dynamic();
  vehicles_.push_back(ego);

  // admissible bands for environment vehicles, clear of the ego
  const double main_lo = ego_lane == Lane::Main ? spacing : 0.0;
  const double main_hi = road.main_road_length - road.car_length;
  const double ramp_lo = road.ramp_start_x + (ego_lane == Lane::Ramp ? spacing : 0.0);
  const double ramp_hi = road.merge_end_x - config_.ramp_standoff;

  const int ramp_cap = config_.max_ramp_cars - (ego_lane == Lane::Ramp ? 1 : 0);
  const auto ramp_room =
      std::min<std::size_t>(capacity(ramp_lo, ramp_hi, spacing), std::max(ramp_cap, 0));
  const auto main_room = capacity(main_lo, main_hi, spacing);

  std::vector<Lane> lanes(assignment.size());
  std::size_t n_ramp = 0;
  for (auto& lane : lanes) {
    const bool main = placement_rng_.uniform() < config_.main_lane_prob;
    lane = (main || n_ramp >= ramp_room) ? Lane::Main : Lane::Ramp;
    if (lane == Lane::Ramp) ++n_ramp;
  }
  std::size_t n_main = lanes.size() - n_ramp;
  // overflow of the main lane moves to the ramp while it has room
  for (auto& lane : lanes) {
    if (n_main <= main_room) break;
    if (lane == Lane::Main && n_ramp < ramp_room) {
      lane = Lane::Ramp;
      --n_main;
      ++n_ramp;
    }
  }
  if (n_main > main_room) {
    throw PlacementError("cannot place " + std::to_string(assignment.size()) +
                         " environment vehicles with " + std::to_string(spacing) +
                         " m spacing");
  }

  auto main_xs = spaced_positions(n_main, main_lo, main_hi, spacing, placement_rng_);
  auto ramp_xs = spaced_positions(n_ramp, ramp_lo, ramp_hi, spacing, placement_rng_);
  std::size_t mi = 0;
  std::size_t ri = 0;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    VehicleState v;
    v.id = next_id_++;
    v.lane = lanes[i];
    v.policy = assignment[i];
    v.x = v.lane == Lane::Main ? main_xs[mi++] : ramp_xs[ri++];
    if (v.lane == Lane::Ramp && road.in_merge_region(v.x)) {
      v.v = initial_ramp_velocity(v.x, config_, placement_rng_);
    } else {
      v.v = sample_entry_speed();
    }
    vehicles_.push_back(v);
  }
}

int Environment::ramp_count() const {
  return static_cast<int>(std::count_if(vehicles_.begin(), vehicles_.end(),
                                        [](const VehicleState& v) { return v.lane == Lane::Ramp; }));
}

Surroundings Environment::surroundings(std::size_t index) const {
  return observe(vehicles_, index, config_);
}

Observation Environment::observation(std::size_t index) const {
  return normalize(surroundings(index), config_);
}

bool Environment::entry_free(Lane lane) const {
  const double entry = lane == Lane::Main ? 0.0 : config_.road.ramp_start_x;
  return std::none_of(vehicles_.begin(), vehicles_.end(), [&](const VehicleState& v) {
    return v.lane == lane && std::abs(v.x - entry) < config_.min_spacing;
  });
}

std::vector<int> Environment::place_pending() {
  std::vector<int> placed;
  std::vector<PendingSpawn> still;
  for (const auto& p : pending_) {
    const bool ramp_full = p.lane == Lane::Ramp && ramp_count() >= config_.max_ramp_cars;
    if (ramp_full || !entry_free(p.lane)) {
      still.push_back(p);
      continue;
    }
    VehicleState v;
    v.id = next_id_++;
    v.lane = p.lane;
    v.policy = p.policy;
    v.x = p.lane == Lane::Main ? 0.0 : config_.road.ramp_start_x;
    v.v = sample_entry_speed();
    vehicles_.push_back(v);
    placed.push_back(v.id);
  }
  pending_ = std::move(still);
  return placed;
}

void Environment::spawn_replacement(PolicyId policy) {
  int ramp = ramp_count();
  for (const auto& p : pending_) ramp += p.lane == Lane::Ramp ? 1 : 0;
  if (auto lane = roll_spawn(ramp, config_, placement_rng_)) {
    pending_.push_back({*lane, policy});
  }
}

StepResult Environment::step(DriveAction ego_action, const VehiclePolicy& policy) {
  if (done_) throw ContractViolation("step called on a finished episode");
  const RoadGeometry& road = config_.road;
  const std::size_t n = vehicles_.size();

  // every vehicle decides on the pre-step state
  std::vector<DriveAction> actions(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i == 0) {
      actions[i] = ego_action;
    } else {
      const Surroundings s = surroundings(i);
      actions[i] = policy(vehicles_[i], s, normalize(s, config_));
    }
    if (actions[i] == DriveAction::Merge &&
        (vehicles_[i].lane != Lane::Ramp || !road.in_merge_region(vehicles_[i].x))) {
      throw ContractViolation("illegal merge by vehicle " + std::to_string(vehicles_[i].id));
    }
  }

  const std::vector<VehicleState> before = vehicles_;
  std::vector<VehicleState> after(n);
  std::vector<double> accels(n, 0.0);
  auto merged = std::make_unique<bool[]>(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (actions[i] == DriveAction::Merge) {
      after[i] = apply_merge(before[i], road, config_.dt, config_.v_max);
      merged[i] = true;
    } else {
      accels[i] = sampler_(actions[i], dynamics_rng_);
      after[i] = step_kinematics(before[i], accels[i], config_.dt, config_.v_max);
      merged[i] = false;
    }
  }
  const auto collisions = detect_collisions(before, after, std::span<const bool>(merged.get(), n), road);
  vehicles_ = after;
  ++steps_;

  StepResult result;
  result.vehicles.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    result.vehicles.push_back(
        {before[i].id, before[i].policy, before[i], after[i], actions[i], accels[i], collisions[i]});
  }

  result.ego_collision = collisions[0];
  result.surroundings = surroundings(0);
  result.observation = normalize(result.surroundings, config_);
  result.terms = reward_terms(result.surroundings, ego_action, result.ego_collision, config_);
  result.reward = compute_reward(result.terms, config_.reward_weights);

  if (result.ego_collision != CollisionType::None) {
    outcome_ = EpisodeOutcome::Collision;
  } else if (vehicles_[0].x >= road.main_road_length) {
    outcome_ = EpisodeOutcome::Exit;
  } else if (steps_ >= config_.max_steps) {
    outcome_ = EpisodeOutcome::StepCap;
  }
  done_ = outcome_ != EpisodeOutcome::Running;
  result.done = done_;
  result.outcome = outcome_;

  // environment bookkeeping: crashed vehicles leave, departures may respawn
  std::vector<VehicleState> kept{vehicles_[0]};
  std::vector<PolicyId> departures;
  for (std::size_t i = 1; i < n; ++i) {
    if (collisions[i] != CollisionType::None) {
      result.removed.push_back(vehicles_[i].id);
    } else if (vehicles_[i].x >= road.main_road_length) {
      result.departed.push_back(vehicles_[i].id);
      departures.push_back(vehicles_[i].policy);
    } else {
      kept.push_back(vehicles_[i]);
    }
  }
  vehicles_ = std::move(kept);
  for (PolicyId p : departures) spawn_replacement(p);
  result.spawned = place_pending();
  return result;
}

}  // namespace levelk::sim
