#include "levelk/core/errors.hpp"
#include "levelk/sim/environment.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>

using namespace levelk;
using namespace levelk::sim;

namespace {

VehicleState car(int id, double x, double v, Lane lane) { return {id, x, v, lane, PolicyId::level(0)}; }

DriveAction always_maintain(const VehicleState&, const Surroundings&, const Observation&) {
  return DriveAction::Maintain;
}

std::vector<PolicyId> level0s(int n) { return std::vector<PolicyId>(static_cast<std::size_t>(n), PolicyId::level(0)); }

// Mid-point acceleration of each interval, to make fixture steps exact.
double midpoint(DriveAction a, RandomStream&) {
  const auto b = acceleration_bounds(a);
  return a == DriveAction::Maintain ? 0.0 : 0.5 * (b.lo + b.hi);
}

}  // namespace

TEST(Placement, EgoStartsAtLaneEntry) {
  EnvConfig c;
  Environment main_env(c, Lane::Main, level0s(3), 1);
  EXPECT_EQ(main_env.ego().x, 0.0);
  EXPECT_EQ(main_env.ego().lane, Lane::Main);
  Environment ramp_env(c, Lane::Ramp, level0s(3), 1);
  EXPECT_EQ(ramp_env.ego().x, 75.0);
  EXPECT_EQ(ramp_env.ego().lane, Lane::Ramp);
  EXPECT_TRUE(ramp_env.ego().policy.is_dynamic());
}

TEST(Placement, RespectsSpacingCapAndBandsForEveryPopulation) {
  for (int n : {4, 8, 12, 16, 20, 24, 28}) {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
      EnvConfig c;
      c.n_vehicles = n;
      const Lane ego_lane = seed % 2 == 0 ? Lane::Main : Lane::Ramp;
      Environment env(c, ego_lane, level0s(n - 1), seed);
      const auto vs = env.vehicles();
      ASSERT_EQ(static_cast<int>(vs.size()), n);
      EXPECT_LE(env.ramp_count(), c.max_ramp_cars);
      for (std::size_t i = 0; i < vs.size(); ++i) {
        EXPECT_GE(vs[i].v, 0.0);
        if (vs[i].lane == Lane::Ramp && i > 0) {
          EXPECT_GE(vs[i].x, 75.0);
          EXPECT_LE(vs[i].x, 237.0);
        }
        for (std::size_t j = i + 1; j < vs.size(); ++j) {
          if (vs[i].lane == vs[j].lane) {
            EXPECT_GE(std::abs(vs[i].x - vs[j].x), c.min_spacing - 1e-9) << "n=" << n << " seed=" << seed;
          }
        }
      }
    }
  }
}

TEST(Placement, SameSeedSameEpisode) {
  EnvConfig c;
  c.n_vehicles = 12;
  Environment a(c, Lane::Ramp, level0s(11), 77);
  Environment b(c, Lane::Ramp, level0s(11), 77);
  for (int t = 0; t < 30 && !a.done(); ++t) {
    const auto ra = a.step(DriveAction::Maintain, always_maintain);
    const auto rb = b.step(DriveAction::Maintain, always_maintain);
    ASSERT_EQ(ra.reward, rb.reward);
    ASSERT_EQ(a.vehicles().size(), b.vehicles().size());
    for (std::size_t i = 0; i < a.vehicles().size(); ++i) {
      ASSERT_EQ(a.vehicles()[i].x, b.vehicles()[i].x);
      ASSERT_EQ(a.vehicles()[i].v, b.vehicles()[i].v);
    }
  }
}

TEST(Collisions, RampBarrier) {
  RoadGeometry road;
  std::vector<VehicleState> before = {car(0, 255, 10, Lane::Ramp)};
  std::vector<VehicleState> after = {car(0, 258, 10, Lane::Ramp)};
  bool merged[] = {false};
  EXPECT_EQ(detect_collisions(before, after, merged, road)[0], CollisionType::Type1_RampEndBarrier);
  after[0].x = 257.0;
  EXPECT_EQ(detect_collisions(before, after, merged, road)[0], CollisionType::None);
}

TEST(Collisions, MergeIntoCarFlagsBoth) {
  RoadGeometry road;
  std::vector<VehicleState> before = {car(0, 150, 10, Lane::Ramp), car(1, 148, 10, Lane::Main)};
  std::vector<VehicleState> after = {car(0, 155, 10, Lane::Main), car(1, 152, 10, Lane::Main)};
  bool merged[] = {true, false};
  const auto c = detect_collisions(before, after, merged, road);
  EXPECT_EQ(c[0], CollisionType::Type2_MergeIntoCar);
  EXPECT_EQ(c[1], CollisionType::Type2_MergeIntoCar);
}

TEST(Collisions, RearEndOnOverlapAndOnPassing) {
  RoadGeometry road;
  bool merged[] = {false, false};
  std::vector<VehicleState> before = {car(0, 100, 10, Lane::Main), car(1, 110, 5, Lane::Main)};
  std::vector<VehicleState> overlap = {car(0, 106, 10, Lane::Main), car(1, 111, 5, Lane::Main)};
  auto c = detect_collisions(before, overlap, merged, road);
  EXPECT_EQ(c[0], CollisionType::Type3_RearEnd);
  EXPECT_EQ(c[1], CollisionType::Type3_RearEnd);
  std::vector<VehicleState> passed = {car(0, 130, 10, Lane::Main), car(1, 112, 5, Lane::Main)};
  c = detect_collisions(before, passed, merged, road);
  EXPECT_EQ(c[0], CollisionType::Type3_RearEnd);
  std::vector<VehicleState> clear = {car(0, 104, 10, Lane::Main), car(1, 110, 5, Lane::Main)};
  c = detect_collisions(before, clear, merged, road);
  EXPECT_EQ(c[0], CollisionType::None);
}

TEST(Collisions, LowerTypeTakesPrecedence) {
  RoadGeometry road;
  bool merged[] = {false, false};
  std::vector<VehicleState> before = {car(0, 252, 10, Lane::Ramp), car(1, 255, 1, Lane::Ramp)};
  std::vector<VehicleState> after = {car(0, 257.6, 10, Lane::Ramp), car(1, 255.5, 1, Lane::Ramp)};
  const auto c = detect_collisions(before, after, merged, road);
  EXPECT_EQ(c[0], CollisionType::Type1_RampEndBarrier);
  EXPECT_EQ(c[1], CollisionType::Type3_RearEnd);
}

TEST(Spawn, ProbabilityAndLaneSplit) {
  EnvConfig c;
  RandomStream r(8);
  int added = 0, main = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    if (auto lane = roll_spawn(0, c, r)) {
      ++added;
      main += *lane == Lane::Main;
    }
  }
  EXPECT_NEAR(added / double(n), 0.7, 0.01);
  EXPECT_NEAR(main / double(added), 0.7, 0.01);
}

TEST(Spawn, FullRampRedirectsToMain) {
  EnvConfig c;
  RandomStream r(8);
  for (int i = 0; i < 1000; ++i) {
    if (auto lane = roll_spawn(7, c, r)) EXPECT_EQ(*lane, Lane::Main);
  }
}

TEST(Step, DepartureRespawnsWithInheritedPolicy) {
  EnvConfig c;
  c.respawn_prob = 1.0;
  c.main_lane_prob = 1.0;
  auto leaver = car(1, 303, 10, Lane::Main);
  leaver.policy = PolicyId::level(2);
  auto env = Environment::from_vehicles(c, {car(0, 100, 10, Lane::Main), leaver}, 3);
  env.set_acceleration_sampler(midpoint);
  const auto r = env.step(DriveAction::Maintain, always_maintain);
  ASSERT_EQ(r.departed, std::vector<int>{1});
  ASSERT_EQ(r.spawned.size(), 1u);
  const auto& fresh = env.vehicles().back();
  EXPECT_EQ(fresh.id, r.spawned[0]);
  EXPECT_EQ(fresh.x, 0.0);
  EXPECT_EQ(fresh.lane, Lane::Main);
  EXPECT_EQ(fresh.policy, PolicyId::level(2));
}

TEST(Step, BlockedEntryDefersSpawn) {
  EnvConfig c;
  c.respawn_prob = 1.0;
  c.main_lane_prob = 1.0;
  auto env = Environment::from_vehicles(
      c, {car(0, 100, 10, Lane::Main), car(1, 303, 10, Lane::Main), car(2, 0, 0, Lane::Main)}, 3);
  env.set_acceleration_sampler(midpoint);
  const auto r = env.step(DriveAction::Maintain, always_maintain);
  EXPECT_TRUE(r.spawned.empty());
  EXPECT_EQ(env.pending_spawns(), 1);
}

TEST(Step, EgoOutcomes) {
  EnvConfig c;
  auto exit_env = Environment::from_vehicles(c, {car(0, 300, 12, Lane::Main)}, 1);
  exit_env.set_acceleration_sampler(midpoint);
  auto r = exit_env.step(DriveAction::Maintain, always_maintain);
  EXPECT_EQ(r.outcome, EpisodeOutcome::Exit);
  EXPECT_TRUE(r.done);
  EXPECT_THROW(exit_env.step(DriveAction::Maintain, always_maintain), ContractViolation);

  auto crash = Environment::from_vehicles(c, {car(0, 100, 10, Lane::Main), car(1, 106, 0, Lane::Main)}, 1);
  crash.set_acceleration_sampler(midpoint);
  r = crash.step(DriveAction::Maintain, always_maintain);
  EXPECT_EQ(r.outcome, EpisodeOutcome::Collision);
  EXPECT_EQ(r.ego_collision, CollisionType::Type3_RearEnd);
  EXPECT_EQ(r.terms.collision, -1.0);

  c.max_steps = 2;
  auto capped = Environment::from_vehicles(c, {car(0, 0, 1, Lane::Main)}, 1);
  capped.set_acceleration_sampler(midpoint);
  capped.step(DriveAction::Maintain, always_maintain);
  r = capped.step(DriveAction::Maintain, always_maintain);
  EXPECT_EQ(r.outcome, EpisodeOutcome::StepCap);
}

TEST(Step, EnvironmentCollisionRemovesVehiclesButContinues) {
  EnvConfig c;
  auto env = Environment::from_vehicles(
      c, {car(0, 0, 10, Lane::Main), car(1, 100, 10, Lane::Main), car(2, 106, 0, Lane::Main)}, 1);
  env.set_acceleration_sampler(midpoint);
  const auto r = env.step(DriveAction::Maintain, always_maintain);
  EXPECT_FALSE(r.done);
  EXPECT_EQ(r.removed, (std::vector<int>{1, 2}));
  EXPECT_EQ(env.vehicles().size(), 1u);
}

TEST(Step, IllegalMergeIsRejected) {
  EnvConfig c;
  auto env = Environment::from_vehicles(c, {car(0, 90, 10, Lane::Ramp)}, 1);
  EXPECT_THROW(env.step(DriveAction::Merge, always_maintain), ContractViolation);
  auto main_env = Environment::from_vehicles(c, {car(0, 150, 10, Lane::Main)}, 1);
  EXPECT_THROW(main_env.step(DriveAction::Merge, always_maintain), ContractViolation);
}

TEST(Step, MergeFixtureIsExact) {
  EnvConfig c;
  auto env = Environment::from_vehicles(c, {car(0, 150, 8, Lane::Ramp)}, 1);
  const auto r = env.step(DriveAction::Merge, always_maintain);
  EXPECT_EQ(env.ego().lane, Lane::Main);
  EXPECT_DOUBLE_EQ(env.ego().x, 154.0);
  EXPECT_EQ(r.terms.not_merging, 0.0);
}

TEST(Slots, LaneDependentMapping) {
  EXPECT_EQ(action_for_slot(3, Lane::Ramp, true), DriveAction::Merge);
  EXPECT_EQ(action_for_slot(3, Lane::Ramp, false), DriveAction::HardAccelerate);
  EXPECT_EQ(action_for_slot(3, Lane::Main, true), DriveAction::HardAccelerate);
  EXPECT_EQ(action_for_slot(4, Lane::Ramp, true), DriveAction::HardDecelerate);
  EXPECT_EQ(slot_for_action(DriveAction::Merge), 3);
  EXPECT_THROW(action_for_slot(5, Lane::Main, false), ContractViolation);
}
