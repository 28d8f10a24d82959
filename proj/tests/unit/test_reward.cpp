#include "levelk/sim/reward.hpp"

#include <gtest/gtest.h>

using namespace levelk;
using namespace levelk::sim;

TEST(Reward, HeadwayBreakpoints) {
  EnvConfig c;
  EXPECT_EQ(headway_term(3.0, c), -1.0);
  EXPECT_EQ(headway_term(0.0, c), -1.0);
  EXPECT_EQ(headway_term(13.0, c), 0.0);
  EXPECT_EQ(headway_term(23.0, c), 1.0);
  EXPECT_EQ(headway_term(1e9, c), 1.0);
  EXPECT_DOUBLE_EQ(headway_term(8.0, c), -0.5);
  EXPECT_DOUBLE_EQ(headway_term(18.0, c), 0.5);
}

TEST(Reward, VelocityBreakpoints) {
  EnvConfig c;
  EXPECT_NEAR(velocity_term(9.78, c), 0.0, 1e-12);
  EXPECT_NEAR(velocity_term(0.0, c), -1.0, 1e-12);
  EXPECT_NEAR(velocity_term(19.47, c), 0.5, 1e-12);
  EXPECT_NEAR(velocity_term(29.16, c), 0.0, 1e-12);
}

TEST(Reward, EffortDependsOnActionAboveHalfNominalSpeed) {
  EnvConfig c;
  EXPECT_EQ(effort_term(DriveAction::Accelerate, 9.0, c), -0.25);
  EXPECT_EQ(effort_term(DriveAction::Decelerate, 9.0, c), -0.25);
  EXPECT_EQ(effort_term(DriveAction::HardAccelerate, 9.0, c), -1.0);
  EXPECT_EQ(effort_term(DriveAction::HardDecelerate, 9.0, c), -1.0);
  EXPECT_EQ(effort_term(DriveAction::Maintain, 9.0, c), 0.0);
  EXPECT_EQ(effort_term(DriveAction::Merge, 9.0, c), 0.0);
  EXPECT_EQ(effort_term(DriveAction::HardDecelerate, 4.0, c), 0.0);
}

TEST(Reward, StoppingOnMainRoad) {
  EnvConfig c;
  Surroundings s;
  s.lane = Lane::Main;
  s.dist_to_merge_end = 100.0;
  EXPECT_EQ(stopping_term(s, DriveAction::Maintain, c), -1.0);
  EXPECT_EQ(stopping_term(s, DriveAction::HardAccelerate, c), 0.0);
  s.front_center = {10.0, 0.0, true};
  EXPECT_EQ(stopping_term(s, DriveAction::Maintain, c), 0.0);
}

TEST(Reward, StoppingOnRamp) {
  EnvConfig c;
  Surroundings s;
  s.lane = Lane::Ramp;
  s.in_merge_region = true;
  s.dist_to_merge_end = 60.0;
  EXPECT_EQ(stopping_term(s, DriveAction::Maintain, c), -1.0);  // open gap, not merging
  EXPECT_EQ(stopping_term(s, DriveAction::Merge, c), 0.0);
  s.rear_side = {20.0, 0.0, true};  // rear gap below 1.5 d_far closes the gap
  EXPECT_EQ(stopping_term(s, DriveAction::Maintain, c), 0.0);
  s.dist_to_merge_end = 20.0;
  EXPECT_EQ(stopping_term(s, DriveAction::Maintain, c), -0.05);
}

TEST(Reward, TermsAndWeightedSum) {
  EnvConfig c;
  Surroundings s;
  s.lane = Lane::Ramp;
  s.speed = 19.47;
  s.front_center = {13.0, 0.0, true};
  s.dist_to_merge_end = 200.0;
  const auto t = reward_terms(s, DriveAction::Accelerate, CollisionType::Type3_RearEnd, c);
  EXPECT_EQ(t.collision, -1.0);
  EXPECT_EQ(t.headway, 0.0);
  EXPECT_NEAR(t.velocity, 0.5, 1e-12);
  EXPECT_EQ(t.effort, -0.25);
  EXPECT_EQ(t.not_merging, -1.0);
  EXPECT_EQ(t.stopping, 0.0);
  RewardWeights w;
  const double expected = -100.0 + 0.0 + 0.5 - 0.25 * 0.5 - 0.5 + 0.0;
  EXPECT_NEAR(compute_reward(t, w), expected, 1e-12);
}
