#include "level0_grid.hpp"

#include "levelk/core/errors.hpp"
#include "levelk/level0/level0.hpp"

#include <gtest/gtest.h>

using namespace levelk;
using namespace levelk::level0;

namespace {

sim::Surroundings ramp(double d_e, double speed) {
  sim::Surroundings s;
  s.lane = Lane::Ramp;
  s.dist_to_merge_end = d_e;
  s.in_merge_region = d_e >= 0 && d_e <= 145;
  s.speed = speed;
  s.front_center.rel_v = 29.16;
  s.front_side.rel_v = 29.16;
  s.rear_side.rel_v = -29.16;
  return s;
}

}  // namespace

TEST(Level0, ProximityWeightValues) {
  EXPECT_NEAR(proximity_weight(145.0, 145.0), 0.0, 1e-12);
  EXPECT_NEAR(proximity_weight(72.5, 145.0), 0.25, 1e-12);
  EXPECT_NEAR(proximity_weight(0.0, 145.0), 1.0, 1e-12);
  EXPECT_EQ(proximity_weight(300.0, 145.0), 0.0);
  EXPECT_EQ(proximity_weight(-300.0, 145.0), 1.0);
}

TEST(Level0, MergesThroughOpenGapNearBarrier) {
  const Level0Params p;
  auto s = ramp(20.0, 5.0);  // d_e < d_far opens the gate whatever the draw
  EXPECT_EQ(ramp_action(s, p, 0.99), DriveAction::Merge);
}

TEST(Level0, GateDrawControlsMergeFarFromBarrier) {
  const Level0Params p;
  auto s = ramp(72.5, 9.0);  // f = 0.25
  EXPECT_EQ(ramp_action(s, p, 0.2), DriveAction::Merge);
  EXPECT_NE(ramp_action(s, p, 0.3), DriveAction::Merge);
}

TEST(Level0, ClosingRearCarBlocksMerge) {
  const Level0Params p;
  auto s = ramp(20.0, 5.0);
  s.rear_side = {10.0, 5.0, true};  // ttc 2 s behind
  EXPECT_NE(ramp_action(s, p, 0.0), DriveAction::Merge);
}

TEST(Level0, MainRoadBraking) {
  const Level0Params p;
  sim::Surroundings s;
  s.lane = Lane::Main;
  s.speed = 10.0;
  s.dist_to_merge_end = 100.0;
  s.front_center = {2.0, 0.0, true};
  EXPECT_EQ(main_action(s, p), DriveAction::HardDecelerate);
  s.front_center = {12.0, -4.0, true};  // ttc 3 s
  EXPECT_EQ(main_action(s, p), DriveAction::HardDecelerate);
  s.front_center = {24.0, -4.0, true};  // ttc 6 s
  EXPECT_EQ(main_action(s, p), DriveAction::Decelerate);
  s.front_center = {40.0, -4.0, true};  // ttc 10 s
  EXPECT_EQ(main_action(s, p), DriveAction::Maintain);
  s.front_center = {40.0, 2.0, true};
  s.speed = 8.0;
  EXPECT_EQ(main_action(s, p), DriveAction::Accelerate);
}

TEST(Level0, RandomGateOnlyDrawnOnRampInRegion) {
  const Level0Params p;
  RandomStream a(1), b(1);
  sim::Surroundings s;
  s.lane = Lane::Main;
  s.front_center.rel_v = 29.16;
  act(s, p, a);
  EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(Level0, MatchesIndependentTransliterationOnSampledGrid) {
  const Level0Params p;
  const oracle::Level0Constants k;
  long mismatches = 0;
  const long ramp_cells = oracle::for_each_ramp_cell(
      [&](const oracle::Level0Input& in) {
        const auto got = to_string(ramp_action(oracle::to_surroundings(in), p, in.z));
        if (got != oracle::level0_ramp(in, k)) ++mismatches;
      },
      2003);
  const long main_cells = oracle::for_each_main_cell([&](const oracle::Level0Input& in) {
    const auto got = to_string(main_action(oracle::to_surroundings(in), p));
    if (got != oracle::level0_main(in, k)) ++mismatches;
  });
  EXPECT_GT(ramp_cells, 10000);
  EXPECT_GT(main_cells, 2000);
  EXPECT_EQ(mismatches, 0);
}

TEST(Level0, ParamsValidate) {
  Level0Params p;
  p.ttc_decel = 3.0;
  EXPECT_THROW(p.validate(), ConfigError);
}
