#pragma once

#include "level0_oracle.hpp"

#include "levelk/level0/level0.hpp"

#include <functional>
#include <string>
#include <vector>

namespace oracle {

inline levelk::sim::Surroundings to_surroundings(const Level0Input& in) {
  levelk::sim::Surroundings s;
  s.lane = in.on_ramp ? levelk::Lane::Ramp : levelk::Lane::Main;
  s.front_center = {in.fc_d, in.fc_v, true};
  s.front_side = {in.fs_d, in.fs_v, true};
  s.rear_side = {in.rs_d, in.rs_v, true};
  s.dist_to_merge_end = in.d_e;
  s.speed = in.speed;
  s.in_merge_region = in.d_e >= 0 && in.d_e <= 145.0;
  return s;
}

// Values straddling every threshold of the listings (d_close 3, d_nom 13,
// d_far 23, 1.5 d_far 34.5, ttc 4 and 7 s, eps 0.01) plus far-away cases.
inline const std::vector<double> kGaps = {0.0, 3.0, 3.5, 10.0, 23.0, 23.5, 30.0, 34.5, 40.0, 1e9};
inline const std::vector<double> kRelV = {-15.0, -5.0, -0.01, 0.0, 0.01, 0.5, 5.0};
inline const std::vector<double> kDist = {-10.0, 0.0, 5.0, 9.99, 10.0, 22.9, 23.0, 72.5, 145.0, 146.0};
inline const std::vector<double> kSpeed = {0.0, 0.5, 9.78, 12.0};
inline const std::vector<double> kDraw = {0.0, 0.2, 0.99};

// Visits every stride-th cell of the ramp product grid; returns the number visited.
inline long for_each_ramp_cell(const std::function<void(const Level0Input&)>& visit, int stride = 1) {
  long n = 0, k = 0;
  for (double fc_d : kGaps) for (double fc_v : kRelV) for (double fs_d : kGaps) for (double fs_v : kRelV)
  for (double rs_d : kGaps) for (double rs_v : kRelV) for (double d_e : kDist) for (double sp : kSpeed)
  for (double z : kDraw) {
    if (k++ % stride != 0) continue;
    Level0Input in{true, fc_d, fc_v, fs_d, fs_v, rs_d, rs_v, d_e, sp, z};
    visit(in);
    ++n;
  }
  return n;
}

inline long for_each_main_cell(const std::function<void(const Level0Input&)>& visit) {
  long n = 0;
  for (double fc_d : kGaps) for (double fc_v : kRelV) for (double d_e : kDist) for (double sp : kSpeed) {
    for (double extra : {0.0, 1.0, 2.0, 3.0}) {
      // side readings must not matter on the main road
      Level0Input in{false, fc_d, fc_v, 1.0 + extra, -extra, 2.0 * extra, extra, d_e, sp, 0.25 * extra};
      visit(in);
      ++n;
    }
  }
  return n;
}

}  // namespace oracle
