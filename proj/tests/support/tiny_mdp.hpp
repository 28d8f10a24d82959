#pragma once

#include "levelk/dqn/dqn.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace oracle {

// Two states, two actions, deterministic:
//   s0: a0 -> r 1, s1      a1 -> r 0, s0
//   s1: a0 -> r 0, s0      a1 -> r 2, terminal
struct TinyMdp {
  static constexpr int kStates = 2;
  static constexpr int kActions = 2;
  double gamma = 0.9;

  struct Outcome {
    double reward;
    int next;  // -1 when terminal
  };
  static Outcome step(int s, int a) {
    if (s == 0) return a == 0 ? Outcome{1.0, 1} : Outcome{0.0, 0};
    return a == 0 ? Outcome{0.0, 0} : Outcome{2.0, -1};
  }

  static levelk::dqn::State encode(int s) {
    levelk::dqn::State x{};
    x[static_cast<std::size_t>(s)] = 1.0;
    return x;
  }

  // Value-iteration fixed point.
  std::array<std::array<double, 2>, 2> optimal_q() const {
    std::array<std::array<double, 2>, 2> q{};
    for (int it = 0; it < 10000; ++it) {
      auto next = q;
      for (int s = 0; s < kStates; ++s) {
        for (int a = 0; a < kActions; ++a) {
          const auto o = step(s, a);
          const double v = o.next < 0 ? 0.0 : std::max(q[o.next][0], q[o.next][1]);
          next[s][a] = o.reward + gamma * v;
        }
      }
      q = next;
    }
    return q;
  }
};

}  // namespace oracle
