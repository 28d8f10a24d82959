#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace levelk {

/// Mixes a master seed with a stream name and an index into an independent
/// 64-bit seed (FNV-1a over the name, then splitmix64 finalization).
std::uint64_t derive_seed(std::uint64_t master, std::string_view stream, std::uint64_t index = 0);

/// A seeded random stream. Transforms from raw engine output are written out
/// here rather than taken from <random> distributions so that traces are
/// reproducible across standard library implementations.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer on [0, n).
  std::uint64_t index(std::uint64_t n);

  double exponential(double rate);
  double laplace(double location, double scale);

  /// A child stream seeded from this stream's next output.
  RandomStream fork() { return RandomStream(derive_seed(engine_(), "fork")); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace levelk
