#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace levelk::trace {

/// One row of a trajectory file. Frames are sampled at 10 Hz.
struct TrajectoryRecord {
  int vehicle_id = 0;
  std::int64_t frame = 0;
  int lane = 0;
  double x = 0.0;  // longitudinal position of the vehicle center, m
  double v = 0.0;  // m/s
  double a = 0.0;  // m/s^2
};

/// Reads delimited text with a header row naming (in any order) the columns
/// vehicle_id, frame, lane, x, v, a. Extra columns are ignored; '#' starts a
/// comment line; separators may be commas, semicolons, tabs or spaces.
/// Frames of each vehicle must be strictly increasing in file order.
/// Throws levelk::ParseError carrying the 1-based line number.
std::vector<TrajectoryRecord> load_trajectories(std::istream& in);
std::vector<TrajectoryRecord> load_trajectories(const std::filesystem::path& path);

enum class LaneScope { Main, Ramp, Both };

struct LaneFilter {
  LaneScope scope = LaneScope::Both;
  std::set<int> ramp_lanes{7};

  bool accepts(int lane) const;
};

std::string_view to_string(LaneScope scope);

struct Moments {
  std::size_t count = 0;
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
  double min = 0.0;
  double max = 0.0;
};

struct Histogram {
  double lo = 0.0;
  double width = 1.0;
  std::vector<std::size_t> counts;

  std::size_t mass() const;
  double bin_lo(std::size_t i) const { return lo + width * static_cast<double>(i); }
};

struct Distribution {
  Moments moments;
  Histogram histogram;
  std::vector<double> samples;
};

/// Single-pass (Welford) moments.
Moments compute_moments(const std::vector<double>& samples);
/// Bins aligned to multiples of width covering [min, max].
Histogram make_histogram(const std::vector<double>& samples, double width);

struct HeadwayOptions {
  double car_length = 5.0;
  double bin_width = 1.0;
};

/// Bumper-to-bumper gap to the nearest vehicle ahead in the same lane, per
/// frame, for every accepted lane.
Distribution headway_distribution(const std::vector<TrajectoryRecord>& records, const LaneFilter& filter,
                                  const HeadwayOptions& options = {});
Distribution velocity_distribution(const std::vector<TrajectoryRecord>& records, const LaneFilter& filter,
                                   double bin_width = 0.5);
Distribution acceleration_distribution(const std::vector<TrajectoryRecord>& records,
                                       const LaneFilter& filter, double bin_width = 0.25);

struct PopulationDistribution {
  Moments moments;
  std::map<int, std::size_t> counts;  // vehicles-per-frame -> frames
};

/// Per-frame vehicle counts in the accepted lanes, over every frame present in
/// the records.
PopulationDistribution population_distribution(const std::vector<TrajectoryRecord>& records,
                                               const LaneFilter& filter);

struct EnvSuggestion {
  double v_nom = 0.0;
  double d_close = 0.0;
  double d_nom = 0.0;
  double d_far = 0.0;
};

/// Environment parameters from both-lane moments: v_nom = mean speed,
/// d_nom = mean headway, d_far / d_close = mean headway +/- one std.
EnvSuggestion suggest_parameters(const Moments& velocity, const Moments& headway);

/// Writes histograms (CSV), moments (JSON) for one lane scope into out_dir
/// with file names prefixed by the scope.
void write_outputs(const std::vector<TrajectoryRecord>& records, const LaneFilter& filter,
                   const std::filesystem::path& out_dir, const HeadwayOptions& options = {});

}  // namespace levelk::trace
