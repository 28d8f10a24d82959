#pragma once

#include "levelk/hierarchy/curriculum.hpp"
#include "levelk/hierarchy/policy_set.hpp"
#include "levelk/hierarchy/rollout.hpp"
#include "levelk/sim/config.hpp"

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace levelk::eval {

struct TrafficSpec {
  hierarchy::TrafficComposition composition = hierarchy::TrafficComposition::mixed();
  std::vector<int> populations{4, 8, 12, 16, 20, 24, 28};
  int episodes_per_population = 150;

  int total_episodes() const {
    return static_cast<int>(populations.size()) * episodes_per_population;
  }
};

struct EpisodeRecord {
  int index = 0;
  int population = 0;
  std::uint64_t seed = 0;
  Lane ego_lane = Lane::Main;
  sim::EpisodeOutcome outcome = sim::EpisodeOutcome::Running;
  CollisionType collision = CollisionType::None;
  int steps = 0;
  double reward = 0.0;
  int env_collisions = 0;
  /// Environment vehicles per policy at episode start (level-0..3, dynamic).
  std::array<int, 5> composition{};

  friend bool operator==(const EpisodeRecord&, const EpisodeRecord&) = default;
};

struct CollisionStats {
  std::string ego;
  std::string traffic;
  std::vector<EpisodeRecord> episodes;

  int total() const { return static_cast<int>(episodes.size()); }
  int collisions() const;
  /// Ego-collision episodes of the given type (Type1..Type3).
  int count(CollisionType type) const;
  double rate() const;

  friend bool operator==(const CollisionStats&, const CollisionStats&) = default;
};

/// Seed of episode `index` of an experiment: a counter-based derivation from
/// the master seed, so any single episode can be re-run on its own.
std::uint64_t episode_seed(std::uint64_t master, int index);

struct ExperimentOptions {
  sim::EnvConfig env;
  std::uint64_t seed = 0;
  hierarchy::ActMode ego_mode = hierarchy::ActMode::argmax();
  int threads = 1;
};

/// Runs every (population, episode) cell with the ego greedy by default.
/// Results are ordered by episode index whatever the thread count.
CollisionStats run_experiment(PolicyId ego, const TrafficSpec& traffic,
                              const hierarchy::PolicySet& policies,
                              const ExperimentOptions& options);

/// Scales counts by 100 / reference_total.
std::vector<double> normalize_counts(const std::vector<double>& counts, double reference_total);

/// Rows of the collision-rate table (traffic) and its columns (ego).
inline const std::vector<std::string> kRateRows = {"level0", "level1", "level2", "level3", "dynamic", "mixed"};
inline const std::vector<std::string> kRateCols = {"level1", "level2", "level3", "dynamic"};

/// Writes into out_dir:
///   collision_rates.csv  traffic x ego rate matrix in percent, untested cells empty
///   mixed_types.csv      per ego in mixed traffic: Type1..Type3 counts normalized by
///                        100 / (collisions of the reference ego), plus raw counts
///   summary.json         every experiment with counts, rate and per-type counts
/// reference_ego names the normalizing row; defaults to level1 when present.
void emit_tables(const std::vector<CollisionStats>& stats, const std::filesystem::path& out_dir,
                 std::optional<std::string> reference_ego = {});

/// Loads the per-experiment aggregates back from summary.json (episodes are
/// not stored there; the returned records carry counts only).
struct SummaryEntry {
  std::string ego;
  std::string traffic;
  int episodes = 0;
  int collisions = 0;
  double rate = 0.0;
  std::array<int, 3> type_counts{};

  friend bool operator==(const SummaryEntry&, const SummaryEntry&) = default;
};
std::vector<SummaryEntry> summarize(const std::vector<CollisionStats>& stats);
std::vector<SummaryEntry> load_summary(const std::filesystem::path& path);

/// One JSON line per episode.
void write_episode_log(const CollisionStats& stats, const std::filesystem::path& path);

}  // namespace levelk::eval
