#pragma once

#include "levelk/dqn/dqn.hpp"
#include "levelk/hierarchy/curriculum.hpp"
#include "levelk/hierarchy/policy_set.hpp"
#include "levelk/hierarchy/policy_store.hpp"
#include "levelk/hierarchy/rollout.hpp"
#include "levelk/sim/config.hpp"

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace levelk::hierarchy {

struct TrainingOptions {
  sim::EnvConfig env;
  level0::Level0Params level0;
  dqn::TrainerConfig trainer;
  Curriculum curriculum;
  std::uint64_t seed = 0;
  int checkpoint_every = 100;
  int selection_candidates = 5;
  int selection_episodes = 200;
  /// Checkpoints and the episode log are written here when non-empty.
  std::filesystem::path out_dir;
  std::string config_digest;
};

struct EpisodeLog {
  int episode = 0;
  double reward = 0.0;
  int steps = 0;
  sim::EpisodeOutcome outcome = sim::EpisodeOutcome::Running;
  CollisionType collision = CollisionType::None;
  double temperature = 0.0;
  int population = 0;
  Lane ego_lane = Lane::Main;
  int env_collisions = 0;
  int updates = 0;
  double mean_loss = 0.0;

  /// One JSON object on a single line.
  std::string to_json_line() const;
};

struct CheckpointRecord {
  int episode = 0;  // episodes completed when it was taken
  std::filesystem::path path;
  nn::NetworkParams params;
};

struct TrainingResult {
  PolicyId policy = PolicyId::level(1);
  std::vector<EpisodeLog> log;
  std::vector<CheckpointRecord> checkpoints;
  std::vector<int> selection_collisions;  // per final candidate
  int selected = -1;                      // index into checkpoints
  nn::NetworkParams best;
};

/// Called after every episode; useful for progress output.
using EpisodeCallback = std::function<void(const EpisodeLog&)>;

/// Trains the level-k driving policy against traffic made entirely of
/// level-(k-1) drivers. Only level-(k-1) is read from the store.
TrainingResult train_level_k(int k, const PolicyStore& store, const TrainingOptions& options,
                             const EpisodeCallback& progress = {});

/// Trains the dynamic level selector over frozen level-1..3 networks, with
/// each environment vehicle's policy drawn uniformly from level-0..3.
TrainingResult train_dynamic(const PolicyStore& store, const TrainingOptions& options,
                             const EpisodeCallback& progress = {});

/// Index of the smallest count; ties go to the earliest.
int pick_fewest_collisions(const std::vector<int>& counts);

/// Ego collisions of `candidate` in self-play (the candidate drives the ego and
/// every environment vehicle) over a fixed, seeded set of episodes.
int self_play_collisions(PolicyId policy, const nn::NetworkParams& candidate,
                         const PolicySet& base, const TrainingOptions& options);

/// Self-play selection among the final checkpoints.
int select_best_model(PolicyId policy, const std::vector<const nn::NetworkParams*>& candidates,
                      const PolicySet& base, const TrainingOptions& options,
                      std::vector<int>* collisions = nullptr);

}  // namespace levelk::hierarchy
