#pragma once

#include "levelk/dqn/dqn.hpp"
#include "levelk/eval/eval.hpp"
#include "levelk/hierarchy/curriculum.hpp"
#include "levelk/hierarchy/training.hpp"
#include "levelk/level0/level0.hpp"
#include "levelk/sim/config.hpp"

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace levelk::app {

/// Everything a command needs, loadable from a key = value text file.
///
/// Syntax: one `key = value` per line, '#' starts a comment, blank lines are
/// ignored, lists are comma separated. Keys are dotted (`env.v_nom`,
/// `trainer.gamma`, ...); see config_keys() for the full list with units.
/// Lengths are in meters, speeds in m/s, times in seconds.
struct RunConfig {
  std::uint64_t seed = 0;
  sim::EnvConfig env;
  /// Time-to-collision thresholds and tolerances of the rule-based driver.
  /// Distances, v_nom and merge length come from env.
  double ttc_hard_decel = 4.0;
  double ttc_decel = 7.0;
  double level0_epsilon = 0.01;
  double creep_distance = 10.0;
  dqn::TrainerConfig trainer;
  hierarchy::Curriculum curriculum;
  int checkpoint_every = 100;
  int selection_candidates = 5;
  int selection_episodes = 200;
  eval::TrafficSpec traffic;
  int eval_threads = 1;
  std::string reference_ego = "level1";
  std::filesystem::path store = "policies";
  std::filesystem::path out = "runs";
  std::set<int> ramp_lanes{7};
  double trace_car_length = 5.0;
  double headway_bin = 1.0;
  double velocity_bin = 0.5;
  double acceleration_bin = 0.25;

  level0::Level0Params level0() const;
  hierarchy::TrainingOptions training_options() const;
  void validate() const;
};

struct ConfigKey {
  std::string name;
  std::string description;
};

/// Every recognized key in serialization order.
const std::vector<ConfigKey>& config_keys();

/// Applies one key; throws ConfigError on an unknown key or a bad value.
void set_value(RunConfig& config, const std::string& key, const std::string& value);
std::string get_value(const RunConfig& config, const std::string& key);

/// Parses a configuration on top of `base`. Throws ParseError with the line
/// number for malformed lines and ConfigError for bad keys or values.
RunConfig parse_config(std::istream& in, RunConfig base = {});
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

/// Canonical text of every key, in config_keys() order. Parsing it back yields
/// an identical configuration.
std::string serialize(const RunConfig& config);
/// Hex FNV-1a digest of serialize(config).
std::string digest(const RunConfig& config);

/// Applies LEVELK_<KEY> environment overrides (dots become underscores,
/// upper case, e.g. LEVELK_ENV_V_NOM) using the given lookup.
using EnvLookup = std::function<const char*(const char*)>;
void apply_environment(RunConfig& config, const EnvLookup& lookup);

/// First free directory among base, base.1, base.2, ...; created on return.
std::filesystem::path versioned_directory(const std::filesystem::path& base);

}  // namespace levelk::app
