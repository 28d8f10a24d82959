#pragma once

#include "levelk/app/run_config.hpp"
#include "levelk/core/types.hpp"
#include "levelk/hierarchy/curriculum.hpp"

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace levelk::app {

/// Bad command-line input (unknown ids, malformed values).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Ego ids: level0..level3, dynamic, or "all" (level1..level3 and dynamic).
/// Comma separated lists are accepted. Throws UsageError.
std::vector<PolicyId> parse_egos(const std::string& text);
/// Traffic specs: level0..level3, dynamic, mixed, or "all" (every table row).
std::vector<hierarchy::TrafficComposition> parse_traffic(const std::string& text);

/// Trains one policy and installs the self-play winner into the store.
/// Output goes to a fresh versioned directory under config.out; returns it.
/// Refuses to replace an installed policy unless overwrite is set.
std::filesystem::path cmd_train(PolicyId policy, const RunConfig& config, bool overwrite,
                                std::ostream& log);

/// Evaluates every (ego, traffic) pair and writes the rate and type tables.
std::filesystem::path cmd_evaluate(const std::vector<PolicyId>& egos,
                                   const std::vector<hierarchy::TrafficComposition>& traffic,
                                   const RunConfig& config, std::ostream& log);

/// Writes trace.jsonl with one reset record per episode followed by one record
/// per step. Episodes cycle through config.traffic.populations.
std::filesystem::path cmd_simulate(PolicyId ego, const hierarchy::TrafficComposition& traffic,
                                   int episodes, const RunConfig& config, std::ostream& log);

/// Trajectory statistics for one lane scope; "both" also writes the main and
/// ramp scopes. With emit_fragment, env_fragment.cfg carries suggested
/// environment parameters.
std::filesystem::path cmd_stats(const std::filesystem::path& trajectories, const std::string& scope,
                                bool emit_fragment, const RunConfig& config, std::ostream& log);

struct ReplayReport {
  int records = 0;
  int vehicle_steps = 0;
  int mismatches = 0;
  std::string first_error;

  bool ok() const { return mismatches == 0 && records > 0; }
};

/// Re-integrates every vehicle step of a simulate trace from its recorded
/// pre-step state, action and acceleration, and checks the recorded post-step
/// state and the continuity between consecutive records exactly.
ReplayReport verify_trace(const std::filesystem::path& trace, const sim::EnvConfig& env);

}  // namespace levelk::app
