#pragma once

#include "levelk/core/types.hpp"
#include "levelk/hierarchy/policy_set.hpp"
#include "levelk/nn/checkpoint.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace levelk::hierarchy {

/// Directory of installed policies:
///
///   <root>/manifest.json   {"format": 1, "policies": {"level1": {...}, ...}}
///   <root>/level1.qnet     checkpoint files, one per policy id
///
/// Each manifest entry records the file name, training episode, source seed,
/// training config digest and an FNV-1a digest of the checkpoint bytes.
class PolicyStore {
 public:
  explicit PolicyStore(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path path_for(PolicyId id) const;
  bool contains(PolicyId id) const;

  /// Throws MissingPrerequisite if absent, CheckpointError on a bad file or a
  /// wrong output count for the slot.
  nn::NetworkParams load(PolicyId id) const;

  /// Throws std::runtime_error when the policy exists and overwrite is false.
  void install(PolicyId id, const nn::NetworkParams& params, const nn::CheckpointMeta& meta,
               const std::string& config_digest, bool overwrite = false);

  /// FNV-1a digest of the installed checkpoint file (hex).
  std::string file_digest(PolicyId id) const;

  /// Loads every installed level (and the dynamic policy if requested).
  PolicySet policy_set(const level0::Level0Params& level0, bool with_dynamic) const;

  /// Policies read through load(), in order. Lets callers check that a
  /// training stage touched only what it is allowed to.
  const std::vector<PolicyId>& access_log() const { return access_log_; }

 private:
  std::filesystem::path root_;
  mutable std::vector<PolicyId> access_log_;
};

int expected_outputs(PolicyId id);

}  // namespace levelk::hierarchy
