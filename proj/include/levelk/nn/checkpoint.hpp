#pragma once

#include "levelk/nn/network.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace levelk::nn {

/// Checkpoint file layout, all integers and doubles little-endian:
///
///   offset  size  field
///   0       4     magic "LKQN"
///   4       4     u32 format version (currently 1)
///   8       4     u32 number of layer sizes L
///   12      4*L   u32 layer sizes
///   ...     4     u32 byte length of the policy tag, then the tag bytes (UTF-8)
///   ...     8     u64 training episode
///   ...     8     u64 source seed
///   ...     8*P   f64 parameters, per layer: W row-major (out x in), then b
///   ...     8     u64 FNV-1a hash of every preceding byte
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct CheckpointMeta {
  std::string policy;  // e.g. "level1", "dynamic"
  std::uint64_t episode = 0;
  std::uint64_t seed = 0;

  friend bool operator==(const CheckpointMeta&, const CheckpointMeta&) = default;
};

struct Checkpoint {
  NetworkParams params;
  CheckpointMeta meta;
};

std::string encode_checkpoint(const NetworkParams& params, const CheckpointMeta& meta);
/// Throws CheckpointError (Corrupt, Version, ShapeMismatch).
Checkpoint decode_checkpoint(const std::string& bytes, std::optional<int> expected_outputs = {});

void save_params(const NetworkParams& params, const CheckpointMeta& meta,
                 const std::filesystem::path& path);
Checkpoint load_params(const std::filesystem::path& path, std::optional<int> expected_outputs = {});

/// 64-bit FNV-1a, also used for config and artifact digests.
std::uint64_t fnv1a(std::string_view bytes);

}  // namespace levelk::nn
