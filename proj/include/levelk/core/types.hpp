#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace levelk {

enum class Lane : std::uint8_t { Ramp = 0, Main = 1 };

// Index order is the Q-network output order for the five longitudinal
// actions. Merge has no output unit of its own: see action_for_slot().
enum class DriveAction : std::uint8_t {
  Maintain = 0,
  Accelerate = 1,
  Decelerate = 2,
  HardAccelerate = 3,
  HardDecelerate = 4,
  Merge = 5,
};

inline constexpr int kNumDriveActions = 6;
inline constexpr int kNumActionSlots = 5;

enum class CollisionType : std::uint8_t {
  None = 0,
  Type1_RampEndBarrier = 1,
  Type2_MergeIntoCar = 2,
  Type3_RearEnd = 3,
};

/// Policy driving a vehicle: rule-based level-0, a trained level-k (k >= 1),
/// or the dynamic level selector.
class PolicyId {
 public:
  static constexpr int kMaxLevel = 3;

  static PolicyId level(int k);
  static PolicyId dynamic() { return PolicyId(-1); }

  bool is_dynamic() const { return level_ < 0; }
  bool is_level0() const { return level_ == 0; }
  /// Reasoning level; throws for the dynamic policy.
  int level() const;

  std::string name() const;
  static PolicyId parse(std::string_view text);

  friend bool operator==(PolicyId, PolicyId) = default;
  friend auto operator<=>(PolicyId, PolicyId) = default;

 private:
  explicit constexpr PolicyId(int level) : level_(level) {}
  int level_;
};

std::string_view to_string(Lane lane);
std::string_view to_string(DriveAction action);
std::string_view to_string(CollisionType type);

std::optional<DriveAction> parse_drive_action(std::string_view text);

bool is_longitudinal(DriveAction action);

}  // namespace levelk
