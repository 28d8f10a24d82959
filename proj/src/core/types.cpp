#include "levelk/core/types.hpp"

#include "levelk/core/errors.hpp"

#include <array>

namespace levelk {

PolicyId PolicyId::level(int k) {
  if (k < 0 || k > kMaxLevel) {
    throw ContractViolation("policy level out of range: " + std::to_string(k));
  }
  return PolicyId(k);
}

int PolicyId::level() const {
  if (is_dynamic()) {
    throw ContractViolation("dynamic policy has no fixed level");
  }
  return level_;
}

std::string PolicyId::name() const {
  if (is_dynamic()) return "dynamic";
  return "level" + std::to_string(level_);
}

PolicyId PolicyId::parse(std::string_view text) {
  if (text == "dynamic" || text == "dyn") return dynamic();
  std::string_view digits = text;
  if (digits.starts_with("level-")) {
    digits.remove_prefix(6);
  } else if (digits.starts_with("level")) {
    digits.remove_prefix(5);
  }
  if (digits.size() == 1 && digits[0] >= '0' && digits[0] <= '0' + kMaxLevel) {
    return level(digits[0] - '0');
  }
  throw ConfigError("unknown policy id '" + std::string(text) + "'");
}

std::string_view to_string(Lane lane) {
  return lane == Lane::Ramp ? "ramp" : "main";
}

namespace {
constexpr std::array<std::string_view, kNumDriveActions> kActionNames = {
    "maintain", "accelerate", "decelerate", "hard_accelerate", "hard_decelerate", "merge"};
}

std::string_view to_string(DriveAction action) {
  return kActionNames[static_cast<std::size_t>(action)];
}

std::string_view to_string(CollisionType type) {
  switch (type) {
    case CollisionType::None: return "none";
    case CollisionType::Type1_RampEndBarrier: return "type1";
    case CollisionType::Type2_MergeIntoCar: return "type2";
    case CollisionType::Type3_RearEnd: return "type3";
  }
  return "none";
}

std::optional<DriveAction> parse_drive_action(std::string_view text) {
  for (std::size_t i = 0; i < kActionNames.size(); ++i) {
    if (kActionNames[i] == text) return static_cast<DriveAction>(i);
  }
  return std::nullopt;
}

bool is_longitudinal(DriveAction action) { return action != DriveAction::Merge; }

}  // namespace levelk
