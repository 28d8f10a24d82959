#include "levelk/hierarchy/policy_set.hpp"

#include "levelk/core/errors.hpp"
#include "levelk/dqn/dqn.hpp"

#include <string>

namespace levelk::hierarchy {

int choose_slot(const nn::Vector& q, ActMode mode, RandomStream& rng) {
  if (mode.greedy) return nn::argmax(q);
  return dqn::boltzmann_sample(std::span<const double>(q.data(), static_cast<std::size_t>(q.size())),
                               mode.temperature, rng);
}

DriveAction level_k_act(const nn::NetworkParams& net, const sim::Observation& obs,
                        const sim::Surroundings& s, ActMode mode, RandomStream& rng) {
  const auto input = obs.to_array();
  const int slot = choose_slot(nn::forward(net, input), mode, rng);
  return sim::action_for_slot(slot, s.lane, s.in_merge_region);
}

DynamicChoice dynamic_act(const sim::Observation& obs, const sim::Surroundings& s,
                          const nn::NetworkParams& dynamic_net,
                          const std::array<const nn::NetworkParams*, 3>& level_nets, ActMode mode,
                          RandomStream& rng) {
  const auto input = obs.to_array();
  const int pick = choose_slot(nn::forward(dynamic_net, input), mode, rng);
  const nn::NetworkParams* net = level_nets[static_cast<std::size_t>(pick)];
  if (net == nullptr) throw MissingPrerequisite("dynamic policy selected an unloaded level");
  DynamicChoice c;
  c.level = pick + 1;
  c.action = level_k_act(*net, obs, s, mode, rng);
  return c;
}

void PolicySet::set_level(int k, std::shared_ptr<const nn::NetworkParams> net) {
  if (k < 1 || k > PolicyId::kMaxLevel) throw ContractViolation("trained levels are 1..3");
  if (net && net->spec.output_size() != kLevelOutputs) {
    throw CheckpointError(CheckpointError::Kind::ShapeMismatch, "level network must have 5 outputs");
  }
  levels_[static_cast<std::size_t>(k - 1)] = std::move(net);
}

void PolicySet::set_dynamic(std::shared_ptr<const nn::NetworkParams> net) {
  if (net && net->spec.output_size() != kDynamicOutputs) {
    throw CheckpointError(CheckpointError::Kind::ShapeMismatch, "dynamic network must have 3 outputs");
  }
  dynamic_ = std::move(net);
}

bool PolicySet::has(PolicyId id) const {
  if (id.is_dynamic()) return dynamic_ != nullptr && level_nets()[0] && level_nets()[1] && level_nets()[2];
  if (id.is_level0()) return true;
  return levels_[static_cast<std::size_t>(id.level() - 1)] != nullptr;
}

const nn::NetworkParams& PolicySet::level(int k) const {
  if (k < 1 || k > PolicyId::kMaxLevel || !levels_[static_cast<std::size_t>(k - 1)]) {
    throw MissingPrerequisite("level-" + std::to_string(k) + " policy not loaded");
  }
  return *levels_[static_cast<std::size_t>(k - 1)];
}

const nn::NetworkParams& PolicySet::dynamic() const {
  if (!dynamic_) throw MissingPrerequisite("dynamic policy not loaded");
  return *dynamic_;
}

std::array<const nn::NetworkParams*, 3> PolicySet::level_nets() const {
  return {levels_[0].get(), levels_[1].get(), levels_[2].get()};
}

DriveAction PolicySet::act(PolicyId id, const sim::Observation& obs, const sim::Surroundings& s,
                           RandomStream& rng, ActMode mode, std::optional<int>* chosen_level) const {
  if (id.is_level0()) return level0::act(s, level0_, rng);
  if (id.is_dynamic()) {
    const auto c = dynamic_act(obs, s, dynamic(), level_nets(), mode, rng);
    if (chosen_level != nullptr) *chosen_level = c.level;
    return c.action;
  }
  return level_k_act(level(id.level()), obs, s, mode, rng);
}

sim::VehiclePolicy PolicySet::traffic_policy(RandomStream& rng) const {
  return [this, &rng](const sim::VehicleState& v, const sim::Surroundings& s,
                      const sim::Observation& obs) { return act(v.policy, obs, s, rng); };
}

}  // namespace levelk::hierarchy
