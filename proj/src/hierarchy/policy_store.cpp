#include "levelk/hierarchy/policy_store.hpp"

#include "levelk/core/errors.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace levelk::hierarchy {

namespace {

using nlohmann::json;

json read_manifest(const std::filesystem::path& root) {
  const auto path = root / "manifest.json";
  if (!std::filesystem::exists(path)) return json{{"format", 1}, {"policies", json::object()}};
  std::ifstream in(path);
  return json::parse(in);
}

void write_manifest(const std::filesystem::path& root, const json& manifest) {
  std::ofstream out(root / "manifest.json", std::ios::trunc);
  out << manifest.dump(2) << '\n';
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

int expected_outputs(PolicyId id) { return id.is_dynamic() ? kDynamicOutputs : kLevelOutputs; }

PolicyStore::PolicyStore(std::filesystem::path root) : root_(std::move(root)) {}

std::filesystem::path PolicyStore::path_for(PolicyId id) const { return root_ / (id.name() + ".qnet"); }

bool PolicyStore::contains(PolicyId id) const {
  if (id.is_level0()) return true;
  return std::filesystem::exists(path_for(id));
}

nn::NetworkParams PolicyStore::load(PolicyId id) const {
  if (id.is_level0()) throw ContractViolation("level-0 is rule-based and has no checkpoint");
  if (!contains(id)) {
    throw MissingPrerequisite(id.name() + " policy is not installed in " + root_.string());
  }
  access_log_.push_back(id);
  return nn::load_params(path_for(id), expected_outputs(id)).params;
}

void PolicyStore::install(PolicyId id, const nn::NetworkParams& params,
                          const nn::CheckpointMeta& meta, const std::string& config_digest,
                          bool overwrite) {
  if (id.is_level0()) throw ContractViolation("level-0 cannot be installed");
  if (params.spec.output_size() != expected_outputs(id)) {
    throw CheckpointError(CheckpointError::Kind::ShapeMismatch,
                          id.name() + " needs " + std::to_string(expected_outputs(id)) + " outputs");
  }
  if (contains(id) && !overwrite) {
    throw std::runtime_error(id.name() + " already installed in " + root_.string() +
                             " (use overwrite to replace it)");
  }
  std::filesystem::create_directories(root_);
  nn::save_params(params, meta, path_for(id));
  json manifest = read_manifest(root_);
  manifest["policies"][id.name()] = {
      {"file", path_for(id).filename().string()},
      {"episode", meta.episode},
      {"seed", meta.seed},
      {"config_digest", config_digest},
      {"checkpoint_digest", file_digest(id)},
  };
  write_manifest(root_, manifest);
}

std::string PolicyStore::file_digest(PolicyId id) const {
  std::ifstream in(path_for(id), std::ios::binary);
  if (!in) throw MissingPrerequisite(id.name() + " policy is not installed");
  std::ostringstream buf;
  buf << in.rdbuf();
  return hex64(nn::fnv1a(buf.str()));
}

PolicySet PolicyStore::policy_set(const level0::Level0Params& level0, bool with_dynamic) const {
  PolicySet set(level0);
  for (int k = 1; k <= PolicyId::kMaxLevel; ++k) {
    if (contains(PolicyId::level(k))) {
      set.set_level(k, std::make_shared<const nn::NetworkParams>(load(PolicyId::level(k))));
    }
  }
  if (with_dynamic && contains(PolicyId::dynamic())) {
    set.set_dynamic(std::make_shared<const nn::NetworkParams>(load(PolicyId::dynamic())));
  }
  return set;
}

}  // namespace levelk::hierarchy
