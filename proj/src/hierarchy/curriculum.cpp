#include "levelk/hierarchy/curriculum.hpp"

#include "levelk/core/errors.hpp"

namespace levelk::hierarchy {

void Curriculum::validate() const {
  if (populations.empty()) throw ConfigError("curriculum population set is empty");
  if (block <= 0) throw ConfigError("curriculum block must be positive");
  if (!(0 <= initial_episodes && initial_episodes <= sinusoidal_end &&
        sinusoidal_end <= total_episodes && total_episodes > 0)) {
    throw ConfigError("curriculum phases must satisfy 0 <= initial <= sinusoidal_end <= total");
  }
  for (int n : populations) {
    if (n < 1) throw ConfigError("populations must be >= 1");
  }
  if (initial_population < 1) throw ConfigError("initial population must be >= 1");
}

int population_schedule(int episode, const Curriculum& c, std::uint64_t seed) {
  if (episode < 0 || episode >= c.total_episodes) {
    throw ContractViolation("episode " + std::to_string(episode) + " outside the curriculum");
  }
  const auto n = static_cast<int>(c.populations.size());
  if (episode < c.initial_episodes) return c.initial_population;
  if (episode < c.sinusoidal_end) {
    if (n == 1) return c.populations[0];
    // triangle wave over set indices, first change at the phase boundary
    const int period = 2 * (n - 1);
    const int step = ((episode - c.initial_episodes) / c.block + 1) % period;
    const int index = step <= n - 1 ? step : period - step;
    return c.populations[static_cast<std::size_t>(index)];
  }
  const auto block = static_cast<std::uint64_t>((episode - c.sinusoidal_end) / c.block);
  RandomStream rng(derive_seed(seed, "population", block));
  return c.populations[rng.index(static_cast<std::uint64_t>(n))];
}

TrafficComposition TrafficComposition::all_level(int k) {
  if (k < 0 || k > PolicyId::kMaxLevel) throw ConfigError("traffic level must lie in 0..3");
  return TrafficComposition(Kind::AllLevel, k);
}

TrafficComposition TrafficComposition::parse(std::string_view text) {
  if (text == "mixed") return mixed();
  if (text == "dynamic") return all_dynamic();
  const PolicyId id = PolicyId::parse(text);
  return all_level(id.level());
}

std::string TrafficComposition::name() const {
  switch (kind_) {
    case Kind::AllLevel: return "level" + std::to_string(level_);
    case Kind::AllDynamic: return "dynamic";
    case Kind::MixedUniform: return "mixed";
  }
  return "mixed";
}

std::vector<PolicyId> TrafficComposition::support() const {
  switch (kind_) {
    case Kind::AllLevel: return {PolicyId::level(level_)};
    case Kind::AllDynamic: return {PolicyId::dynamic()};
    case Kind::MixedUniform: break;
  }
  std::vector<PolicyId> all;
  for (int k = 0; k <= PolicyId::kMaxLevel; ++k) all.push_back(PolicyId::level(k));
  return all;
}

std::vector<PolicyId> TrafficComposition::assign(int n_env, RandomStream& rng) const {
  const auto options = support();
  std::vector<PolicyId> out;
  out.reserve(static_cast<std::size_t>(std::max(n_env, 0)));
  for (int i = 0; i < n_env; ++i) {
    out.push_back(options.size() == 1 ? options[0] : options[rng.index(options.size())]);
  }
  return out;
}

}  // namespace levelk::hierarchy
