#include "levelk/eval/eval.hpp"

#include "levelk/core/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <thread>

namespace levelk::eval {

using nlohmann::ordered_json;

int CollisionStats::collisions() const {
  return static_cast<int>(std::count_if(episodes.begin(), episodes.end(), [](const EpisodeRecord& r) {
    return r.collision != CollisionType::None;
  }));
}

int CollisionStats::count(CollisionType type) const {
  return static_cast<int>(std::count_if(episodes.begin(), episodes.end(),
                                        [type](const EpisodeRecord& r) { return r.collision == type; }));
}

double CollisionStats::rate() const {
  return episodes.empty() ? 0.0 : static_cast<double>(collisions()) / static_cast<double>(total());
}

std::uint64_t episode_seed(std::uint64_t master, int index) {
  return derive_seed(master, "eval-episode", static_cast<std::uint64_t>(index));
}

namespace {

EpisodeRecord run_one(PolicyId ego, const TrafficSpec& traffic, const hierarchy::PolicySet& policies,
                      const ExperimentOptions& options, int index) {
  EpisodeRecord rec;
  rec.index = index;
  rec.population = traffic.populations[static_cast<std::size_t>(index / traffic.episodes_per_population)];
  rec.seed = episode_seed(options.seed, index);
  const auto setup = hierarchy::make_setup(options.env, rec.population, traffic.composition, rec.seed);
  for (PolicyId p : setup.assignment) {
    ++rec.composition[p.is_dynamic() ? 4 : static_cast<std::size_t>(p.level())];
  }
  const auto summary = hierarchy::run_episode(policies, ego, options.ego_mode, setup);
  rec.ego_lane = summary.ego_lane;
  rec.outcome = summary.outcome;
  rec.collision = summary.collision;
  rec.steps = summary.steps;
  rec.reward = summary.total_reward;
  rec.env_collisions = summary.env_collisions;
  return rec;
}

}  // namespace

CollisionStats run_experiment(PolicyId ego, const TrafficSpec& traffic,
                              const hierarchy::PolicySet& policies, const ExperimentOptions& options) {
  if (traffic.populations.empty() || traffic.episodes_per_population <= 0) {
    throw ContractViolation("experiment needs populations and a positive episode count");
  }
  if (!policies.has(ego)) throw MissingPrerequisite("ego policy " + ego.name() + " is not loaded");
  for (PolicyId p : traffic.composition.support()) {
    if (!policies.has(p)) throw MissingPrerequisite("traffic policy " + p.name() + " is not loaded");
  }
  options.env.validate();

  CollisionStats stats;
  stats.ego = ego.name();
  stats.traffic = traffic.composition.name();
  const int total = traffic.total_episodes();
  stats.episodes.resize(static_cast<std::size_t>(total));

  const int threads = std::clamp(options.threads, 1, std::max(total, 1));
  if (threads == 1) {
    for (int i = 0; i < total; ++i) stats.episodes[static_cast<std::size_t>(i)] = run_one(ego, traffic, policies, options, i);
    return stats;
  }
  std::vector<std::jthread> workers;
  for (int t = 0; t < threads; ++t) {
    workers.emplace_back([&, t] {
      for (int i = t; i < total; i += threads) {
        stats.episodes[static_cast<std::size_t>(i)] = run_one(ego, traffic, policies, options, i);
      }
    });
  }
  workers.clear();
  return stats;
}

std::vector<double> normalize_counts(const std::vector<double>& counts, double reference_total) {
  if (!(reference_total > 0)) throw ContractViolation("normalization reference must be positive");
  std::vector<double> out(counts.size());
  std::transform(counts.begin(), counts.end(), out.begin(),
                 [&](double c) { return c * 100.0 / reference_total; });
  return out;
}

std::vector<SummaryEntry> summarize(const std::vector<CollisionStats>& stats) {
  std::vector<SummaryEntry> out;
  for (const auto& s : stats) {
    out.push_back({s.ego, s.traffic, s.total(), s.collisions(), s.rate(),
                   {s.count(CollisionType::Type1_RampEndBarrier), s.count(CollisionType::Type2_MergeIntoCar),
                    s.count(CollisionType::Type3_RearEnd)}});
  }
  return out;
}

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

}  // namespace

void emit_tables(const std::vector<CollisionStats>& stats, const std::filesystem::path& out_dir,
                 std::optional<std::string> reference_ego) {
  if (stats.empty()) throw ContractViolation("no experiments to tabulate");
  std::filesystem::create_directories(out_dir);
  const auto entries = summarize(stats);

  auto find = [&](const std::string& ego, const std::string& traffic) -> const SummaryEntry* {
    for (const auto& e : entries) {
      if (e.ego == ego && e.traffic == traffic) return &e;
    }
    return nullptr;
  };

  {
    std::ofstream csv(out_dir / "collision_rates.csv", std::ios::trunc);
    if (!csv) throw std::runtime_error("cannot write " + (out_dir / "collision_rates.csv").string());
    csv << "traffic";
    for (const auto& c : kRateCols) csv << ',' << c;
    csv << '\n';
    for (const auto& r : kRateRows) {
      csv << r;
      for (const auto& c : kRateCols) {
        csv << ',';
        if (const auto* e = find(c, r)) csv << fixed(100.0 * e->rate, 3);
      }
      csv << '\n';
    }
  }

  {
    std::vector<const SummaryEntry*> mixed;
    for (const auto& e : entries) {
      if (e.traffic == "mixed") mixed.push_back(&e);
    }
    const SummaryEntry* ref = nullptr;
    const std::string ref_name = reference_ego.value_or("level1");
    for (const auto* e : mixed) {
      if (e->ego == ref_name) ref = e;
    }
    if (ref == nullptr && !mixed.empty() && !reference_ego) ref = mixed.front();
    std::ofstream csv(out_dir / "mixed_types.csv", std::ios::trunc);
    if (!csv) throw std::runtime_error("cannot write " + (out_dir / "mixed_types.csv").string());
    csv << "ego,type1,type2,type3,type1_count,type2_count,type3_count,episodes,reference\n";
    for (const auto* e : mixed) {
      const std::vector<double> raw{static_cast<double>(e->type_counts[0]),
                                    static_cast<double>(e->type_counts[1]),
                                    static_cast<double>(e->type_counts[2])};
      csv << e->ego;
      if (ref != nullptr && ref->collisions > 0) {
        for (double v : normalize_counts(raw, ref->collisions)) csv << ',' << fixed(v, 3);
      } else {
        csv << ",,,";
      }
      for (int c : e->type_counts) csv << ',' << c;
      csv << ',' << e->episodes << ',' << (ref != nullptr ? ref->ego : "") << '\n';
    }
  }

  ordered_json j;
  j["format"] = 1;
  j["experiments"] = ordered_json::array();
  for (const auto& e : entries) {
    j["experiments"].push_back({{"ego", e.ego},
                                {"traffic", e.traffic},
                                {"episodes", e.episodes},
                                {"collisions", e.collisions},
                                {"rate", e.rate},
                                {"type1", e.type_counts[0]},
                                {"type2", e.type_counts[1]},
                                {"type3", e.type_counts[2]}});
  }
  std::ofstream(out_dir / "summary.json", std::ios::trunc) << j.dump(2) << '\n';
}

std::vector<SummaryEntry> load_summary(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  const auto j = nlohmann::json::parse(in);
  std::vector<SummaryEntry> out;
  for (const auto& e : j.at("experiments")) {
    out.push_back({e.at("ego").get<std::string>(), e.at("traffic").get<std::string>(),
                   e.at("episodes").get<int>(), e.at("collisions").get<int>(), e.at("rate").get<double>(),
                   {e.at("type1").get<int>(), e.at("type2").get<int>(), e.at("type3").get<int>()}});
  }
  return out;
}

void write_episode_log(const CollisionStats& stats, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const auto& r : stats.episodes) {
    ordered_json j;
    j["episode"] = r.index;
    j["ego"] = stats.ego;
    j["traffic"] = stats.traffic;
    j["population"] = r.population;
    j["seed"] = r.seed;
    j["ego_lane"] = to_string(r.ego_lane);
    j["outcome"] = sim::to_string(r.outcome);
    j["collision_type"] = to_string(r.collision);
    j["steps"] = r.steps;
    j["reward"] = r.reward;
    j["env_collisions"] = r.env_collisions;
    j["traffic_mix"] = r.composition;
    out << j.dump() << '\n';
  }
}

}  // namespace levelk::eval
