#include "levelk/app/commands.hpp"

#include "levelk/core/errors.hpp"
#include "levelk/eval/eval.hpp"
#include "levelk/hierarchy/policy_store.hpp"
#include "levelk/hierarchy/rollout.hpp"
#include "levelk/hierarchy/training.hpp"
#include "levelk/trace/trace_stats.hpp"

#include <json.hpp>

#include <fstream>
#include <map>
#include <sstream>

namespace levelk::app {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void archive_config(const RunConfig& config, const fs::path& dir) {
  std::ofstream(dir / "config.txt", std::ios::trunc) << serialize(config);
  std::ofstream(dir / "config.digest", std::ios::trunc) << digest(config) << '\n';
}

ordered_json vehicle_json(const sim::VehicleState& v) {
  return {{"id", v.id}, {"lane", to_string(v.lane)}, {"x", v.x}, {"v", v.v}, {"policy", v.policy.name()}};
}

}  // namespace

std::vector<PolicyId> parse_egos(const std::string& text) {
  std::vector<PolicyId> out;
  for (const auto& item : split_list(text)) {
    if (item == "all") {
      for (int k = 1; k <= PolicyId::kMaxLevel; ++k) out.push_back(PolicyId::level(k));
      out.push_back(PolicyId::dynamic());
      continue;
    }
    try {
      out.push_back(PolicyId::parse(item));
    } catch (const std::exception&) {
      throw UsageError("unknown ego id '" + item + "'");
    }
  }
  if (out.empty()) throw UsageError("no ego given");
  return out;
}

std::vector<hierarchy::TrafficComposition> parse_traffic(const std::string& text) {
  std::vector<hierarchy::TrafficComposition> out;
  for (const auto& item : split_list(text)) {
    if (item == "all") {
      for (const auto& row : eval::kRateRows) out.push_back(hierarchy::TrafficComposition::parse(row));
      continue;
    }
    try {
      out.push_back(hierarchy::TrafficComposition::parse(item));
    } catch (const std::exception&) {
      throw UsageError("unknown traffic spec '" + item + "'");
    }
  }
  if (out.empty()) throw UsageError("no traffic given");
  return out;
}

fs::path cmd_train(PolicyId policy, const RunConfig& config, bool overwrite, std::ostream& log) {
  if (policy.is_level0()) throw UsageError("level0 is rule-based and needs no training");
  config.validate();
  hierarchy::PolicyStore store(config.store);
  if (policy.is_dynamic()) {
    for (int k = 1; k <= PolicyId::kMaxLevel; ++k) {
      if (!store.contains(PolicyId::level(k))) {
        throw MissingPrerequisite("training the dynamic policy needs level" + std::to_string(k) + " in " +
                                  config.store.string());
      }
    }
  } else if (!store.contains(PolicyId::level(policy.level() - 1))) {
    throw MissingPrerequisite("training " + policy.name() + " needs level" +
                              std::to_string(policy.level() - 1) + " in " + config.store.string());
  }
  if (store.contains(policy) && !overwrite) {
    throw std::runtime_error(policy.name() + " is already installed in " + config.store.string() +
                             " (use --force to replace it)");
  }

  const auto run_dir = versioned_directory(config.out / ("train-" + policy.name()));
  archive_config(config, run_dir);
  auto options = config.training_options();
  options.out_dir = run_dir;
  log << "training " << policy.name() << " for " << config.curriculum.total_episodes << " episodes into "
      << run_dir.string() << '\n';

  int window_collisions = 0;
  auto progress = [&](const hierarchy::EpisodeLog& e) {
    if (e.outcome == sim::EpisodeOutcome::Collision) ++window_collisions;
    if ((e.episode + 1) % 100 == 0) {
      log << "  episode " << e.episode + 1 << "  T=" << e.temperature << "  population=" << e.population
          << "  collisions(last 100)=" << window_collisions << '\n';
      window_collisions = 0;
    }
  };
  const auto result = policy.is_dynamic() ? hierarchy::train_dynamic(store, options, progress)
                                          : hierarchy::train_level_k(policy.level(), store, options, progress);

  const auto& chosen = result.checkpoints.at(static_cast<std::size_t>(result.selected));
  nn::CheckpointMeta meta{policy.name(), static_cast<std::uint64_t>(chosen.episode), config.seed};
  store.install(policy, result.best, meta, options.config_digest, overwrite);
  log << "installed " << policy.name() << " from episode " << chosen.episode << " into "
      << config.store.string() << '\n';
  return run_dir;
}

fs::path cmd_evaluate(const std::vector<PolicyId>& egos,
                      const std::vector<hierarchy::TrafficComposition>& traffic, const RunConfig& config,
                      std::ostream& log) {
  config.validate();
  hierarchy::PolicyStore store(config.store);
  const auto policies = store.policy_set(config.level0(), true);
  for (const auto& ego : egos) {
    if (!policies.has(ego)) throw MissingPrerequisite(ego.name() + " is not installed in " + config.store.string());
  }
  for (const auto& t : traffic) {
    for (const auto& p : t.support()) {
      if (!policies.has(p)) {
        throw MissingPrerequisite(p.name() + " (needed by " + t.name() + " traffic) is not installed");
      }
    }
  }

  const auto run_dir = versioned_directory(config.out / "evaluate");
  archive_config(config, run_dir);
  fs::create_directories(run_dir / "episodes");
  eval::ExperimentOptions options;
  options.env = config.env;
  options.seed = config.seed;
  options.threads = config.eval_threads;

  std::vector<eval::CollisionStats> all;
  for (const auto& t : traffic) {
    eval::TrafficSpec spec = config.traffic;
    spec.composition = t;
    for (const auto& ego : egos) {
      auto stats = eval::run_experiment(ego, spec, policies, options);
      log << ego.name() << " in " << t.name() << " traffic: " << stats.collisions() << '/' << stats.total()
          << " collisions\n";
      eval::write_episode_log(stats, run_dir / "episodes" / (ego.name() + "_in_" + t.name() + ".jsonl"));
      all.push_back(std::move(stats));
    }
  }
  std::optional<std::string> reference;
  for (const auto& s : all) {
    if (s.ego == config.reference_ego) reference = config.reference_ego;
  }
  eval::emit_tables(all, run_dir, reference);
  return run_dir;
}

fs::path cmd_simulate(PolicyId ego, const hierarchy::TrafficComposition& traffic, int episodes,
                      const RunConfig& config, std::ostream& log) {
  if (episodes < 1) throw UsageError("--episodes must be at least 1");
  config.validate();
  hierarchy::PolicyStore store(config.store);
  const auto policies = store.policy_set(config.level0(), true);
  if (!policies.has(ego)) throw MissingPrerequisite(ego.name() + " is not installed in " + config.store.string());
  for (const auto& p : traffic.support()) {
    if (!policies.has(p)) throw MissingPrerequisite(p.name() + " is not installed in " + config.store.string());
  }

  const auto run_dir = versioned_directory(config.out / "simulate");
  archive_config(config, run_dir);
  std::ofstream out(run_dir / "trace.jsonl", std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + (run_dir / "trace.jsonl").string());

  const auto& pops = config.traffic.populations;
  for (int e = 0; e < episodes; ++e) {
    const int population = pops[static_cast<std::size_t>(e) % pops.size()];
    const auto seed = eval::episode_seed(config.seed, e);
    const auto setup = hierarchy::make_setup(config.env, population, traffic, seed);
    const double dt = config.env.dt;
    auto hook = [&](const sim::Environment& env, const sim::StepResult* r, std::optional<int> level) {
      ordered_json j;
      j["episode"] = e;
      if (r == nullptr) {
        j["event"] = "reset";
        j["step"] = 0;
        j["t"] = 0.0;
        j["seed"] = seed;
        j["population"] = population;
        j["ego_policy"] = ego.name();
        j["traffic"] = traffic.name();
        auto& vs = j["vehicles"] = ordered_json::array();
        for (const auto& v : env.vehicles()) vs.push_back(vehicle_json(v));
      } else {
        j["event"] = "step";
        j["step"] = env.step_count();
        j["t"] = env.step_count() * dt;
        j["ego_action"] = to_string(r->vehicles.front().action);
        if (level) j["level"] = *level;
        j["reward"] = r->reward;
        j["terms"] = {{"collision", r->terms.collision}, {"headway", r->terms.headway},
                      {"velocity", r->terms.velocity},   {"effort", r->terms.effort},
                      {"not_merging", r->terms.not_merging}, {"stopping", r->terms.stopping}};
        j["outcome"] = to_string(r->outcome);
        j["ego_collision"] = to_string(r->ego_collision);
        auto& vs = j["vehicles"] = ordered_json::array();
        for (const auto& s : r->vehicles) {
          vs.push_back({{"id", s.id},
                        {"policy", s.policy.name()},
                        {"action", to_string(s.action)},
                        {"accel", s.accel},
                        {"lane_before", to_string(s.before.lane)},
                        {"x_before", s.before.x},
                        {"v_before", s.before.v},
                        {"lane", to_string(s.after.lane)},
                        {"x", s.after.x},
                        {"v", s.after.v},
                        {"collision", to_string(s.collision)}});
        }
        j["departed"] = r->departed;
        j["removed"] = r->removed;
        auto& sp = j["spawned"] = ordered_json::array();
        for (int id : r->spawned) {
          for (const auto& v : env.vehicles()) {
            if (v.id == id) sp.push_back(vehicle_json(v));
          }
        }
      }
      out << j.dump() << '\n';
    };
    const auto summary = hierarchy::run_episode(policies, ego, hierarchy::ActMode::argmax(), setup, hook);
    log << "episode " << e << ": population " << population << ", " << to_string(summary.outcome) << " after "
        << summary.steps << " steps\n";
  }
  return run_dir;
}

fs::path cmd_stats(const fs::path& trajectories, const std::string& scope, bool emit_fragment,
                   const RunConfig& config, std::ostream& log) {
  std::vector<trace::LaneScope> scopes;
  if (scope == "main") {
    scopes = {trace::LaneScope::Main};
  } else if (scope == "ramp") {
    scopes = {trace::LaneScope::Ramp};
  } else if (scope == "both") {
    scopes = {trace::LaneScope::Main, trace::LaneScope::Ramp, trace::LaneScope::Both};
  } else {
    throw UsageError("unknown lane filter '" + scope + "' (main, ramp or both)");
  }
  if (!fs::exists(trajectories)) throw std::runtime_error("trajectory file not found: " + trajectories.string());
  const auto records = trace::load_trajectories(trajectories);
  if (records.empty()) log << "warning: " << trajectories.string() << " contains no trajectory rows\n";

  const auto run_dir = versioned_directory(config.out / "stats");
  archive_config(config, run_dir);
  trace::HeadwayOptions headway{config.trace_car_length, config.headway_bin};
  for (auto s : scopes) {
    trace::LaneFilter filter{s, config.ramp_lanes};
    trace::write_outputs(records, filter, run_dir, headway);
  }
  if (emit_fragment) {
    trace::LaneFilter all{trace::LaneScope::Both, config.ramp_lanes};
    const auto v = trace::velocity_distribution(records, all, config.velocity_bin);
    const auto h = trace::headway_distribution(records, all, headway);
    if (v.moments.count == 0 || h.moments.count == 0) {
      log << "warning: not enough data for an environment fragment\n";
    } else {
      const auto s = trace::suggest_parameters(v.moments, h.moments);
      RunConfig c;
      c.env.v_nom = s.v_nom;
      c.env.d_close = s.d_close;
      c.env.d_nom = s.d_nom;
      c.env.d_far = s.d_far;
      std::ofstream f(run_dir / "env_fragment.cfg", std::ios::trunc);
      f << "# suggested from " << trajectories.filename().string() << '\n';
      for (const char* key : {"env.v_nom", "env.d_close", "env.d_nom", "env.d_far"}) {
        f << key << " = " << get_value(c, key) << '\n';
      }
    }
  }
  log << "wrote " << run_dir.string() << '\n';
  return run_dir;
}

ReplayReport verify_trace(const fs::path& trace_path, const sim::EnvConfig& env) {
  std::ifstream in(trace_path);
  if (!in) throw std::runtime_error("cannot read " + trace_path.string());
  ReplayReport report;
  std::map<int, sim::VehicleState> state;
  auto fail = [&](const std::string& what) {
    ++report.mismatches;
    if (report.first_error.empty()) report.first_error = what;
  };
  auto lane_of = [](const std::string& s) { return s == "ramp" ? Lane::Ramp : Lane::Main; };
  auto load = [&](const ordered_json& v) {
    sim::VehicleState s;
    s.id = v.at("id").get<int>();
    s.lane = lane_of(v.at("lane").get<std::string>());
    s.x = v.at("x").get<double>();
    s.v = v.at("v").get<double>();
    state[s.id] = s;
  };

  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = ordered_json::parse(line);
    ++report.records;
    const auto where = "episode " + std::to_string(j.at("episode").get<int>()) + " step " +
                       std::to_string(j.at("step").get<int>());
    if (j.at("event") == "reset") {
      state.clear();
      for (const auto& v : j.at("vehicles")) load(v);
      continue;
    }
    for (const auto& v : j.at("vehicles")) {
      ++report.vehicle_steps;
      const int id = v.at("id").get<int>();
      sim::VehicleState before;
      before.id = id;
      before.lane = lane_of(v.at("lane_before").get<std::string>());
      before.x = v.at("x_before").get<double>();
      before.v = v.at("v_before").get<double>();
      const auto it = state.find(id);
      if (it == state.end()) {
        fail(where + ": vehicle " + std::to_string(id) + " was never placed");
      } else if (it->second.x != before.x || it->second.v != before.v || it->second.lane != before.lane) {
        fail(where + ": vehicle " + std::to_string(id) + " does not continue from its previous state");
      }
      const auto parsed = parse_drive_action(v.at("action").get<std::string>());
      if (!parsed) {
        fail(where + ": unknown action");
        continue;
      }
      const DriveAction action = *parsed;
      const sim::VehicleState expected =
          action == DriveAction::Merge ? sim::apply_merge(before, env.road, env.dt, env.v_max)
                                       : sim::step_kinematics(before, v.at("accel").get<double>(), env.dt, env.v_max);
      const double x = v.at("x").get<double>();
      const double vel = v.at("v").get<double>();
      const Lane lane = lane_of(v.at("lane").get<std::string>());
      if (expected.x != x || expected.v != vel || expected.lane != lane) {
        fail(where + ": vehicle " + std::to_string(id) + " position or speed differs from its kinematics");
      }
      state[id] = sim::VehicleState{id, x, vel, lane, before.policy};
    }
    for (const auto& id : j.at("departed")) state.erase(id.get<int>());
    for (const auto& id : j.at("removed")) state.erase(id.get<int>());
    for (const auto& v : j.at("spawned")) load(v);
  }
  return report;
}

}  // namespace levelk::app
