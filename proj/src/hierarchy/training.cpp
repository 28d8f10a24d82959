#include "levelk/hierarchy/training.hpp"

#include "levelk/core/errors.hpp"
#include "levelk/nn/checkpoint.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>

namespace levelk::hierarchy {

std::string EpisodeLog::to_json_line() const {
  nlohmann::ordered_json j;
  j["episode"] = episode;
  j["reward"] = reward;
  j["steps"] = steps;
  j["outcome"] = sim::to_string(outcome);
  j["collision"] = collision != CollisionType::None;
  j["collision_type"] = to_string(collision);
  j["temperature"] = temperature;
  j["population"] = population;
  j["ego_lane"] = to_string(ego_lane);
  j["env_collisions"] = env_collisions;
  j["updates"] = updates;
  j["mean_loss"] = mean_loss;
  return j.dump();
}

int pick_fewest_collisions(const std::vector<int>& counts) {
  if (counts.empty()) throw ContractViolation("no candidates to select from");
  int best = 0;
  for (int i = 1; i < static_cast<int>(counts.size()); ++i) {
    if (counts[static_cast<std::size_t>(i)] < counts[static_cast<std::size_t>(best)]) best = i;
  }
  return best;
}

int self_play_collisions(PolicyId policy, const nn::NetworkParams& candidate,
                         const PolicySet& base, const TrainingOptions& options) {
  PolicySet set = base;
  const auto shared = std::make_shared<const nn::NetworkParams>(candidate);
  TrafficComposition traffic = TrafficComposition::all_dynamic();
  if (policy.is_dynamic()) {
    set.set_dynamic(shared);
  } else {
    set.set_level(policy.level(), shared);
    traffic = TrafficComposition::all_level(policy.level());
  }
  const auto& pops = options.curriculum.populations;
  int collisions = 0;
  for (int i = 0; i < options.selection_episodes; ++i) {
    const int population = pops[static_cast<std::size_t>(i) % pops.size()];
    const auto setup = make_setup(options.env, population, traffic,
                                  derive_seed(options.seed, "selection", static_cast<std::uint64_t>(i)));
    const auto summary = run_episode(set, policy, ActMode::argmax(), setup);
    if (summary.collision != CollisionType::None) ++collisions;
  }
  return collisions;
}

int select_best_model(PolicyId policy, const std::vector<const nn::NetworkParams*>& candidates,
                      const PolicySet& base, const TrainingOptions& options,
                      std::vector<int>* collisions) {
  std::vector<int> counts;
  for (const auto* c : candidates) counts.push_back(self_play_collisions(policy, *c, base, options));
  if (collisions != nullptr) *collisions = counts;
  return pick_fewest_collisions(counts);
}

namespace {

struct EgoRole {
  PolicyId policy;
  int outputs;
};

dqn::State to_state(const sim::Observation& obs) { return obs.to_array(); }

TrainingResult run_training(EgoRole role, const PolicySet& policies,
                            const std::function<TrafficComposition()>& traffic_for_episode,
                            const TrainingOptions& options, const EpisodeCallback& progress) {
  options.env.validate();
  options.curriculum.validate();
  options.trainer.validate();

  RandomStream init_rng(derive_seed(options.seed, "init"));
  dqn::Learner learner(nn::xavier_init(nn::q_network_spec(role.outputs), init_rng), options.trainer,
                       derive_seed(options.seed, "learner"));
  dqn::BoltzmannSchedule schedule{options.trainer.initial_temperature,
                                  options.trainer.temperature_decay, 1.0};
  RandomStream explore_rng(derive_seed(options.seed, "exploration"));
  const auto level_nets = policies.level_nets();

  std::ofstream log_file;
  if (!options.out_dir.empty()) {
    std::filesystem::create_directories(options.out_dir / "checkpoints");
    log_file.open(options.out_dir / "episodes.jsonl", std::ios::trunc);
  }

  TrainingResult result;
  result.policy = role.policy;
  for (int e = 0; e < options.curriculum.total_episodes; ++e) {
    const int population = population_schedule(e, options.curriculum, options.seed);
    const auto setup = make_setup(options.env, population, traffic_for_episode(),
                                  derive_seed(options.seed, "episode", static_cast<std::uint64_t>(e)));
    sim::Environment env(setup.env, setup.ego_lane, setup.assignment, setup.seed);
    RandomStream traffic_rng(derive_seed(setup.seed, "traffic"));
    const auto traffic = policies.traffic_policy(traffic_rng);

    EpisodeLog log;
    log.episode = e;
    log.population = population;
    log.ego_lane = setup.ego_lane;
    log.temperature = schedule.temperature;
    double loss_sum = 0.0;

    sim::Surroundings s = env.surroundings(0);
    sim::Observation obs = sim::normalize(s, env.config());
    while (!env.done()) {
      const auto input = obs.to_array();
      const nn::Vector q = nn::forward(learner.primary(), input);
      const int choice = choose_slot(q, ActMode::explore(schedule.temperature), explore_rng);
      DriveAction action;
      if (role.policy.is_dynamic()) {
        const nn::NetworkParams& level_net = *level_nets[static_cast<std::size_t>(choice)];
        action = level_k_act(level_net, obs, s, ActMode::explore(schedule.temperature), explore_rng);
      } else {
        action = sim::action_for_slot(choice, s.lane, s.in_merge_region);
      }

      const sim::StepResult r = env.step(action, traffic);
      // the step cap truncates the episode, it is not a terminal state
      const bool terminal = r.outcome == sim::EpisodeOutcome::Collision ||
                            r.outcome == sim::EpisodeOutcome::Exit;
      learner.remember({to_state(obs), choice, r.reward, to_state(r.observation), terminal});
      if (const auto loss = learner.train_tick()) {
        loss_sum += *loss;
        ++log.updates;
      }
      log.reward += r.reward;
      log.env_collisions += static_cast<int>(r.removed.size());
      log.collision = r.ego_collision;
      s = r.surroundings;
      obs = r.observation;
    }
    log.steps = env.step_count();
    log.outcome = env.outcome();
    log.mean_loss = log.updates > 0 ? loss_sum / log.updates : 0.0;
    schedule.anneal();

    if (log_file.is_open()) log_file << log.to_json_line() << '\n' << std::flush;
    if (progress) progress(log);
    result.log.push_back(log);

    const int done_episodes = e + 1;
    if (options.checkpoint_every > 0 && (done_episodes % options.checkpoint_every == 0 ||
                                         done_episodes == options.curriculum.total_episodes)) {
      if (!result.checkpoints.empty() && result.checkpoints.back().episode == done_episodes) continue;
      CheckpointRecord ck{done_episodes, {}, learner.primary()};
      if (!options.out_dir.empty()) {
        char name[32];
        std::snprintf(name, sizeof(name), "ep%06d.qnet", done_episodes);
        ck.path = options.out_dir / "checkpoints" / name;
        nn::save_params(ck.params,
                        {role.policy.name(), static_cast<std::uint64_t>(done_episodes), options.seed},
                        ck.path);
      }
      result.checkpoints.push_back(std::move(ck));
    }
  }

  // self-play selection over the final checkpoints
  const std::size_t n_ck = result.checkpoints.size();
  const std::size_t n_cand = std::min<std::size_t>(n_ck, static_cast<std::size_t>(std::max(options.selection_candidates, 1)));
  std::vector<const nn::NetworkParams*> candidates;
  for (std::size_t i = n_ck - n_cand; i < n_ck; ++i) candidates.push_back(&result.checkpoints[i].params);
  if (candidates.empty()) {
    result.best = learner.primary();
    return result;
  }
  int pick = 0;
  if (candidates.size() > 1 && options.selection_episodes > 0) {
    pick = select_best_model(role.policy, candidates, policies, options, &result.selection_collisions);
  }
  result.selected = static_cast<int>(n_ck - n_cand) + pick;
  result.best = *candidates[static_cast<std::size_t>(pick)];
  if (!options.out_dir.empty()) {
    nlohmann::ordered_json sel;
    sel["policy"] = role.policy.name();
    sel["candidates"] = nlohmann::json::array();
    for (std::size_t i = n_ck - n_cand; i < n_ck; ++i) {
      sel["candidates"].push_back(result.checkpoints[i].episode);
    }
    sel["collisions"] = result.selection_collisions;
    sel["selected_episode"] = result.checkpoints[static_cast<std::size_t>(result.selected)].episode;
    std::ofstream(options.out_dir / "selection.json") << sel.dump(2) << '\n';
  }
  return result;
}

}  // namespace

TrainingResult train_level_k(int k, const PolicyStore& store, const TrainingOptions& options,
                             const EpisodeCallback& progress) {
  if (k < 1 || k > PolicyId::kMaxLevel) throw ContractViolation("trainable levels are 1..3");
  PolicySet policies(options.level0);
  if (k >= 2) {
    policies.set_level(k - 1,
                       std::make_shared<const nn::NetworkParams>(store.load(PolicyId::level(k - 1))));
  }
  const auto traffic = TrafficComposition::all_level(k - 1);
  return run_training({PolicyId::level(k), kLevelOutputs}, policies, [&] { return traffic; }, options,
                      progress);
}

TrainingResult train_dynamic(const PolicyStore& store, const TrainingOptions& options,
                             const EpisodeCallback& progress) {
  PolicySet policies(options.level0);
  for (int k = 1; k <= PolicyId::kMaxLevel; ++k) {
    policies.set_level(k, std::make_shared<const nn::NetworkParams>(store.load(PolicyId::level(k))));
  }
  const auto traffic = TrafficComposition::mixed();
  return run_training({PolicyId::dynamic(), kDynamicOutputs}, policies, [&] { return traffic; },
                      options, progress);
}

}  // namespace levelk::hierarchy
