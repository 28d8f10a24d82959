#include "levelk/hierarchy/rollout.hpp"

namespace levelk::hierarchy {

EpisodeSetup make_setup(const sim::EnvConfig& base, int population,
                        const TrafficComposition& traffic, std::uint64_t seed) {
  EpisodeSetup setup;
  setup.env = base;
  setup.env.n_vehicles = population;
  setup.seed = seed;
  RandomStream rng(derive_seed(seed, "setup"));
  setup.ego_lane = rng.uniform() < base.ego_ramp_prob ? Lane::Ramp : Lane::Main;
  setup.assignment = traffic.assign(population - 1, rng);
  return setup;
}

EpisodeSummary run_episode(const PolicySet& policies, PolicyId ego, ActMode mode,
                           const EpisodeSetup& setup, const StepHook& hook) {
  sim::Environment env(setup.env, setup.ego_lane, setup.assignment, setup.seed);
  RandomStream traffic_rng(derive_seed(setup.seed, "traffic"));
  RandomStream ego_rng(derive_seed(setup.seed, "ego"));
  const auto traffic = policies.traffic_policy(traffic_rng);

  EpisodeSummary summary;
  summary.population = setup.env.n_vehicles;
  summary.ego_lane = setup.ego_lane;
  if (hook) hook(env, nullptr, std::nullopt);

  while (!env.done()) {
    const sim::Surroundings s = env.surroundings(0);
    std::optional<int> level;
    const DriveAction action =
        policies.act(ego, sim::normalize(s, env.config()), s, ego_rng, mode, &level);
    const sim::StepResult r = env.step(action, traffic);
    summary.total_reward += r.reward;
    summary.env_collisions += static_cast<int>(r.removed.size());
    summary.collision = r.ego_collision;
    if (hook) hook(env, &r, level);
  }
  summary.outcome = env.outcome();
  summary.steps = env.step_count();
  return summary;
}

}  // namespace levelk::hierarchy
