// levelk: train, evaluate, simulate and analyze level-k merging policies.
//
// Exit codes: 0 success, 2 usage error, 3 missing prerequisite, 4 runtime error.
//
// Configuration precedence (later wins): built-in defaults, --config file,
// LEVELK_<KEY> environment variables (e.g. LEVELK_SEED, LEVELK_PATHS_STORE,
// LEVELK_ENV_V_NOM), command-line flags. LEVELK_CONFIG names a config file
// when --config is absent.

#include "levelk/app/commands.hpp"
#include "levelk/app/run_config.hpp"
#include "levelk/core/errors.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitPrerequisite = 3;
constexpr int kExitRuntime = 4;

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string store;
  std::vector<std::string> sets;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "key = value configuration file");
  cmd->add_option("--seed", f.seed, "master seed");
  cmd->add_option("--out", f.out, "output root directory");
  cmd->add_option("--store", f.store, "policy store directory");
  cmd->add_option("--set", f.sets, "override one configuration key (key=value), repeatable");
}

levelk::app::RunConfig resolve(const CommonFlags& f) {
  using namespace levelk::app;
  RunConfig config;
  std::string path = f.config;
  if (path.empty()) {
    if (const char* env = std::getenv("LEVELK_CONFIG"); env != nullptr) path = env;
  }
  if (!path.empty()) config = load_config(path, config);
  apply_environment(config, [](const char* name) { return std::getenv(name); });
  for (const auto& kv : f.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + kv + "'");
    set_value(config, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (f.seed) config.seed = *f.seed;
  if (!f.out.empty()) config.out = f.out;
  if (!f.store.empty()) config.store = f.store;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace levelk;
  CLI::App app{"Level-k highway merging: training, evaluation, simulation and trajectory statistics"};
  app.require_subcommand(1);

  CommonFlags train_flags, eval_flags, sim_flags, stats_flags;
  std::string level, eval_ego = "all", eval_traffic = "all", sim_ego = "dynamic", sim_traffic = "mixed";
  std::optional<int> eval_episodes;
  int sim_episodes = 1;
  bool force = false;
  std::string trajectories, lanes = "both";
  bool fragment = false;

  auto* train = app.add_subcommand("train", "train a level-k or the dynamic policy");
  add_common(train, train_flags);
  train->add_option("--level", level, "1, 2, 3 or dynamic")->required();
  train->add_flag("--force", force, "replace an installed policy");

  auto* evaluate = app.add_subcommand("evaluate", "collision-rate tables of trained policies");
  add_common(evaluate, eval_flags);
  evaluate->add_option("--ego", eval_ego, "ego ids (level1..level3, dynamic, all), comma separated");
  evaluate->add_option("--traffic", eval_traffic, "traffic (level0..level3, dynamic, mixed, all), comma separated");
  evaluate->add_option("--episodes", eval_episodes, "episodes per population");

  auto* simulate = app.add_subcommand("simulate", "write per-step JSONL traces");
  add_common(simulate, sim_flags);
  simulate->add_option("--ego", sim_ego, "ego id");
  simulate->add_option("--traffic", sim_traffic, "traffic spec");
  simulate->add_option("--episodes", sim_episodes, "number of episodes");

  auto* stats = app.add_subcommand("stats", "headway, velocity, acceleration and population distributions");
  add_common(stats, stats_flags);
  stats->add_option("trajectories", trajectories, "trajectory file (vehicle_id,frame,lane,x,v,a)")->required();
  stats->add_option("--lanes", lanes, "main, ramp or both (both also writes main and ramp)");
  stats->add_flag("--fragment", fragment, "also write suggested environment parameters");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (train->parsed()) {
      const auto config = resolve(train_flags);
      PolicyId id = PolicyId::level(1);
      if (level == "1" || level == "2" || level == "3") {
        id = PolicyId::level(level[0] - '0');
      } else if (level == "dynamic") {
        id = PolicyId::dynamic();
      } else {
        throw app::UsageError("--level must be 1, 2, 3 or dynamic");
      }
      std::cout << app::cmd_train(id, config, force, std::cerr).string() << '\n';
    } else if (evaluate->parsed()) {
      auto config = resolve(eval_flags);
      if (eval_episodes) config.traffic.episodes_per_population = *eval_episodes;
      const auto egos = app::parse_egos(eval_ego);
      const auto traffic = app::parse_traffic(eval_traffic);
      std::cout << app::cmd_evaluate(egos, traffic, config, std::cerr).string() << '\n';
    } else if (simulate->parsed()) {
      const auto config = resolve(sim_flags);
      const auto egos = app::parse_egos(sim_ego);
      const auto traffic = app::parse_traffic(sim_traffic);
      if (egos.size() != 1 || traffic.size() != 1) throw app::UsageError("simulate takes one ego and one traffic spec");
      std::cout << app::cmd_simulate(egos[0], traffic[0], sim_episodes, config, std::cerr).string() << '\n';
    } else if (stats->parsed()) {
      const auto config = resolve(stats_flags);
      std::cout << app::cmd_stats(trajectories, lanes, fragment, config, std::cerr).string() << '\n';
    }
  } catch (const app::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const MissingPrerequisite& e) {
    std::cerr << "missing prerequisite: " << e.what() << '\n';
    return kExitPrerequisite;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
