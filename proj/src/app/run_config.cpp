#include "levelk/app/run_config.hpp"

#include "levelk/core/errors.hpp"
#include "levelk/nn/checkpoint.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

namespace levelk::app {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

double parse_double(const std::string& key, const std::string& text) {
  double v{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw ConfigError(key + ": '" + text + "' is not a finite number");
  }
  return v;
}

template <typename T>
T parse_integer(const std::string& key, const std::string& text) {
  T v{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError(key + ": '" + text + "' is not a valid integer");
  }
  return v;
}

template <typename Container>
std::string format_list(const Container& values) {
  std::string out;
  for (const auto& v : values) {
    if (!out.empty()) out += ',';
    out += std::to_string(v);
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_integer<int>(key, item));
  }
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

struct Entry {
  ConfigKey key;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

Entry real(std::string name, std::string desc, double RunConfig::*field) {
  return {{name, std::move(desc)},
          [field](const RunConfig& c) { return format_double(c.*field); },
          [field, name](RunConfig& c, const std::string& v) { c.*field = parse_double(name, v); }};
}

template <typename Get>
Entry real_at(std::string name, std::string desc, Get access) {
  return {{name, std::move(desc)},
          [access](const RunConfig& c) { return format_double(access(const_cast<RunConfig&>(c))); },
          [access, name](RunConfig& c, const std::string& v) { access(c) = parse_double(name, v); }};
}

template <typename T, typename Get>
Entry integer_at(std::string name, std::string desc, Get access) {
  return {{name, std::move(desc)},
          [access](const RunConfig& c) { return std::to_string(access(const_cast<RunConfig&>(c))); },
          [access, name](RunConfig& c, const std::string& v) { access(c) = parse_integer<T>(name, v); }};
}

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = [] {
    std::vector<Entry> t;
    t.push_back(integer_at<std::uint64_t>("seed", "master seed of every random stream",
                                          [](RunConfig& c) -> auto& { return c.seed; }));
    // road
    t.push_back(real_at("road.main_road_length", "main road length, m",
                        [](RunConfig& c) -> auto& { return c.env.road.main_road_length; }));
    t.push_back(real_at("road.ramp_start_x", "ramp entry position, m",
                        [](RunConfig& c) -> auto& { return c.env.road.ramp_start_x; }));
    t.push_back(real_at("road.merge_start_x", "start of the merging region, m",
                        [](RunConfig& c) -> auto& { return c.env.road.merge_start_x; }));
    t.push_back(real_at("road.merge_end_x", "end of the merging region (ramp barrier), m",
                        [](RunConfig& c) -> auto& { return c.env.road.merge_end_x; }));
    t.push_back(real_at("road.car_length", "vehicle length, m",
                        [](RunConfig& c) -> auto& { return c.env.road.car_length; }));
    // environment
    t.push_back(integer_at<int>("env.n_vehicles", "vehicles per episode including the ego",
                                [](RunConfig& c) -> auto& { return c.env.n_vehicles; }));
    t.push_back(real_at("env.dt", "simulation step, s", [](RunConfig& c) -> auto& { return c.env.dt; }));
    t.push_back(real_at("env.v_nom", "nominal speed, m/s", [](RunConfig& c) -> auto& { return c.env.v_nom; }));
    t.push_back(real_at("env.v_max", "speed limit, m/s", [](RunConfig& c) -> auto& { return c.env.v_max; }));
    t.push_back(real_at("env.d_close", "close headway, m", [](RunConfig& c) -> auto& { return c.env.d_close; }));
    t.push_back(real_at("env.d_nom", "nominal headway, m", [](RunConfig& c) -> auto& { return c.env.d_nom; }));
    t.push_back(real_at("env.d_far", "far headway, m", [](RunConfig& c) -> auto& { return c.env.d_far; }));
    t.push_back(integer_at<int>("env.max_ramp_cars", "ramp vehicle cap",
                                [](RunConfig& c) -> auto& { return c.env.max_ramp_cars; }));
    t.push_back(real_at("env.respawn_prob", "probability that a departed vehicle is replaced",
                        [](RunConfig& c) -> auto& { return c.env.respawn_prob; }));
    t.push_back(real_at("env.main_lane_prob", "probability that a new vehicle uses the main lane",
                        [](RunConfig& c) -> auto& { return c.env.main_lane_prob; }));
    t.push_back(real_at("env.ego_ramp_prob", "probability that the ego starts on the ramp",
                        [](RunConfig& c) -> auto& { return c.env.ego_ramp_prob; }));
    t.push_back(real_at("env.min_spacing", "minimum same-lane center distance at placement, m",
                        [](RunConfig& c) -> auto& { return c.env.min_spacing; }));
    t.push_back(real_at("env.ramp_standoff", "closest initial ramp position before the merge end, m",
                        [](RunConfig& c) -> auto& { return c.env.ramp_standoff; }));
    t.push_back(real_at("env.init_speed_spread", "half-width of the initial speed band, m/s",
                        [](RunConfig& c) -> auto& { return c.env.init_speed_spread; }));
    t.push_back(integer_at<int>("env.max_steps", "episode step cap",
                                [](RunConfig& c) -> auto& { return c.env.max_steps; }));
    t.push_back(real_at("reward.collision", "collision weight",
                        [](RunConfig& c) -> auto& { return c.env.reward_weights.collision; }));
    t.push_back(real_at("reward.headway", "headway weight",
                        [](RunConfig& c) -> auto& { return c.env.reward_weights.headway; }));
    t.push_back(real_at("reward.velocity", "velocity weight",
                        [](RunConfig& c) -> auto& { return c.env.reward_weights.velocity; }));
    t.push_back(real_at("reward.effort", "effort weight",
                        [](RunConfig& c) -> auto& { return c.env.reward_weights.effort; }));
    t.push_back(real_at("reward.not_merging", "not-merging weight",
                        [](RunConfig& c) -> auto& { return c.env.reward_weights.not_merging; }));
    t.push_back(real_at("reward.stopping", "stopping weight",
                        [](RunConfig& c) -> auto& { return c.env.reward_weights.stopping; }));
    // rule-based driver
    t.push_back(real("level0.ttc_hard_decel", "time to collision for hard braking, s", &RunConfig::ttc_hard_decel));
    t.push_back(real("level0.ttc_decel", "time to collision for braking, s", &RunConfig::ttc_decel));
    t.push_back(real("level0.epsilon", "closing-speed floor, m/s", &RunConfig::level0_epsilon));
    t.push_back(real("level0.creep_distance", "distance to merge end below which ramp cars creep, m",
                     &RunConfig::creep_distance));
    // learner
    t.push_back(integer_at<std::size_t>("trainer.memory_capacity", "replay memory size",
                                        [](RunConfig& c) -> auto& { return c.trainer.memory_capacity; }));
    t.push_back(integer_at<std::size_t>("trainer.warmup", "experiences before learning starts",
                                        [](RunConfig& c) -> auto& { return c.trainer.warmup; }));
    t.push_back(integer_at<std::size_t>("trainer.batch_size", "minibatch size",
                                        [](RunConfig& c) -> auto& { return c.trainer.batch_size; }));
    t.push_back(integer_at<std::uint64_t>("trainer.target_update", "ticks between target network copies",
                                          [](RunConfig& c) -> auto& { return c.trainer.target_update; }));
    t.push_back(real_at("trainer.gamma", "discount factor", [](RunConfig& c) -> auto& { return c.trainer.gamma; }));
    t.push_back(real_at("trainer.initial_temperature", "initial Boltzmann temperature",
                        [](RunConfig& c) -> auto& { return c.trainer.initial_temperature; }));
    t.push_back(real_at("trainer.temperature_decay", "per-episode temperature factor",
                        [](RunConfig& c) -> auto& { return c.trainer.temperature_decay; }));
    t.push_back(real_at("trainer.learning_rate", "Adam step size",
                        [](RunConfig& c) -> auto& { return c.trainer.adam.learning_rate; }));
    t.push_back(real_at("trainer.beta1", "Adam first-moment decay",
                        [](RunConfig& c) -> auto& { return c.trainer.adam.beta1; }));
    t.push_back(real_at("trainer.beta2", "Adam second-moment decay",
                        [](RunConfig& c) -> auto& { return c.trainer.adam.beta2; }));
    t.push_back(real_at("trainer.adam_epsilon", "Adam denominator offset",
                        [](RunConfig& c) -> auto& { return c.trainer.adam.epsilon; }));
    // curriculum
    t.push_back(integer_at<int>("curriculum.initial_episodes", "episodes with the initial population",
                                [](RunConfig& c) -> auto& { return c.curriculum.initial_episodes; }));
    t.push_back(integer_at<int>("curriculum.sinusoidal_end", "episode where the triangle-wave phase ends",
                                [](RunConfig& c) -> auto& { return c.curriculum.sinusoidal_end; }));
    t.push_back(integer_at<int>("curriculum.total_episodes", "training episodes",
                                [](RunConfig& c) -> auto& { return c.curriculum.total_episodes; }));
    t.push_back(integer_at<int>("curriculum.block", "episodes per population change",
                                [](RunConfig& c) -> auto& { return c.curriculum.block; }));
    t.push_back(integer_at<int>("curriculum.initial_population", "population of the first phase",
                                [](RunConfig& c) -> auto& { return c.curriculum.initial_population; }));
    t.push_back({{"curriculum.populations", "population set, comma separated"},
                 [](const RunConfig& c) { return format_list(c.curriculum.populations); },
                 [](RunConfig& c, const std::string& v) {
                   c.curriculum.populations = parse_int_list("curriculum.populations", v);
                 }});
    t.push_back(integer_at<int>("training.checkpoint_every", "episodes between checkpoints",
                                [](RunConfig& c) -> auto& { return c.checkpoint_every; }));
    t.push_back(integer_at<int>("training.selection_candidates", "final checkpoints compared in self-play",
                                [](RunConfig& c) -> auto& { return c.selection_candidates; }));
    t.push_back(integer_at<int>("training.selection_episodes", "self-play episodes per candidate",
                                [](RunConfig& c) -> auto& { return c.selection_episodes; }));
    // evaluation
    t.push_back({{"eval.traffic", "traffic: level0..level3, dynamic or mixed"},
                 [](const RunConfig& c) { return c.traffic.composition.name(); },
                 [](RunConfig& c, const std::string& v) {
                   try {
                     c.traffic.composition = hierarchy::TrafficComposition::parse(v);
                   } catch (const std::exception& e) {
                     throw ConfigError(std::string("eval.traffic: ") + e.what());
                   }
                 }});
    t.push_back({{"eval.populations", "evaluated populations, comma separated"},
                 [](const RunConfig& c) { return format_list(c.traffic.populations); },
                 [](RunConfig& c, const std::string& v) {
                   c.traffic.populations = parse_int_list("eval.populations", v);
                 }});
    t.push_back(integer_at<int>("eval.episodes_per_population", "evaluation episodes per population",
                                [](RunConfig& c) -> auto& { return c.traffic.episodes_per_population; }));
    t.push_back(integer_at<int>("eval.threads", "evaluation worker threads",
                                [](RunConfig& c) -> auto& { return c.eval_threads; }));
    t.push_back({{"eval.reference_ego", "ego whose collisions normalize the type table"},
                 [](const RunConfig& c) { return c.reference_ego; },
                 [](RunConfig& c, const std::string& v) { c.reference_ego = v; }});
    // paths
    t.push_back({{"paths.store", "policy store directory"},
                 [](const RunConfig& c) { return c.store.string(); },
                 [](RunConfig& c, const std::string& v) { c.store = v; }});
    t.push_back({{"paths.out", "output root directory"},
                 [](const RunConfig& c) { return c.out.string(); },
                 [](RunConfig& c, const std::string& v) { c.out = v; }});
    // trajectory statistics
    t.push_back({{"stats.ramp_lanes", "lane ids treated as the ramp, comma separated"},
                 [](const RunConfig& c) { return format_list(c.ramp_lanes); },
                 [](RunConfig& c, const std::string& v) {
                   const auto ids = parse_int_list("stats.ramp_lanes", v);
                   c.ramp_lanes = std::set<int>(ids.begin(), ids.end());
                 }});
    t.push_back(real("stats.car_length", "vehicle length for headways, m", &RunConfig::trace_car_length));
    t.push_back(real("stats.headway_bin", "headway histogram bin, m", &RunConfig::headway_bin));
    t.push_back(real("stats.velocity_bin", "velocity histogram bin, m/s", &RunConfig::velocity_bin));
    t.push_back(real("stats.acceleration_bin", "acceleration histogram bin, m/s^2", &RunConfig::acceleration_bin));
    return t;
  }();
  return table;
}

const Entry& find_entry(const std::string& key) {
  for (const auto& e : entries()) {
    if (e.key.name == key) return e;
  }
  throw ConfigError("unknown configuration key '" + key + "'");
}

}  // namespace

level0::Level0Params RunConfig::level0() const {
  auto p = level0::Level0Params::from_env(env);
  p.ttc_hard_decel = ttc_hard_decel;
  p.ttc_decel = ttc_decel;
  p.epsilon = level0_epsilon;
  p.creep_distance = creep_distance;
  return p;
}

hierarchy::TrainingOptions RunConfig::training_options() const {
  hierarchy::TrainingOptions o;
  o.env = env;
  o.level0 = level0();
  o.trainer = trainer;
  o.curriculum = curriculum;
  o.seed = seed;
  o.checkpoint_every = checkpoint_every;
  o.selection_candidates = selection_candidates;
  o.selection_episodes = selection_episodes;
  o.config_digest = digest(*this);
  return o;
}

void RunConfig::validate() const {
  env.validate();
  level0().validate();
  trainer.validate();
  curriculum.validate();
  if (checkpoint_every <= 0) throw ConfigError("training.checkpoint_every must be positive");
  if (selection_candidates <= 0) throw ConfigError("training.selection_candidates must be positive");
  if (selection_episodes <= 0) throw ConfigError("training.selection_episodes must be positive");
  if (traffic.episodes_per_population <= 0) throw ConfigError("eval.episodes_per_population must be positive");
  for (int n : traffic.populations) {
    if (n < 1) throw ConfigError("eval.populations entries must be at least 1");
  }
  if (eval_threads < 1) throw ConfigError("eval.threads must be at least 1");
  if (!(trace_car_length >= 0)) throw ConfigError("stats.car_length must be non-negative");
  if (!(headway_bin > 0 && velocity_bin > 0 && acceleration_bin > 0)) {
    throw ConfigError("stats histogram bins must be positive");
  }
}

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = [] {
    std::vector<ConfigKey> k;
    for (const auto& e : entries()) k.push_back(e.key);
    return k;
  }();
  return keys;
}

void set_value(RunConfig& config, const std::string& key, const std::string& value) {
  find_entry(key).set(config, trim(value));
}

std::string get_value(const RunConfig& config, const std::string& key) {
  return find_entry(key).get(config);
}

RunConfig parse_config(std::istream& in, RunConfig base) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto text = trim(line);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'key = value'", line_no);
    const auto key = trim(std::string_view(text).substr(0, eq));
    const auto value = trim(std::string_view(text).substr(eq + 1));
    if (key.empty()) throw ParseError("empty key", line_no);
    try {
      set_value(base, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(std::string(e.what()) + " (line " + std::to_string(line_no) + ")");
    }
  }
  return base;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read configuration file " + path.string());
  return parse_config(in, std::move(base));
}

std::string serialize(const RunConfig& config) {
  std::string out;
  for (const auto& e : entries()) {
    out += e.key.name;
    out += " = ";
    out += e.get(config);
    out += '\n';
  }
  return out;
}

std::string digest(const RunConfig& config) {
  const auto text = serialize(config);
  const auto h = nn::fnv1a(text);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void apply_environment(RunConfig& config, const EnvLookup& lookup) {
  for (const auto& e : entries()) {
    std::string var = "LEVELK_";
    for (char c : e.key.name) {
      var += c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    }
    if (const char* v = lookup(var.c_str()); v != nullptr && *v != '\0') {
      e.set(config, trim(v));
    }
  }
}

std::filesystem::path versioned_directory(const std::filesystem::path& base) {
  auto candidate = base;
  for (int i = 1; std::filesystem::exists(candidate); ++i) {
    candidate = base;
    candidate += "." + std::to_string(i);
  }
  std::filesystem::create_directories(candidate);
  return candidate;
}

}  // namespace levelk::app
