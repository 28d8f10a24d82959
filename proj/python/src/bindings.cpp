#include "levelk/app/run_config.hpp"
#include "levelk/core/errors.hpp"
#include "levelk/eval/eval.hpp"
#include "levelk/hierarchy/policy_store.hpp"
#include "levelk/hierarchy/rollout.hpp"
#include "levelk/nn/checkpoint.hpp"
#include "levelk/sim/environment.hpp"
#include "levelk/trace/trace_stats.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <memory>
#include <optional>
#include <sstream>

namespace py = pybind11;
using namespace levelk;

namespace {

py::dict moments_dict(const trace::Moments& m) {
  py::dict d;
  d["count"] = m.count;
  d["mean"] = m.mean;
  d["std"] = m.std;
  d["min"] = m.min;
  d["max"] = m.max;
  return d;
}

py::dict distribution_dict(const trace::Distribution& dist) {
  py::dict d = moments_dict(dist.moments);
  d["bin_lo"] = dist.histogram.lo;
  d["bin_width"] = dist.histogram.width;
  d["counts"] = dist.histogram.counts;
  return d;
}

trace::LaneScope parse_scope(const std::string& s) {
  if (s == "main") return trace::LaneScope::Main;
  if (s == "ramp") return trace::LaneScope::Ramp;
  if (s == "both") return trace::LaneScope::Both;
  throw py::value_error("lane scope must be main, ramp or both");
}

// Gym-style view of the merging scenario with the ego driven from Python.
class MergeEnv {
 public:
  MergeEnv(app::RunConfig config, const std::string& traffic, std::optional<std::filesystem::path> store)
      : config_(std::move(config)), traffic_(hierarchy::TrafficComposition::parse(traffic)) {
    config_.validate();
    if (store) {
      policies_ = hierarchy::PolicyStore(*store).policy_set(config_.level0(), true);
    } else {
      policies_ = hierarchy::PolicySet(config_.level0());
    }
    for (const auto& p : traffic_.support()) {
      if (!policies_.has(p)) throw MissingPrerequisite(p.name() + " traffic needs an installed policy");
    }
  }

  std::vector<double> reset(std::uint64_t seed, std::optional<int> population) {
    const int n = population.value_or(config_.env.n_vehicles);
    const auto setup = hierarchy::make_setup(config_.env, n, traffic_, seed);
    env_ = std::make_unique<sim::Environment>(setup.env, setup.ego_lane, setup.assignment, setup.seed);
    traffic_rng_ = std::make_unique<RandomStream>(derive_seed(setup.seed, "traffic"));
    return observation();
  }

  py::tuple step(int slot) {
    if (!env_) throw py::value_error("call reset() before step()");
    if (env_->done()) throw py::value_error("episode is over; call reset()");
    const auto s = env_->surroundings(0);
    const auto action = sim::action_for_slot(slot, s.lane, s.in_merge_region);
    const auto r = env_->step(action, policies_.traffic_policy(*traffic_rng_));
    py::dict info;
    info["action"] = std::string(to_string(action));
    info["outcome"] = std::string(sim::to_string(r.outcome));
    info["collision"] = std::string(to_string(r.ego_collision));
    py::dict terms;
    terms["collision"] = r.terms.collision;
    terms["headway"] = r.terms.headway;
    terms["velocity"] = r.terms.velocity;
    terms["effort"] = r.terms.effort;
    terms["not_merging"] = r.terms.not_merging;
    terms["stopping"] = r.terms.stopping;
    info["terms"] = terms;
    info["step"] = env_->step_count();
    const auto obs = r.observation.to_array();
    return py::make_tuple(std::vector<double>(obs.begin(), obs.end()), r.reward, r.done, info);
  }

  std::vector<double> observation() const {
    if (!env_) throw py::value_error("call reset() first");
    const auto a = env_->ego_observation().to_array();
    return {a.begin(), a.end()};
  }

  py::list vehicles() const {
    py::list out;
    if (!env_) return out;
    for (const auto& v : env_->vehicles()) {
      py::dict d;
      d["id"] = v.id;
      d["x"] = v.x;
      d["v"] = v.v;
      d["lane"] = std::string(to_string(v.lane));
      d["policy"] = v.policy.name();
      out.append(d);
    }
    return out;
  }

  bool done() const { return env_ && env_->done(); }

 private:
  app::RunConfig config_;
  hierarchy::TrafficComposition traffic_;
  hierarchy::PolicySet policies_;
  std::unique_ptr<sim::Environment> env_;
  std::unique_ptr<RandomStream> traffic_rng_;
};

struct QNetwork {
  nn::NetworkParams params;
  nn::CheckpointMeta meta;

  std::vector<double> q_values(const std::vector<double>& obs) const {
    const auto q = nn::forward(params, obs);
    return {q.data(), q.data() + q.size()};
  }
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Highway-merging simulator with level-k and dynamic level-k drivers";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<MissingPrerequisite>(m, "MissingPrerequisite", PyExc_RuntimeError);
  py::register_exception<CheckpointError>(m, "CheckpointError", PyExc_RuntimeError);
  py::register_exception<ContractViolation>(m, "ContractViolation", PyExc_ValueError);

  m.attr("OBSERVATION_SIZE") = sim::kObservationSize;
  m.attr("ACTION_SLOTS") = kNumActionSlots;

  py::class_<app::RunConfig>(m, "Config")
      .def(py::init<>())
      .def_static("parse", [](const std::string& text) {
        std::istringstream in(text);
        return app::parse_config(in);
      })
      .def_static("load", [](const std::filesystem::path& p) { return app::load_config(p); })
      .def_static("keys", [] {
        std::vector<std::string> out;
        for (const auto& k : app::config_keys()) out.push_back(k.name);
        return out;
      })
      .def("get", [](const app::RunConfig& c, const std::string& key) { return app::get_value(c, key); })
      .def("set", [](app::RunConfig& c, const std::string& key, const std::string& value) {
        app::set_value(c, key, value);
      })
      .def("serialize", [](const app::RunConfig& c) { return app::serialize(c); })
      .def("digest", [](const app::RunConfig& c) { return app::digest(c); })
      .def("validate", &app::RunConfig::validate);

  py::class_<MergeEnv>(m, "MergeEnv")
      .def(py::init<app::RunConfig, const std::string&, std::optional<std::filesystem::path>>(),
           py::arg("config") = app::RunConfig{}, py::arg("traffic") = "level0", py::arg("store") = py::none())
      .def("reset", &MergeEnv::reset, py::arg("seed"), py::arg("population") = py::none())
      .def("step", &MergeEnv::step, py::arg("slot"))
      .def("observation", &MergeEnv::observation)
      .def("vehicles", &MergeEnv::vehicles)
      .def_property_readonly("done", &MergeEnv::done);

  py::class_<QNetwork>(m, "QNetwork")
      .def_static("load", [](const std::filesystem::path& p) {
        auto ck = nn::load_params(p);
        return QNetwork{std::move(ck.params), ck.meta};
      })
      .def_static("xavier", [](const std::vector<int>& layers, std::uint64_t seed) {
        RandomStream rng(seed);
        return QNetwork{nn::xavier_init(nn::NetworkSpec{layers}, rng), {}};
      }, py::arg("layers"), py::arg("seed"))
      .def("save", [](const QNetwork& q, const std::filesystem::path& p, const std::string& policy,
                      std::uint64_t episode, std::uint64_t seed) {
        nn::save_params(q.params, {policy, episode, seed}, p);
      }, py::arg("path"), py::arg("policy"), py::arg("episode") = 0, py::arg("seed") = 0)
      .def("q_values", &QNetwork::q_values)
      .def_property_readonly("layers", [](const QNetwork& q) { return q.params.spec.layer_sizes; })
      .def_property_readonly("policy", [](const QNetwork& q) { return q.meta.policy; })
      .def_property_readonly("episode", [](const QNetwork& q) { return q.meta.episode; });

  m.def("action_for_slot", [](int slot, const std::string& lane, bool in_merge_region) {
    const Lane l = lane == "ramp" ? Lane::Ramp : Lane::Main;
    return std::string(to_string(sim::action_for_slot(slot, l, in_merge_region)));
  }, py::arg("slot"), py::arg("lane"), py::arg("in_merge_region"));

  m.def("normalize_counts", &eval::normalize_counts, py::arg("counts"), py::arg("reference_total"));

  m.def("trajectory_stats", [](const std::filesystem::path& path, const std::string& scope,
                               std::vector<int> ramp_lanes) {
    const auto recs = trace::load_trajectories(path);
    const trace::LaneFilter filter{parse_scope(scope), {ramp_lanes.begin(), ramp_lanes.end()}};
    py::dict d;
    d["headway"] = distribution_dict(trace::headway_distribution(recs, filter));
    d["velocity"] = distribution_dict(trace::velocity_distribution(recs, filter));
    d["acceleration"] = distribution_dict(trace::acceleration_distribution(recs, filter));
    const auto pop = trace::population_distribution(recs, filter);
    py::dict p = moments_dict(pop.moments);
    p["counts"] = pop.counts;
    d["population"] = p;
    return d;
  }, py::arg("path"), py::arg("scope") = "both", py::arg("ramp_lanes") = std::vector<int>{7});
}
