#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "harvestrl/config.hpp"
#include "harvestrl/errors.hpp"
#include "harvestrl/harness.hpp"
#include "harvestrl/rewards.hpp"
#include "harvestrl/rl_core.hpp"
#include "harvestrl/runner.hpp"
#include "harvestrl/scenarios.hpp"

namespace py = pybind11;
using namespace harvestrl;

namespace {

struct PyRecord {
  double t_min, reward, soc, harvest_w, load_ma, epsilon, alpha;
  std::size_t state, action;
};

struct PyResult {
  std::vector<PyRecord> records;
  std::vector<std::vector<std::size_t>> policies;
  std::optional<double> death_time_min;
  scenarios::ScenarioResult raw;
};

PyResult wrap(scenarios::ScenarioResult res) {
  PyResult out;
  for (const auto& r : res.records)
    out.records.push_back({r.t_min, r.reward, r.soc, r.harvest_w, r.load_ma, r.epsilon, r.alpha, r.state.index,
                           r.action.index});
  for (const auto& p : res.policies) {
    std::vector<std::size_t> v;
    for (auto a : p) v.push_back(a.index);
    out.policies.push_back(std::move(v));
  }
  out.death_time_min = res.death_time_min;
  out.raw = std::move(res);
  return out;
}

std::uint64_t seed_or_default(const config::ExperimentConfig& cfg, std::optional<std::uint64_t> seed) {
  return seed.value_or(cfg.seed);
}

}  // namespace

PYBIND11_MODULE(_harvestrl, m) {
  m.doc() = "Q-learning energy management for energy-harvesting sensor nodes";

  auto base = py::register_exception<std::runtime_error>(m, "HarvestError");
  py::register_exception<ConfigError>(m, "ConfigError", base);
  py::register_exception<ConfigParseError>(m, "ConfigParseError", base);
  py::register_exception<IoError>(m, "IoError", base);
  py::register_exception<IngestionError>(m, "IngestionError", base);
  py::register_exception<RewardError>(m, "RewardError", base);
  py::register_exception<ContractViolation>(m, "ContractViolation", PyExc_ValueError);

  m.def(
      "compute_epsilon",
      [](std::size_t visited, std::size_t smax, double eps_max, double eps_min, double k) {
        return rl::compute_epsilon(rl::ExplorationParams{eps_max, eps_min, k}, visited, smax);
      },
      py::arg("visited_states"), py::arg("smax"), py::arg("eps_max") = 0.9, py::arg("eps_min") = 0.05,
      py::arg("k") = 0.85);
  m.def("compute_alpha", &rl::compute_alpha, py::arg("zeta"), py::arg("visit_count"));

  py::class_<rewards::RewardContext>(m, "RewardContext")
      .def(py::init<>())
      .def_readwrite("sleep_period_min", &rewards::RewardContext::sleep_period_min)
      .def_readwrite("min_sleep_period_min", &rewards::RewardContext::min_sleep_period_min)
      .def_readwrite("soc_now", &rewards::RewardContext::soc_now)
      .def_readwrite("soc_prev", &rewards::RewardContext::soc_prev)
      .def_readwrite("delta_soc_norm", &rewards::RewardContext::delta_soc_norm)
      .def_readwrite("fm_norm", &rewards::RewardContext::fm_norm)
      .def_readwrite("fs_norm", &rewards::RewardContext::fs_norm);
  m.def(
      "evaluate_reward",
      [](const std::string& name, const rewards::RewardContext& ctx) {
        ctx.validate();
        return rewards::evaluate(rewards::spec_from_name(name), ctx);
      },
      py::arg("name"), py::arg("ctx"), "Reward R1..R7 with default parameters.");

  py::class_<config::ExperimentConfig>(m, "Config")
      .def_readwrite("seed", &config::ExperimentConfig::seed)
      .def_readwrite("sweep", &config::ExperimentConfig::sweep)
      .def_readwrite("out_dir", &config::ExperimentConfig::out_dir)
      .def_property_readonly("scenario",
                             [](const config::ExperimentConfig& c) {
                               return c.scenario == config::ScenarioKind::Wban ? "wban" : "buoy";
                             })
      .def_property_readonly("rewards",
                             [](const config::ExperimentConfig& c) {
                               std::vector<std::string> out;
                               for (const auto& r : c.rewards) out.emplace_back(rewards::name(r));
                               return out;
                             })
      .def("set_rewards", &config::override_rewards, py::arg("names"))
      .def("validate", &config::ExperimentConfig::validate)
      .def("serialize", [](const config::ExperimentConfig& c) { return config::serialize(c); })
      .def("fingerprint", [](const config::ExperimentConfig& c) {
        return config::scenario_fingerprint(c.scenario_config(0));
      });
  m.def("parse_config", &config::parse_config, py::arg("text"));
  m.def("load_config", &config::load_config, py::arg("path"));

  py::class_<PyRecord>(m, "Record")
      .def_readonly("t_min", &PyRecord::t_min)
      .def_readonly("state", &PyRecord::state)
      .def_readonly("action", &PyRecord::action)
      .def_readonly("reward", &PyRecord::reward)
      .def_readonly("soc", &PyRecord::soc)
      .def_readonly("harvest_w", &PyRecord::harvest_w)
      .def_readonly("load_ma", &PyRecord::load_ma)
      .def_readonly("epsilon", &PyRecord::epsilon)
      .def_readonly("alpha", &PyRecord::alpha);

  py::class_<PyResult>(m, "ScenarioResult")
      .def_readonly("records", &PyResult::records)
      .def_readonly("policies", &PyResult::policies)
      .def_readonly("death_time_min", &PyResult::death_time_min)
      .def("__len__", [](const PyResult& r) { return r.records.size(); });

  py::class_<harness::RunSummary>(m, "RunSummary")
      .def_readonly("reward", &harness::RunSummary::reward)
      .def_readonly("seed", &harness::RunSummary::seed)
      .def_readonly("fingerprint", &harness::RunSummary::fingerprint)
      .def_readonly("normalized_consumption", &harness::RunSummary::normalized_consumption)
      .def_readonly("final_soc", &harness::RunSummary::final_soc)
      .def_readonly("min_soc", &harness::RunSummary::min_soc)
      .def_readonly("survived_days", &harness::RunSummary::survived_days)
      .def_readonly("learning_time_epochs", &harness::RunSummary::learning_time_epochs)
      .def_property_readonly("learning_time_days", &harness::RunSummary::learning_time_days);

  m.def(
      "run_scenario",
      [](const config::ExperimentConfig& cfg, std::optional<std::uint64_t> seed, std::size_t reward_index) {
        cfg.validate();
        return wrap(scenarios::run_scenario(cfg.scenario_config(reward_index), seed_or_default(cfg, seed)));
      },
      py::arg("config"), py::arg("seed") = py::none(), py::arg("reward_index") = 0);
  m.def(
      "summarize",
      [](const PyResult& res, const config::ExperimentConfig& cfg, std::optional<std::uint64_t> seed,
         std::size_t reward_index) {
        return harness::summarize(res.raw, cfg.scenario_config(reward_index), seed_or_default(cfg, seed));
      },
      py::arg("result"), py::arg("config"), py::arg("seed") = py::none(), py::arg("reward_index") = 0);
  m.def(
      "policy_stability_time",
      [](const PyResult& res) { return harness::policy_stability_time(res.raw.records, res.raw.policies); },
      py::arg("result"));
  m.def(
      "sweep_seeds",
      [](const config::ExperimentConfig& cfg, std::size_t n, std::size_t reward_index) {
        cfg.validate();
        return harness::sweep_seeds(cfg.scenario_config(reward_index), cfg.seed, n);
      },
      py::arg("config"), py::arg("n"), py::arg("reward_index") = 0);
  m.def(
      "run",
      [](const config::ExperimentConfig& cfg) {
        std::ostringstream log;
        const int code = cli::run(cfg, log, false);
        return py::make_tuple(code, log.str());
      },
      py::arg("config"), "Writes the output files; returns (exit_code, log).");
}
