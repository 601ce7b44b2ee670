#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "osrl/agent_sim.hpp"
#include "osrl/core_model.hpp"
#include "osrl/errors.hpp"
#include "osrl/harness.hpp"
#include "osrl/instance_io.hpp"
#include "osrl/offline_solver.hpp"
#include "osrl/oracle_acquisition.hpp"

namespace py = pybind11;
using namespace pybind11::literals;

namespace {

using Table = std::vector<std::vector<double>>;

// JSON crosses the boundary as text; Python sees plain dicts and lists.
nlohmann::json to_json(const py::object& obj) {
  const auto text = py::module_::import("json").attr("dumps")(obj).cast<std::string>();
  return nlohmann::json::parse(text);
}

py::object from_json(const nlohmann::json& doc) {
  return py::module_::import("json").attr("loads")(doc.dump(-1, ' ', false));
}

osrl::BeliefSupport support_of(const Table& rows) {
  std::vector<osrl::Belief> b;
  for (const auto& r : rows) b.emplace_back(r);
  return osrl::BeliefSupport(b);
}

py::dict action_dict(const osrl::ActionSolution& a) {
  return py::dict("k"_a = a.k, "h_star"_a = a.h_star, "feasible"_a = a.feasible,
                  "rule"_a = a.s_star.table().to_nested());
}

py::dict run_dict(const osrl::RunResult& r, bool with_trace) {
  py::dict d("seed"_a = r.seed, "h_star"_a = r.h_star, "final_regret"_a = r.final_regret,
             "regret_at_tenth"_a = r.regret_at_tenth, "slope"_a = r.slope,
             "essential_bs"_a = r.essential_bs, "binary_searches"_a = r.binary_searches,
             "acquisition_rounds"_a = r.acquisition_rounds, "mistake_checks"_a = r.mistake_checks,
             "mistake_violations"_a = r.mistake_violations, "wall_seconds"_a = r.wall_seconds);
  if (with_trace) {
    py::list rows;
    for (const auto& t : r.trace)
      rows.append(py::make_tuple(t.t, t.k_star, t.k_t, t.alpha, t.profit, t.cum_regret, t.mode,
                                 t.essential));
    d["trace"] = rows;
  }
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Online learning of proper scoring rules: simulation core";

  py::register_exception<osrl::InvalidInput>(m, "InvalidInput", PyExc_ValueError);
  py::register_exception<osrl::ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<osrl::SolverFailure>(m, "SolverFailure", PyExc_RuntimeError);
  py::register_exception<osrl::PartialOracleError>(m, "PartialOracleError", PyExc_RuntimeError);

  py::class_<osrl::Instance>(m, "Instance")
      .def(py::init([](const py::object& doc) { return osrl::instance_from_json(to_json(doc)); }),
           "doc"_a)
      .def_static("from_spec", [](const py::object& spec) { return osrl::build_instance(to_json(spec)); },
                  "spec"_a, "Build from a generator spec such as {'kind': 'hard', 'e1': -0.25}")
      .def_static("load", [](const std::string& path) { return osrl::load_instance(path); }, "path"_a)
      .def("save", [](const osrl::Instance& i, const std::string& path) { osrl::save_instance(i, path); },
           "path"_a)
      .def("to_dict", [](const osrl::Instance& i) { return from_json(osrl::instance_to_json(i)); })
      .def("dumps", &osrl::dump_instance)
      .def("hash", &osrl::instance_hash)
      .def_property_readonly("n_actions", &osrl::Instance::n_actions)
      .def_property_readonly("n_beliefs", &osrl::Instance::n_beliefs)
      .def_property_readonly("n_states", &osrl::Instance::n_states)
      .def_property_readonly("b_s", &osrl::Instance::b_s)
      .def_property_readonly("b_u", &osrl::Instance::b_u)
      .def_property_readonly("costs", [](const osrl::Instance& i) { return i.info().costs(); })
      .def_property_readonly("q", [](const osrl::Instance& i) { return i.info().dists(); })
      .def_property_readonly("support", [](const osrl::Instance& i) {
        Table rows;
        for (const auto& b : i.support().beliefs()) rows.emplace_back(b.probs().begin(), b.probs().end());
        return rows;
      })
      .def_property_readonly("u_sigma", &osrl::Instance::u_sigma)
      .def("agent_profit",
           [](const osrl::Instance& i, const Table& s, std::size_t k) {
             return osrl::agent_profit(i, osrl::ScoringRule(s), k);
           },
           "rule"_a, "k"_a)
      .def("principal_profit",
           [](const osrl::Instance& i, const Table& s, std::size_t k) {
             return osrl::principal_profit(i, osrl::ScoringRule(s), k);
           },
           "rule"_a, "k"_a)
      .def("best_response",
           [](const osrl::Instance& i, const Table& s) { return osrl::best_response(i, osrl::ScoringRule(s)); },
           "rule"_a)
      .def("__repr__", [](const osrl::Instance& i) {
        return "<Instance K=" + std::to_string(i.n_actions()) + " M=" + std::to_string(i.n_beliefs()) +
               " states=" + std::to_string(i.n_states()) + ">";
      });

  m.def("random_instance",
        [](std::size_t K, std::size_t M, std::size_t states, std::uint64_t seed, double b_s, double b_u) {
          osrl::RandomInstanceSpec spec{K, M, states, b_s, b_u};
          return osrl::gen_random_instance(spec, seed);
        },
        "K"_a = 2, "M"_a = 2, "states"_a = 2, "seed"_a = 0, "b_s"_a = 1.0, "b_u"_a = 1.0);
  m.def("hard_instance", &osrl::gen_hard_instance, "e1"_a = -0.25);
  m.def("hard_instance_offset", &osrl::hard_instance_offset, "e1"_a = -0.25);

  m.def("solve",
        [](const osrl::Instance& inst) {
          const auto sol = osrl::solve_stackelberg(inst);
          py::list per;
          for (const auto& a : sol.per_action) per.append(action_dict(a));
          py::dict d = action_dict(sol.best);
          d["per_action"] = per;
          return d;
        },
        "instance"_a, "Offline optimum: best action, value and rule");
  m.def("grid_brute_force",
        [](const osrl::Instance& inst, double step) {
          const auto g = osrl::grid_brute_force(inst, step);
          return py::dict("k"_a = g.k, "h"_a = g.h, "rule"_a = g.s.table().to_nested(),
                          "n_proper"_a = g.n_proper);
        },
        "instance"_a, "step"_a);
  m.def("subopt",
        [](const osrl::Instance& inst, std::size_t k, const Table& s) {
          return osrl::subopt(inst, k, osrl::ScoringRule(s));
        },
        "instance"_a, "k"_a, "rule"_a);
  m.def("max_margin_rule",
        [](const osrl::Instance& inst, std::size_t k) {
          const auto r = osrl::max_margin_rule(inst, k);
          return py::make_tuple(r.rule.table().to_nested(), r.margin);
        },
        "instance"_a, "k"_a);

  m.def("is_proper",
        [](const Table& s, const Table& support, double tol) {
          return osrl::is_proper(osrl::ScoringRule(s), support_of(support), tol);
        },
        "rule"_a, "support"_a, "tol"_a = osrl::kTol);
  m.def("properize",
        [](const Table& s, const Table& support) {
          return osrl::properize(osrl::ScoringRule(s), support_of(support)).table().to_nested();
        },
        "rule"_a, "support"_a);
  m.def("quadratic_rule",
        [](const Table& support, double b_s) { return osrl::quadratic_rule(support_of(support), b_s).table().to_nested(); },
        "support"_a, "b_s"_a = 1.0);

  m.def("ground_truth_oracle",
        [](const osrl::Instance& inst) { return from_json(osrl::oracle_to_json(osrl::ground_truth_oracle(inst))); },
        "instance"_a);

  m.def("run",
        [](const py::object& config, bool trace) {
          const auto cfg = osrl::config_from_json(to_json(config));
          std::vector<osrl::RunResult> runs;
          {
            py::gil_scoped_release release;
            runs = osrl::run_experiment(cfg);
          }
          py::list out;
          for (const auto& r : runs) out.append(run_dict(r, trace));
          return out;
        },
        "config"_a, "trace"_a = false,
        "Run an experiment config (same schema as the CLI) and return one dict per seed");

  m.def("compute_regret", &osrl::compute_regret, "profits"_a, "h_star"_a);
  m.def("fit_loglog_slope", &osrl::fit_loglog_slope, "regret"_a, "t_min"_a);
  m.attr("TRACE_VERSION") = osrl::kTraceVersion;
  m.attr("SUMMARY_VERSION") = osrl::kSummaryVersion;
}
