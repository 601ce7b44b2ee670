#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "osrl/agent_sim.hpp"
#include "osrl/errors.hpp"
#include "osrl/harness.hpp"
#include "osrl/instance_io.hpp"
#include "osrl/offline_solver.hpp"
#include "osrl/oracle_acquisition.hpp"

namespace {

using nlohmann::json;

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw osrl::ConfigError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw osrl::ConfigError(path + ": " + e.what());
  }
}

void emit(const json& doc, const std::string& out_dir, const std::string& name) {
  if (out_dir.empty()) {
    std::cout << doc.dump(2) << '\n';
    return;
  }
  std::filesystem::create_directories(out_dir);
  std::ofstream out(std::filesystem::path(out_dir) / name);
  if (!out) throw osrl::ConfigError("cannot write into " + out_dir);
  out << doc.dump(2) << '\n';
}

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<std::size_t> T;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "JSON config file");
  cmd->add_option("--seed", c.seed, "Seed (replaces the seed list)");
  cmd->add_option("--out", c.out, "Output directory");
  cmd->add_option("--T", c.T, "Horizon");
}

/// A config file may hold a full experiment config or a bare instance spec.
json instance_spec(const Common& c, const std::string& instance_path) {
  if (!instance_path.empty()) return {{"kind", "file"}, {"path", instance_path}};
  json spec = {{"kind", "hard"}, {"e1", -0.25}};
  if (!c.config.empty()) {
    const json doc = read_json(c.config);
    spec = doc.contains("instance") ? doc.at("instance") : doc;
  }
  if (c.seed) spec["seed"] = *c.seed;
  return spec;
}

osrl::ExperimentConfig experiment_config(const Common& c) {
  auto cfg = osrl::config_from_json(c.config.empty() ? json::object() : read_json(c.config));
  if (c.seed) cfg.seeds = {*c.seed};
  if (c.T) {
    if (*c.T < 1) throw osrl::ConfigError("--T must be >= 1");
    cfg.T = *c.T;
  }
  if (!c.out.empty()) cfg.out_dir = c.out;
  return cfg;
}

int cmd_gen(const Common& c) {
  const auto inst = osrl::build_instance(instance_spec(c, ""));
  emit(osrl::instance_to_json(inst), c.out, "instance.json");
  return 0;
}

int cmd_solve(const Common& c, const std::string& instance_path) {
  const auto inst = osrl::build_instance(instance_spec(c, instance_path));
  const auto sol = osrl::solve_stackelberg(inst);
  json per = json::array();
  for (const auto& a : sol.per_action) {
    json row{{"action", a.k}, {"feasible", a.feasible}};
    if (a.feasible) {
      row["h"] = a.h_star;
      row["rule"] = osrl::rule_to_json(a.s_star);
    }
    per.push_back(row);
  }
  emit({{"k_star", sol.k},
        {"h_star", sol.best.h_star},
        {"rule", osrl::rule_to_json(sol.best.s_star)},
        {"per_action", per}},
       c.out, "solve.json");
  return 0;
}

int cmd_run(const Common& c) {
  const auto cfg = experiment_config(c);
  const auto runs = osrl::run_experiment(cfg);
  std::printf("seed,final_regret,slope,essential_bs,wall_time_s\n");
  for (const auto& r : runs)
    std::printf("%llu,%.12g,%.12g,%zu,%.6g\n", static_cast<unsigned long long>(r.seed), r.final_regret,
                r.slope, r.essential_bs, r.wall_seconds);
  return 0;
}

int cmd_oracle(const Common& c) {
  const auto cfg = experiment_config(c);
  const auto inst = osrl::build_instance(cfg.instance);
  const std::uint64_t seed = cfg.seeds.front();
  osrl::Agent agent(inst, osrl::Rng(seed, 1));
  osrl::AcquisitionReport rep;
  switch (cfg.oracle_mode) {
    case osrl::OracleMode::GroundTruth:
      rep.oracle = osrl::ground_truth_oracle(inst);
      rep.found.assign(inst.n_actions(), 1);
      break;
    case osrl::OracleMode::RandomSampling: {
      auto params = cfg.sampling;
      if (params.m_bound == 0) params.m_bound = cfg.learner.m_bound > 0 ? cfg.learner.m_bound : inst.n_beliefs();
      osrl::Rng rng(seed, 2);
      rep = osrl::random_sampling_oracle(agent, inst.n_actions(), params, rng);
      break;
    }
    case osrl::OracleMode::LinearContract:
      rep = osrl::linear_contract_oracle(agent, inst.utility(), inst.n_actions(), cfg.linear);
      break;
    default:
      throw osrl::ConfigError("oracle: mode must be ground-truth, random-sampling or linear-contract");
  }
  json doc{{"rounds", rep.rounds},
           {"discovery_rounds", rep.discovery_rounds},
           {"samples", rep.samples},
           {"probes", rep.probes},
           {"missing", rep.missing()}};
  if (rep.complete()) {
    const auto chk = osrl::verify_oracle(inst, rep.oracle);
    doc["oracle"] = osrl::oracle_to_json(rep.oracle);
    doc["verified"] = chk.valid;
    doc["min_margin"] = chk.min_margin;
  }
  emit(doc, c.out, "oracle.json");
  osrl::require_complete(rep);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online scoring-rule learning laboratory"};
  app.require_subcommand(1);
  Common gen, solve, run, oracle;
  std::string instance_path;
  auto* g = app.add_subcommand("gen", "Emit an instance JSON");
  add_common(g, gen);
  auto* s = app.add_subcommand("solve", "Offline optimum of an instance");
  add_common(s, solve);
  s->add_option("--instance", instance_path, "Instance JSON file");
  auto* r = app.add_subcommand("run", "Run experiments");
  add_common(r, run);
  auto* o = app.add_subcommand("oracle", "Oracle acquisition only");
  add_common(o, oracle);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (g->parsed()) return cmd_gen(gen);
    if (s->parsed()) return cmd_solve(solve, instance_path);
    if (r->parsed()) return cmd_run(run);
    if (o->parsed()) return cmd_oracle(oracle);
  } catch (const osrl::PartialOracleError& e) {
    std::cerr << "partial oracle: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
