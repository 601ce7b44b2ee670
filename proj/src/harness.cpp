#include "osrl/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <thread>

#include "osrl/agent_sim.hpp"
#include "osrl/errors.hpp"
#include "osrl/instance_io.hpp"
#include "osrl/offline_solver.hpp"
#include "osrl/rng.hpp"

namespace osrl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> flat_dirichlet(std::size_t n, Rng& rng) {
  std::vector<double> p(n);
  double total = 0.0;
  for (auto& x : p) total += (x = rng.exponential());
  if (!(total > 0.0)) {
    std::fill(p.begin(), p.end(), 1.0 / static_cast<double>(n));
    return p;
  }
  for (auto& x : p) x /= total;
  // absorb rounding so the sum is as close to 1 as doubles allow
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) s += p[i];
  p.back() = std::max(0.0, 1.0 - s);
  return p;
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

}  // namespace

Instance gen_random_instance(const RandomInstanceSpec& spec, std::uint64_t seed) {
  const std::size_t K = spec.n_actions, M = spec.n_beliefs, n = spec.n_states;
  if (K == 0 || M == 0 || n == 0) throw InvalidInput("gen_random_instance: dimensions must be >= 1");
  if (!(spec.b_s > 0.0) || !(spec.b_u >= 0.0)) throw InvalidInput("gen_random_instance: bad bounds");
  if (n == 1 && M > 1) throw InvalidInput("gen_random_instance: one state admits a single belief");
  Rng rng(seed, 0x11);

  std::vector<double> costs(K);
  for (auto& c : costs) c = rng.uniform(0.0, spec.b_s / 2.0);
  std::sort(costs.begin(), costs.end());

  std::vector<Belief> beliefs;
  const std::size_t max_draws = 100000;
  for (std::size_t draw = 0; beliefs.size() < M; ++draw) {
    if (draw >= max_draws)
      throw InvalidInput("gen_random_instance: could not place " + std::to_string(M) +
                         " beliefs at separation " + fmt(spec.min_separation));
    Belief b(flat_dirichlet(n, rng));
    bool ok = true;
    for (const auto& other : beliefs)
      if (linf_distance(b, other) < spec.min_separation) {
        ok = false;
        break;
      }
    if (ok) beliefs.push_back(std::move(b));
  }

  std::vector<std::vector<double>> dists(K);
  for (auto& q : dists) q = flat_dirichlet(M, rng);

  Matrix u(n, n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t w = 0; w < n; ++w) u(a, w) = rng.uniform(-spec.b_u, spec.b_u);

  return Instance(StateSpace(n), InformationStructure(costs, BeliefSupport(beliefs), dists),
                  UtilityModel(u), spec.b_s, spec.b_u);
}

std::vector<double> hard_instance_offset(double e1) {
  if (!(e1 >= -0.5 && e1 <= 0.0)) throw InvalidInput("gen_hard_instance: e1 must lie in [-1/2, 0]");
  return {1.0 + 2.0 * e1, 0.0};
}

ScoringRule hard_instance_optimum(double e1) {
  const double f0 = hard_instance_offset(e1)[0];
  // supporting lines of the expected-score curve through (1, -e1, 0), plus the offset
  return ScoringRule(std::vector<std::vector<double>>{
      {-1.0 - 2.0 * e1 + f0, 1.0},
      {-e1 - 0.5 + f0, -e1 + 0.5},
      {f0, -2.0 * e1},
  });
}

Instance gen_hard_instance(double e1) {
  const auto f = hard_instance_offset(e1);
  const double beta = 1.0 / 16.0;
  BeliefSupport support({Belief({0.0, 1.0}), Belief({0.5, 0.5}), Belief({1.0, 0.0})});
  std::vector<std::vector<double>> q{
      {3.0 / 4, 3.0 / 16, 1.0 / 16},
      {3.0 / 4, 1.0 / 8, 1.0 / 8},
      {11.0 / 16, 1.0 / 16, 1.0 / 4},
  };
  std::vector<double> base{beta * (1.0 - 2.0 * e1), beta * (1.0 - e1), 0.0};
  // u(sigma_i) = 97, -e1, 32 at the three beliefs, one principal decision per belief
  std::vector<std::vector<double>> u{
      {-2.0 * e1 - 97.0, 97.0},
      {-e1, -e1},
      {32.0, -2.0 * e1 - 32.0},
  };
  for (auto& row : u)
    for (std::size_t w = 0; w < 2; ++w) row[w] += f[w];
  std::vector<double> costs(3);
  for (std::size_t k = 0; k < 3; ++k) {
    double shift = 0.0;
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t w = 0; w < 2; ++w) shift += q[k][i] * support[i][w] * f[w];
    costs[k] = base[k] + shift;
  }
  UtilityModel um(u);
  const double b_u = um.max_abs();
  return Instance(StateSpace(2), InformationStructure(costs, support, q), std::move(um), 1.0, b_u);
}

DecayInstance gen_decay_instance(std::uint64_t seed) {
  Rng rng(seed, 0x22);
  const double p[3] = {rng.uniform(0.1, 0.3), rng.uniform(0.45, 0.6), rng.uniform(0.8, 0.95)};
  const double lam2 = rng.uniform(1.0, 2.0);
  const double lam3 = lam2 * rng.uniform(2.0, 3.0);
  double uk[3];
  for (int k = 0; k < 3; ++k) uk[k] = 0.5 + 0.5 * p[k];
  std::vector<double> costs{0.0, 0.0, 0.0};
  costs[1] = lam2 * (uk[1] - uk[0]);
  costs[2] = costs[1] + lam3 * (uk[2] - uk[1]);
  std::vector<std::vector<double>> q;
  for (double pk : p) q.push_back({pk / 2.0, 1.0 - pk, pk / 2.0});
  BeliefSupport support({Belief({1.0, 0.0}), Belief({0.5, 0.5}), Belief({0.0, 1.0})});

  DecayInstance out{
      Instance(StateSpace(2), InformationStructure(costs, support, q),
               UtilityModel(std::vector<std::vector<double>>{{1.0, 0.0}, {0.0, 1.0}}), 1.0, 1.0),
      {lam2, lam3}, 0.0, 0.0};
  out.epsilon_gap = 0.9 * std::min(1.0 / lam3, 1.0 / lam2 - 1.0 / lam3);
  out.b = 1.0 / lam2;
  // linear contracts reach 2/eps * max u
  out.instance = Instance(out.instance.states(), out.instance.info(), out.instance.utility(),
                          2.0 / out.epsilon_gap, 1.0);
  return out;
}

ContractProblem gen_contract_problem(std::uint64_t seed, std::size_t n_actions, std::size_t n_outcomes) {
  if (n_actions == 0 || n_outcomes == 0) throw InvalidInput("gen_contract_problem: empty dimensions");
  Rng rng(seed, 0x33);
  ContractProblem p;
  for (std::size_t k = 0; k < n_actions; ++k) p.outcome_dists.push_back(flat_dirichlet(n_outcomes, rng));
  p.costs.resize(n_actions);
  for (auto& c : p.costs) c = rng.uniform(0.0, 0.5);
  std::sort(p.costs.begin(), p.costs.end());
  p.outcome_utility.resize(n_outcomes);
  for (auto& u : p.outcome_utility) u = rng.uniform(0.0, 1.0);
  p.b_s = 1.0;
  return p;
}

std::uint64_t find_seed_with_oracle(const RandomInstanceSpec& spec, std::uint64_t start,
                                    double min_margin, std::size_t max_tries) {
  for (std::size_t i = 0; i < max_tries; ++i) {
    const std::uint64_t seed = start + i;
    const auto inst = gen_random_instance(spec, seed);
    std::vector<double> margins;
    ground_truth_oracle(inst, &margins);
    if (*std::min_element(margins.begin(), margins.end()) >= min_margin) return seed;
  }
  throw ConfigError("find_seed_with_oracle: no instance with margin " + fmt(min_margin) +
                    " in " + std::to_string(max_tries) + " seeds");
}

// Config

OracleMode parse_oracle_mode(const std::string& s) {
  if (s == "file" || s == "given-file") return OracleMode::GivenFile;
  if (s == "ground-truth") return OracleMode::GroundTruth;
  if (s == "random-sampling") return OracleMode::RandomSampling;
  if (s == "linear-contract") return OracleMode::LinearContract;
  if (s == "none") return OracleMode::None;
  throw ConfigError("unknown oracle mode '" + s + "'");
}

std::string to_string(OracleMode m) {
  switch (m) {
    case OracleMode::GivenFile: return "given-file";
    case OracleMode::GroundTruth: return "ground-truth";
    case OracleMode::RandomSampling: return "random-sampling";
    case OracleMode::LinearContract: return "linear-contract";
    case OracleMode::None: return "none";
  }
  return "none";
}

namespace {

RandomInstanceSpec random_spec(const nlohmann::json& j) {
  RandomInstanceSpec s;
  s.n_actions = j.value("K", s.n_actions);
  s.n_beliefs = j.value("M", s.n_beliefs);
  s.n_states = j.value("states", s.n_states);
  s.b_s = j.value("b_s", s.b_s);
  s.b_u = j.value("b_u", s.b_u);
  s.min_separation = j.value("min_separation", s.min_separation);
  return s;
}

}  // namespace

Instance build_instance(const nlohmann::json& spec) {
  try {
    const std::string kind = spec.value("kind", std::string("hard"));
    if (kind == "file") return load_instance(spec.at("path").get<std::string>());
    if (kind == "hard") return gen_hard_instance(spec.value("e1", -0.25));
    if (kind == "decay") return gen_decay_instance(spec.value("seed", std::uint64_t{0})).instance;
    if (kind == "contract")
      return contract_to_instance(gen_contract_problem(spec.value("seed", std::uint64_t{0}),
                                                       spec.value("actions", std::size_t{2}),
                                                       spec.value("outcomes", std::size_t{2})));
    if (kind == "random") {
      const auto rs = random_spec(spec);
      std::uint64_t seed = spec.value("seed", std::uint64_t{0});
      if (spec.contains("min_margin"))
        seed = find_seed_with_oracle(rs, seed, spec.at("min_margin").get<double>());
      return gen_random_instance(rs, seed);
    }
    throw ConfigError("unknown instance kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("instance spec: ") + e.what());
  }
}

ExperimentConfig config_from_json(const nlohmann::json& doc) {
  ExperimentConfig cfg;
  try {
    if (doc.contains("instance")) cfg.instance = doc.at("instance");
    cfg.T = doc.value("T", cfg.T);
    if (doc.contains("seeds")) cfg.seeds = doc.at("seeds").get<std::vector<std::uint64_t>>();
    if (doc.contains("out")) cfg.out_dir = doc.at("out").get<std::string>();
    cfg.per_round_trace = doc.value("trace", std::string("per-round")) != "summary";
    cfg.instrument = doc.value("instrument", false);
    cfg.threads = doc.value("threads", std::size_t{0});

    const std::string policy = doc.value("policy", std::string("osrl"));
    if (policy == "osrl") cfg.policy = Policy::Osrl;
    else if (policy == "random-proper") cfg.policy = Policy::RandomProper;
    else throw ConfigError("unknown policy '" + policy + "'");

    if (doc.contains("learner")) {
      const auto& l = doc.at("learner");
      cfg.learner.alpha_coef = l.value("alpha_coef", cfg.learner.alpha_coef);
      cfg.learner.alpha_exponent = l.value("alpha_exponent", cfg.learner.alpha_exponent);
      cfg.learner.m_bound = l.value("m_bound", std::size_t{0});
    } else {
      cfg.learner.m_bound = 0;
    }

    const auto o = doc.value("oracle", nlohmann::json::object());
    cfg.oracle_mode = parse_oracle_mode(o.value("mode", std::string("ground-truth")));
    cfg.oracle_path = o.value("path", std::string());
    auto& sp = cfg.sampling;
    sp.sp.beta = o.value("beta", sp.sp.beta);
    sp.sp.b_s = o.value("b_s", sp.sp.b_s);
    sp.d2_config = o.value("d2", sp.d2_config);
    sp.budget = o.value("budget", sp.budget);
    sp.window_per_belief = o.value("window_per_belief", sp.window_per_belief);
    sp.max_rejections = o.value("max_rejections", sp.max_rejections);
    sp.m_bound = o.value("m_bound", std::size_t{0});
    auto& lc = cfg.linear;
    if (o.contains("epsilon_gap")) {
      lc.epsilon_gap = o.at("epsilon_gap").get<double>();
      lc.b = o.value("b", lc.b);
    } else if (cfg.instance.value("kind", std::string()) == "decay") {
      const auto d = gen_decay_instance(cfg.instance.value("seed", std::uint64_t{0}));
      lc.epsilon_gap = d.epsilon_gap;
      lc.b = d.b;
    }
    lc.max_depth = o.value("max_depth", lc.max_depth);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (cfg.T < 1) throw ConfigError("config: T must be >= 1");
  if (cfg.seeds.empty()) throw ConfigError("config: seeds must be non-empty");
  if (cfg.oracle_mode == OracleMode::GivenFile && cfg.oracle_path.empty())
    throw ConfigError("config: oracle mode given-file needs a path");
  return cfg;
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json o{{"mode", to_string(cfg.oracle_mode)}};
  if (!cfg.oracle_path.empty()) o["path"] = cfg.oracle_path;
  if (cfg.oracle_mode == OracleMode::RandomSampling) {
    o["beta"] = cfg.sampling.sp.beta;
    o["b_s"] = cfg.sampling.sp.b_s;
    o["d2"] = cfg.sampling.d2_config;
    o["budget"] = cfg.sampling.budget;
    o["window_per_belief"] = cfg.sampling.window_per_belief;
    o["max_rejections"] = cfg.sampling.max_rejections;
    o["m_bound"] = cfg.sampling.m_bound;
  }
  if (cfg.oracle_mode == OracleMode::LinearContract) {
    o["epsilon_gap"] = cfg.linear.epsilon_gap;
    o["b"] = cfg.linear.b;
    o["max_depth"] = cfg.linear.max_depth;
  }
  return {
      {"instance", cfg.instance},
      {"T", cfg.T},
      {"seeds", cfg.seeds},
      {"oracle", o},
      {"learner",
       {{"alpha_coef", cfg.learner.alpha_coef},
        {"alpha_exponent", cfg.learner.alpha_exponent},
        {"m_bound", cfg.learner.m_bound}}},
      {"policy", cfg.policy == Policy::Osrl ? "osrl" : "random-proper"},
      {"trace", cfg.per_round_trace ? "per-round" : "summary"},
      {"instrument", cfg.instrument},
  };
}

// Running

namespace {

/// Passes rounds through to the agent and keeps what the principal saw.
class RecordingEnv : public Environment {
 public:
  explicit RecordingEnv(Agent& agent) : agent_(agent) {}
  PublicObservation interact(const PaymentRule& rule) override {
    auto obs = agent_.interact(rule);
    log.emplace_back(rule, obs);
    return obs;
  }
  std::vector<std::pair<PaymentRule, PublicObservation>> log;

 private:
  Agent& agent_;
};

/// Coverage event: every observed action's empirical distribution is within its width.
bool coverage_holds(const Instance& inst, const Learner& learner) {
  const auto& sup = learner.support();
  for (std::size_t k = 0; k < inst.n_actions(); ++k) {
    if (learner.count(k) == 0) continue;
    const auto qh = learner.q_hat(k);
    std::vector<double> truth(sup.size(), 0.0);
    double missing = 0.0;
    for (std::size_t j = 0; j < inst.n_beliefs(); ++j) {
      if (auto idx = sup.find(inst.support()[j])) truth[*idx] += inst.q(k)[j];
      else missing += inst.q(k)[j];
    }
    double l1 = missing;
    for (std::size_t i = 0; i < sup.size(); ++i) l1 += std::abs(qh[i] - truth[i]);
    if (l1 > learner.conf_q(k)) return false;
  }
  return true;
}

}  // namespace

RunResult run_single(const ExperimentConfig& cfg, const Instance& inst, std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  RunResult res;
  res.seed = seed;
  res.h_star = solve_stackelberg(inst).best.h_star;
  const std::size_t K = inst.n_actions();
  const std::size_t T = cfg.T;
  res.trace.reserve(T);

  Agent agent(inst, Rng(seed, 1));
  double cum = 0.0;
  auto push = [&](TraceRow row) {
    cum += res.h_star - row.profit;
    row.t = res.trace.size() + 1;
    row.cum_regret = cum;
    res.trace.push_back(std::move(row));
  };

  if (cfg.policy == Policy::RandomProper) {
    Rng rng(seed, 3);
    const auto& sup = inst.support();
    for (std::size_t t = 0; t < T; ++t) {
      ScoringRule raw(sup.size(), inst.n_states());
      for (std::size_t i = 0; i < sup.size(); ++i)
        for (std::size_t w = 0; w < inst.n_states(); ++w) raw(i, w) = rng.uniform(0.0, inst.b_s());
      const auto obs = agent.interact(TabulatedRule{sup, properize(raw, sup)});
      push({0, -1, obs.action, 0.0, realized_profit(inst.utility(), obs), 0.0, "baseline", false});
    }
  } else {
    RecordingEnv env(agent);
    OracleSet oracle;
    const std::size_t m_bound = cfg.learner.m_bound > 0 ? cfg.learner.m_bound : inst.n_beliefs();
    switch (cfg.oracle_mode) {
      case OracleMode::GroundTruth: oracle = ground_truth_oracle(inst); break;
      case OracleMode::GivenFile: {
        std::ifstream in(cfg.oracle_path);
        if (!in) throw ConfigError("cannot open oracle file " + cfg.oracle_path);
        try {
          oracle = oracle_from_json(nlohmann::json::parse(in));
        } catch (const nlohmann::json::exception& e) {
          throw InvalidInput(std::string("oracle file: ") + e.what());
        }
        break;
      }
      case OracleMode::RandomSampling: {
        auto params = cfg.sampling;
        if (params.m_bound == 0) params.m_bound = m_bound;
        Rng rng(seed, 2);
        auto rep = random_sampling_oracle(env, K, params, rng);
        require_complete(rep);
        oracle = std::move(rep.oracle);
        break;
      }
      case OracleMode::LinearContract: {
        auto rep = linear_contract_oracle(env, inst.utility(), K, cfg.linear);
        require_complete(rep);
        oracle = std::move(rep.oracle);
        break;
      }
      case OracleMode::None:
        throw ConfigError("the learner needs an oracle; use policy random-proper for a no-oracle run");
    }

    Learner learner(PrincipalView{inst.utility(), inst.b_s(), inst.b_u(), K}, std::move(oracle),
                    LearnerConfig{m_bound, cfg.learner.alpha_coef, cfg.learner.alpha_exponent});
    res.acquisition_rounds = env.log.size();
    for (const auto& [rule, obs] : env.log) {
      learner.absorb(rule, obs);
      if (res.trace.size() < T)
        push({0, -1, obs.action, 0.0, realized_profit(inst.utility(), obs), 0.0, "acq", false});
    }

    while (res.trace.size() < T) {
      const auto plan = learner.plan_round();
      const auto rule = learner.announce(plan);
      std::vector<std::size_t> flagged;
      if (cfg.instrument && plan.mode == Mode::Normal && coverage_holds(inst, learner)) {
        for (std::size_t i = 0; i < K; ++i)
          if (i != plan.k_star && plan.alpha >= learner.delta(plan.k_star, i)) flagged.push_back(i);
      }
      const auto obs = agent.interact(rule);
      res.mistake_checks += flagged.size();
      for (std::size_t i : flagged)
        if (obs.action == i) ++res.mistake_violations;
      const auto rec = learner.observe(plan, obs);
      bool essential = false;
      if (rec) {
        ++res.binary_searches;
        essential = rec->essential;
        res.essential_bs += essential ? 1 : 0;
      }
      push({0, static_cast<long>(plan.k_star), obs.action, plan.alpha,
            realized_profit(inst.utility(), obs), 0.0,
            plan.mode == Mode::Normal ? "normal" : "bs", essential});
    }
  }

  std::vector<double> reg(res.trace.size());
  for (std::size_t i = 0; i < reg.size(); ++i) reg[i] = res.trace[i].cum_regret;
  res.final_regret = reg.empty() ? 0.0 : reg.back();
  const std::size_t tenth = std::max<std::size_t>(1, T / 10);
  res.regret_at_tenth = reg.size() >= tenth ? reg[tenth - 1] : 0.0;
  res.slope = fit_loglog_slope(reg, tenth);
  res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

std::vector<RunResult> run_experiment(const ExperimentConfig& cfg) {
  const Instance inst = build_instance(cfg.instance);
  std::vector<RunResult> results(cfg.seeds.size());
  std::vector<std::exception_ptr> errors(cfg.seeds.size());
  std::size_t workers = cfg.threads > 0 ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, cfg.seeds.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < cfg.seeds.size();) {
      try {
        results[i] = run_single(cfg, inst, cfg.seeds[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  if (!cfg.out_dir.empty()) {
    std::filesystem::create_directories(cfg.out_dir);
    save_instance(inst, cfg.out_dir / "instance.json");
    char hash[32];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(instance_hash(inst)));
    const std::string snapshot = config_to_json(cfg).dump();
    for (const auto& r : results) {
      std::string header = std::string("# ") + kTraceVersion + " instance=" + hash +
                           " seed=" + std::to_string(r.seed) + " h_star=" + fmt(r.h_star) +
                           " config=" + snapshot;
      RunResult view = r;
      if (!cfg.per_round_trace) {
        // summary granularity: about a hundred evenly spaced rows plus the last one
        const std::size_t stride = std::max<std::size_t>(1, r.trace.size() / 100);
        std::vector<TraceRow> kept;
        for (const auto& row : r.trace)
          if (row.t % stride == 0 || row.t == r.trace.size()) kept.push_back(row);
        view.trace = std::move(kept);
      }
      write_trace(cfg.out_dir / ("trace_seed" + std::to_string(r.seed) + ".csv"), view, header);
    }
    write_summary(cfg.out_dir / "summary.csv", results);
  }
  return results;
}

std::vector<double> compute_regret(const std::vector<double>& profits, double h_star) {
  std::vector<double> reg(profits.size());
  double cum = 0.0;
  for (std::size_t i = 0; i < profits.size(); ++i) reg[i] = (cum += h_star - profits[i]);
  return reg;
}

double fit_loglog_slope(const std::vector<double>& regret, std::size_t t_min) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t n = 0;
  for (std::size_t t = std::max<std::size_t>(1, t_min); t <= regret.size(); ++t) {
    const double r = regret[t - 1];
    if (!(r > 0.0)) continue;
    const double x = std::log(static_cast<double>(t)), y = std::log(r);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  const double nn = static_cast<double>(n);
  const double den = nn * sxx - sx * sx;
  if (!(den > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return (nn * sxy - sx * sy) / den;
}

void write_trace(const std::filesystem::path& path, const RunResult& run, const std::string& header) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << header << '\n' << "t,k_star,k_t,alpha,profit,cum_regret,mode,essential\n";
  for (const auto& r : run.trace)
    out << r.t << ',' << r.k_star << ',' << r.k_t << ',' << fmt(r.alpha) << ',' << fmt(r.profit) << ','
        << fmt(r.cum_regret) << ',' << r.mode << ',' << (r.essential ? 1 : 0) << '\n';
}

void write_summary(const std::filesystem::path& path, const std::vector<RunResult>& runs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << "# " << kSummaryVersion << '\n'
      << "seed,final_regret,slope,essential_bs,wall_time_s,h_star,regret_at_tenth,binary_searches,"
         "acquisition_rounds,mistake_checks,mistake_violations\n";
  for (const auto& r : runs)
    out << r.seed << ',' << fmt(r.final_regret) << ',' << fmt(r.slope) << ',' << r.essential_bs << ','
        << fmt(r.wall_seconds) << ',' << fmt(r.h_star) << ',' << fmt(r.regret_at_tenth) << ','
        << r.binary_searches << ',' << r.acquisition_rounds << ',' << r.mistake_checks << ','
        << r.mistake_violations << '\n';
}

}  // namespace osrl
