// Acceptance suite: one line per criterion, "criterion N: PASS|FAIL <details>".
// Usage: osrl_acceptance [N ...] [--known-fail N,...]   (no criteria runs all)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "osrl/agent_sim.hpp"
#include "osrl/core_model.hpp"
#include "osrl/harness.hpp"
#include "osrl/learner.hpp"
#include "osrl/lp_solver.hpp"
#include "osrl/offline_solver.hpp"
#include "osrl/oracle_acquisition.hpp"
#include "osrl/rng.hpp"

#include <CLI11.hpp>

using namespace osrl;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

ScoringRule random_table(std::size_t m, std::size_t n, double hi, Rng& rng) {
  ScoringRule s(m, n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t w = 0; w < n; ++w) s(i, w) = rng.uniform(0.0, hi);
  return s;
}

// Extremes of one belief's expected score over the region where k is inducible.
bool score_range(const Instance& inst, std::size_t k, std::size_t belief, double& lo, double& hi) {
  const std::size_t M = inst.n_beliefs(), W = inst.n_states();
  lp::LinearProgram lp(M * W);
  for (std::size_t j = 0; j < lp.n_vars(); ++j) lp.upper[j] = inst.b_s();
  add_properness_rows(lp, inst.support());
  for (std::size_t kp = 0; kp < inst.n_actions(); ++kp) {
    if (kp == k) continue;
    std::vector<double> row(M * W, 0.0);
    for (std::size_t i = 0; i < M; ++i)
      for (std::size_t w = 0; w < W; ++w)
        row[i * W + w] = (inst.q(k)[i] - inst.q(kp)[i]) * inst.support()[i][w];
    lp.add(row, lp::Relation::GreaterEq, inst.cost(k) - inst.cost(kp));
  }
  for (std::size_t w = 0; w < W; ++w) lp.objective[belief * W + w] = inst.support()[belief][w];
  const auto top = lp::solve(lp);
  for (auto& c : lp.objective) c = -c;
  const auto bottom = lp::solve(lp);
  if (top.status != lp::Status::Optimal || bottom.status != lp::Status::Optimal) return false;
  hi = top.value;
  lo = -bottom.value;
  return true;
}

// 1. LP optimum versus exhaustive grid on small instances.
Verdict offline_equivalence() {
  const auto start = std::chrono::steady_clock::now();
  const double step = 1.0 / 20;
  const double allowed = 2.0 * 1.0 * step * 2;
  RandomInstanceSpec spec;
  spec.n_actions = 2;
  spec.n_beliefs = 2;
  spec.n_states = 2;
  int ok = 0;
  double worst_gap = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto inst = gen_random_instance(spec, seed);
    const double lp_value = solve_stackelberg(inst).best.h_star;
    const double grid_value = grid_brute_force(inst, step).h;
    const double gap = lp_value - grid_value;
    worst_gap = std::max(worst_gap, gap);
    ok += gap >= -1e-9 && gap <= allowed + 1e-12;
  }
  const double secs = seconds_since(start);
  std::ostringstream os;
  os << ok << "/20 instances with 0 <= LP - grid <= " << allowed << ", worst gap " << worst_gap
     << ", " << secs << " s";
  return {ok == 20 && secs < 60.0, os.str()};
}

// 2. Hard instance: single inducible point, margins, losses off the optimum.
Verdict hard_instance_exactness() {
  const double e1 = -0.25;
  const auto inst = gen_hard_instance(e1);
  const auto f = hard_instance_offset(e1);
  const double target[3] = {1.0, -e1, 0.0};
  bool point = true;
  double spread = 0.0, miss = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    double lo = 0.0, hi = 0.0;
    if (!score_range(inst, 1, i, lo, hi)) {
      point = false;
      continue;
    }
    const double shift = dot(inst.support()[i].probs(), f);
    spread = std::max(spread, hi - lo);
    miss = std::max({miss, std::abs(lo - shift - target[i]), std::abs(hi - shift - target[i])});
  }
  point = point && spread <= 1e-7 && miss <= 1e-7;

  // <q_2 - q_j, u - S*> over the support, for both outer actions
  const auto s = hard_instance_optimum(e1);
  double min_margin = std::numeric_limits<double>::infinity();
  for (std::size_t j : {0u, 2u}) {
    double acc = 0.0;
    for (std::size_t i = 0; i < 3; ++i)
      acc += (inst.q(1)[i] - inst.q(j)[i]) *
             (inst.u_sigma()[i] - expected_score(s, i, inst.support()[i]));
    min_margin = std::min(min_margin, acc);
  }
  const bool margins = min_margin >= 2.0 - 1e-9;

  Rng rng(2024);
  int outer = 0, losing = 0;
  double least = std::numeric_limits<double>::infinity();
  while (outer < 100) {
    const auto rule = properize(random_table(3, 2, inst.b_s(), rng), inst.support());
    const auto k = best_response(inst, rule);
    if (k == 1) continue;
    ++outer;
    const double loss = subopt(inst, k, rule);
    least = std::min(least, loss);
    losing += loss >= 1.0 - 1e-9;
  }
  std::ostringstream os;
  os << "inducible region of action 2 spread " << spread << ", distance to (1, 0.25, 0) " << miss
     << "; min margin " << min_margin << "; " << losing << "/100 outer-action rules lose >= 1 (min "
     << least << ")";
  return {point && margins && losing == 100, os.str()};
}

struct Curve {
  double ratio_final = 0.0;
  double ratio_tenth = 0.0;
  double slope = 0.0;
  double seconds = 0.0;
};

Curve run_curve(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const auto runs = run_experiment(cfg);
  const std::size_t T = cfg.T;
  std::vector<double> mean(T, 0.0);
  Curve c;
  for (const auto& r : runs) {
    c.ratio_final += r.final_regret / double(T);
    c.ratio_tenth += r.regret_at_tenth / double(T / 10);
    for (std::size_t t = 0; t < T; ++t) mean[t] += r.trace[t].cum_regret / runs.size();
  }
  c.ratio_final /= runs.size();
  c.ratio_tenth /= runs.size();
  c.slope = fit_loglog_slope(mean, T / 10);
  c.seconds = seconds_since(start);
  return c;
}

std::vector<std::uint64_t> seeds(std::size_t n) {
  std::vector<std::uint64_t> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = i + 1;
  return s;
}

// 3. Sublinear regret with a ground-truth oracle.
Verdict regret_sublinearity() {
  const auto start = std::chrono::steady_clock::now();
  std::vector<nlohmann::json> specs{{{"kind", "hard"}, {"e1", -0.25}}};
  for (std::size_t M : {2u, 3u, 4u})
    specs.push_back({{"kind", "random"}, {"K", 3}, {"M", M}, {"states", 2}, {"seed", 0}, {"min_margin", 0.05}});
  const char* names[] = {"hard", "random M=2", "random M=3", "random M=4"};
  bool all = true;
  std::ostringstream os;
  for (std::size_t n = 0; n < specs.size(); ++n) {
    ExperimentConfig cfg;
    cfg.instance = specs[n];
    cfg.T = 50000;
    cfg.seeds = seeds(10);
    cfg.oracle_mode = OracleMode::GroundTruth;
    const auto inst = build_instance(cfg.instance);
    const auto check = verify_oracle(inst, ground_truth_oracle(inst));
    const auto c = run_curve(cfg);
    const bool pass = check.valid && c.ratio_final <= 0.7 * c.ratio_tenth && c.slope <= 0.85;
    all = all && pass;
    os << (n ? "; " : "") << names[n] << (pass ? " ok" : " FAIL") << " [oracle "
       << (check.valid ? "verified" : "not verifiable") << ", margin " << check.min_margin
       << ", Reg(T)/T " << c.ratio_final << " vs 0.7*" << c.ratio_tenth << ", slope " << c.slope
       << "]";
  }
  const double secs = seconds_since(start);
  os << "; " << secs << " s";
  return {all && secs < 1800.0, os.str()};
}

// 4. No oracle: random proper rules lose linearly on the hard instance.
Verdict impossibility_demo() {
  ExperimentConfig cfg;
  cfg.T = 20000;
  cfg.seeds = seeds(10);
  cfg.oracle_mode = OracleMode::None;
  cfg.policy = Policy::RandomProper;
  const auto c = run_curve(cfg);
  std::ostringstream os;
  os << "slope " << c.slope << ", Reg(T)/T " << c.ratio_final << ", " << c.seconds << " s";
  return {c.slope >= 0.95 && c.ratio_final >= 0.5, os.str()};
}

// 5. L1 confidence interval of the belief-frequency estimate.
Verdict confidence_coverage() {
  const double delta = 0.05;
  const int trials = 2000;
  Rng rng(5);
  bool all = true;
  std::ostringstream os;
  for (const std::vector<double>& q : {std::vector<double>{0.3, 0.7}, std::vector<double>{0.25, 0.25, 0.5}}) {
    const std::size_t M = q.size();
    std::vector<Belief> beliefs;
    for (std::size_t i = 0; i < M; ++i) {
      const double p = (i + 0.5) / M;
      beliefs.emplace_back(std::vector<double>{p, 1.0 - p});
    }
    const BeliefSupport sup(beliefs);
    OracleSet oracle;
    oracle.rules.push_back(TabulatedRule{sup, ScoringRule(M, 2)});
    oracle.support = sup;
    const PrincipalView view{UtilityModel(Matrix({{1.0, 0.0}, {0.0, 1.0}})), 1.0, 1.0, 1};
    LearnerConfig lc;
    lc.m_bound = M;
    for (std::size_t n : {50u, 500u}) {
      const double bound = std::sqrt(2.0 * std::log(std::pow(2.0, double(M)) / delta) / n);
      int covered = 0;
      for (int trial = 0; trial < trials; ++trial) {
        Learner learner(view, oracle, lc);
        for (std::size_t s = 0; s < n; ++s) learner.update_beliefs(0, sup[rng.categorical(q)]);
        const auto qh = learner.q_hat(0);
        double l1 = 0.0;
        for (std::size_t i = 0; i < M; ++i) l1 += std::abs(qh[i] - q[i]);
        covered += l1 <= bound;
      }
      const double freq = double(covered) / trials;
      all = all && freq >= 1.0 - delta;
      os << (os.tellp() > 0 ? ", " : "") << "M=" << M << " n=" << n << ": " << freq;
    }
  }
  return {all, os.str()};
}

// 6. Instrumented runs: no response equal to a ruled-out action.
Verdict mistake_property() {
  const auto start = std::chrono::steady_clock::now();
  ExperimentConfig cfg;
  cfg.T = 50000;
  cfg.seeds = seeds(10);
  cfg.oracle_mode = OracleMode::GroundTruth;
  cfg.instrument = true;
  cfg.per_round_trace = false;
  std::size_t checks = 0, violations = 0;
  for (const auto& r : run_experiment(cfg)) {
    checks += r.mistake_checks;
    violations += r.mistake_violations;
  }
  std::ostringstream os;
  os << violations << " violations in " << checks << " qualifying (round, action) checks over 10 x "
     << cfg.T << " rounds";
  if (checks == 0) os << " (no round qualifies: oracle margin 0 makes the threshold infinite)";
  os << ", " << seconds_since(start) << " s";
  return {violations == 0, os.str()};
}

// 7. Bisection against threshold responders.
Verdict binary_search() {
  int ok = 0, total = 0;
  std::size_t max_probes = 0;
  for (std::size_t m : {5u, 10u, 15u}) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      Rng rng(seed, m);
      const double lambda_star = rng.uniform();
      const double tol = std::ldexp(1.0, -int(m));
      BinarySearch bs(tol);
      while (!bs.done()) bs.record(bs.next() >= lambda_star);
      ++total;
      max_probes = std::max(max_probes, bs.probes());
      ok += bs.lambda_min() <= lambda_star && lambda_star <= bs.lambda_max() &&
            bs.lambda_max() - bs.lambda_min() < tol && bs.probes() <= m + 1;
    }
  }
  std::ostringstream os;
  os << ok << "/" << total << " searches bracket the threshold within tolerance, max probes "
     << max_probes << " (m = 15 allows 16)";
  return {ok == total, os.str()};
}

// 8. Properization keeps each belief's best payment and never hurts the principal.
Verdict properization() {
  Rng rng(8);
  int ok = 0;
  double worst_score = 0.0, worst_profit = 0.0;
  for (std::uint64_t n = 0; n < 500; ++n) {
    RandomInstanceSpec spec;
    spec.n_actions = 2 + rng.index(2);
    spec.n_beliefs = 1 + rng.index(4);
    spec.n_states = spec.n_beliefs == 1 ? 1 + rng.index(3) : 2 + rng.index(2);
    spec.min_separation = 0.02;
    const auto inst = gen_random_instance(spec, n);
    const auto& sup = inst.support();
    const auto raw = random_table(sup.size(), inst.n_states(), inst.b_s(), rng);
    const auto prop = properize(raw, sup);
    bool good = is_proper(prop, sup);
    for (std::size_t i = 0; i < sup.size(); ++i) {
      const double best = expected_score(raw, optimal_report(raw, sup, i), sup[i]);
      const double diff = std::abs(expected_score(prop, i, sup[i]) - best);
      worst_score = std::max(worst_score, diff);
      good = good && diff <= 1e-12;
    }
    for (std::size_t k = 0; k < inst.n_actions(); ++k) {
      const double drop = principal_profit_misreporting(inst, raw, k) - principal_profit(inst, prop, k);
      worst_profit = std::max(worst_profit, drop);
      good = good && drop <= 1e-12;
    }
    ok += good;
  }
  std::ostringstream os;
  os << ok << "/500 tables; worst score mismatch " << worst_score << ", worst profit drop "
     << worst_profit;
  return {ok == 500, os.str()};
}

// 9. Oracle acquisition by linear contracts and by random sampling.
Verdict oracle_acquisition() {
  int lc_ok = 0, lc_complete = 0, lc_positive = 0, lc_budget = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto d = gen_decay_instance(seed);
    Agent agent(d.instance, Rng(seed, 1));
    const auto rep = linear_contract_oracle(agent, d.instance.utility(), 3, {d.epsilon_gap, d.b, 0});
    const std::size_t m = linear_contract_depth(d.epsilon_gap, d.b);
    const bool complete = rep.complete();
    const auto chk = complete ? verify_oracle(d.instance, rep.oracle) : OracleCheck{};
    const bool within = rep.probes <= 3 * (m + 1);
    lc_complete += complete;
    lc_positive += complete && chk.min_margin > 0.0;
    lc_budget += within;
    lc_ok += complete && chk.valid && within;
  }

  RandomInstanceSpec spec;
  spec.n_actions = 3;
  spec.n_beliefs = 3;
  spec.n_states = 2;
  const StronglyProperParams sp{0.05, 1.0};
  const double eta = 0.05;
  std::uint64_t seed = 0;
  double measured = 0.0;
  for (int tries = 0; tries < 200; ++tries, ++seed) {
    seed = find_seed_with_oracle(spec, seed, 1e-6);
    Rng vol_rng(seed, 9);
    const auto vol = measure_region_volumes(gen_random_instance(spec, seed), sp, 4000, vol_rng);
    measured = *std::min_element(vol.begin(), vol.end());
    if (measured >= eta) break;
  }
  const auto inst = gen_random_instance(spec, seed);
  const double bound = 40.0 * 3 / eta * 3 * std::log(3.0);
  int rs_within = 0, rs_valid = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    Agent agent(inst, Rng(s, 1));
    Rng rng(s, 2);
    RandomSamplingParams params;
    params.sp = sp;
    params.m_bound = 3;
    params.d2_config = 0.99 * inst.info().min_distribution_gap();
    params.budget = std::size_t(bound) + 1000;
    const auto rep = random_sampling_oracle(agent, 3, params, rng);
    if (!rep.complete()) continue;
    rs_valid += verify_oracle(inst, rep.oracle).valid;
    rs_within += rep.probes <= bound;
  }
  std::ostringstream os;
  os << "(a) " << lc_ok << "/10 decay instances complete with margin > reported epsilon ("
     << lc_complete << " complete, " << lc_positive << " with positive margins, " << lc_budget
     << " within K(m+1) probes); (b) instance seed " << seed << " min region volume " << measured
     << ", " << rs_within << "/20 runs complete within " << bound << " probes, " << rs_valid
     << "/20 verified";
  return {lc_ok == 10 && measured >= eta && rs_within >= 18, os.str()};
}

// 10. Contracts never beat scoring rules on the reduced instance.
Verdict contract_reduction() {
  int ok = 0;
  double worst = -std::numeric_limits<double>::infinity();
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto problem = gen_contract_problem(seed);
    const auto grid = contract_grid_search(problem, problem.b_s / 100.0);
    const double lp_value = solve_stackelberg(contract_to_instance(problem)).best.h_star;
    worst = std::max(worst, grid.value - lp_value);
    ok += grid.value <= lp_value + 1e-6;
  }
  std::ostringstream os;
  os << ok << "/10 problems, max(contract - scoring rule) " << worst;
  return {ok == 10, os.str()};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Verdict()>> criteria{
      offline_equivalence, hard_instance_exactness, regret_sublinearity, impossibility_demo,
      confidence_coverage, mistake_property,         binary_search,      properization,
      oracle_acquisition,  contract_reduction};

  CLI::App app{"Acceptance criteria"};
  std::vector<std::size_t> selected;
  std::vector<std::size_t> known_fail;
  app.add_option("criteria", selected, "Criteria to run (default: all)")
      ->check(CLI::Range(std::size_t{1}, criteria.size()));
  app.add_option("--known-fail", known_fail,
                 "Criteria that cannot pass; their FAIL lines are reported but not counted, "
                 "and an unexpected PASS is an error")
      ->delimiter(',')
      ->check(CLI::Range(std::size_t{1}, criteria.size()));
  CLI11_PARSE(app, argc, argv);
  if (selected.empty())
    for (std::size_t n = 1; n <= criteria.size(); ++n) selected.push_back(n);

  int failed = 0;
  for (std::size_t n : selected) {
    Verdict v;
    try {
      v = criteria[n - 1]();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    const bool known = std::find(known_fail.begin(), known_fail.end(), n) != known_fail.end();
    std::printf("criterion %zu: %s  %s%s\n", n, v.pass ? "PASS" : "FAIL", v.detail.c_str(),
                known ? (v.pass ? "  [listed as known failure: unexpected pass]" : "  [known failure]") : "");
    std::fflush(stdout);
    failed += known ? v.pass : !v.pass;
  }
  return failed == 0 ? 0 : 1;
}
