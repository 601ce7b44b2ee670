#include "osrl/offline_solver.hpp"

#include <cmath>
#include <limits>

#include "osrl/agent_sim.hpp"
#include "osrl/errors.hpp"

namespace osrl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ScoringRule rule_from_solution(const std::vector<double>& x, std::size_t m, std::size_t n) {
  ScoringRule s(m, n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t w = 0; w < n; ++w) s(i, w) = x[i * n + w];
  return s;
}

// Coefficients of <a, S>_Sigma = sum_i a_i sum_w sigma_i(w) x[i, w].
std::vector<double> score_coeffs(std::span<const double> a, const BeliefSupport& support,
                                 std::size_t width) {
  const std::size_t n = support.n_states();
  std::vector<double> c(width, 0.0);
  for (std::size_t i = 0; i < support.size(); ++i)
    for (std::size_t w = 0; w < n; ++w) c[i * n + w] = a[i] * support[i][w];
  return c;
}

std::size_t grid_levels(double b_s, double step) {
  if (!(step > 0.0)) throw InvalidInput("grid step must be positive");
  return static_cast<std::size_t>(std::llround(b_s / step)) + 1;
}

}  // namespace

void add_properness_rows(lp::LinearProgram& lp, const BeliefSupport& support, std::size_t first) {
  const std::size_t n = support.n_states();
  for (std::size_t i = 0; i < support.size(); ++i)
    for (std::size_t j = 0; j < support.size(); ++j) {
      if (i == j) continue;
      std::vector<double> row(lp.n_vars(), 0.0);
      for (std::size_t w = 0; w < n; ++w) {
        row[first + i * n + w] += support[i][w];
        row[first + j * n + w] -= support[i][w];
      }
      lp.add(std::move(row), lp::Relation::GreaterEq, 0.0);
    }
}

ActionSolution solve_lp_k(const Instance& inst, std::size_t k) {
  if (k >= inst.n_actions()) throw InvalidInput("solve_lp_k: action out of range");
  const auto& sup = inst.support();
  const std::size_t m = sup.size(), n = inst.n_states(), width = m * n;
  lp::LinearProgram lp(width);
  for (std::size_t j = 0; j < width; ++j) lp.upper[j] = inst.b_s();
  const auto qk = inst.q(k);
  auto obj = score_coeffs(qk, sup, width);
  for (double& c : obj) c = -c;
  lp.objective = std::move(obj);
  add_properness_rows(lp, sup);
  for (std::size_t l = 0; l < inst.n_actions(); ++l) {
    if (l == k) continue;
    std::vector<double> diff(m);
    for (std::size_t i = 0; i < m; ++i) diff[i] = qk[i] - inst.q(l)[i];
    lp.add(score_coeffs(diff, sup, width), lp::Relation::GreaterEq, inst.cost(k) - inst.cost(l));
  }
  const auto res = lp::solve(lp);
  ActionSolution out;
  out.k = k;
  if (res.status != lp::Status::Optimal) {
    out.s_star = ScoringRule(m, n);
    out.h_star = -kInf;
    return out;
  }
  out.feasible = true;
  out.s_star = rule_from_solution(res.x, m, n);
  out.h_star = principal_profit(inst, out.s_star, k);
  return out;
}

StackelbergSolution solve_stackelberg(const Instance& inst) {
  StackelbergSolution out;
  bool any = false;
  for (std::size_t k = 0; k < inst.n_actions(); ++k) {
    out.per_action.push_back(solve_lp_k(inst, k));
    const auto& a = out.per_action.back();
    if (a.feasible && (!any || a.h_star > out.best.h_star)) {
      out.best = a;
      out.k = k;
      any = true;
    }
  }
  if (!any) throw SolverFailure("solve_stackelberg: no inducible action (internal error)");
  return out;
}

GridResult grid_brute_force(const Instance& inst, double step) {
  const std::size_t m = inst.n_beliefs(), n = inst.n_states(), d = m * n;
  if (d > 6) throw InvalidInput("grid_brute_force: M * |Omega| must be at most 6");
  const std::size_t levels = grid_levels(inst.b_s(), step);
  std::vector<std::size_t> idx(d, 0);
  ScoringRule s(m, n);
  GridResult best;
  bool any = false;
  for (;;) {
    for (std::size_t j = 0; j < d; ++j)
      s(j / n, j % n) = std::min(static_cast<double>(idx[j]) * step, inst.b_s());
    if (is_proper(s, inst.support())) {
      ++best.n_proper;
      const std::size_t k = best_response(inst, s);
      const double h = principal_profit(inst, s, k);
      if (!any || h > best.h) {
        best.h = h;
        best.k = k;
        best.s = s;
        any = true;
      }
    }
    std::size_t j = 0;
    while (j < d && ++idx[j] == levels) idx[j++] = 0;
    if (j == d) break;
  }
  return best;
}

double subopt(const Instance& inst, double h_opt, std::size_t k, const ScoringRule& s) {
  return h_opt - principal_profit(inst, s, k);
}

double subopt(const Instance& inst, std::size_t k, const ScoringRule& s) {
  return subopt(inst, solve_stackelberg(inst).best.h_star, k, s);
}

MarginRule max_margin_rule(const Instance& inst, std::size_t k) {
  if (k >= inst.n_actions()) throw InvalidInput("max_margin_rule: action out of range");
  const auto& sup = inst.support();
  const std::size_t m = sup.size(), n = inst.n_states(), width = m * n;
  if (inst.n_actions() == 1) return {quadratic_rule(sup, inst.b_s()), kInf};
  double max_cost = 0.0;
  for (double c : inst.info().costs()) max_cost = std::max(max_cost, c);
  lp::LinearProgram lp(width + 1);
  for (std::size_t j = 0; j < width; ++j) lp.upper[j] = inst.b_s();
  lp.lower[width] = -(inst.b_s() + max_cost + 1.0);
  lp.objective[width] = 1.0;
  add_properness_rows(lp, sup);
  const auto qk = inst.q(k);
  for (std::size_t l = 0; l < inst.n_actions(); ++l) {
    if (l == k) continue;
    std::vector<double> diff(m);
    for (std::size_t i = 0; i < m; ++i) diff[i] = qk[i] - inst.q(l)[i];
    auto row = score_coeffs(diff, sup, width + 1);
    row[width] = -1.0;
    lp.add(std::move(row), lp::Relation::GreaterEq, inst.cost(k) - inst.cost(l));
  }
  const auto res = lp::solve(lp);
  if (res.status != lp::Status::Optimal) throw SolverFailure("max_margin_rule: LP not optimal");
  MarginRule out{rule_from_solution(res.x, m, n), kInf};
  for (std::size_t l = 0; l < inst.n_actions(); ++l)
    if (l != k)
      out.margin = std::min(out.margin, agent_profit(inst, out.rule, k) - agent_profit(inst, out.rule, l));
  return out;
}

ContractGridResult contract_grid_search(const ContractProblem& problem, double step) {
  const std::size_t n = problem.outcome_utility.size();
  const std::size_t K = problem.costs.size();
  if (n == 0 || n > 6) throw InvalidInput("contract_grid_search: 1..6 outcomes supported");
  const std::size_t levels = grid_levels(problem.b_s, step);
  std::vector<std::size_t> idx(n, 0);
  std::vector<double> c(n);
  ContractGridResult best;
  bool any = false;
  for (;;) {
    for (std::size_t w = 0; w < n; ++w)
      c[w] = std::min(static_cast<double>(idx[w]) * step, problem.b_s);
    std::vector<double> g(K), h(K);
    double gmax = -kInf;
    for (std::size_t k = 0; k < K; ++k) {
      g[k] = -problem.costs[k];
      h[k] = 0.0;
      for (std::size_t w = 0; w < n; ++w) {
        g[k] += problem.outcome_dists[k][w] * c[w];
        h[k] += problem.outcome_dists[k][w] * (problem.outcome_utility[w] - c[w]);
      }
      gmax = std::max(gmax, g[k]);
    }
    std::size_t kr = K;
    for (std::size_t k = 0; k < K; ++k)
      if (g[k] >= gmax - kIndifference && (kr == K || h[k] > h[kr] + kIndifference)) kr = k;
    if (!any || h[kr] > best.value) {
      best = {kr, h[kr], c};
      any = true;
    }
    std::size_t j = 0;
    while (j < n && ++idx[j] == levels) idx[j++] = 0;
    if (j == n) break;
  }
  return best;
}

}  // namespace osrl
