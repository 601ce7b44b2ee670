#pragma once

#include <cstddef>
#include <vector>

#include "osrl/core_model.hpp"
#include "osrl/lp_solver.hpp"

namespace osrl {

struct ActionSolution {
  std::size_t k = 0;
  double h_star = 0.0;
  ScoringRule s_star;
  bool feasible = false;
};

struct StackelbergSolution {
  std::size_t k = 0;
  ActionSolution best;
  std::vector<ActionSolution> per_action;
};

/// Appends the M*(M-1) properness rows over table variables x[i*n + w] (offset `first`).
void add_properness_rows(lp::LinearProgram& lp, const BeliefSupport& support, std::size_t first = 0);

/// Best principal profit subject to the agent best-responding with action k.
ActionSolution solve_lp_k(const Instance& inst, std::size_t k);

/// Best action and rule; ties go to the lowest action index.
StackelbergSolution solve_stackelberg(const Instance& inst);

struct GridResult {
  std::size_t k = 0;
  double h = 0.0;
  ScoringRule s;
  std::size_t n_proper = 0;
};

/// Exhaustive search over proper tables on {0, step, ..., B_S}^(M x |Omega|). Requires M*|Omega| <= 6.
GridResult grid_brute_force(const Instance& inst, double step);

/// Per-round suboptimality against the optimum value `h_opt`.
double subopt(const Instance& inst, double h_opt, std::size_t k, const ScoringRule& s);
double subopt(const Instance& inst, std::size_t k, const ScoringRule& s);

/// Proper bounded rule maximizing min_{k'} g(k, S) - g(k', S). The margin is
/// that minimum (non-positive when k cannot be induced strictly; +inf when K = 1).
struct MarginRule {
  ScoringRule rule;
  double margin = 0.0;
};
MarginRule max_margin_rule(const Instance& inst, std::size_t k);

/// Brute force over contracts on {0, step, ..., B_S}^|outcomes|; principal-favoring ties.
struct ContractGridResult {
  std::size_t k = 0;
  double value = 0.0;
  std::vector<double> contract;
};
ContractGridResult contract_grid_search(const ContractProblem& problem, double step);

}  // namespace osrl
