#pragma once

#include <cstddef>
#include <limits>
#include <vector>

namespace osrl::lp {

enum class Relation { LessEq, GreaterEq, Equal };

struct Constraint {
  std::vector<double> coeffs;
  Relation rel = Relation::LessEq;
  double rhs = 0.0;
};

/// maximize objective . x  s.t. constraints, lower <= x <= upper.
/// Lower bounds must be finite; upper bounds may be +inf.
struct LinearProgram {
  std::vector<double> objective;
  std::vector<Constraint> constraints;
  std::vector<double> lower;
  std::vector<double> upper;

  explicit LinearProgram(std::size_t n_vars = 0)
      : objective(n_vars, 0.0),
        lower(n_vars, 0.0),
        upper(n_vars, std::numeric_limits<double>::infinity()) {}

  std::size_t n_vars() const noexcept { return objective.size(); }
  void add(std::vector<double> coeffs, Relation rel, double rhs) {
    constraints.push_back({std::move(coeffs), rel, rhs});
  }
};

enum class Status { Optimal, Infeasible, Unbounded };

struct Outcome {
  Status status = Status::Infeasible;
  std::vector<double> x;  // empty unless Optimal
  double value = 0.0;
};

/// Dense two-phase primal simplex with Bland's rule.
Outcome solve(const LinearProgram& lp);

/// Largest constraint or bound violation of x (0 when feasible).
double max_violation(const LinearProgram& lp, const std::vector<double>& x);

const char* to_string(Status s);

}  // namespace osrl::lp
