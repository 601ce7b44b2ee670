#include "osrl/lp_solver.hpp"

#include <algorithm>
#include <cmath>

#include "osrl/errors.hpp"

namespace osrl::lp {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kFeasTol = 1e-7;

// Row-major tableau; column `width` holds the right-hand side. Row `m` is the
// objective row in reduced-cost form (d_j = c_B B^-1 a_j - c_j, maximize).
class Tableau {
 public:
  Tableau(std::size_t m, std::size_t width)
      : m_(m), width_(width), data_((m + 1) * (width + 1), 0.0), basis_(m, 0) {}

  double& at(std::size_t i, std::size_t j) { return data_[i * (width_ + 1) + j]; }
  double at(std::size_t i, std::size_t j) const { return data_[i * (width_ + 1) + j]; }
  double& rhs(std::size_t i) { return at(i, width_); }
  double& obj(std::size_t j) { return at(m_, j); }

  std::size_t rows() const { return m_; }
  std::size_t width() const { return width_; }
  std::vector<std::size_t>& basis() { return basis_; }

  void pivot(std::size_t r, std::size_t c) {
    const double p = at(r, c);
    for (std::size_t j = 0; j <= width_; ++j) at(r, j) /= p;
    at(r, c) = 1.0;
    for (std::size_t i = 0; i <= m_; ++i) {
      if (i == r) continue;
      const double f = at(i, c);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= width_; ++j) {
        double v = at(i, j) - f * at(r, j);
        if (std::abs(v) < 1e-13) v = 0.0;
        at(i, j) = v;
      }
      at(i, c) = 0.0;
    }
    basis_[r] = c;
  }

  // Load objective costs c (length width) and price out the current basis.
  void set_objective(const std::vector<double>& c) {
    for (std::size_t j = 0; j <= width_; ++j) obj(j) = j < width_ ? -c[j] : 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      const double cb = c[basis_[i]];
      if (cb == 0.0) continue;
      for (std::size_t j = 0; j <= width_; ++j) obj(j) += cb * at(i, j);
    }
  }

  // Bland's rule. Returns false on unboundedness.
  bool optimize(const std::vector<char>& allowed, std::size_t& iters, std::size_t cap) {
    for (;;) {
      std::size_t enter = width_;
      for (std::size_t j = 0; j < width_; ++j) {
        if (allowed[j] && obj(j) < -kPivotTol) {
          enter = j;
          break;
        }
      }
      if (enter == width_) return true;
      std::size_t leave = m_;
      double best = 0.0;
      for (std::size_t i = 0; i < m_; ++i) {
        const double a = at(i, enter);
        if (a <= kPivotTol) continue;
        const double ratio = rhs(i) / a;
        if (leave == m_ || ratio < best - kPivotTol) {
          best = ratio;
          leave = i;
        } else if (ratio <= best + kPivotTol && basis_[i] < basis_[leave]) {
          leave = i;
        }
      }
      if (leave == m_) return false;
      pivot(leave, enter);
      if (++iters > cap) throw SolverFailure("lp::solve: iteration cap reached");
    }
  }

 private:
  std::size_t m_;
  std::size_t width_;
  std::vector<double> data_;
  std::vector<std::size_t> basis_;
};

struct Row {
  std::vector<double> a;
  Relation rel;
  double b;
};

// Solves B x = b in place by Gaussian elimination with partial pivoting.
bool solve_dense(std::vector<double>& B, std::vector<double>& b, std::size_t m) {
  for (std::size_t c = 0; c < m; ++c) {
    std::size_t piv = c;
    for (std::size_t i = c + 1; i < m; ++i)
      if (std::abs(B[i * m + c]) > std::abs(B[piv * m + c])) piv = i;
    if (std::abs(B[piv * m + c]) < 1e-14) return false;
    if (piv != c) {
      for (std::size_t j = 0; j < m; ++j) std::swap(B[c * m + j], B[piv * m + j]);
      std::swap(b[c], b[piv]);
    }
    for (std::size_t i = c + 1; i < m; ++i) {
      const double f = B[i * m + c] / B[c * m + c];
      if (f == 0.0) continue;
      for (std::size_t j = c; j < m; ++j) B[i * m + j] -= f * B[c * m + j];
      b[i] -= f * b[c];
    }
  }
  for (std::size_t c = m; c-- > 0;) {
    double v = b[c];
    for (std::size_t j = c + 1; j < m; ++j) v -= B[c * m + j] * b[j];
    b[c] = v / B[c * m + c];
  }
  return true;
}

}  // namespace

const char* to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
  }
  return "?";
}

double max_violation(const LinearProgram& lp, const std::vector<double>& x) {
  double v = 0.0;
  for (std::size_t j = 0; j < lp.n_vars(); ++j) {
    v = std::max(v, lp.lower[j] - x[j]);
    if (std::isfinite(lp.upper[j])) v = std::max(v, x[j] - lp.upper[j]);
  }
  for (const auto& c : lp.constraints) {
    double lhs = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) lhs += c.coeffs[j] * x[j];
    const double scale = 1.0 + std::abs(c.rhs);
    switch (c.rel) {
      case Relation::LessEq: v = std::max(v, (lhs - c.rhs) / scale); break;
      case Relation::GreaterEq: v = std::max(v, (c.rhs - lhs) / scale); break;
      case Relation::Equal: v = std::max(v, std::abs(lhs - c.rhs) / scale); break;
    }
  }
  return v;
}

Outcome solve(const LinearProgram& lp) {
  const std::size_t n = lp.n_vars();
  if (lp.lower.size() != n || lp.upper.size() != n)
    throw InvalidInput("lp::solve: bound vectors do not match objective length");
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(lp.lower[j])) throw InvalidInput("lp::solve: lower bounds must be finite");
    if (lp.upper[j] < lp.lower[j]) return {};
  }
  for (const auto& c : lp.constraints)
    if (c.coeffs.size() != n) throw InvalidInput("lp::solve: constraint dimension mismatch");

  // Shift x = lower + y and turn finite upper bounds into rows.
  std::vector<Row> rows;
  for (const auto& c : lp.constraints) {
    double b = c.rhs;
    for (std::size_t j = 0; j < n; ++j) b -= c.coeffs[j] * lp.lower[j];
    rows.push_back({c.coeffs, c.rel, b});
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(lp.upper[j])) continue;
    std::vector<double> a(n, 0.0);
    a[j] = 1.0;
    rows.push_back({std::move(a), Relation::LessEq, lp.upper[j] - lp.lower[j]});
  }
  for (auto& r : rows) {
    if (r.b < 0.0) {
      for (double& x : r.a) x = -x;
      r.b = -r.b;
      if (r.rel == Relation::LessEq)
        r.rel = Relation::GreaterEq;
      else if (r.rel == Relation::GreaterEq)
        r.rel = Relation::LessEq;
    }
  }

  const std::size_t m = rows.size();
  std::size_t n_slack = 0, n_art = 0;
  for (const auto& r : rows) {
    if (r.rel != Relation::Equal) ++n_slack;
    if (r.rel != Relation::LessEq) ++n_art;
  }
  const std::size_t art0 = n + n_slack;
  const std::size_t width = art0 + n_art;
  Tableau tab(m, width);
  std::size_t s = n, a = art0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) tab.at(i, j) = rows[i].a[j];
    tab.rhs(i) = rows[i].b;
    switch (rows[i].rel) {
      case Relation::LessEq:
        tab.at(i, s) = 1.0;
        tab.basis()[i] = s++;
        break;
      case Relation::GreaterEq:
        tab.at(i, s++) = -1.0;
        tab.at(i, a) = 1.0;
        tab.basis()[i] = a++;
        break;
      case Relation::Equal:
        tab.at(i, a) = 1.0;
        tab.basis()[i] = a++;
        break;
    }
  }

  const Tableau initial = tab;
  const std::size_t cap = 10 * (width + m) * (width + m) + 100;
  std::size_t iters = 0;
  std::vector<char> allowed(width, 1);

  if (n_art > 0) {
    std::vector<double> c1(width, 0.0);
    for (std::size_t j = art0; j < width; ++j) c1[j] = -1.0;
    tab.set_objective(c1);
    tab.optimize(allowed, iters, cap);
    double scale = 1.0;
    for (const auto& r : rows) scale = std::max(scale, std::abs(r.b));
    if (tab.obj(width) < -kFeasTol * scale) return {};
    for (std::size_t i = 0; i < m; ++i) {
      if (tab.basis()[i] < art0) continue;
      for (std::size_t j = 0; j < art0; ++j) {
        if (std::abs(tab.at(i, j)) > kPivotTol) {
          tab.pivot(i, j);
          break;
        }
      }
    }
    for (std::size_t j = art0; j < width; ++j) allowed[j] = 0;
  }

  std::vector<double> c2(width, 0.0);
  for (std::size_t j = 0; j < n; ++j) c2[j] = lp.objective[j];
  tab.set_objective(c2);
  if (!tab.optimize(allowed, iters, cap)) return {Status::Unbounded, {}, 0.0};

  Outcome out;
  out.status = Status::Optimal;
  out.x = lp.lower;
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t j = tab.basis()[i];
    if (j < n) out.x[j] += tab.rhs(i);
  }
  for (std::size_t j = 0; j < n; ++j) out.x[j] = std::clamp(out.x[j], lp.lower[j], lp.upper[j]);

  // Recompute the final basis from the original rows to shed accumulated pivot error.
  std::vector<double> B(m * m), xb(m);
  for (std::size_t i = 0; i < m; ++i) {
    xb[i] = initial.at(i, width);
    for (std::size_t r = 0; r < m; ++r) B[i * m + r] = initial.at(i, tab.basis()[r]);
  }
  if (solve_dense(B, xb, m)) {
    std::vector<double> x = lp.lower;
    for (std::size_t r = 0; r < m; ++r)
      if (tab.basis()[r] < n) x[tab.basis()[r]] += xb[r];
    for (std::size_t j = 0; j < n; ++j) x[j] = std::clamp(x[j], lp.lower[j], lp.upper[j]);
    if (max_violation(lp, x) < max_violation(lp, out.x)) out.x = std::move(x);
  }

  for (std::size_t j = 0; j < n; ++j) out.value += lp.objective[j] * out.x[j];
  if (max_violation(lp, out.x) > kFeasTol)
    throw SolverFailure("lp::solve: solution violates constraints beyond tolerance (" +
                        std::to_string(max_violation(lp, out.x)) + ")");
  return out;
}

}  // namespace osrl::lp
