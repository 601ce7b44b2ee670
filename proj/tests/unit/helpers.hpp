#pragma once

#include <vector>

#include "osrl/core_model.hpp"
#include "osrl/rng.hpp"

namespace osrl::testing {

inline ScoringRule random_table(std::size_t m, std::size_t n, double hi, Rng& rng) {
  ScoringRule s(m, n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t w = 0; w < n; ++w) s(i, w) = rng.uniform(0.0, hi);
  return s;
}

inline Belief random_belief(std::size_t n, Rng& rng) {
  std::vector<double> p(n);
  double t = 0.0;
  for (auto& x : p) t += (x = rng.exponential());
  for (auto& x : p) x /= t;
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) s += p[i];
  p.back() = 1.0 - s;
  return Belief(p);
}

/// Binary-state rule from G(p) = p^2 at the given P(state 0) values:
/// S(p, state0) = G(p) + (1 - p) G'(p), S(p, state1) = G(p) - p G'(p).
inline ScoringRule schervish_square(const std::vector<double>& ps) {
  ScoringRule s(ps.size(), 2);
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const double p = ps[i];
    s(i, 0) = p * p + (1.0 - p) * 2.0 * p;
    s(i, 1) = p * p - p * 2.0 * p;
  }
  return s;
}

inline BeliefSupport binary_support(const std::vector<double>& ps) {
  std::vector<Belief> b;
  for (double p : ps) b.emplace_back(std::vector<double>{p, 1.0 - p});
  return BeliefSupport(b);
}

/// Hand-rolled instance with explicit pieces.
inline Instance make_instance(std::vector<double> costs, BeliefSupport support,
                              std::vector<std::vector<double>> q, std::vector<std::vector<double>> u,
                              double b_s = 1.0, double b_u = 1.0) {
  const std::size_t n = support.n_states();
  return Instance(StateSpace(n), InformationStructure(std::move(costs), std::move(support), std::move(q)),
                  UtilityModel(u), b_s, b_u);
}

}  // namespace osrl::testing
