#include "osrl/agent_sim.hpp"

#include <algorithm>
#include <limits>

namespace osrl {

double realized_profit(const UtilityModel& u, const PublicObservation& obs) {
  const std::size_t a = u.best_decision(obs.report.probs());
  return u.table()(a, obs.state) - obs.payment;
}

std::size_t best_response(const Instance& inst, const ScoringRule& s) {
  const auto v = truthful_scores(s, inst.support());
  const std::size_t K = inst.n_actions();
  std::vector<double> g(K);
  double best_g = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < K; ++k) {
    g[k] = dot(inst.q(k), v) - inst.cost(k);
    best_g = std::max(best_g, g[k]);
  }
  std::size_t best = K;
  double best_h = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    if (g[k] < best_g - kIndifference) continue;
    double h = 0.0;
    const auto q = inst.q(k);
    for (std::size_t i = 0; i < v.size(); ++i) h += q[i] * (inst.u_sigma()[i] - v[i]);
    if (best == K || h > best_h + kIndifference) {
      best = k;
      best_h = h;
    }
  }
  return best;
}

std::size_t best_response(const Instance& inst, const PaymentRule& rule) {
  return best_response(inst, tabulate(rule, inst.support()));
}

RoundOutcome Agent::play_round(const ScoringRule& s) {
  RoundOutcome out;
  out.k = best_response(inst_, s);
  out.sigma_index = rng_.categorical(inst_.q(out.k));
  out.omega = rng_.categorical(inst_.support()[out.sigma_index].probs());
  out.payment = s(out.sigma_index, out.omega);
  ++rounds_;
  return out;
}

PublicObservation Agent::interact(const PaymentRule& rule) {
  const RoundOutcome r = play_round(tabulate(rule, inst_.support()));
  return {r.k, inst_.support()[r.sigma_index], r.omega, r.payment};
}

}  // namespace osrl
