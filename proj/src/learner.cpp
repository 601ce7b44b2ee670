#include "osrl/learner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "osrl/errors.hpp"
#include "osrl/lp_solver.hpp"
#include "osrl/offline_solver.hpp"

namespace osrl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

BeliefSupport prefix(const BeliefSupport& s, std::size_t m) {
  return BeliefSupport(std::vector<Belief>(s.beliefs().begin(), s.beliefs().begin() + m));
}

}  // namespace

Learner::Learner(PrincipalView view, OracleSet oracle, LearnerConfig cfg)
    : view_(std::move(view)), oracle_(std::move(oracle)), cfg_(cfg) {
  const std::size_t K = view_.n_actions;
  if (K == 0) throw InvalidInput("Learner: need at least one action");
  if (oracle_.rules.size() != K) throw InvalidInput("Learner: oracle must supply one rule per action");
  if (oracle_.support.empty()) throw InvalidInput("Learner: oracle support is empty");
  if (oracle_.support.n_states() != view_.utility.n_states())
    throw InvalidInput("Learner: oracle support dimension mismatch");
  if (cfg_.m_bound == 0) throw InvalidInput("Learner: m_bound must be positive");
  support_ = oracle_.support;
  u_sigma_ = view_.utility.values(support_);
  n_.assign(K, 0);
  counts_.assign(K, std::vector<double>(support_.size(), 0.0));
  scores_.assign(K, {});
  c_plus_ = Matrix(K, K, kInf);
  c_minus_ = Matrix(K, K, -kInf);
  theta_ = Matrix(K, K, 0.0);
  phi_ = Matrix(K, K, kInf);
  c_hat_ = Matrix(K, K, 0.0);
  i_c_ = Matrix(K, K, kInf);
  for (std::size_t k = 0; k < K; ++k) phi_(k, k) = i_c_(k, k) = 0.0;
}

double Learner::alpha(std::size_t t) const {
  const double coef = cfg_.alpha_coef > 0.0 ? cfg_.alpha_coef : static_cast<double>(view_.n_actions);
  return std::min(coef * std::pow(static_cast<double>(t), -cfg_.alpha_exponent), 1.0);
}

double Learner::conf_q(std::size_t k) const {
  if (n_.at(k) == 0) return kInf;
  const double log_term = std::log(static_cast<double>(view_.n_actions)) +
                          static_cast<double>(cfg_.m_bound) * std::log(2.0) +
                          std::log(static_cast<double>(t_));
  return std::sqrt(2.0 * log_term / static_cast<double>(n_[k]));
}

std::vector<double> Learner::q_hat(std::size_t k) const {
  std::vector<double> q(support_.size(), 0.0);
  if (n_.at(k) == 0) return q;
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = counts_[k][i] / static_cast<double>(n_[k]);
  return q;
}

double Learner::delta(std::size_t i, std::size_t j) const {
  if (!(oracle_.epsilon > 0.0)) return kInf;
  const double w = i_c_(i, j) + view_.b_s * (conf_q(i) + conf_q(j));
  return 2.0 / oracle_.epsilon * w;
}

ScoringRule Learner::extend(const ScoringRule& s) const {
  if (s.n_reports() == support_.size()) return s;
  return extend_rule(s, prefix(support_, s.n_reports()), support_);
}

const ScoringRule& Learner::oracle_table(std::size_t k) const {
  if (oracle_tables_m_ != support_.size()) {
    oracle_tables_.clear();
    for (const auto& r : oracle_.rules) oracle_tables_.push_back(tabulate(r, support_));
    oracle_tables_m_ = support_.size();
  }
  return oracle_tables_[k];
}

double Learner::score_of(const Deployed& d, std::size_t i) const {
  const std::size_t n = support_.n_states();
  const double* tab = tables_.data() + d.offset;
  const auto p = support_[i].probs();
  auto row_dot = [&](std::size_t r) {
    double acc = 0.0;
    for (std::size_t w = 0; w < n; ++w) acc += tab[r * n + w] * p[w];
    return acc;
  };
  if (i < d.m) return row_dot(i);
  double best = -kInf;
  for (std::size_t r = 0; r < d.m; ++r) best = std::max(best, row_dot(r));
  return best;
}

void Learner::record_history(std::size_t k, const ScoringRule& table) {
  const Deployed d{k, table.n_reports(), tables_.size()};
  tables_.insert(tables_.end(), table.table().data().begin(), table.table().data().end());
  history_.push_back(d);
  for (std::size_t i = 0; i < support_.size(); ++i) scores_[k].push_back(score_of(d, i));
}

void Learner::grow_support(const Belief& b) {
  if (support_.find(b)) return;
  support_.insert(b);
  u_sigma_.push_back(view_.utility.value(b.probs()));
  for (auto& c : counts_) c.push_back(0.0);
  for (auto& s : scores_) s.clear();
  for (const auto& d : history_)
    for (std::size_t i = 0; i < support_.size(); ++i) scores_[d.k].push_back(score_of(d, i));
}

void Learner::update_beliefs(std::size_t k, const Belief& report) {
  if (k >= view_.n_actions) throw InvalidInput("update_beliefs: action out of range");
  grow_support(report);
  counts_[k][*support_.find(report)] += 1.0;
  ++n_[k];
}

void Learner::update_cost_bounds() {
  const std::size_t K = view_.n_actions, M = support_.size();
  std::vector<std::vector<double>> qh(K);
  std::vector<double> iq(K);
  for (std::size_t k = 0; k < K; ++k) {
    qh[k] = q_hat(k);
    iq[k] = conf_q(k);
  }
  // lowest[i][j] = min over rounds answered with i of <v_tau, qh_i - qh_j>.
  Matrix lowest(K, K, kInf);
  std::vector<double> a(K);
  for (std::size_t i = 0; i < K; ++i) {
    const auto& sc = scores_[i];
    if (sc.empty() || n_[i] == 0) continue;
    for (std::size_t off = 0; off < sc.size(); off += M) {
      for (std::size_t j = 0; j < K; ++j) {
        if (n_[j] == 0) continue;
        double acc = 0.0;
        for (std::size_t m = 0; m < M; ++m) acc += sc[off + m] * qh[j][m];
        a[j] = acc;
      }
      for (std::size_t j = 0; j < K; ++j)
        if (j != i && n_[j] > 0) lowest(i, j) = std::min(lowest(i, j), a[i] - a[j]);
    }
  }
  for (std::size_t i = 0; i < K; ++i)
    for (std::size_t j = 0; j < K; ++j) {
      if (i == j) {
        c_plus_(i, j) = c_minus_(i, j) = 0.0;
        continue;
      }
      const double w = view_.b_s * (iq[i] + iq[j]);
      c_plus_(i, j) = std::isfinite(lowest(i, j)) && std::isfinite(w) ? lowest(i, j) + w : kInf;
    }
  for (std::size_t i = 0; i < K; ++i)
    for (std::size_t j = 0; j < K; ++j)
      if (i != j) c_minus_(i, j) = -c_plus_(j, i);
  for (std::size_t i = 0; i < K; ++i)
    for (std::size_t j = i + 1; j < K; ++j) {
      double th = 0.0, ph = kInf;
      if (std::isfinite(c_plus_(i, j)) && std::isfinite(c_minus_(i, j))) {
        th = 0.5 * (c_plus_(i, j) + c_minus_(i, j));
        ph = std::max(0.0, 0.5 * (c_plus_(i, j) - c_minus_(i, j)));
      }
      theta_(i, j) = th;
      theta_(j, i) = -th;
      phi_(i, j) = phi_(j, i) = ph;
    }
}

CostPaths shortest_cost_paths(const Matrix& theta, const Matrix& phi) {
  const std::size_t K = phi.rows();
  CostPaths out{Matrix(K, K, 0.0), Matrix(K, K, kInf)};
  for (std::size_t k = 0; k < K; ++k) out.i_c(k, k) = 0.0;
  for (std::size_t src = 0; src < K; ++src) {
    std::vector<double> dist(K, kInf), along(K, 0.0);
    std::vector<char> done(K, 0);
    dist[src] = 0.0;
    for (std::size_t it = 0; it < K; ++it) {
      std::size_t u = K;
      for (std::size_t v = 0; v < K; ++v)
        if (!done[v] && std::isfinite(dist[v]) && (u == K || dist[v] < dist[u])) u = v;
      if (u == K) break;
      done[u] = 1;
      for (std::size_t v = 0; v < K; ++v) {
        if (done[v] || v == u || !std::isfinite(phi(u, v))) continue;
        const double nd = dist[u] + phi(u, v);
        if (nd < dist[v]) {
          dist[v] = nd;
          along[v] = along[u] + theta(u, v);
        }
      }
    }
    for (std::size_t dst = src + 1; dst < K; ++dst) {
      const bool reach = std::isfinite(dist[dst]);
      out.c_hat(src, dst) = reach ? along[dst] : 0.0;
      out.c_hat(dst, src) = -out.c_hat(src, dst);
      out.i_c(src, dst) = out.i_c(dst, src) = reach ? dist[dst] : kInf;
    }
  }
  return out;
}

void Learner::estimate_costs() {
  auto paths = shortest_cost_paths(theta_, phi_);
  c_hat_ = std::move(paths.c_hat);
  i_c_ = std::move(paths.i_c);
}

OptLpResult solve_optimistic_lp(const OptLpInputs& in, std::size_t k) {
  const auto& sup = *in.support;
  const std::size_t K = in.q_hat.size(), M = sup.size(), n = sup.n_states();
  const std::size_t W = M * n;
  const double iqk = in.iq.at(k);
  const auto& qk = in.q_hat[k];
  double uq = 0.0;
  for (std::size_t i = 0; i < M; ++i) uq += in.u_sigma[i] * qk[i];
  auto fallback = [&]() {
    OptLpResult r;
    r.s = *in.fallback_rule;
    r.fallback = true;
    r.h = std::isfinite(iqk) ? uq - dot(truthful_scores(r.s, sup), qk) + (in.b_s + in.b_u) * iqk : kInf;
    return r;
  };
  if (!std::isfinite(iqk)) return fallback();

  const double bs = in.b_s;
  lp::LinearProgram prog(W + 1);
  for (std::size_t j = 0; j < W; ++j) prog.upper[j] = bs;
  prog.lower[W] = -bs * iqk - 1.0;
  prog.upper[W] = bs + bs * iqk + 1.0;
  prog.objective[W] = -1.0;
  add_properness_rows(prog, sup);
  auto score_row = [&](const std::vector<double>& q) {
    std::vector<double> row(W + 1, 0.0);
    for (std::size_t i = 0; i < M; ++i)
      for (std::size_t w = 0; w < n; ++w) row[i * n + w] = -q[i] * sup[i][w];
    row[W] = 1.0;
    return row;
  };
  const auto row_k = score_row(qk);
  prog.add(row_k, lp::Relation::LessEq, bs * iqk);
  prog.add(row_k, lp::Relation::GreaterEq, -bs * iqk);
  for (std::size_t i = 0; i < K; ++i) {
    if (i == k) continue;
    const double iqi = in.iq[i];
    if (!std::isfinite(iqi) || !std::isfinite(in.i_c(k, i))) continue;
    prog.add(score_row(in.q_hat[i]), lp::Relation::GreaterEq, in.c_hat(k, i) - (in.i_c(k, i) + bs * iqi));
  }
  const auto res = lp::solve(prog);
  if (res.status != lp::Status::Optimal) return fallback();
  OptLpResult r;
  r.s = ScoringRule(M, n);
  for (std::size_t i = 0; i < M; ++i)
    for (std::size_t w = 0; w < n; ++w) r.s(i, w) = res.x[i * n + w];
  r.h = uq + in.b_u * iqk - res.x[W];
  return r;
}

OptLpResult Learner::solve_opt_lp(std::size_t k) const {
  const std::size_t K = view_.n_actions;
  OptLpInputs in{&support_, u_sigma_, view_.b_s, view_.b_u, {}, {}, c_hat_, i_c_, &oracle_table(k)};
  for (std::size_t i = 0; i < K; ++i) {
    in.q_hat.push_back(q_hat(i));
    in.iq.push_back(conf_q(i));
  }
  return solve_optimistic_lp(in, k);
}

std::size_t Learner::select_arm(const std::vector<double>& h) {
  if (h.empty()) throw InvalidInput("select_arm: no arms");
  std::size_t best = 0;
  for (std::size_t k = 1; k < h.size(); ++k)
    if (h[k] > h[best]) best = k;
  return best;
}

RoundPlan Learner::plan_round() {
  RoundPlan plan;
  plan.t = t_;
  if (search_) {
    const double lam = search_->bs.next();
    plan.mode = Mode::BinarySearch;
    plan.k_star = search_->target;
    plan.alpha = search_->alpha_t0;
    plan.weight = search_->alpha_t0 + (1.0 - search_->alpha_t0) * lam;
    plan.s_deployed = mix(extend(search_->s0), extend(search_->s1), lam);
    return plan;
  }
  update_cost_bounds();
  estimate_costs();
  const std::size_t K = view_.n_actions;
  std::vector<ScoringRule> rules(K);
  plan.h_lp.resize(K);
  for (std::size_t k = 0; k < K; ++k) {
    auto r = solve_opt_lp(k);
    plan.h_lp[k] = r.h;
    rules[k] = std::move(r.s);
  }
  plan.k_star = select_arm(plan.h_lp);
  plan.alpha = plan.weight = alpha(t_);
  plan.s_opt = std::move(rules[plan.k_star]);
  plan.s_deployed = mix(plan.s_opt, oracle_table(plan.k_star), plan.alpha);
  return plan;
}

PaymentRule Learner::announce(const RoundPlan& plan) const {
  return TabulatedRule{prefix(support_, plan.s_deployed.n_reports()), plan.s_deployed};
}

void Learner::absorb(const PaymentRule& announced, const PublicObservation& obs) {
  update_beliefs(obs.action, obs.report);
  record_history(obs.action, tabulate(announced, support_));
  ++t_;
}

std::optional<SearchRecord> Learner::observe(const RoundPlan& plan, const PublicObservation& obs) {
  const std::size_t K = view_.n_actions;
  if (plan.t != t_) throw InvalidInput("observe: plan is stale");
  std::vector<double> iq(K);
  for (std::size_t k = 0; k < K; ++k) iq[k] = conf_q(k);

  update_beliefs(obs.action, obs.report);
  record_history(obs.action, extend(plan.s_deployed));

  std::optional<SearchRecord> finished;
  auto finish = [&](const ActiveSearch& s) {
    SearchRecord rec;
    rec.t0 = s.t0;
    rec.t1 = t_;
    rec.target = s.target;
    rec.k0 = s.k0;
    rec.k1 = s.k1;
    rec.probes = s.bs.probes();
    rec.lambda_min = s.bs.lambda_min();
    rec.lambda_max = s.bs.lambda_max();
    rec.alpha_t0 = s.alpha_t0;
    rec.delta_t0 = oracle_.epsilon > 0.0
                       ? 2.0 / oracle_.epsilon *
                             (s.ic_t0(s.k0, s.k1) + view_.b_s * (s.iq_t0[s.k0] + s.iq_t0[s.k1]))
                       : kInf;
    rec.essential = rec.alpha_t0 < rec.delta_t0;
    finished = rec;
  };

  if (plan.mode == Mode::BinarySearch) {
    if (!search_) throw InvalidInput("observe: no active search for this plan");
    const bool hit = obs.action == search_->target;
    search_->bs.record(hit);
    (hit ? search_->k1 : search_->k0) = obs.action;
    if (search_->bs.done()) {
      finish(*search_);
      search_.reset();
    }
  } else if (obs.action != plan.k_star) {
    ActiveSearch s{BinarySearch(std::min(iq[obs.action], iq[plan.k_star])),
                   plan.s_deployed,
                   oracle_table(plan.k_star),
                   plan.k_star,
                   obs.action,
                   plan.k_star,
                   t_,
                   plan.alpha,
                   iq,
                   i_c_};
    if (s.bs.done())
      finish(s);
    else
      search_ = std::move(s);
  }
  ++t_;
  return finished;
}

}  // namespace osrl
