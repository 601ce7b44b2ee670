#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "osrl/agent_sim.hpp"
#include "osrl/core_model.hpp"

namespace osrl {

/// K rules, rule k inducing action k with agent-profit margin epsilon.
struct OracleSet {
  std::vector<PaymentRule> rules;
  double epsilon = 0.0;
  /// Beliefs the principal saw while building the oracle.
  BeliefSupport support;
};

/// Everything the principal is allowed to know up front.
struct PrincipalView {
  UtilityModel utility;
  double b_s = 1.0;
  double b_u = 1.0;
  std::size_t n_actions = 1;
};

struct LearnerConfig {
  /// M in the confidence width; an upper bound on the support size.
  std::size_t m_bound = 1;
  /// alpha_t = min(alpha_coef * t^(-alpha_exponent), 1); alpha_coef <= 0 means K.
  double alpha_coef = 0.0;
  double alpha_exponent = 1.0 / 3.0;
};

enum class Mode { Normal, BinarySearch };

/// Bisection on [0, 1] for the first lambda where the response becomes the target.
/// lambda_max always carries a target response, lambda_min a non-target one.
class BinarySearch {
 public:
  explicit BinarySearch(double tolerance) : tol_(tolerance) {}

  bool done() const { return hi_ - lo_ < tol_; }
  double next() const { return 0.5 * (lo_ + hi_); }
  void record(bool hit_target) {
    const double mid = next();
    (hit_target ? hi_ : lo_) = mid;
    ++probes_;
  }

  double lambda_min() const { return lo_; }
  double lambda_max() const { return hi_; }
  double tolerance() const { return tol_; }
  std::size_t probes() const { return probes_; }

 private:
  double tol_;
  double lo_ = 0.0;
  double hi_ = 1.0;
  std::size_t probes_ = 0;
};

struct RoundPlan {
  std::size_t t = 0;
  std::size_t k_star = 0;
  Mode mode = Mode::Normal;
  double alpha = 1.0;
  /// Weight of the oracle rule in the deployed rule.
  double weight = 1.0;
  ScoringRule s_opt;
  ScoringRule s_deployed;
  std::vector<double> h_lp;
};

/// Summary of a finished bisection.
struct SearchRecord {
  std::size_t t0 = 0;
  std::size_t t1 = 0;
  std::size_t target = 0;
  std::size_t k0 = 0;
  std::size_t k1 = 0;
  std::size_t probes = 0;
  double lambda_min = 0.0;
  double lambda_max = 1.0;
  double alpha_t0 = 1.0;
  double delta_t0 = 0.0;
  bool essential = false;
};

struct OptLpResult {
  double h = 0.0;
  ScoringRule s;
  bool fallback = false;
};

struct CostPaths {
  Matrix c_hat;
  Matrix i_c;
};

/// Dijkstra under edge lengths phi (infinite edges absent). c_hat sums theta along
/// the path, i_c its length; unreachable pairs get c_hat 0, i_c +inf.
CostPaths shortest_cost_paths(const Matrix& theta, const Matrix& phi);

/// Everything Opt-LP_k reads, so it can be evaluated on hand-made estimates.
struct OptLpInputs {
  const BeliefSupport* support = nullptr;
  std::vector<double> u_sigma;
  double b_s = 1.0;
  double b_u = 1.0;
  std::vector<std::vector<double>> q_hat;
  std::vector<double> iq;
  Matrix c_hat;
  Matrix i_c;
  /// Deployed (with h from the closed form) when the program is infeasible.
  const ScoringRule* fallback_rule = nullptr;
};

OptLpResult solve_optimistic_lp(const OptLpInputs& in, std::size_t k);

class Learner {
 public:
  Learner(PrincipalView view, OracleSet oracle, LearnerConfig cfg);

  // Step API: plan_round -> announce -> (agent plays) -> observe.
  RoundPlan plan_round();
  PaymentRule announce(const RoundPlan& plan) const;
  std::optional<SearchRecord> observe(const RoundPlan& plan, const PublicObservation& obs);
  /// Feed a round played outside the learner (e.g. during oracle acquisition).
  void absorb(const PaymentRule& announced, const PublicObservation& obs);

  // Estimators.
  void update_beliefs(std::size_t k, const Belief& report);
  void update_cost_bounds();
  void estimate_costs();
  OptLpResult solve_opt_lp(std::size_t k) const;
  static std::size_t select_arm(const std::vector<double>& h);

  std::size_t t() const noexcept { return t_; }
  std::size_t n_actions() const noexcept { return view_.n_actions; }
  Mode mode() const noexcept { return search_ ? Mode::BinarySearch : Mode::Normal; }
  const BeliefSupport& support() const noexcept { return support_; }
  const OracleSet& oracle() const noexcept { return oracle_; }
  std::size_t count(std::size_t k) const { return n_.at(k); }
  std::vector<double> q_hat(std::size_t k) const;
  double conf_q(std::size_t k) const;
  double alpha(std::size_t t) const;
  /// 2/eps * (I_c(i,j) + B_S (I_q(i) + I_q(j))) under the current estimates.
  double delta(std::size_t i, std::size_t j) const;

  const Matrix& c_plus() const noexcept { return c_plus_; }
  const Matrix& c_minus() const noexcept { return c_minus_; }
  const Matrix& theta() const noexcept { return theta_; }
  const Matrix& phi() const noexcept { return phi_; }
  const Matrix& c_hat() const noexcept { return c_hat_; }
  const Matrix& i_c() const noexcept { return i_c_; }

 private:
  struct Deployed {
    std::size_t k;
    std::size_t m;       // support size when deployed
    std::size_t offset;  // into tables_
  };
  struct ActiveSearch {
    BinarySearch bs;
    ScoringRule s0, s1;
    std::size_t target, k0, k1, t0;
    double alpha_t0;
    std::vector<double> iq_t0;
    Matrix ic_t0;
  };

  ScoringRule extend(const ScoringRule& s) const;
  const ScoringRule& oracle_table(std::size_t k) const;
  double score_of(const Deployed& d, std::size_t i) const;
  void record_history(std::size_t k, const ScoringRule& table);
  void grow_support(const Belief& b);

  PrincipalView view_;
  OracleSet oracle_;
  LearnerConfig cfg_;
  std::size_t t_ = 1;
  BeliefSupport support_;
  std::vector<double> u_sigma_;
  std::vector<std::size_t> n_;
  std::vector<std::vector<double>> counts_;
  std::vector<Deployed> history_;
  std::vector<double> tables_;
  // Expected scores of every deployed rule on the current support, grouped by response.
  std::vector<std::vector<double>> scores_;
  mutable std::vector<ScoringRule> oracle_tables_;
  mutable std::size_t oracle_tables_m_ = static_cast<std::size_t>(-1);
  Matrix c_plus_, c_minus_, theta_, phi_, c_hat_, i_c_;
  std::optional<ActiveSearch> search_;
};

}  // namespace osrl
