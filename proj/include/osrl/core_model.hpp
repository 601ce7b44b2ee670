#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace osrl {

/// Absolute tolerance for probability sums, properness comparisons and belief deduplication.
inline constexpr double kTol = 1e-9;

// Small dense matrix (row-major). Used for payment tables, cost-difference
// matrices and joint observation tensors.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  explicit Matrix(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  const std::vector<double>& data() const noexcept { return data_; }
  std::vector<std::vector<double>> to_nested() const;

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

double dot(std::span<const double> a, std::span<const double> b);

// States and beliefs

/// The hidden-state space Omega; labels are for display only.
struct StateSpace {
  std::size_t n_states = 1;
  std::vector<std::string> labels;

  explicit StateSpace(std::size_t n = 1, std::vector<std::string> names = {});
};

/// A probability vector over Omega.
class Belief {
 public:
  explicit Belief(std::vector<double> probs);

  std::size_t size() const noexcept { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> probs() const noexcept { return probs_; }

  /// Point mass on state `omega` of an `n`-state space.
  static Belief point_mass(std::size_t n, std::size_t omega);

  bool operator==(const Belief&) const = default;

 private:
  std::vector<double> probs_;
};

double linf_distance(const Belief& a, const Belief& b);
double l1_distance(const Belief& a, const Belief& b);

/// Finite set Sigma of distinct beliefs, indexed 0..M-1. An empty support is
/// allowed on the principal side, where Sigma is discovered from reports.
class BeliefSupport {
 public:
  BeliefSupport() = default;
  explicit BeliefSupport(std::vector<Belief> beliefs);

  std::size_t size() const noexcept { return beliefs_.size(); }
  bool empty() const noexcept { return beliefs_.empty(); }
  const Belief& operator[](std::size_t i) const { return beliefs_[i]; }
  const std::vector<Belief>& beliefs() const noexcept { return beliefs_; }
  /// Number of states; 0 for an empty support.
  std::size_t n_states() const noexcept { return beliefs_.empty() ? 0 : beliefs_.front().size(); }

  /// Index of the belief within L-infinity distance `tol`, if present.
  std::optional<std::size_t> find(const Belief& b, double tol = kTol) const;
  /// Returns the index of `b`, appending it when absent.
  std::size_t insert(const Belief& b);

  /// d1: minimum pairwise L-infinity distance (+inf when M < 2).
  double min_separation() const;

 private:
  std::vector<Belief> beliefs_;
};

// Scoring rules

/// Payment table over (support belief, state): table(i, j) = S(sigma_i, omega_j).
class ScoringRule {
 public:
  ScoringRule() = default;
  ScoringRule(std::size_t n_reports, std::size_t n_states, double fill = 0.0)
      : table_(n_reports, n_states, fill) {}
  explicit ScoringRule(Matrix table);
  explicit ScoringRule(const std::vector<std::vector<double>>& rows) : ScoringRule(Matrix(rows)) {}

  std::size_t n_reports() const noexcept { return table_.rows(); }
  std::size_t n_states() const noexcept { return table_.cols(); }

  double operator()(std::size_t i, std::size_t j) const { return table_(i, j); }
  double& operator()(std::size_t i, std::size_t j) { return table_(i, j); }
  std::span<const double> row(std::size_t i) const { return table_.row(i); }
  const Matrix& table() const noexcept { return table_; }

  double max_entry() const;
  double min_entry() const;

  bool operator==(const ScoringRule&) const = default;

 private:
  Matrix table_;
};

/// sum_omega belief(omega) * S(report_index, omega).
double expected_score(const ScoringRule& s, std::size_t report_index, const Belief& belief);

/// Truthful expected scores S(sigma_i) for every support point.
std::vector<double> truthful_scores(const ScoringRule& s, const BeliefSupport& support);

/// Properness restricted to the support: truthful expected score beats every
/// other row by at least -tol.
bool is_proper(const ScoringRule& s, const BeliefSupport& support, double tol = kTol);

/// Bounded in [0, b_s] entrywise.
bool is_bounded(const ScoringRule& s, double b_s, double tol = kTol);

/// The agent's optimal report at support point i: argmax_j E_{sigma_i} S(j, .), lowest j on ties.
std::size_t optimal_report(const ScoringRule& s, const BeliefSupport& support, std::size_t i);

/// Re-index each belief to its optimal report under `raw`; the result is proper
/// and pays every belief exactly its optimal-report expected score.
ScoringRule properize(const ScoringRule& raw, const BeliefSupport& support);

/// Entrywise (1 - lambda) * s0 + lambda * s1.
ScoringRule mix(const ScoringRule& s0, const ScoringRule& s1, double lambda);

/// Quadratic (Brier-type) rule c * (2 p(omega) - |p|^2 + 1) tabulated on `support`, with
/// c = b_s / 2 so entries lie in [0, b_s].
ScoringRule quadratic_rule(const BeliefSupport& support, double b_s);

/// Blend with the quadratic rule at weight `weight`; strictly proper on the support
/// whenever `s` is proper and weight > 0.
ScoringRule strictify(const ScoringRule& s, const BeliefSupport& support, double b_s,
                      double weight = 1e-6);

/// Off-support extension: each belief of `to` takes the row of `from` that maximizes
/// its expected score (exact row reuse when the belief is in `from`). An empty `from`
/// yields the zero rule.
ScoringRule extend_rule(const ScoringRule& s, const BeliefSupport& from, const BeliefSupport& to);

// Principal utility

/// u(a, omega) for principal decisions a in A.
class UtilityModel {
 public:
  UtilityModel() = default;
  explicit UtilityModel(Matrix u_table);
  explicit UtilityModel(const std::vector<std::vector<double>>& rows) : UtilityModel(Matrix(rows)) {}

  const Matrix& table() const noexcept { return table_; }
  std::size_t n_decisions() const noexcept { return table_.rows(); }
  std::size_t n_states() const noexcept { return table_.cols(); }

  /// a*(sigma): lowest-index maximizer of expected utility.
  std::size_t best_decision(std::span<const double> belief) const;
  /// u(sigma) = max_a E_sigma u(a, .).
  double value(std::span<const double> belief) const;
  std::vector<double> values(const BeliefSupport& support) const;
  double max_abs() const;

 private:
  Matrix table_;
};

// Information structure and instances

/// The agent's private model: per-action costs and belief distributions over Sigma.
class InformationStructure {
 public:
  InformationStructure(std::vector<double> costs, BeliefSupport support,
                       std::vector<std::vector<double>> dists);

  std::size_t n_actions() const noexcept { return costs_.size(); }
  std::size_t n_beliefs() const noexcept { return support_.size(); }
  double cost(std::size_t k) const { return costs_.at(k); }
  const std::vector<double>& costs() const noexcept { return costs_; }
  const BeliefSupport& support() const noexcept { return support_; }
  std::span<const double> q(std::size_t k) const { return dists_.at(k); }
  const std::vector<std::vector<double>>& dists() const noexcept { return dists_; }

  /// d2 = min over ordered action pairs (k, k') of max_i [q_k(i) - q_k'(i)].
  double min_distribution_gap() const;
  /// Prior marginal over states under action k: sum_i q_k(i) sigma_i.
  std::vector<double> state_marginal(std::size_t k) const;

 private:
  std::vector<double> costs_;
  BeliefSupport support_;
  std::vector<std::vector<double>> dists_;
};

/// A complete game: information structure, principal utility and bounds.
class Instance {
 public:
  Instance(StateSpace states, InformationStructure info, UtilityModel utility, double b_s,
           double b_u, std::optional<std::size_t> n_observations = std::nullopt);

  const StateSpace& states() const noexcept { return states_; }
  const InformationStructure& info() const noexcept { return info_; }
  const UtilityModel& utility() const noexcept { return utility_; }
  double b_s() const noexcept { return b_s_; }
  double b_u() const noexcept { return b_u_; }
  std::optional<std::size_t> n_observations() const noexcept { return n_observations_; }

  std::size_t n_actions() const noexcept { return info_.n_actions(); }
  std::size_t n_beliefs() const noexcept { return info_.n_beliefs(); }
  std::size_t n_states() const noexcept { return states_.n_states; }
  const BeliefSupport& support() const noexcept { return info_.support(); }
  std::span<const double> q(std::size_t k) const { return info_.q(k); }
  double cost(std::size_t k) const { return info_.cost(k); }
  /// u(sigma_i) for every support point.
  const std::vector<double>& u_sigma() const noexcept { return u_sigma_; }

 private:
  StateSpace states_;
  InformationStructure info_;
  UtilityModel utility_;
  double b_s_;
  double b_u_;
  std::optional<std::size_t> n_observations_;
  std::vector<double> u_sigma_;
};

/// g(k, S) = E_{sigma ~ q_k} S(sigma) - c_k.
double agent_profit(const Instance& inst, const ScoringRule& s, std::size_t k);

/// h = E_{sigma ~ q_k} [u(sigma) - S(sigma)] with truthful reports.
double principal_profit(const Instance& inst, const ScoringRule& s, std::size_t k);

/// Principal profit when the agent reports optimally (possibly untruthfully) under `raw`
/// and the principal acts on the report.
double principal_profit_misreporting(const Instance& inst, const ScoringRule& raw, std::size_t k);

/// K joint tensors p(omega, o | b_k), each |Omega| x |O|.
struct JointObservationModel {
  std::vector<Matrix> joint;
};

/// Bayes posteriors pooled over actions and observations, deduplicated at kTol.
InformationStructure derive_information_structure(const JointObservationModel& model,
                                                  std::vector<double> costs);

// Contract design as a special case

/// Outcome-payment model: p(omega | b_k) rows, costs, outcome utilities u(omega).
struct ContractProblem {
  std::vector<std::vector<double>> outcome_dists;
  std::vector<double> costs;
  std::vector<double> outcome_utility;
  double b_s = 1.0;
};

/// Instance with Sigma = point masses and q_k(e_omega) = p(omega | b_k).
Instance contract_to_instance(const ContractProblem& problem);

/// Rule in the contract class: S(e_r, omega) = [r == omega] * C(omega).
ScoringRule contract_rule(std::span<const double> contract);

// Payment rules as announced to the agent. The agent evaluates whichever form it
// receives on its own (private) support.

/// A table over the principal's known beliefs; off-support reports use extend_rule.
struct TabulatedRule {
  BeliefSupport support;
  ScoringRule table;
};

/// S(sigma, omega) = scale * (u(a*(sigma), omega) + shift).
struct UtilityRule {
  UtilityModel utility;
  double scale = 0.0;
  double shift = 0.0;
};

/// S(p, omega) = scale * (2 p(omega) - |p|^2 + 1) + offset.
struct QuadraticRule {
  double scale = 0.0;
  double offset = 0.0;
};

using PaymentRule = std::variant<TabulatedRule, UtilityRule, QuadraticRule>;

/// Evaluate a payment rule as a table on `support`.
ScoringRule tabulate(const PaymentRule& rule, const BeliefSupport& support);

}  // namespace osrl
