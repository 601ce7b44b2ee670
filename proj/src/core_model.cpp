#include "osrl/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "osrl/errors.hpp"

namespace osrl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_distribution(std::span<const double> p, const char* what) {
  if (p.empty()) throw InvalidInput(std::string(what) + ": empty distribution");
  double total = 0.0;
  for (double x : p) {
    if (!std::isfinite(x) || x < -kTol || x > 1.0 + kTol)
      throw InvalidInput(std::string(what) + ": entry outside [0,1]");
    total += x;
  }
  if (std::abs(total - 1.0) > kTol)
    throw InvalidInput(std::string(what) + ": probabilities do not sum to 1");
}

void check_shape(const ScoringRule& s, std::size_t m, std::size_t n, const char* what) {
  if (s.n_reports() != m || s.n_states() != n)
    throw InvalidInput(std::string(what) + ": scoring rule shape mismatch");
}

double quadratic_entry(std::span<const double> p, std::size_t omega) {
  double sq = 0.0;
  for (double x : p) sq += x * x;
  return 2.0 * p[omega] - sq + 1.0;
}

}  // namespace

Matrix::Matrix(const std::vector<std::vector<double>>& rows) {
  rows_ = rows.size();
  cols_ = rows.empty() ? 0 : rows.front().size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw InvalidInput("Matrix: ragged rows");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

std::vector<std::vector<double>> Matrix::to_nested() const {
  std::vector<std::vector<double>> out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i].assign(row(i).begin(), row(i).end());
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidInput("dot: length mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

StateSpace::StateSpace(std::size_t n, std::vector<std::string> names)
    : n_states(n), labels(std::move(names)) {
  if (n_states < 1) throw InvalidInput("StateSpace: need at least one state");
  if (!labels.empty() && labels.size() != n_states)
    throw InvalidInput("StateSpace: label count mismatch");
}

Belief::Belief(std::vector<double> probs) : probs_(std::move(probs)) {
  check_distribution(probs_, "Belief");
}

Belief Belief::point_mass(std::size_t n, std::size_t omega) {
  if (omega >= n) throw InvalidInput("Belief::point_mass: state out of range");
  std::vector<double> p(n, 0.0);
  p[omega] = 1.0;
  return Belief(std::move(p));
}

double linf_distance(const Belief& a, const Belief& b) {
  if (a.size() != b.size()) throw InvalidInput("linf_distance: dimension mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

double l1_distance(const Belief& a, const Belief& b) {
  if (a.size() != b.size()) throw InvalidInput("l1_distance: dimension mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
  return d;
}

BeliefSupport::BeliefSupport(std::vector<Belief> beliefs) {
  for (auto& b : beliefs) {
    if (!beliefs_.empty() && b.size() != beliefs_.front().size())
      throw InvalidInput("BeliefSupport: dimension mismatch");
    if (find(b)) throw InvalidInput("BeliefSupport: duplicate belief");
    beliefs_.push_back(std::move(b));
  }
}

std::optional<std::size_t> BeliefSupport::find(const Belief& b, double tol) const {
  for (std::size_t i = 0; i < beliefs_.size(); ++i) {
    if (beliefs_[i].size() == b.size() && linf_distance(beliefs_[i], b) <= tol) return i;
  }
  return std::nullopt;
}

std::size_t BeliefSupport::insert(const Belief& b) {
  if (auto idx = find(b)) return *idx;
  if (!beliefs_.empty() && b.size() != beliefs_.front().size())
    throw InvalidInput("BeliefSupport::insert: dimension mismatch");
  beliefs_.push_back(b);
  return beliefs_.size() - 1;
}

double BeliefSupport::min_separation() const {
  double d = kInf;
  for (std::size_t i = 0; i < beliefs_.size(); ++i)
    for (std::size_t j = i + 1; j < beliefs_.size(); ++j)
      d = std::min(d, linf_distance(beliefs_[i], beliefs_[j]));
  return d;
}

ScoringRule::ScoringRule(Matrix table) : table_(std::move(table)) {
  for (double x : table_.data())
    if (!std::isfinite(x)) throw InvalidInput("ScoringRule: non-finite payment");
}

double ScoringRule::max_entry() const {
  const auto& d = table_.data();
  return d.empty() ? 0.0 : *std::max_element(d.begin(), d.end());
}

double ScoringRule::min_entry() const {
  const auto& d = table_.data();
  return d.empty() ? 0.0 : *std::min_element(d.begin(), d.end());
}

double expected_score(const ScoringRule& s, std::size_t report_index, const Belief& belief) {
  if (report_index >= s.n_reports()) throw InvalidInput("expected_score: report index out of range");
  if (belief.size() != s.n_states()) throw InvalidInput("expected_score: dimension mismatch");
  return dot(s.row(report_index), belief.probs());
}

std::vector<double> truthful_scores(const ScoringRule& s, const BeliefSupport& support) {
  check_shape(s, support.size(), support.n_states(), "truthful_scores");
  std::vector<double> v(support.size());
  for (std::size_t i = 0; i < support.size(); ++i) v[i] = dot(s.row(i), support[i].probs());
  return v;
}

bool is_proper(const ScoringRule& s, const BeliefSupport& support, double tol) {
  if (s.n_reports() != support.size() || s.n_states() != support.n_states()) return false;
  for (std::size_t i = 0; i < support.size(); ++i) {
    const double truthful = dot(s.row(i), support[i].probs());
    for (std::size_t j = 0; j < support.size(); ++j) {
      if (j != i && truthful < dot(s.row(j), support[i].probs()) - tol) return false;
    }
  }
  return true;
}

bool is_bounded(const ScoringRule& s, double b_s, double tol) {
  return s.min_entry() >= -tol && s.max_entry() <= b_s + tol;
}

std::size_t optimal_report(const ScoringRule& s, const BeliefSupport& support, std::size_t i) {
  check_shape(s, support.size(), support.n_states(), "optimal_report");
  std::size_t best = 0;
  double best_val = -kInf;
  for (std::size_t j = 0; j < s.n_reports(); ++j) {
    const double v = dot(s.row(j), support[i].probs());
    if (v > best_val) {
      best_val = v;
      best = j;
    }
  }
  return best;
}

ScoringRule properize(const ScoringRule& raw, const BeliefSupport& support) {
  check_shape(raw, support.size(), support.n_states(), "properize");
  ScoringRule out(raw.n_reports(), raw.n_states());
  for (std::size_t i = 0; i < support.size(); ++i) {
    const std::size_t r = optimal_report(raw, support, i);
    for (std::size_t w = 0; w < raw.n_states(); ++w) out(i, w) = raw(r, w);
  }
  return out;
}

ScoringRule mix(const ScoringRule& s0, const ScoringRule& s1, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw InvalidInput("mix: lambda outside [0,1]");
  check_shape(s1, s0.n_reports(), s0.n_states(), "mix");
  ScoringRule out(s0.n_reports(), s0.n_states());
  for (std::size_t i = 0; i < s0.n_reports(); ++i)
    for (std::size_t w = 0; w < s0.n_states(); ++w)
      out(i, w) = (1.0 - lambda) * s0(i, w) + lambda * s1(i, w);
  return out;
}

ScoringRule quadratic_rule(const BeliefSupport& support, double b_s) {
  ScoringRule out(support.size(), support.n_states());
  const double c = b_s / 2.0;
  for (std::size_t i = 0; i < support.size(); ++i)
    for (std::size_t w = 0; w < support.n_states(); ++w)
      out(i, w) = c * quadratic_entry(support[i].probs(), w);
  return out;
}

ScoringRule strictify(const ScoringRule& s, const BeliefSupport& support, double b_s,
                      double weight) {
  if (!(weight >= 0.0 && weight <= 1.0)) throw InvalidInput("strictify: weight outside [0,1]");
  return mix(s, quadratic_rule(support, b_s), weight);
}

ScoringRule extend_rule(const ScoringRule& s, const BeliefSupport& from, const BeliefSupport& to) {
  const std::size_t n = to.n_states();
  ScoringRule out(to.size(), n);
  if (from.empty()) return out;
  check_shape(s, from.size(), from.n_states(), "extend_rule");
  if (from.n_states() != n && !to.empty()) throw InvalidInput("extend_rule: dimension mismatch");
  for (std::size_t i = 0; i < to.size(); ++i) {
    std::size_t r = 0;
    if (auto hit = from.find(to[i])) {
      r = *hit;
    } else {
      double best = -kInf;
      for (std::size_t j = 0; j < from.size(); ++j) {
        const double v = dot(s.row(j), to[i].probs());
        if (v > best) {
          best = v;
          r = j;
        }
      }
    }
    for (std::size_t w = 0; w < n; ++w) out(i, w) = s(r, w);
  }
  return out;
}

UtilityModel::UtilityModel(Matrix u_table) : table_(std::move(u_table)) {
  if (table_.rows() < 1 || table_.cols() < 1) throw InvalidInput("UtilityModel: empty table");
  for (double x : table_.data())
    if (!std::isfinite(x)) throw InvalidInput("UtilityModel: non-finite utility");
}

std::size_t UtilityModel::best_decision(std::span<const double> belief) const {
  std::size_t best = 0;
  double best_val = -kInf;
  for (std::size_t a = 0; a < table_.rows(); ++a) {
    const double v = dot(table_.row(a), belief);
    if (v > best_val) {
      best_val = v;
      best = a;
    }
  }
  return best;
}

double UtilityModel::value(std::span<const double> belief) const {
  return dot(table_.row(best_decision(belief)), belief);
}

std::vector<double> UtilityModel::values(const BeliefSupport& support) const {
  std::vector<double> v(support.size());
  for (std::size_t i = 0; i < support.size(); ++i) v[i] = value(support[i].probs());
  return v;
}

double UtilityModel::max_abs() const {
  double m = 0.0;
  for (double x : table_.data()) m = std::max(m, std::abs(x));
  return m;
}

InformationStructure::InformationStructure(std::vector<double> costs, BeliefSupport support,
                                           std::vector<std::vector<double>> dists)
    : costs_(std::move(costs)), support_(std::move(support)), dists_(std::move(dists)) {
  if (costs_.empty()) throw InvalidInput("InformationStructure: need at least one action");
  if (support_.empty()) throw InvalidInput("InformationStructure: empty support");
  if (dists_.size() != costs_.size())
    throw InvalidInput("InformationStructure: one distribution per action required");
  for (double c : costs_)
    if (!std::isfinite(c) || c < 0.0) throw InvalidInput("InformationStructure: negative cost");
  for (const auto& q : dists_) {
    if (q.size() != support_.size())
      throw InvalidInput("InformationStructure: distribution length != support size");
    check_distribution(q, "InformationStructure");
  }
}

double InformationStructure::min_distribution_gap() const {
  double d2 = kInf;
  for (std::size_t k = 0; k < dists_.size(); ++k)
    for (std::size_t l = 0; l < dists_.size(); ++l) {
      if (k == l) continue;
      double m = -kInf;
      for (std::size_t i = 0; i < support_.size(); ++i) m = std::max(m, dists_[k][i] - dists_[l][i]);
      d2 = std::min(d2, m);
    }
  return d2;
}

std::vector<double> InformationStructure::state_marginal(std::size_t k) const {
  std::vector<double> p(support_.n_states(), 0.0);
  const auto& q = dists_.at(k);
  for (std::size_t i = 0; i < support_.size(); ++i)
    for (std::size_t w = 0; w < p.size(); ++w) p[w] += q[i] * support_[i][w];
  return p;
}

Instance::Instance(StateSpace states, InformationStructure info, UtilityModel utility, double b_s,
                   double b_u, std::optional<std::size_t> n_observations)
    : states_(std::move(states)),
      info_(std::move(info)),
      utility_(std::move(utility)),
      b_s_(b_s),
      b_u_(b_u),
      n_observations_(n_observations) {
  if (info_.support().n_states() != states_.n_states)
    throw InvalidInput("Instance: support dimension != number of states");
  if (utility_.n_states() != states_.n_states)
    throw InvalidInput("Instance: utility table dimension != number of states");
  if (!(b_s_ > 0.0) || !std::isfinite(b_s_)) throw InvalidInput("Instance: b_s must be positive");
  if (!(b_u_ >= 0.0) || !std::isfinite(b_u_)) throw InvalidInput("Instance: b_u must be non-negative");
  if (utility_.max_abs() > b_u_ + kTol) throw InvalidInput("Instance: utility exceeds b_u");
  if (n_observations_ && info_.n_beliefs() > info_.n_actions() * *n_observations_)
    throw InvalidInput("Instance: support larger than K * |O|");
  u_sigma_ = utility_.values(info_.support());
}

double agent_profit(const Instance& inst, const ScoringRule& s, std::size_t k) {
  if (k >= inst.n_actions()) throw InvalidInput("agent_profit: action out of range");
  const auto v = truthful_scores(s, inst.support());
  return dot(inst.q(k), v) - inst.cost(k);
}

double principal_profit(const Instance& inst, const ScoringRule& s, std::size_t k) {
  if (k >= inst.n_actions()) throw InvalidInput("principal_profit: action out of range");
  const auto v = truthful_scores(s, inst.support());
  const auto q = inst.q(k);
  double h = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) h += q[i] * (inst.u_sigma()[i] - v[i]);
  return h;
}

double principal_profit_misreporting(const Instance& inst, const ScoringRule& raw, std::size_t k) {
  if (k >= inst.n_actions()) throw InvalidInput("principal_profit_misreporting: action out of range");
  const auto& sup = inst.support();
  const auto q = inst.q(k);
  double h = 0.0;
  for (std::size_t i = 0; i < sup.size(); ++i) {
    const std::size_t r = optimal_report(raw, sup, i);
    const std::size_t a = inst.utility().best_decision(sup[r].probs());
    const double util = dot(inst.utility().table().row(a), sup[i].probs());
    h += q[i] * (util - dot(raw.row(r), sup[i].probs()));
  }
  return h;
}

InformationStructure derive_information_structure(const JointObservationModel& model,
                                                  std::vector<double> costs) {
  if (model.joint.empty()) throw InvalidInput("derive_information_structure: no actions");
  if (costs.size() != model.joint.size())
    throw InvalidInput("derive_information_structure: one cost per action required");
  const std::size_t n = model.joint.front().rows();
  BeliefSupport support;
  std::vector<std::vector<std::pair<std::size_t, double>>> mass(model.joint.size());
  for (std::size_t k = 0; k < model.joint.size(); ++k) {
    const Matrix& p = model.joint[k];
    if (p.rows() != n || p.cols() == 0)
      throw InvalidInput("derive_information_structure: tensor shape mismatch");
    double total = 0.0;
    for (double x : p.data()) {
      if (!std::isfinite(x) || x < 0.0)
        throw InvalidInput("derive_information_structure: negative probability");
      total += x;
    }
    if (total <= 0.0) throw InvalidInput("derive_information_structure: tensor has no mass");
    if (std::abs(total - 1.0) > kTol)
      throw InvalidInput("derive_information_structure: tensor does not sum to 1");
    for (std::size_t o = 0; o < p.cols(); ++o) {
      double marginal = 0.0;
      for (std::size_t w = 0; w < n; ++w) marginal += p(w, o);
      if (marginal <= 0.0) continue;
      std::vector<double> post(n);
      for (std::size_t w = 0; w < n; ++w) post[w] = p(w, o) / marginal;
      mass[k].emplace_back(support.insert(Belief(std::move(post))), marginal);
    }
  }
  std::vector<std::vector<double>> dists(model.joint.size(), std::vector<double>(support.size(), 0.0));
  for (std::size_t k = 0; k < mass.size(); ++k)
    for (auto [idx, m] : mass[k]) dists[k][idx] += m;
  return InformationStructure(std::move(costs), std::move(support), std::move(dists));
}

Instance contract_to_instance(const ContractProblem& problem) {
  const std::size_t n = problem.outcome_utility.size();
  if (n == 0) throw InvalidInput("contract_to_instance: no outcomes");
  if (problem.outcome_dists.size() != problem.costs.size() || problem.costs.empty())
    throw InvalidInput("contract_to_instance: one distribution per action required");
  std::vector<Belief> points;
  for (std::size_t w = 0; w < n; ++w) points.push_back(Belief::point_mass(n, w));
  for (const auto& d : problem.outcome_dists)
    if (d.size() != n) throw InvalidInput("contract_to_instance: distribution length mismatch");
  InformationStructure info(problem.costs, BeliefSupport(std::move(points)), problem.outcome_dists);
  UtilityModel u(Matrix(std::vector<std::vector<double>>{problem.outcome_utility}));
  const double b_u = u.max_abs();
  return Instance(StateSpace(n), std::move(info), std::move(u), problem.b_s, b_u);
}

ScoringRule contract_rule(std::span<const double> contract) {
  ScoringRule out(contract.size(), contract.size());
  for (std::size_t r = 0; r < contract.size(); ++r) out(r, r) = contract[r];
  return out;
}

ScoringRule tabulate(const PaymentRule& rule, const BeliefSupport& support) {
  const std::size_t n = support.n_states();
  ScoringRule out(support.size(), n);
  if (const auto* t = std::get_if<TabulatedRule>(&rule)) return extend_rule(t->table, t->support, support);
  if (const auto* lin = std::get_if<UtilityRule>(&rule)) {
    for (std::size_t i = 0; i < support.size(); ++i) {
      const auto row = lin->utility.table().row(lin->utility.best_decision(support[i].probs()));
      for (std::size_t w = 0; w < n; ++w) out(i, w) = lin->scale * (row[w] + lin->shift);
    }
    return out;
  }
  const auto& quad = std::get<QuadraticRule>(rule);
  for (std::size_t i = 0; i < support.size(); ++i)
    for (std::size_t w = 0; w < n; ++w)
      out(i, w) = quad.scale * quadratic_entry(support[i].probs(), w) + quad.offset;
  return out;
}

}  // namespace osrl
