#include "osrl/oracle_acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "osrl/errors.hpp"
#include "osrl/instance_io.hpp"
#include "osrl/offline_solver.hpp"

namespace osrl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double kappa_for(const BeliefSupport& support, double beta) {
  const double d1 = std::min(support.min_separation(), 1.0);
  return d1 * d1 * beta / 2.0;
}

}  // namespace

bool AcquisitionReport::complete() const {
  return std::all_of(found.begin(), found.end(), [](char f) { return f != 0; });
}

std::vector<std::size_t> AcquisitionReport::missing() const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < found.size(); ++k)
    if (!found[k]) out.push_back(k);
  return out;
}

void require_complete(const AcquisitionReport& report) {
  if (report.complete()) return;
  std::string msg = "oracle acquisition incomplete; missing actions:";
  for (auto k : report.missing()) msg += " " + std::to_string(k);
  throw PartialOracleError(msg, report.missing());
}

bool is_strongly_proper(const ScoringRule& s, const BeliefSupport& support, double beta,
                        double tol) {
  if (s.n_reports() != support.size() || s.n_states() != support.n_states()) return false;
  for (std::size_t i = 0; i < support.size(); ++i) {
    const double truthful = dot(s.row(i), support[i].probs());
    for (std::size_t j = 0; j < support.size(); ++j) {
      if (i == j) continue;
      const double l1 = l1_distance(support[i], support[j]);
      if (truthful - dot(s.row(j), support[i].probs()) < 0.5 * beta * l1 * l1 - tol) return false;
    }
  }
  return true;
}

ScoringRule sample_strongly_proper(const StronglyProperParams& params, const BeliefSupport& support,
                                   Rng& rng, double row_floor, std::size_t max_rejections) {
  const std::size_t m = support.size(), n = support.n_states();
  if (m == 0) throw InvalidInput("sample_strongly_proper: empty support");
  if (row_floor < 0.0 || row_floor > params.b_s)
    throw ConfigError("sample_strongly_proper: row floor outside [0, b_s]");
  ScoringRule s(m, n);
  for (std::size_t attempt = 0; attempt < max_rejections; ++attempt) {
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t w = 0; w < n; ++w) s(i, w) = rng.uniform(row_floor, params.b_s);
    if (is_strongly_proper(s, support, params.beta)) return s;
  }
  // c (2 p(w) - |p|^2 + 1) has gap c |p - q|_2^2 >= (c / n) |p - q|_1^2.
  const double c_min = static_cast<double>(n) * params.beta / 2.0;
  const double c_max = (params.b_s - row_floor) / 2.0;
  if (c_min > c_max + kTol)
    throw ConfigError("sample_strongly_proper: beta too large for the payment bound");
  const double c = rng.uniform(c_min, std::max(c_min, c_max));
  std::vector<double> f(n);
  for (auto& x : f) x = rng.uniform(row_floor, std::max(row_floor, params.b_s - 2.0 * c));
  const auto quad = quadratic_rule(support, 2.0 * c);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t w = 0; w < n; ++w) s(i, w) = std::min(quad(i, w) + f[w], params.b_s);
  return s;
}

AcquisitionReport random_sampling_oracle(Environment& env, std::size_t n_actions,
                                         const RandomSamplingParams& params, Rng& rng) {
  AcquisitionReport rep;
  rep.found.assign(n_actions, 0);
  BeliefSupport support;
  auto play = [&](const PaymentRule& rule) {
    auto obs = env.interact(rule);
    ++rep.rounds;
    const bool fresh = !support.find(obs.report);
    if (fresh) support.insert(obs.report);
    return std::make_pair(obs, fresh);
  };

  const PaymentRule discovery = QuadraticRule{params.sp.b_s / 2.0, 0.0};
  const std::size_t window = params.window_per_belief * std::max<std::size_t>(params.m_bound, 1);
  for (std::size_t quiet = 0; quiet < window && rep.rounds < params.budget;) {
    quiet = play(discovery).second ? 0 : quiet + 1;
  }
  rep.discovery_rounds = rep.rounds;

  std::vector<PaymentRule> rules(n_actions, discovery);
  double kappa_used = kInf;
  while (!rep.complete() && rep.rounds < params.budget) {
    const BeliefSupport snap = support;
    const double kappa = kappa_for(snap, params.sp.beta);
    ScoringRule s = sample_strongly_proper(params.sp, snap, rng, kappa, params.max_rejections);
    ++rep.samples;
    const auto [obs, fresh] = play(TabulatedRule{snap, s});
    if (fresh || rep.found[obs.action]) continue;
    bool ok = true;
    std::size_t done = 0;
    for (; done < snap.size() && rep.rounds < params.budget; ++done) {
      ScoringRule probe = s;
      for (std::size_t w = 0; w < snap.n_states(); ++w) probe(done, w) -= kappa;
      if (play(TabulatedRule{snap, probe}).first.action != obs.action) {
        ok = false;
        break;
      }
    }
    if (ok && done == snap.size()) {
      rep.found[obs.action] = 1;
      rules[obs.action] = TabulatedRule{snap, s};
      kappa_used = std::min(kappa_used, kappa);
    }
  }
  rep.probes = rep.rounds - rep.discovery_rounds;
  rep.kappa = std::isfinite(kappa_used) ? kappa_used : kappa_for(support, params.sp.beta);
  rep.oracle.rules = std::move(rules);
  rep.oracle.epsilon = rep.kappa * params.d2_config;
  rep.oracle.support = std::move(support);
  return rep;
}

std::size_t linear_contract_depth(double epsilon_gap, double b) {
  if (!(epsilon_gap > 0.0) || b < epsilon_gap)
    throw ConfigError("linear contract: need epsilon > 0 and b >= epsilon");
  const double ratio = 2.0 * b * (b - epsilon_gap) / (epsilon_gap * epsilon_gap);
  return ratio <= 1.0 ? 0 : static_cast<std::size_t>(std::ceil(std::log2(ratio)));
}

double utility_shift(const UtilityModel& u) {
  double lo = 0.0;
  for (double x : u.table().data()) lo = std::min(lo, x);
  return -lo;
}

AcquisitionReport linear_contract_oracle(Environment& env, const UtilityModel& utility,
                                         std::size_t n_actions, const LinearContractParams& params) {
  const std::size_t depth =
      params.max_depth > 0 ? params.max_depth : linear_contract_depth(params.epsilon_gap, params.b);
  const double shift = utility_shift(utility);
  const double top = 2.0 / params.epsilon_gap;
  AcquisitionReport rep;
  rep.found.assign(n_actions, 0);
  rep.depth = depth;
  BeliefSupport support;
  std::map<double, std::size_t> response;
  std::vector<double> value_sum(n_actions, 0.0), value_n(n_actions, 0.0);

  auto probe = [&](double lam) {
    const auto obs = env.interact(UtilityRule{utility, lam, shift});
    ++rep.rounds;
    support.insert(obs.report);
    response[lam] = obs.action;
    rep.found[obs.action] = 1;
    value_sum[obs.action] += utility.value(obs.report.probs()) + shift;
    value_n[obs.action] += 1.0;
    return obs.action;
  };

  struct Segment {
    double lo, hi;
    std::size_t level;
  };
  std::vector<Segment> stack;
  if (probe(0.0) != probe(top)) stack.push_back({0.0, top, 0});
  while (!stack.empty()) {
    const Segment seg = stack.back();
    stack.pop_back();
    if (seg.level >= depth) continue;
    const double mid = 0.5 * (seg.lo + seg.hi);
    const std::size_t k = probe(mid);
    if (k != response[seg.hi]) stack.push_back({mid, seg.hi, seg.level + 1});
    if (k != response[seg.lo]) stack.push_back({seg.lo, mid, seg.level + 1});
  }

  rep.oracle.rules.assign(n_actions, UtilityRule{utility, 0.0, shift});
  std::vector<double> width(n_actions, -1.0);
  for (auto it = response.begin(); it != response.end(); ++it) {
    const std::size_t k = it->second;
    auto next = std::next(it);
    double lo = it->first, hi = it->first;
    if (next != response.end() && next->second == k) hi = next->first;
    if (hi - lo > width[k]) {
      width[k] = hi - lo;
      rep.oracle.rules[k] = UtilityRule{utility, 0.5 * (lo + hi), shift};
    }
  }
  // u_1: mean (shifted) utility at the reported beliefs of the action seen at lambda = 0.
  const std::size_t first = response.begin()->second;
  const double u1 = value_n[first] > 0.0 ? std::max(0.0, value_sum[first] / value_n[first]) : 0.0;
  rep.oracle.epsilon = params.epsilon_gap * u1 / (4.0 * params.b * params.b);
  rep.oracle.support = std::move(support);
  rep.probes = rep.rounds;
  return rep;
}

OracleSet ground_truth_oracle(const Instance& inst, std::vector<double>* margins) {
  OracleSet out;
  out.support = inst.support();
  double lo = kInf;
  for (std::size_t k = 0; k < inst.n_actions(); ++k) {
    auto mr = max_margin_rule(inst, k);
    if (margins) margins->push_back(mr.margin);
    lo = std::min(lo, mr.margin);
    out.rules.push_back(TabulatedRule{inst.support(), std::move(mr.rule)});
  }
  out.epsilon = std::isfinite(lo) ? std::max(0.0, 0.5 * lo) : 1.0;
  return out;
}

OracleCheck verify_oracle(const Instance& inst, const OracleSet& oracle) {
  OracleCheck chk;
  chk.valid = oracle.rules.size() == inst.n_actions();
  chk.min_margin = kInf;
  for (std::size_t k = 0; k < oracle.rules.size() && k < inst.n_actions(); ++k) {
    const auto s = tabulate(oracle.rules[k], inst.support());
    chk.responses.push_back(best_response(inst, s));
    double margin = kInf;
    const double gk = agent_profit(inst, s, k);
    for (std::size_t l = 0; l < inst.n_actions(); ++l)
      if (l != k) margin = std::min(margin, gk - agent_profit(inst, s, l));
    chk.min_margin = std::min(chk.min_margin, margin);
    if (chk.responses.back() != k || !(margin > oracle.epsilon)) chk.valid = false;
  }
  return chk;
}

std::vector<double> measure_region_volumes(const Instance& inst, const StronglyProperParams& params,
                                           std::size_t samples, Rng& rng,
                                           std::size_t max_rejections) {
  const double kappa = kappa_for(inst.support(), params.beta);
  std::vector<double> hits(inst.n_actions(), 0.0);
  for (std::size_t s = 0; s < samples; ++s) {
    const auto rule = sample_strongly_proper(params, inst.support(), rng, kappa, max_rejections);
    std::vector<double> g(inst.n_actions());
    for (std::size_t k = 0; k < g.size(); ++k) g[k] = agent_profit(inst, rule, k);
    for (std::size_t k = 0; k < g.size(); ++k) {
      bool in = true;
      for (std::size_t l = 0; l < g.size() && in; ++l)
        if (l != k && g[k] < g[l] + kappa) in = false;
      if (in) hits[k] += 1.0;
    }
  }
  for (auto& h : hits) h /= static_cast<double>(std::max<std::size_t>(samples, 1));
  return hits;
}

nlohmann::json oracle_to_json(const OracleSet& oracle) {
  nlohmann::json rules = nlohmann::json::array();
  for (const auto& r : oracle.rules) {
    if (const auto* t = std::get_if<TabulatedRule>(&r)) {
      rules.push_back({{"kind", "table"}, {"support", support_to_json(t->support)},
                       {"table", rule_to_json(t->table)}});
    } else if (const auto* u = std::get_if<UtilityRule>(&r)) {
      rules.push_back({{"kind", "utility"}, {"utility", u->utility.table().to_nested()},
                       {"scale", u->scale}, {"shift", u->shift}});
    } else {
      const auto& q = std::get<QuadraticRule>(r);
      rules.push_back({{"kind", "quadratic"}, {"scale", q.scale}, {"offset", q.offset}});
    }
  }
  return {{"epsilon", oracle.epsilon}, {"support", support_to_json(oracle.support)}, {"rules", rules}};
}

OracleSet oracle_from_json(const nlohmann::json& doc) {
  try {
    OracleSet out;
    out.epsilon = doc.at("epsilon").get<double>();
    out.support = support_from_json(doc.at("support"));
    for (const auto& r : doc.at("rules")) {
      const auto kind = r.at("kind").get<std::string>();
      if (kind == "table") {
        out.rules.push_back(TabulatedRule{support_from_json(r.at("support")), rule_from_json(r.at("table"))});
      } else if (kind == "utility") {
        out.rules.push_back(UtilityRule{UtilityModel(r.at("utility").get<std::vector<std::vector<double>>>()),
                                        r.at("scale").get<double>(), r.at("shift").get<double>()});
      } else if (kind == "quadratic") {
        out.rules.push_back(QuadraticRule{r.at("scale").get<double>(), r.at("offset").get<double>()});
      } else {
        throw InvalidInput("oracle json: unknown rule kind '" + kind + "'");
      }
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("oracle json: ") + e.what());
  }
}

}  // namespace osrl
