#pragma once

#include <cstddef>
#include <vector>

#include <json.hpp>

#include "osrl/agent_sim.hpp"
#include "osrl/core_model.hpp"
#include "osrl/learner.hpp"
#include "osrl/rng.hpp"

namespace osrl {

struct StronglyProperParams {
  double beta = 0.05;
  double b_s = 1.0;
};

/// Truthful-minus-misreport gap >= (beta/2) |sigma_i - sigma_j|_1^2 for every pair.
bool is_strongly_proper(const ScoringRule& s, const BeliefSupport& support, double beta,
                        double tol = kTol);

/// Rejection sampling from uniform tables in [row_floor, b_s]; after `max_rejections`
/// misses, a scaled quadratic rule with a random state-only offset.
ScoringRule sample_strongly_proper(const StronglyProperParams& params, const BeliefSupport& support,
                                   Rng& rng, double row_floor = 0.0,
                                   std::size_t max_rejections = 10000);

struct AcquisitionReport {
  OracleSet oracle;
  std::vector<char> found;
  std::size_t rounds = 0;            // every round played, discovery included
  std::size_t discovery_rounds = 0;
  std::size_t samples = 0;
  std::size_t probes = 0;            // rounds after discovery
  double kappa = 0.0;
  std::size_t depth = 0;             // linear contract search depth

  bool complete() const;
  std::vector<std::size_t> missing() const;
};

/// Throws PartialOracleError when some action was never induced.
void require_complete(const AcquisitionReport& report);

struct RandomSamplingParams {
  StronglyProperParams sp;
  /// Principal-side lower bound on d2; oracle epsilon = kappa * d2_config.
  double d2_config = 0.05;
  std::size_t budget = 100000;
  std::size_t m_bound = 1;
  /// Discovery stops after window_per_belief * m_bound rounds without a new belief.
  std::size_t window_per_belief = 50;
  std::size_t max_rejections = 10000;
};

AcquisitionReport random_sampling_oracle(Environment& env, std::size_t n_actions,
                                         const RandomSamplingParams& params, Rng& rng);

struct LinearContractParams {
  double epsilon_gap = 0.1;
  double b = 1.0;
  /// 0 means ceil(log2(2 b (b - eps) / eps^2)).
  std::size_t max_depth = 0;
};

std::size_t linear_contract_depth(double epsilon_gap, double b);

/// Smallest shift making u(a, omega) + shift >= 0 over the whole table.
double utility_shift(const UtilityModel& u);

AcquisitionReport linear_contract_oracle(Environment& env, const UtilityModel& utility,
                                         std::size_t n_actions, const LinearContractParams& params);

/// Max-margin rules computed from the true instance; epsilon is half the smallest margin.
OracleSet ground_truth_oracle(const Instance& inst, std::vector<double>* margins = nullptr);

struct OracleCheck {
  bool valid = false;
  double min_margin = 0.0;
  std::vector<std::size_t> responses;
};

/// Does rule k induce k with margin > epsilon (ground truth)?
OracleCheck verify_oracle(const Instance& inst, const OracleSet& oracle);

/// Fraction of sampled rules landing in each kappa-margin region.
std::vector<double> measure_region_volumes(const Instance& inst, const StronglyProperParams& params,
                                           std::size_t samples, Rng& rng,
                                           std::size_t max_rejections = 10000);

nlohmann::json oracle_to_json(const OracleSet& oracle);
OracleSet oracle_from_json(const nlohmann::json& doc);

}  // namespace osrl
