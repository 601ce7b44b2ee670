#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "osrl/core_model.hpp"
#include "osrl/learner.hpp"
#include "osrl/oracle_acquisition.hpp"

namespace osrl {

// Instance generators

struct RandomInstanceSpec {
  std::size_t n_actions = 2;
  std::size_t n_beliefs = 2;
  std::size_t n_states = 2;
  double b_s = 1.0;
  double b_u = 1.0;
  double min_separation = 0.05;
};

Instance gen_random_instance(const RandomInstanceSpec& spec, std::uint64_t seed);

/// Three actions, three beliefs on two states; action 2 (index 1) is optimal and
/// inducible only at one expected-score point. Payments, utilities and costs carry a
/// state-only offset f so that point fits in [0, 1]; subtract <sigma_i, f> from the
/// expected scores to get the unshifted coordinates.
Instance gen_hard_instance(double e1);
std::vector<double> hard_instance_offset(double e1);
/// A proper table attaining that point.
ScoringRule hard_instance_optimum(double e1);

/// Three actions with decaying marginal information gain; linear contracts induce them in order.
struct DecayInstance {
  Instance instance;
  std::vector<double> thresholds;  // lambda at which action k+1 overtakes action k
  double epsilon_gap = 0.0;
  double b = 0.0;
};
DecayInstance gen_decay_instance(std::uint64_t seed);

ContractProblem gen_contract_problem(std::uint64_t seed, std::size_t n_actions = 2,
                                     std::size_t n_outcomes = 2);

/// First seed >= `start` whose ground-truth oracle margin is at least `min_margin`.
std::uint64_t find_seed_with_oracle(const RandomInstanceSpec& spec, std::uint64_t start,
                                    double min_margin, std::size_t max_tries = 1000);

// Experiments

enum class OracleMode { GivenFile, GroundTruth, RandomSampling, LinearContract, None };
enum class Policy { Osrl, RandomProper };

OracleMode parse_oracle_mode(const std::string& s);
std::string to_string(OracleMode m);

struct ExperimentConfig {
  nlohmann::json instance = {{"kind", "hard"}, {"e1", -0.25}};
  std::size_t T = 1000;
  std::vector<std::uint64_t> seeds{1};
  OracleMode oracle_mode = OracleMode::GroundTruth;
  std::string oracle_path;
  RandomSamplingParams sampling;
  LinearContractParams linear;
  LearnerConfig learner;  // m_bound 0 means "use the instance's M"
  Policy policy = Policy::Osrl;
  std::filesystem::path out_dir;
  bool per_round_trace = true;
  bool instrument = false;
  std::size_t threads = 0;
};

ExperimentConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const ExperimentConfig& cfg);
Instance build_instance(const nlohmann::json& spec);

struct TraceRow {
  std::size_t t = 0;
  long k_star = -1;
  std::size_t k_t = 0;
  double alpha = 0.0;
  double profit = 0.0;
  double cum_regret = 0.0;
  std::string mode;
  bool essential = false;
};

struct RunResult {
  std::uint64_t seed = 0;
  double h_star = 0.0;
  double final_regret = 0.0;
  double regret_at_tenth = 0.0;
  double slope = 0.0;
  std::size_t essential_bs = 0;
  std::size_t binary_searches = 0;
  std::size_t acquisition_rounds = 0;
  std::size_t mistake_checks = 0;
  std::size_t mistake_violations = 0;
  double wall_seconds = 0.0;
  std::vector<TraceRow> trace;
};

/// Runs one seed. Throws PartialOracleError when acquisition falls short.
RunResult run_single(const ExperimentConfig& cfg, const Instance& inst, std::uint64_t seed);

/// All seeds (in parallel); writes trace/summary files when out_dir is set.
std::vector<RunResult> run_experiment(const ExperimentConfig& cfg);

/// Reg(t) = t h* - sum of realized profits.
std::vector<double> compute_regret(const std::vector<double>& profits, double h_star);

/// Least-squares slope of log Reg vs log t over t >= t_min (1-based, positive Reg only).
double fit_loglog_slope(const std::vector<double>& regret, std::size_t t_min);

inline constexpr const char* kTraceVersion = "osrl-trace v1";
inline constexpr const char* kSummaryVersion = "osrl-summary v1";

void write_trace(const std::filesystem::path& path, const RunResult& run, const std::string& header);
void write_summary(const std::filesystem::path& path, const std::vector<RunResult>& runs);

}  // namespace osrl
