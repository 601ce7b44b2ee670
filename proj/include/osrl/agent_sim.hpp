#pragma once

#include <cstddef>

#include "osrl/core_model.hpp"
#include "osrl/rng.hpp"

namespace osrl {

/// Ties in agent profit (within this tolerance) are broken toward the principal.
inline constexpr double kIndifference = 1e-9;

/// Full round outcome, indices into the agent's own support.
struct RoundOutcome {
  std::size_t k = 0;
  std::size_t sigma_index = 0;
  std::size_t omega = 0;
  double payment = 0.0;
};

/// What the principal gets to see after a round: the action, the (truthful) report,
/// the realized state and the payment made.
struct PublicObservation {
  std::size_t action = 0;
  Belief report{std::vector<double>{1.0}};
  std::size_t state = 0;
  double payment = 0.0;
};

/// u(a*(report), state) - payment.
double realized_profit(const UtilityModel& u, const PublicObservation& obs);

/// Agent-profit maximizer; ties go to the principal, then to the lowest index.
std::size_t best_response(const Instance& inst, const ScoringRule& s);
std::size_t best_response(const Instance& inst, const PaymentRule& rule);

/// Anything that answers announced payment rules with a played round.
class Environment {
 public:
  virtual ~Environment() = default;
  virtual PublicObservation interact(const PaymentRule& rule) = 0;
};

/// The simulated agent. Owns the private information structure and its own RNG stream.
class Agent : public Environment {
 public:
  Agent(Instance inst, Rng rng) : inst_(std::move(inst)), rng_(std::move(rng)) {}

  /// `s` is indexed by the agent's own support.
  RoundOutcome play_round(const ScoringRule& s);
  PublicObservation interact(const PaymentRule& rule) override;

  std::size_t rounds() const noexcept { return rounds_; }
  /// Ground truth, for tests and the harness' regret accounting only.
  const Instance& instance() const noexcept { return inst_; }

 private:
  Instance inst_;
  Rng rng_;
  std::size_t rounds_ = 0;
};

}  // namespace osrl
