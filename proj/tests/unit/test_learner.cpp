#include <doctest.h>

#include <cmath>
#include <limits>
#include <type_traits>

#include "helpers.hpp"
#include "osrl/agent_sim.hpp"
#include "osrl/errors.hpp"
#include "osrl/harness.hpp"
#include "osrl/learner.hpp"
#include "osrl/offline_solver.hpp"
#include "osrl/oracle_acquisition.hpp"

using namespace osrl;
using osrl::testing::binary_support;
using osrl::testing::make_instance;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

BeliefSupport point_masses() { return BeliefSupport({Belief({1.0, 0.0}), Belief({0.0, 1.0})}); }

Learner bare_learner(std::size_t K, const BeliefSupport& support, std::size_t m_bound,
                     double epsilon = 0.1, double b_s = 1.0) {
  OracleSet oracle;
  for (std::size_t k = 0; k < K; ++k)
    oracle.rules.push_back(TabulatedRule{support, ScoringRule(support.size(), support.n_states(), 0.1 * k)});
  oracle.epsilon = epsilon;
  oracle.support = support;
  PrincipalView view{UtilityModel(Matrix({{1.0, 0.0}, {0.0, 1.0}})), b_s, 1.0, K};
  LearnerConfig cfg;
  cfg.m_bound = m_bound;
  return Learner(view, oracle, cfg);
}

PaymentRule diag_rule(double a, double b) {
  ScoringRule s(2, 2, 0.0);
  s(0, 0) = a;
  s(1, 1) = b;
  return TabulatedRule{point_masses(), s};
}

PublicObservation seen(std::size_t k, std::size_t belief) {
  return {k, Belief::point_mass(2, belief), belief, 0.0};
}

// Map learner support indices onto the instance's beliefs.
std::vector<double> true_q_on(const Instance& inst, const BeliefSupport& sup, std::size_t k) {
  std::vector<double> q(sup.size(), 0.0);
  for (std::size_t i = 0; i < sup.size(); ++i) q[i] = inst.q(k)[*inst.support().find(sup[i])];
  return q;
}

}  // namespace

TEST_SUITE("learner") {

TEST_CASE("belief estimates") {
  auto L = bare_learner(2, binary_support({0.2, 0.5, 0.8}), 3);
  L.update_beliefs(0, Belief({0.8, 0.2}));
  CHECK(L.q_hat(0) == std::vector<double>{0.0, 0.0, 1.0});
  L.update_beliefs(1, Belief({0.2, 0.8}));
  L.update_beliefs(1, Belief({0.5, 0.5}));
  CHECK(L.q_hat(1) == std::vector<double>{0.5, 0.5, 0.0});
  CHECK(L.count(1) == 2);
  // unseen belief grows the support
  L.update_beliefs(1, Belief({0.9, 0.1}));
  CHECK(L.support().size() == 4);
  CHECK(L.q_hat(1).size() == 4);
  CHECK_THROWS_AS(L.update_beliefs(2, Belief({0.2, 0.8})), InvalidInput);

  auto big = bare_learner(2, binary_support({0.3, 0.6}), 2);
  Rng rng(4);
  const std::vector<double> q{0.3, 0.7};
  for (int n = 0; n < 1000; ++n)
    big.update_beliefs(0, big.support()[rng.categorical(q)]);
  for (std::size_t i = 0; i < 2; ++i)
    CHECK(std::abs(big.q_hat(0)[i] - q[i]) <= 3.0 * std::sqrt(0.21 / 1000));
}

TEST_CASE("confidence width") {
  auto L = bare_learner(2, binary_support({0.2, 0.5, 0.8}), 3);
  CHECK(L.conf_q(0) == kInf);
  const auto sup = L.support();
  for (int r = 0; r < 99; ++r) {
    const std::size_t k = r < 8 ? 0 : 1;
    L.absorb(TabulatedRule{sup, ScoringRule(3, 2, 0.0)}, {k, sup[0], 0, 0.0});
  }
  REQUIRE(L.t() == 100);
  REQUIRE(L.count(0) == 8);
  CHECK(L.conf_q(0) == doctest::Approx(1.3581).epsilon(1e-4));
  CHECK(L.conf_q(0) == doctest::Approx(std::sqrt(2.0 * std::log(1600.0) / 8.0)));
  // four times the data at the same t halves the width
  auto M = bare_learner(2, binary_support({0.2, 0.5, 0.8}), 3);
  for (int r = 0; r < 99; ++r)
    M.absorb(TabulatedRule{sup, ScoringRule(3, 2, 0.0)}, {std::size_t(r < 32 ? 0 : 1), sup[0], 0, 0.0});
  CHECK(M.conf_q(0) == doctest::Approx(0.5 * L.conf_q(0)));
}

TEST_CASE("cost bounds start as sentinels") {
  auto L = bare_learner(3, point_masses(), 2);
  L.update_cost_bounds();
  L.estimate_costs();
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      if (i == j) continue;
      CHECK(L.c_plus()(i, j) == kInf);
      CHECK(L.c_minus()(i, j) == -kInf);
      CHECK(L.phi()(i, j) == kInf);
      CHECK(L.i_c()(i, j) == kInf);
    }
}

TEST_CASE("one answered round leaves the bounds vacuous") {
  // the other action has no data, so its confidence width is infinite
  auto L = bare_learner(2, point_masses(), 2);
  L.absorb(diag_rule(0.4, 0.1), seen(0, 0));
  L.update_cost_bounds();
  CHECK(L.c_plus()(0, 1) == kInf);
  CHECK(L.c_minus()(0, 1) == -kInf);
}

TEST_CASE("cost bounds on a hand-computed history") {
  auto L = bare_learner(2, point_masses(), 2, 0.2);
  L.absorb(diag_rule(0.4, 0.1), seen(0, 0));
  L.absorb(diag_rule(0.2, 0.6), seen(1, 1));
  L.absorb(diag_rule(0.5, 0.3), seen(0, 1));
  L.update_cost_bounds();
  L.estimate_costs();
  // q0 = (1/2, 1/2), q1 = (0, 1), t = 4, K = 2, M = 2
  const double w = std::sqrt(2.0 * std::log(32.0) / 2.0) + std::sqrt(2.0 * std::log(32.0) / 1.0);
  // rounds answered with 0: differences 0.25 - 0.1 and 0.4 - 0.3
  CHECK(L.c_plus()(0, 1) == doctest::Approx(0.1 + w));
  // the round answered with 1: 0.4 - 0.6
  CHECK(L.c_minus()(0, 1) == doctest::Approx(-0.2 - w));
  CHECK(L.theta()(0, 1) == doctest::Approx(-0.05));
  CHECK(L.theta()(1, 0) == doctest::Approx(0.05));
  CHECK(L.phi()(0, 1) == doctest::Approx(0.15 + w));
  CHECK(L.c_hat()(0, 1) == doctest::Approx(-0.05));
  CHECK(L.i_c()(1, 0) == doctest::Approx(0.15 + w));
  // perturbation threshold from the same numbers
  CHECK(L.delta(0, 1) == doctest::Approx(2.0 / 0.2 * (0.15 + w + w)));
}

TEST_CASE("shortest cost paths") {
  Matrix theta(3, 3, 0.0), phi(3, 3, kInf);
  auto set = [&](std::size_t i, std::size_t j, double th, double ph) {
    theta(i, j) = th, theta(j, i) = -th;
    phi(i, j) = phi(j, i) = ph;
  };
  for (std::size_t i = 0; i < 3; ++i) phi(i, i) = 0.0;
  set(0, 1, 0.3, 1.0);
  set(1, 2, -0.1, 1.0);
  set(0, 2, 0.9, 5.0);
  auto p = shortest_cost_paths(theta, phi);
  CHECK(p.i_c(0, 2) == doctest::Approx(2.0));
  CHECK(p.c_hat(0, 2) == doctest::Approx(0.2));
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(p.c_hat(i, j) == doctest::Approx(-p.c_hat(j, i)));
      CHECK(p.i_c(i, j) == doctest::Approx(p.i_c(j, i)));
    }

  Matrix t2(2, 2, 0.0), p2(2, 2, 0.0);
  t2(0, 1) = 0.7, t2(1, 0) = -0.7;
  p2(0, 1) = p2(1, 0) = 0.25;
  auto two = shortest_cost_paths(t2, p2);
  CHECK(two.c_hat(0, 1) == doctest::Approx(0.7));
  CHECK(two.i_c(0, 1) == doctest::Approx(0.25));

  Matrix t3(3, 3, 0.0), p3(3, 3, kInf);
  for (std::size_t i = 0; i < 3; ++i) p3(i, i) = 0.0;
  p3(0, 1) = p3(1, 0) = 1.0;
  auto cut = shortest_cost_paths(t3, p3);
  CHECK(cut.i_c(0, 2) == kInf);
  CHECK(cut.c_hat(0, 2) == 0.0);
}

TEST_CASE("optimistic LP with exact estimates equals the offline LP") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    RandomInstanceSpec spec;
    spec.n_actions = 3;
    spec.n_beliefs = 3;
    auto inst = gen_random_instance(spec, 7000 + seed);
    const std::size_t K = 3;
    const ScoringRule fb(3, 2, 0.5);
    OptLpInputs in{&inst.support(), inst.u_sigma(), inst.b_s(), inst.b_u(), {}, std::vector<double>(K, 0.0),
                   Matrix(K, K, 0.0), Matrix(K, K, 0.0), &fb};
    for (std::size_t k = 0; k < K; ++k) in.q_hat.emplace_back(inst.q(k).begin(), inst.q(k).end());
    for (std::size_t i = 0; i < K; ++i)
      for (std::size_t j = 0; j < K; ++j) in.c_hat(i, j) = inst.cost(i) - inst.cost(j);
    for (std::size_t k = 0; k < K; ++k) {
      auto exact = solve_lp_k(inst, k);
      auto opt = solve_optimistic_lp(in, k);
      CHECK(opt.fallback == !exact.feasible);
      if (exact.feasible) CHECK(opt.h == doctest::Approx(exact.h_star).epsilon(1e-7));
    }
    // and the arm matches the offline optimum
    std::vector<double> h;
    for (std::size_t k = 0; k < K; ++k) {
      auto r = solve_optimistic_lp(in, k);
      h.push_back(r.fallback ? -kInf : r.h);
    }
    const auto st = solve_stackelberg(inst);
    CHECK(h[Learner::select_arm(h)] == doctest::Approx(st.best.h_star).epsilon(1e-7));
  }
}

TEST_CASE("optimistic LP without cost information") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RandomInstanceSpec spec;
    spec.n_actions = 3;
    spec.n_beliefs = 3;
    auto inst = gen_random_instance(spec, 8000 + seed);
    const ScoringRule fb(3, 2, 0.5);
    const double iq = 0.05;
    OptLpInputs in{&inst.support(), inst.u_sigma(), inst.b_s(), inst.b_u(), {}, std::vector<double>(3, iq),
                   Matrix(3, 3, 0.0), Matrix(3, 3, kInf), &fb};
    for (std::size_t k = 0; k < 3; ++k) in.q_hat.emplace_back(inst.q(k).begin(), inst.q(k).end());
    for (std::size_t k = 0; k < 3; ++k) {
      auto exact = solve_lp_k(inst, k);
      auto opt = solve_optimistic_lp(in, k);
      CHECK_FALSE(opt.fallback);
      if (exact.feasible) CHECK(opt.h >= exact.h_star - 1e-9);
      // only the payment window binds: zero payments, v pushed down by B_S * I_q
      double uq = 0.0;
      for (std::size_t i = 0; i < 3; ++i) uq += inst.q(k)[i] * inst.u_sigma()[i];
      CHECK(opt.h == doctest::Approx(uq + (inst.b_u() + inst.b_s()) * iq));
    }
  }
}

TEST_CASE("single-action optimistic LP") {
  auto sup = binary_support({0.3, 0.8});
  const ScoringRule fb(2, 2, 0.5);
  const double iq = 0.2;
  OptLpInputs in{&sup, {0.7, 0.8}, 1.0, 2.0, {{0.4, 0.6}}, {iq}, Matrix(1, 1, 0.0), Matrix(1, 1, 0.0), &fb};
  auto r = solve_optimistic_lp(in, 0);
  CHECK_FALSE(r.fallback);
  CHECK(r.h == doctest::Approx(0.4 * 0.7 + 0.6 * 0.8 + 2.0 * iq + 1.0 * iq));
}

TEST_CASE("infeasible optimistic LP falls back to the oracle rule") {
  auto sup = point_masses();
  const ScoringRule fb(2, 2, 0.5);
  // cost gap larger than any bounded payment can bridge
  Matrix c_hat(2, 2, 0.0), i_c(2, 2, 0.0);
  c_hat(0, 1) = 5.0, c_hat(1, 0) = -5.0;
  OptLpInputs in{&sup, {1.0, 1.0}, 1.0, 1.0, {{1.0, 0.0}, {0.0, 1.0}}, {0.01, 0.01}, c_hat, i_c, &fb};
  auto r = solve_optimistic_lp(in, 0);
  CHECK(r.fallback);
  CHECK(r.s == fb);
  CHECK(r.h == doctest::Approx(1.0 - 0.5 + 2.0 * 0.01));
  in.iq[0] = kInf;
  CHECK(solve_optimistic_lp(in, 0).h == kInf);
}

TEST_CASE("arm selection") {
  CHECK(Learner::select_arm({2.0}) == 0);
  CHECK(Learner::select_arm({3.0, 5.0, 5.0}) == 1);
  CHECK_THROWS_AS(Learner::select_arm({}), InvalidInput);
}

TEST_CASE("mixing schedule") {
  auto L3 = bare_learner(3, point_masses(), 2);
  CHECK(L3.alpha(1) == 1.0);
  CHECK(L3.alpha(27) == doctest::Approx(1.0));
  CHECK(L3.alpha(28) < 1.0);
  auto L2 = bare_learner(2, point_masses(), 2);
  CHECK(L2.alpha(8000) == doctest::Approx(0.1));
}

TEST_CASE("first round deploys the oracle rule") {
  auto L = bare_learner(3, point_masses(), 2);
  auto plan = L.plan_round();
  CHECK(plan.t == 1);
  CHECK(plan.mode == Mode::Normal);
  CHECK(plan.alpha == 1.0);
  CHECK(plan.s_deployed == tabulate(L.oracle().rules[plan.k_star], L.support()));
  auto none = L.observe(plan, seen(plan.k_star, 0));
  CHECK_FALSE(none.has_value());
  CHECK(L.mode() == Mode::Normal);
  CHECK(L.t() == 2);
}

TEST_CASE("a missed target starts a bisection") {
  auto L = bare_learner(2, point_masses(), 2);
  for (int r = 0; r < 200; ++r) L.absorb(diag_rule(0.3, 0.3), seen(r % 2, r % 3 == 0));
  auto plan = L.plan_round();
  const std::size_t other = 1 - plan.k_star;
  L.observe(plan, seen(other, 0));
  REQUIRE(L.mode() == Mode::BinarySearch);
  auto probe = L.plan_round();
  CHECK(probe.mode == Mode::BinarySearch);
  CHECK(probe.k_star == plan.k_star);
  // midpoint of the initial [0, 1] bracket
  auto expected = mix(plan.s_deployed, tabulate(L.oracle().rules[plan.k_star], L.support()), 0.5);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t w = 0; w < 2; ++w) CHECK(probe.s_deployed(i, w) == doctest::Approx(expected(i, w)));
  CHECK_THROWS_AS(L.observe(plan, seen(0, 0)), InvalidInput);
  std::optional<SearchRecord> rec;
  std::size_t rounds = 0;
  while (L.mode() == Mode::BinarySearch) {
    auto p = L.plan_round();
    rec = L.observe(p, seen(p.k_star, 1));
    ++rounds;
  }
  REQUIRE(rec.has_value());
  CHECK(rec->target == plan.k_star);
  CHECK(rec->k0 == other);
  CHECK(rec->k1 == plan.k_star);
  CHECK(rec->lambda_max - rec->lambda_min < std::min(L.conf_q(0), L.conf_q(1)) * 2.0);
  CHECK(rec->lambda_min == 0.0);
}

TEST_CASE("bisection against a threshold responder") {
  BinarySearch bs(1.0 / 32.0);
  const double threshold = 0.3;
  for (int step = 0; step < 5; ++step) bs.record(bs.next() >= threshold);
  CHECK(bs.lambda_max() - bs.lambda_min() == doctest::Approx(1.0 / 32.0));
  CHECK(bs.lambda_min() <= threshold);
  CHECK(bs.lambda_max() >= threshold);
  CHECK(bs.probes() == 5);

  BinarySearch instant(2.0);
  CHECK(instant.done());

  BinarySearch run(0.01);
  while (!run.done()) {
    const double lam = run.next();
    run.record(lam >= 0.77);
    CHECK(run.lambda_min() < 0.77);
    CHECK(run.lambda_max() >= 0.77);
  }
  CHECK(run.lambda_max() - run.lambda_min() < 0.01);
}

TEST_CASE("essential search diagnostic") {
  auto fresh = bare_learner(2, point_masses(), 2);
  CHECK(fresh.delta(0, 1) == kInf);
  auto no_margin = bare_learner(2, point_masses(), 2, 0.0);
  CHECK(no_margin.delta(0, 1) == kInf);
}

TEST_CASE("empirical coverage of the belief interval") {
  const double delta = 0.05;
  Rng rng(99);
  for (std::size_t M : {2u, 4u}) {
    std::vector<double> ps;
    for (std::size_t i = 0; i < M; ++i) ps.push_back((i + 0.5) / M);
    const auto sup = binary_support(ps);
    const auto q = osrl::testing::random_belief(M, rng);
    for (std::size_t n : {50u, 500u}) {
      const double bound = std::sqrt(2.0 * std::log(std::pow(2.0, double(M)) / delta) / n);
      int covered = 0;
      const int trials = 2000;
      for (int trial = 0; trial < trials; ++trial) {
        auto L = bare_learner(1, sup, M);
        for (std::size_t s = 0; s < n; ++s) L.update_beliefs(0, sup[rng.categorical(q.probs())]);
        double l1 = 0.0;
        for (std::size_t i = 0; i < M; ++i) l1 += std::abs(L.q_hat(0)[i] - q[i]);
        covered += l1 <= bound;
      }
      CHECK(covered >= (1.0 - delta) * trials);
    }
  }
}

TEST_CASE("soundness, optimism and conservative mixing in simulation") {
  RandomInstanceSpec spec;
  spec.n_actions = 3;
  spec.n_beliefs = 3;
  const auto seed = find_seed_with_oracle(spec, 0, 0.05);
  const auto inst = gen_random_instance(spec, seed);
  const auto oracle = ground_truth_oracle(inst);
  std::vector<double> h_star(3, -kInf);
  for (std::size_t k = 0; k < 3; ++k) {
    auto s = solve_lp_k(inst, k);
    if (s.feasible) h_star[k] = s.h_star;
  }
  LearnerConfig cfg;
  cfg.m_bound = 3;
  Learner L(PrincipalView{inst.utility(), inst.b_s(), inst.b_u(), 3}, oracle, cfg);
  Agent agent(inst, Rng(seed, 1));
  std::size_t checked = 0, bounds_checked = 0, mistakes_checked = 0;
  for (int t = 0; t < 3000; ++t) {
    auto plan = L.plan_round();
    if (plan.mode == Mode::Normal) {
      // antisymmetry after every refresh
      for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
          REQUIRE(L.theta()(i, j) == doctest::Approx(-L.theta()(j, i)));
          REQUIRE(L.c_hat()(i, j) == doctest::Approx(-L.c_hat()(j, i)));
          REQUIRE(L.phi()(i, j) == L.phi()(j, i));
          REQUIRE(L.phi()(i, j) >= 0.0);
        }
      bool coverage = true;
      for (std::size_t k = 0; k < 3; ++k) {
        if (L.count(k) == 0) continue;
        const auto q = true_q_on(inst, L.support(), k);
        const auto qh = L.q_hat(k);
        double l1 = 0.0;
        for (std::size_t i = 0; i < q.size(); ++i) l1 += std::abs(q[i] - qh[i]);
        coverage = coverage && l1 <= L.conf_q(k);
      }
      if (coverage) {
        ++checked;
        for (std::size_t i = 0; i < 3; ++i)
          for (std::size_t j = 0; j < 3; ++j) {
            if (i == j || !std::isfinite(L.c_plus()(i, j)) || !std::isfinite(L.c_minus()(i, j))) continue;
            ++bounds_checked;
            const double gap = inst.cost(i) - inst.cost(j);
            CHECK(L.c_minus()(i, j) <= gap + 1e-9);
            CHECK(gap <= L.c_plus()(i, j) + 1e-9);
            CHECK(std::abs(L.c_hat()(i, j) - gap) <= L.i_c()(i, j) + 1e-9);
          }
        for (std::size_t k = 0; k < 3; ++k) CHECK(plan.h_lp[k] >= h_star[k] - 1e-7);
        const auto deployed = tabulate(L.announce(plan), inst.support());
        const auto response = best_response(inst, deployed);
        for (std::size_t i = 0; i < 3; ++i) {
          if (i == plan.k_star || plan.alpha < L.delta(plan.k_star, i)) continue;
          ++mistakes_checked;
          CHECK(response != i);
        }
      }
    }
    L.observe(plan, agent.interact(L.announce(plan)));
  }
  CHECK(checked > 100);
  CHECK(bounds_checked > 0);
  MESSAGE("coverage rounds " << checked << ", cost bounds " << bounds_checked
                             << ", mistake checks " << mistakes_checked);
}

TEST_CASE("the principal cannot see agent-private data") {
  // only the utility, bounds and the number of actions cross over
  static_assert(std::is_aggregate_v<PrincipalView>);
  static_assert(!std::is_constructible_v<Learner, Instance, OracleSet, LearnerConfig>);
  static_assert(!std::is_member_function_pointer_v<decltype(&PublicObservation::payment)>);
  CHECK(true);
}

}
