#include <doctest.h>

#include <numbers>

#include "cqsense/protocols.hpp"
#include "test_util.hpp"

using namespace cqsense;
using testutil::params;
using testutil::rel;

TEST_SUITE("protocols") {

TEST_CASE("epsilon_opt saturates the photon budget") {
  for (double n_max : {1.0, 100.0, 1e4}) {
    auto p = params(1.0, 0.0, 1.0);
    p.epsilon = epsilon_opt(n_max, p);
    CHECK(rel(mean_photons(steady_state(p)), n_max) < 1e-9);
  }
  // closed form √(2N/(1 + 2N)) ε_c
  const auto p = params(1.0, 0.0, 1.0);
  CHECK(epsilon_opt(100.0, p) == doctest::Approx(std::sqrt(2.0 * 200.0 / 201.0)));
  CHECK_THROWS_AS(epsilon_opt(1.0, params(1.0, 0.0, 1.0, 2.0)), ConstraintError);
}

TEST_CASE("steady-state CQS information") {
  auto p = params(1.0, 0.0, 1.0);
  p.epsilon = epsilon_opt(100.0, p);
  const double q = cqs_steady_qfi(p);
  // frozen: 2N(N + 1/2)/Γ² at N = 100
  CHECK(rel(q, 20100.0) < 1e-6);
  CHECK(q / (2.0 * 100.0 * 100.0) == doctest::Approx(1.0).epsilon(0.1));
  // late finite windows converge to the steady value
  CHECK(rel(cqs_qfi(p, 20.0 / spectral_info(p).lambda_minus.real()), q) < 1e-4);
  const auto pair = cqs_steady_pair(p);
  CHECK(best_homodyne(pair).fi / q > 0.95);
}

TEST_CASE("finite temperature keeps the steady-state information") {
  auto cold = params(1.0, 0.0, 1.0);
  cold.epsilon = epsilon_opt(100.0, cold);
  auto warm = cold;
  warm.n_bath = 1.0;
  CHECK(cqs_steady_qfi(warm) / cqs_steady_qfi(cold) == doctest::Approx(1.0).epsilon(0.1));
  const double photon_ratio = mean_photons(steady_state(warm)) / mean_photons(steady_state(cold));
  CHECK(photon_ratio == doctest::Approx(3.0).epsilon(0.05));
}

TEST_CASE("noiseless PQS optimum is squeezed vacuum") {
  const auto p = params(1.0, 0.0, 0.0);
  for (double n : {1.0, 10.0, 100.0}) {
    for (double t : {0.1, 1.0}) {
      const PqsOptimum best = pqs_optimal_qfi(n, p, t);
      CHECK(rel(best.value, 8.0 * n * (n + 1.0) * t * t) < 1e-8);
      CHECK(best.input.alpha.magnitude < 1e-3 * std::sqrt(n));
      CHECK(pqs_input_photons(best.input, 0.0) == doctest::Approx(n));
    }
  }
  CHECK(pqs_qfi(PqsInput{}, p, 0.0) == 0.0);
}

TEST_CASE("optimal PQS working point") {
  const auto p = params(1.0, 0.0, 1.0);
  const double n = 1e4;
  const TimeOptimum best = maximize_single_shot(
      [&](double t) { return pqs_optimal_qfi(n, p, t).value; }, {0.05, 5.0});
  // frozen from the implementation, cross-checked against a scalar prototype
  CHECK(best.t_opt == doctest::Approx(0.796566).epsilon(1e-4));
  CHECK(best.best_rate / n == doctest::Approx(0.647475).epsilon(1e-4));
}

TEST_CASE("homodyne-optimal squeezing") {
  const auto p = params(1.0, 0.0, 1.0);
  const HomodyneSetting p_quadrature{std::numbers::pi / 2.0};
  for (double n : {10.0, 100.0, 1000.0}) {
    for (double t : {0.05, 0.5, 2.0}) {
      const PqsInput input = optimal_homodyne_input(n, p.gamma, t);
      CHECK(pqs_input_photons(input, 0.0) == doctest::Approx(n));
      const double numeric = fi_homodyne(pqs_pair(input, p, t), p_quadrature);
      CHECK(rel(numeric, optimal_homodyne_fi(n, p.gamma, t)) < 1e-7);
      // the closed form is the maximum over the budget split
      CHECK(pqs_optimal_homodyne(n, p, t).value <= numeric * (1.0 + 1e-6));
    }
  }
  // no overflow at very late times
  const SqueezeParam late = optimal_squeezing_homodyne(100.0, 1.0, 2000.0);
  CHECK(std::isfinite(late.r));
  CHECK(optimal_homodyne_fi(100.0, 1.0, 2000.0) == 0.0);
  CHECK_THROWS_AS(optimal_squeezing_homodyne(100.0, 1.0, 0.0), DomainError);
}

TEST_CASE("fundamental bound") {
  const auto constant = [](double) { return 100.0; };
  const BoundResult b = fundamental_bound(constant, 10.0, 1.0, 0.0);
  CHECK(b.integral == doctest::Approx(2000.0));
  CHECK(b.cap == doctest::Approx(2000.0));
  // thermal bath: 2N/(Γ(1 + 2n_B − n_B/(N + 1)))
  const BoundResult warm = fundamental_bound(constant, 1.0, 2.0, 1.0);
  CHECK(warm.integral == doctest::Approx(200.0 / (2.0 * (3.0 - 1.0 / 101.0))));
  const BoundResult lossless = fundamental_bound(constant, 1.0, 0.0, 0.0);
  CHECK(std::isinf(lossless.integral));
  CHECK_THROWS_AS(fundamental_bound([](double) { return -1.0; }, 1.0, 1.0, 0.0), DomainError);
  CHECK_THROWS_AS(fundamental_bound(constant, 0.0, 1.0, 0.0), DomainError);
  // a decaying trajectory integrates exactly: N e^{−2Γt}
  const BoundResult decay =
      fundamental_bound([](double s) { return 50.0 * std::exp(-2.0 * s); }, 3.0, 1.0, 0.0);
  CHECK(decay.integral == doctest::Approx(50.0 * -std::expm1(-6.0)).epsilon(1e-8));
  CHECK(decay.cap == doctest::Approx(300.0));
}

TEST_CASE("total QFI respects the bound and the budget") {
  ProtocolSpec cqs;
  cqs.params = params(1.0, 0.0, 1.0);
  cqs.params.epsilon = epsilon_opt(100.0, cqs.params);
  cqs.budget = {100.0, 50.0, 2.0};
  for (double t : {0.1, 1.0, 10.0, 100.0}) {
    const MetrologyReport r = total_qfi(cqs, t);
    CHECK(r.total_qfi <= r.bound_value * (1.0 + 1e-6));
    CHECK(r.repetitions == doctest::Approx(50.0 / (t + 2.0)));
    CHECK(r.total_qfi == doctest::Approx(r.repetitions * r.qfi_single_shot));
    CHECK(r.fi_homodyne_best <= r.qfi_single_shot * (1.0 + 1e-6));
  }
  ProtocolSpec pqs;
  pqs.kind = ProtocolKind::pqs;
  pqs.params = params(1.0, 0.0, 1.0);
  pqs.budget = {100.0, 50.0, 0.0};
  CHECK_THROWS_AS(total_qfi(pqs, 1.0), PreconditionError);
  for (double t : {0.01, 0.3, 3.0}) {
    pqs.pqs_input = pqs_optimal_qfi(100.0, pqs.params, t).input;
    const MetrologyReport r = total_qfi(pqs, t);
    CHECK(r.total_qfi <= r.bound_value * (1.0 + 1e-6));
  }
  PqsInput greedy;
  greedy.alpha.magnitude = 11.0;
  pqs.pqs_input = greedy;
  CHECK_THROWS_AS(total_qfi(pqs, 1.0), ConstraintError);
  pqs.pqs_input = PqsInput{};
  pqs.params.epsilon = 0.1;
  CHECK_THROWS_AS(total_qfi(pqs, 1.0), PreconditionError);

  ProtocolSpec above = cqs;
  above.params.epsilon = 2.0;
  CHECK_THROWS_AS(total_qfi(above, 1.0), UnsupportedRegimeError);
  ProtocolSpec tight = cqs;
  tight.budget.n_max = 50.0;
  CHECK_THROWS_AS(total_qfi(tight, 1.0), ConstraintError);
  CHECK_THROWS_AS(total_qfi(cqs, 0.0), DomainError);
}

TEST_CASE("transient CQS growth") {
  // between Re(λ₊)⁻¹ and λ₋⁻¹ the information grows at least as fast as N²
  auto p = params(1.0, 0.0, 1.0);
  p.epsilon = epsilon_opt(1e4, p);
  const auto info = spectral_info(p);
  const double t1 = 3.0 / info.lambda_plus.real();
  const double t2 = 0.3 / info.lambda_minus.real();
  const double n1 = mean_photons_vs_time(p, t1), n2 = mean_photons_vs_time(p, t2);
  const double q1 = cqs_qfi(p, t1), q2 = cqs_qfi(p, t2);
  CHECK(q2 / q1 >= 0.9 * (n2 / n1) * (n2 / n1));
}

TEST_CASE("beyond threshold") {
  const double n_max = 1e3, T = 1.0;
  const auto base = params(1.0, 0.0, 0.0);
  const double eps = beyond_threshold_epsilon(n_max, T, base);
  CHECK(eps == doctest::Approx(std::sqrt(1.0 + std::pow(std::log(4e3), 2) / 4.0)));
  auto p = base;
  p.epsilon = eps;
  const double beyond = beyond_threshold_qfi(p, T);
  const double below = below_threshold_noiseless_qfi(n_max, T);
  // frozen values
  CHECK(rel(beyond, 130029.0) < 1e-5);
  CHECK(rel(below, 890889.0) < 1e-5);
  CHECK(below > beyond);

  const double exact = beyond_threshold_epsilon_exact(n_max, T, base);
  p.epsilon = exact;
  CHECK(rel(mean_photons_vs_time(p, T), n_max) < 1e-10);

  CHECK_THROWS_AS(beyond_threshold_qfi(params(1.0, 2.0, 1.0), 1.0), UnsupportedRegimeError);
  CHECK_THROWS_AS(beyond_threshold_qfi(params(1.0, 0.5, 0.0), 1.0), PreconditionError);
  CHECK_THROWS_AS(beyond_threshold_qfi(params(1.0, 2.0, 0.0, 1.0), 1.0), PreconditionError);
}

TEST_CASE("time optimization") {
  const ResourceBudget budget{1.0, 1.0, 1.0};
  const TimeOptimum best =
      optimize_time([](double t) { return t * t * std::exp(-t); }, budget, {0.01, 20.0});
  const double x = best.t_opt;
  // stationary point of log(t² e^{−t}/(t + 1))
  CHECK(2.0 / x - 1.0 - 1.0 / (x + 1.0) == doctest::Approx(0.0).epsilon(1e-5));
  CHECK_THROWS_AS(optimize_time([](double) { return 1.0; }, budget, {0.0, 1.0}), SearchError);
  CHECK_THROWS_AS(
      maximize_single_shot([](double) { return NAN; }, {0.1, 1.0}), SearchError);
}

TEST_CASE("critical step scales") {
  auto p = params(1.0, 1.3, 1.0);
  CHECK(critical_step(p, 0.0) == 1e-5);
  for (double t : {0.01, 1.0, 100.0}) {
    const double h = critical_step(p, t);
    CHECK(h > 0.0);
    CHECK(h <= 1e-3 / t);
  }
}

}
