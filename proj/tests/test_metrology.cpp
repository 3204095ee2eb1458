#include <doctest.h>

#include <numbers>
#include <random>

#include "cqsense/dynamics.hpp"
#include "cqsense/metrology.hpp"
#include "test_util.hpp"

using namespace cqsense;
using testutil::params;
using testutil::rel;

namespace {

StateFamily passive_family(const SystemParams& p, const GaussianStated& start, double t) {
  return [=](double d) { return evolve_passive(p.with_shift(d), start, t); };
}

StateFamily critical_family(const SystemParams& p, double t) {
  return [=](double d) { return evolve_critical(p.with_shift(d), thermal_state(p.n_bath), t); };
}

}  // namespace

TEST_SUITE("metrology") {

TEST_CASE("coherent state phase estimation") {
  // a phase θ = δω t on |α⟩ has QFI 4|α|² t²
  for (double alpha : {0.5, 3.0}) {
    const auto start = apply_displace(GaussianStated::vacuum(), {alpha, 0.0});
    const double t = 1.5;
    const auto pair = differentiate_at_zero_shift(
        passive_family(params(1.0, 0.0, 0.0), start, t), {1e-3 / t});
    const QfiTerms terms = qfi_terms(pair);
    CHECK(rel(terms.total(), 4.0 * alpha * alpha * t * t) < 1e-9);
    CHECK(terms.covariance == doctest::Approx(0.0));
    CHECK(terms.purity == 0.0);
    // the p quadrature of a real displacement is the optimal homodyne readout
    CHECK(rel(fi_homodyne(pair, {std::numbers::pi / 2.0}), terms.total()) < 1e-9);
    CHECK(fi_homodyne(pair, {0.0}) < 1e-12);
  }
}

TEST_CASE("squeezed vacuum reaches 8N(N+1)t^2") {
  for (double n : {1.0, 10.0, 100.0}) {
    const double r = std::asinh(std::sqrt(n));
    const auto start = apply_squeeze(GaussianStated::vacuum(), {r, 0.0});
    const double t = 0.6;
    const auto pair = differentiate_at_zero_shift(
        passive_family(params(1.0, 0.0, 0.0), start, t), {1e-3 / t});
    CHECK(rel(qfi(pair), 8.0 * n * (n + 1.0) * t * t) < 1e-8);
  }
}

TEST_CASE("thermal squeezed state QFI matches the mixed-state formula") {
  // Σ = ν S Sᵀ rotated by θ = −δω t: only the covariance term survives,
  // I_θ = 4ν² sinh²(2r)/(1 + ν²)
  const double nu = 3.0, r = 0.7, t = 0.9;
  const auto start = apply_squeeze(thermal_state(1.0), {r, 0.0});
  const auto pair = differentiate_at_zero_shift(
      passive_family(params(1.0, 0.0, 0.0), start, t), {1e-3 / t});
  const double s = std::sinh(2.0 * r);
  CHECK(rel(qfi(pair), 4.0 * nu * nu * s * s * t * t / (1.0 + nu * nu)) < 1e-8);
}

TEST_CASE("fidelity-based oracle agrees with the closed form") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    auto p = params(0.5 + u(rng), 0.0, 0.2 + u(rng), u(rng));
    const double t = 0.2 + 2.0 * u(rng);
    StateFamily family;
    if (i % 2 == 0) {
      p.epsilon = 0.95 * u(rng) * p.epsilon_c();
      family = critical_family(p, t);
    } else {
      const auto start = apply_displace(
          apply_squeeze(thermal_state(p.n_bath), {u(rng), 6.0 * u(rng)}), {2.0 * u(rng), 0.0});
      family = passive_family(p, start, t);
    }
    const double analytic = qfi(differentiate_at_zero_shift(family, {1e-4}));
    const double oracle = qfi_fidelity_oracle(family, 1e-4);
    CAPTURE(i);
    CHECK(rel(oracle, analytic) < 1e-4);
  }
  CHECK_THROWS_AS(qfi_fidelity_oracle(critical_family(params(1.0, 0.5, 1.0), 1.0), 1e-2),
                  DomainError);
}

TEST_CASE("gaussian fidelity") {
  const auto a = apply_displace(GaussianStated::vacuum(), {1.0, 0.2});
  const auto b = apply_displace(GaussianStated::vacuum(), {1.5, -0.4});
  // |⟨α|β⟩|² = exp(−|α − β|²)
  const std::complex<double> alpha = std::polar(1.0, 0.2), beta = std::polar(1.5, -0.4);
  CHECK(gaussian_fidelity(a, b) == doctest::Approx(std::exp(-std::norm(alpha - beta))));
  const auto th = apply_squeeze(thermal_state(0.8), {0.5, 1.0});
  CHECK(gaussian_fidelity(th, th) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(gaussian_fidelity(thermal_state(2.0), thermal_state(2.0)) == doctest::Approx(1.0));
  // ⟨0|ρ_th|0⟩ = 1/(1 + n)
  CHECK(gaussian_fidelity(thermal_state(0.0), thermal_state(1.0)) == doctest::Approx(0.5));
}

TEST_CASE("homodyne information never exceeds the QFI") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 40; ++i) {
    auto p = params(1.0, 0.0, 0.5 + u(rng), 2.0 * u(rng));
    p.epsilon = 0.99 * u(rng) * p.epsilon_c();
    const auto pair = differentiate_at_zero_shift(critical_family(p, 0.5 + 3.0 * u(rng)), {});
    const double q = qfi(pair);
    for (double psi = 0.0; psi < std::numbers::pi; psi += 0.1) {
      CHECK(fi_homodyne(pair, {psi}) <= q * (1.0 + 1e-6));
    }
  }
}

TEST_CASE("homodyne variance convention") {
  Eigen::Matrix2d s;
  s << 3.0, 0.5, 0.5, 2.0;
  CHECK(homodyne_variance(s, 0.0) == doctest::Approx(3.0));
  CHECK(homodyne_variance(s, std::numbers::pi / 2.0) == doctest::Approx(2.0));
  // x_ψ = cos ψ x + sin ψ p
  CHECK(homodyne_variance(s, std::numbers::pi / 4.0) == doctest::Approx(2.5 + 0.5));
}

TEST_CASE("pure-state guard") {
  DerivativePair bogus{GaussianStated::vacuum()};
  bogus.dsigma = Eigen::Matrix2d::Identity();
  CHECK_THROWS_AS(qfi(bogus), PureStateSingularityError);
  DerivativePair pure{GaussianStated::vacuum()};
  Eigen::Matrix2d d;
  d << 0.0, 1.0, 1.0, 0.0;
  pure.dsigma = d;
  CHECK(qfi(pure) == doctest::Approx(0.5));
}

TEST_CASE("photon-counting signal-to-noise") {
  const auto p = params(1.0, 1.0, 1.0);
  const double t = 1.0;
  const auto pair = differentiate_at_zero_shift(critical_family(p, t), {});
  // dN/dδω from finite differences of the photon number
  const double h = 1e-5;
  const double dn = (mean_photons_vs_time(p.with_shift(h), t) -
                     mean_photons_vs_time(p.with_shift(-h), t)) /
                    (2.0 * h);
  CHECK(rel(snr_photon_counting(pair), dn * dn / photon_variance(pair.state)) < 1e-6);
  DerivativePair vac{GaussianStated::vacuum()};
  CHECK_THROWS_AS(snr_photon_counting(vac), DegenerateError);
}

TEST_CASE("differentiation diagnostics") {
  const auto pair = differentiate_at_zero_shift(critical_family(params(1.0, 0.5, 1.0), 1.0), {});
  CHECK_FALSE(pair.accuracy_warning);
  CHECK(pair.error_estimate >= 0.0);
  CHECK(pair.dsigma(0, 1) == pair.dsigma(1, 0));
  CHECK_THROWS_AS(differentiate_at_zero_shift(critical_family(params(1.0, 0.5, 1.0), 1.0), {0.0}),
                  DomainError);
}

TEST_CASE("extreme squeezing makes homodyne variance vanish") {
  DerivativePair pair{apply_squeeze(GaussianStated::vacuum(), {15.0, 0.0})};
  CHECK_THROWS_AS(fi_homodyne(pair, {std::numbers::pi / 2.0}), InvalidStateError);
}

}
