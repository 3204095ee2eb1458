#include <doctest.h>

#include <complex>
#include <random>

#include "cqsense/dynamics.hpp"
#include "test_util.hpp"

using namespace cqsense;
using testutil::params;
using testutil::rel;

namespace {

using cplx = std::complex<double>;

/// Heisenberg-Langevin moments n = ⟨a†a⟩, m = ⟨a²⟩ for
/// H = ω a†a + ε/2 (a² + a†²) with thermal damping:
///   dn/dt = −2ε Im m − 2Γ (n − n_B)
///   dm/dt = −2(iω + Γ) m − iε (2n + 1)
/// integrated with a small fixed RK4 step.
struct MomentOracle {
  double n;
  cplx m;
};

MomentOracle moment_oracle(const SystemParams& p, double t, int steps = 20000) {
  const double w = p.omega();
  const auto rhs = [&](double n, cplx m, double& dn, cplx& dm) {
    dn = -2.0 * p.epsilon * m.imag() - 2.0 * p.gamma * (n - p.n_bath);
    dm = -2.0 * cplx(p.gamma, w) * m - cplx(0.0, p.epsilon) * (2.0 * n + 1.0);
  };
  double n = p.n_bath;
  cplx m = 0.0;
  const double h = t / steps;
  for (int i = 0; i < steps; ++i) {
    double k1n, k2n, k3n, k4n;
    cplx k1m, k2m, k3m, k4m;
    rhs(n, m, k1n, k1m);
    rhs(n + 0.5 * h * k1n, m + 0.5 * h * k1m, k2n, k2m);
    rhs(n + 0.5 * h * k2n, m + 0.5 * h * k2m, k3n, k3m);
    rhs(n + h * k3n, m + h * k3m, k4n, k4m);
    n += h / 6.0 * (k1n + 2.0 * k2n + 2.0 * k3n + k4n);
    m += h / 6.0 * (k1m + 2.0 * k2m + 2.0 * k3m + k4m);
  }
  return {n, m};
}

Eigen::Matrix2d sigma_from_moments(const MomentOracle& o) {
  Eigen::Matrix2d s;
  s << 2.0 * o.n + 1.0 + 2.0 * o.m.real(), 2.0 * o.m.imag(), 2.0 * o.m.imag(),
      2.0 * o.n + 1.0 - 2.0 * o.m.real();
  return s;
}

/// Noiseless N(t) from vacuum: ε² sin²(Ωt)/Ω² with Ω² = ω² − ε².
double noiseless_photons(double w, double e, double t) {
  const double q = w * w - e * e;
  if (q > 0.0) {
    const double s = std::sin(std::sqrt(q) * t);
    return e * e * s * s / q;
  }
  if (q < 0.0) {
    const double s = std::sinh(std::sqrt(-q) * t);
    return e * e * s * s / -q;
  }
  return e * e * t * t;
}

/// (ε² + 2ε_c² n_B) / (2(ε_c² − ε²))
double steady_photons(const SystemParams& p) {
  const double ec2 = p.omega() * p.omega() + p.gamma * p.gamma;
  return (p.epsilon * p.epsilon + 2.0 * ec2 * p.n_bath) / (2.0 * (ec2 - p.epsilon * p.epsilon));
}

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("noiseless photon number in every regime") {
  for (double e : {0.3, 1.0, 1.7, 3.0}) {
    for (double t : {0.2, 1.0, 2.5}) {
      const double expected = noiseless_photons(1.0, e, t);
      CHECK(rel(mean_photons_vs_time(params(1.0, e, 0.0), t), expected) < 1e-10);
    }
  }
}

TEST_CASE("covariance agrees with the Langevin moment equations") {
  const SystemParams cases[] = {params(1.0, 0.5, 1.0),        params(1.0, 1.0, 1.0, 1.0),
                                params(1.0, 1.2, 1.0, 0.5),   params(1.0, 1.41, 1.0),
                                params(1.0, 2.0, 1.0),        params(2.0, 0.0, 0.3, 2.0),
                                params(0.5, 0.7, 0.0),        params(1.0, 1.0 + 1e-8, 0.7),
                                params(1.0, 1.0 - 1e-8, 0.7), params(-1.0, 0.4, 0.2)};
  for (const auto& p : cases) {
    for (double t : {0.3, 2.0}) {
      CAPTURE(p.epsilon);
      CAPTURE(t);
      const Eigen::Matrix2d expected = sigma_from_moments(moment_oracle(p, t));
      const Eigen::Matrix2d got = evolve_critical(p, thermal_state(p.n_bath), t).sigma();
      CHECK((got - expected).norm() / expected.norm() < 1e-10);
    }
  }
}

TEST_CASE("first moments follow the drift") {
  const auto p = params(1.0, 1.2, 0.4);
  const auto start = apply_displace(GaussianStated::vacuum(), {1.0, 0.3});
  const double t = 1.7;
  const auto dd = drift_and_diffusion(p);
  // reference: Taylor series of exp(A t)
  Eigen::Matrix2d term = Eigen::Matrix2d::Identity();
  Eigen::Matrix2d expm = term;
  for (int k = 1; k < 60; ++k) {
    term = term * dd.drift * t / k;
    expm += term;
  }
  const auto s = evolve_critical(p, start, t);
  CHECK((s.v() - expm * start.v()).norm() < 1e-12);
}

TEST_CASE("steady state") {
  for (double ratio : {0.2, 0.7, 0.99, 0.9975}) {
    for (double n_bath : {0.0, 1.0, 3.0}) {
      auto p = params(1.0, 0.0, 1.0, n_bath);
      p.epsilon = ratio * p.epsilon_c();
      const auto ss = steady_state(p);
      CHECK(rel(mean_photons(ss), steady_photons(p)) < 1e-12);
      const double lambda_minus = spectral_info(p).lambda_minus.real();
      const auto late = evolve_critical(p, thermal_state(n_bath), 40.0 / lambda_minus);
      CHECK((late.sigma() - ss.sigma()).norm() / ss.sigma().norm() < 1e-10);
      // stationarity: A Σ + Σ Aᵀ + D = 0
      const auto dd = drift_and_diffusion(p);
      const Eigen::Matrix2d residual =
          dd.drift * ss.sigma() + ss.sigma() * dd.drift.transpose() + dd.diffusion;
      CHECK(residual.norm() < 1e-9 * ss.sigma().norm());
    }
  }
  CHECK_THROWS_AS(steady_state(params(1.0, 0.5, 0.0)), NoSteadyStateError);
  CHECK_THROWS_AS(steady_state(params(1.0, std::sqrt(2.0), 1.0)), NoSteadyStateError);
  CHECK_THROWS_AS(steady_state(params(1.0, 3.0, 1.0)), NoSteadyStateError);
}

TEST_CASE("regime classification") {
  CHECK(spectral_info(params(1.0, 0.5, 1.0)).regime == Regime::below_eigenvalue_split);
  CHECK(spectral_info(params(1.0, 1.0, 1.0)).regime == Regime::exceptional);
  CHECK(spectral_info(params(1.0, 1.2, 1.0)).regime == Regime::transient_split);
  CHECK(spectral_info(params(1.0, std::sqrt(2.0), 1.0)).regime == Regime::critical);
  CHECK(spectral_info(params(1.0, 2.0, 1.0)).regime == Regime::above_threshold);
  const auto info = spectral_info(params(1.0, 1.2, 1.0));
  const double kappa = std::sqrt(1.2 * 1.2 - 1.0);
  CHECK(info.lambda_minus.real() == doctest::Approx(1.0 - kappa));
  CHECK(info.lambda_plus.real() == doctest::Approx(1.0 + kappa));
  CHECK(info.epsilon_c == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("propagator composes as a semigroup") {
  for (const auto& p : {params(1.0, 0.6, 0.5, 1.0), params(1.0, 1.0, 0.5),
                        params(1.0, 1.3, 0.5), params(1.0, 2.0, 0.0)}) {
    const double t1 = 0.7, t2 = 1.1;
    const Propagator a = propagator(p, t1);
    const Propagator b = propagator(p, t2);
    const Propagator ab = propagator(p, t1 + t2);
    CHECK((ab.transfer - b.transfer * a.transfer).norm() < 1e-12 * ab.transfer.norm());
    const Eigen::Matrix2d noise = b.transfer * a.noise * b.transfer.transpose() + b.noise;
    CHECK((ab.noise - noise).norm() < 1e-11 * std::max(1.0, ab.noise.norm()));
  }
}

TEST_CASE("continuity across the exceptional point") {
  const double t = 3.0;
  const auto at = evolve_critical(params(1.0, 1.0, 0.5), thermal_state(0.0), t).sigma();
  for (double d : {1e-12, 1e-9, 1e-6}) {
    for (double sign : {-1.0, 1.0}) {
      const auto near =
          evolve_critical(params(1.0, 1.0 + sign * d, 0.5), thermal_state(0.0), t).sigma();
      CHECK((near - at).norm() / at.norm() < 20.0 * d + 1e-12);
    }
  }
}

TEST_CASE("passive evolution") {
  const auto p = params(1.0, 0.0, 0.7, 0.5);
  const auto start = apply_displace(apply_squeeze(thermal_state(0.5), {0.9, 0.0}), {2.0, 0.0});
  const double t = 1.3;
  const auto s = evolve_passive(p, start, t);
  // with no detuning the rotating frame is static: pure relaxation to thermal
  const double decay = std::exp(-p.gamma * t);
  CHECK((s.v() - decay * start.v()).norm() < 1e-12);
  const Eigen::Matrix2d expected = decay * decay * start.sigma() +
                                   (1.0 - decay * decay) * (1.0 + 2.0 * p.n_bath) *
                                       Eigen::Matrix2d::Identity();
  CHECK((s.sigma() - expected).norm() < 1e-12);
  // a detuning rotates the state by −δω t
  auto detuned = p;
  detuned.delta_omega = 0.4;
  const auto r = evolve_passive(detuned, start, t);
  CHECK((r.v() - rotation_matrix(-0.4 * t) * s.v()).norm() < 1e-12);
  CHECK_THROWS_AS(evolve_passive(params(1.0, 0.1, 1.0), start, t), PreconditionError);
  CHECK_THROWS_AS(evolve_passive(p, start, -1.0), DomainError);
}

TEST_CASE("argument validation") {
  CHECK_THROWS_AS(evolve_critical(params(1.0, -0.1, 1.0), thermal_state(0.0), 1.0),
                  DomainError);
  CHECK_THROWS_AS(evolve_critical(params(1.0, 0.1, -1.0), thermal_state(0.0), 1.0),
                  DomainError);
  CHECK_THROWS_AS(evolve_critical(params(1.0, 0.1, 1.0, -1.0), thermal_state(0.0), 1.0),
                  DomainError);
  CHECK_THROWS_AS(evolve_critical(params(NAN, 0.1, 1.0), thermal_state(0.0), 1.0),
                  DomainError);
  CHECK_THROWS_AS(evolve_critical(params(1.0, 0.1, 1.0), thermal_state(0.0), NAN),
                  DomainError);
  CHECK_THROWS_AS(evolve_critical(params(1.0, 5.0, 0.0), thermal_state(0.0), 500.0),
                  NumericalError);
  const auto start = apply_squeeze(thermal_state(0.3), {0.5, 0.2});
  const auto same = evolve_critical(params(1.0, 0.5, 1.0, 0.3), start, 0.0);
  CHECK(same.sigma() == start.sigma());
}

TEST_CASE("trajectories stay physical") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 300; ++i) {
    auto p = params(0.2 + 2.0 * u(rng), 0.0, 2.0 * u(rng), 2.0 * u(rng));
    p.epsilon = 1.3 * u(rng) * std::max(p.epsilon_c(), 0.5);
    const double t = 5.0 * u(rng);
    const auto s = evolve_critical(p, thermal_state(p.n_bath), t);
    CHECK(s.sigma().determinant() >= 1.0 - 1e-9);
    CHECK(purity(s) <= 1.0);
    CHECK(mean_photons(s) >= -1e-12);
  }
}

TEST_CASE("purity decays towards the steady value") {
  auto p = params(1.0, 0.99, 1.0);
  CHECK(purity_vs_time(p, 0.0) == 1.0);
  const double mu_ss = purity(steady_state(p));
  CHECK(purity_vs_time(p, 60.0) == doctest::Approx(mu_ss).epsilon(1e-9));
}

TEST_CASE("c2 hook perturbs and restores the propagator") {
  const auto p = params(1.0, 1.2, 1.0);
  const auto before = propagator(p, 1.0).transfer;
  {
    ScopedC2Perturbation hook(-0.01);
    CHECK((propagator(p, 1.0).transfer - before).norm() > 1e-4);
  }
  CHECK(propagator(p, 1.0).transfer == before);
}

}
