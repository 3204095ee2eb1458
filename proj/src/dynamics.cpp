#include "cqsense/dynamics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

namespace cqsense {

namespace {

std::atomic<double> g_c2_scale{1.0};

// Below this value of |q|·t² (resp. |q|·min(t², 1/Γ²)) the propagator and the
// noise integrals switch to power series in q = ε² − ω².
constexpr double kSeriesThreshold = 1e-2;

void require_time(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw DomainError("evolution time must be finite and nonnegative");
  }
}

// φ(x, t) = ∫₀ᵗ e^{-xs} ds
double phi(double x, double t) {
  if (x == 0.0) return t;
  return -std::expm1(-x * t) / x;
}

// Re ∫₀ᵗ e^{-(a+ib)s} ds
double phi_real(double a, double b, double t) {
  if (b == 0.0) return phi(a, t);
  const double decay = std::exp(-a * t);
  const double half = std::sin(0.5 * b * t);
  const double re = -std::expm1(-a * t) + decay * 2.0 * half * half;
  const double im = decay * std::sin(b * t);
  return (re * a + im * b) / (a * a + b * b);
}

// M_k(a) = ∫₀¹ u^k e^{-au} du
double moment_integral(int k, double a) {
  if (a <= 2.0 * k + 10.0) {
    double term = 1.0 / (k + 1);
    double sum = term;
    for (int j = 1; j < 500; ++j) {
      term *= a / (k + 1 + j);
      sum += term;
      if (term < 1e-17 * sum) break;
    }
    return std::exp(-a) * sum;
  }
  const double tail = std::exp(-a);
  double m = -std::expm1(-a) / a;
  for (int j = 1; j <= k; ++j) m = (j * m - tail) / a;
  return m;
}

// Regularized lower incomplete gamma P(k+1, a) for integer k, a ≥ 2.
double regularized_gamma_lower(int k, double a) {
  double term = 1.0;
  double sum = 1.0;
  for (int j = 1; j <= k; ++j) {
    term *= a / j;
    sum += term;
  }
  return std::max(0.0, 1.0 - std::exp(-a) * sum);
}

// ∫₀ᵗ e^{-2Γs} S(s)² ds expanded in powers of q.
double js2_series(double q, double gamma, double t) {
  const double a = 2.0 * gamma * t;
  double sum = 0.0;
  if (gamma * t < 1.0) {
    double f = t * t;
    for (int n = 1; n < 60; ++n) {
      const double term = t * f * moment_integral(2 * n, a);
      sum += term;
      if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
      f *= 4.0 * q * t * t / ((2.0 * n + 1.0) * (2.0 * n + 2.0));
    }
    return sum;
  }
  const double ratio = q / (gamma * gamma);
  double power = 1.0;
  for (int n = 1; n < 60; ++n) {
    const double term = power * regularized_gamma_lower(2 * n, a);
    sum += term;
    if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
    power *= ratio;
  }
  return sum / (4.0 * gamma * gamma * gamma);
}

double js2_closed(double q, double gamma, double t) {
  const double g2 = 2.0 * gamma;
  if (q > 0.0) {
    const double kappa = std::sqrt(q);
    const double mean = 0.5 * (phi(g2 - 2.0 * kappa, t) + phi(g2 + 2.0 * kappa, t));
    return (mean - phi(g2, t)) / (2.0 * q);
  }
  const double k = std::sqrt(-q);
  return (phi_real(g2, 2.0 * k, t) - phi(g2, t)) / (2.0 * q);
}

// e^{-Γt}·cosh(√q t) and e^{-Γt}·sinh(√q t)/√q, continued to q < 0.
struct DampedTrig {
  double c;
  double s;
};

DampedTrig damped_trig(double q, double gamma, double t) {
  if (std::abs(q) * t * t <= kSeriesThreshold) {
    const double x = q * t * t;
    double c = 0.0, s = 0.0;
    double term = 1.0;
    for (int n = 0; n < 30; ++n) {
      c += term;
      s += term / (2.0 * n + 1.0);
      term *= x / ((2.0 * n + 1.0) * (2.0 * n + 2.0));
      if (std::abs(term) < 1e-18) break;
    }
    const double decay = std::exp(-gamma * t);
    return {decay * c, decay * s * t};
  }
  if (q > 0.0) {
    const double kappa = std::sqrt(q);
    const double grow = std::exp((kappa - gamma) * t);
    const double back = std::exp(-2.0 * kappa * t);
    return {0.5 * grow * (1.0 + back), -0.5 * grow * std::expm1(-2.0 * kappa * t) / kappa};
  }
  const double k = std::sqrt(-q);
  const double decay = std::exp(-gamma * t);
  return {decay * std::cos(k * t), decay * std::sin(k * t) / k};
}

}  // namespace

double SystemParams::epsilon_c() const noexcept {
  return std::hypot(omega(), gamma);
}

void SystemParams::validate() const {
  if (!std::isfinite(omega0) || !std::isfinite(delta_omega) ||
      !std::isfinite(epsilon) || !std::isfinite(gamma) || !std::isfinite(n_bath)) {
    throw DomainError("system parameters must be finite");
  }
  if (epsilon < 0.0) throw DomainError("epsilon must be nonnegative");
  if (gamma < 0.0) throw DomainError("gamma must be nonnegative");
  if (n_bath < 0.0) throw DomainError("n_bath must be nonnegative");
}

std::string_view to_string(Regime regime) noexcept {
  switch (regime) {
    case Regime::below_eigenvalue_split: return "below_eigenvalue_split";
    case Regime::exceptional: return "exceptional";
    case Regime::transient_split: return "transient_split";
    case Regime::critical: return "critical";
    case Regime::above_threshold: return "above_threshold";
  }
  return "unknown";
}

SpectralInfo spectral_info(const SystemParams& params) {
  params.validate();
  const double w2 = params.omega() * params.omega();
  const double g2 = params.gamma * params.gamma;
  const double e2 = params.epsilon * params.epsilon;
  const double ec2 = w2 + g2;
  const double window = kRegimeWindow * std::max({w2, g2, e2});

  SpectralInfo info;
  info.epsilon_c = std::sqrt(ec2);
  double q = e2 - w2;
  if (std::abs(q) <= window) {
    info.regime = Regime::exceptional;
  } else if (e2 < w2) {
    info.regime = Regime::below_eigenvalue_split;
  } else if (std::abs(e2 - ec2) <= window) {
    info.regime = Regime::critical;
  } else if (e2 < ec2) {
    info.regime = Regime::transient_split;
  } else {
    info.regime = Regime::above_threshold;
  }
  const std::complex<double> root = std::sqrt(std::complex<double>(q, 0.0));
  info.lambda_minus = params.gamma - root;
  info.lambda_plus = params.gamma + root;
  return info;
}

DriftDiffusion drift_and_diffusion(const SystemParams& params) {
  params.validate();
  const double w = params.omega();
  const double e = params.epsilon;
  const double g = params.gamma;
  DriftDiffusion dd;
  dd.drift << -g, w - e, -(w + e), -g;
  dd.diffusion = 2.0 * g * (1.0 + 2.0 * params.n_bath) * Eigen::Matrix2d::Identity();
  return dd;
}

Propagator propagator(const SystemParams& params, double t) {
  params.validate();
  require_time(t);
  const double w = params.omega();
  const double e = params.epsilon;
  const double g = params.gamma;
  const double q = e * e - w * w;

  // A = -Γ·I + B with B² = q·I, so e^{At} = e^{-Γt}(C·I + S·B).
  const double scale = g_c2_scale.load(std::memory_order_relaxed);
  Eigen::Matrix2d b_mixed;
  b_mixed << 0.0, w - scale * e, -(w + scale * e), 0.0;

  const DampedTrig trig = damped_trig(q, g, t);
  Propagator out;
  out.transfer = trig.c * Eigen::Matrix2d::Identity() + trig.s * b_mixed;

  out.noise.setZero();
  if (g > 0.0 && t > 0.0) {
    const double tau2 = std::min(t * t, 1.0 / (g * g));
    const double js2 = std::abs(q) * tau2 <= kSeriesThreshold ? js2_series(q, g, t)
                                                              : js2_closed(q, g, t);
    const double jc2 = phi(2.0 * g, t) + q * js2;
    const double jcs = 0.5 * trig.s * trig.s + g * js2;
    Eigen::Matrix2d b_sym;  // B + Bᵀ
    b_sym << 0.0, -2.0 * e, -2.0 * e, 0.0;
    Eigen::Matrix2d b_bt;   // B·Bᵀ
    b_bt << (w - e) * (w - e), 0.0, 0.0, (w + e) * (w + e);
    out.noise = 2.0 * g * (1.0 + 2.0 * params.n_bath) *
                (jc2 * Eigen::Matrix2d::Identity() + jcs * b_sym + js2 * b_bt);
  }
  return out;
}

GaussianStated evolve_critical(const SystemParams& params,
                               const GaussianStated& state0, double t) {
  require_time(t);
  if (t == 0.0) {
    params.validate();
    return state0;
  }
  const Propagator prop = propagator(params, t);
  const Eigen::Matrix2d sigma =
      prop.transfer * state0.sigma() * prop.transfer.transpose() + prop.noise;
  if (!sigma.allFinite()) {
    throw NumericalError("covariance overflowed during propagation");
  }
  return GaussianStated(prop.transfer * state0.v(), sigma);
}

GaussianStated steady_state(const SystemParams& params) {
  params.validate();
  if (params.gamma == 0.0) {
    throw NoSteadyStateError("no steady state without dissipation (gamma = 0)");
  }
  const double ec = params.epsilon_c();
  const double e = params.epsilon;
  if (ec - e <= 1e-12 * ec) {
    throw NoSteadyStateError(
        "no steady state for epsilon >= epsilon_c: the mode is unstable");
  }
  const double w = params.omega();
  const double ec2 = ec * ec;
  const double pref = (1.0 + 2.0 * params.n_bath) / ((ec - e) * (ec + e));
  Eigen::Matrix2d sigma;
  sigma << ec2 - w * e, -params.gamma * e, -params.gamma * e, ec2 + w * e;
  return GaussianStated(Eigen::Vector2d::Zero(), pref * sigma);
}

double mean_photons_vs_time(const SystemParams& params, double t) {
  return mean_photons(evolve_critical(params, thermal_state(params.n_bath), t));
}

GaussianStated evolve_passive(const SystemParams& params,
                              const GaussianStated& state0, double t) {
  params.validate();
  require_time(t);
  if (params.epsilon != 0.0) {
    throw PreconditionError("passive evolution requires epsilon = 0");
  }
  const double decay = std::exp(-params.gamma * t);
  const Eigen::Matrix2d rot = rotation_matrix(-params.delta_omega * t);
  const Eigen::Matrix2d sigma =
      decay * decay * rot * state0.sigma() * rot.transpose() -
      std::expm1(-2.0 * params.gamma * t) * (1.0 + 2.0 * params.n_bath) *
          Eigen::Matrix2d::Identity();
  return GaussianStated(decay * rot * state0.v(), sigma);
}

double purity_vs_time(const SystemParams& params, double t) {
  return purity(evolve_critical(params, thermal_state(params.n_bath), t));
}

ScopedC2Perturbation::ScopedC2Perturbation(double relative_error)
    : previous_(g_c2_scale.exchange(1.0 + relative_error)) {}

ScopedC2Perturbation::~ScopedC2Perturbation() { g_c2_scale.store(previous_); }

}  // namespace cqsense
