#include "cqsense/metrology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cqsense {

namespace {

struct Moments {
  Eigen::Vector2d v;
  Eigen::Matrix2d sigma;
};

Moments sample(const StateFamily& family, double shift) {
  const GaussianStated s = family(shift);
  if (!s.v().allFinite() || !s.sigma().allFinite()) {
    throw NumericalError("state family returned non-finite moments");
  }
  return {s.v(), s.sigma()};
}

Moments central_difference(const StateFamily& family, double h) {
  const Moments plus = sample(family, h);
  const Moments minus = sample(family, -h);
  return {(plus.v - minus.v) / (2.0 * h), (plus.sigma - minus.sigma) / (2.0 * h)};
}

double combined_norm(const Eigen::Vector2d& v, const Eigen::Matrix2d& m) {
  return std::sqrt(v.squaredNorm() + m.squaredNorm());
}

}  // namespace

DerivativePair differentiate_at_zero_shift(const StateFamily& family,
                                           DifferentiationOptions options) {
  const double h = options.h;
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw DomainError("finite-difference step must be positive");
  }
  GaussianStated base = family(0.0);
  const Moments coarse = central_difference(family, h);
  const Moments fine = central_difference(family, 0.5 * h);

  DerivativePair pair{std::move(base)};
  pair.dv = (4.0 * fine.v - coarse.v) / 3.0;
  pair.dsigma = (4.0 * fine.sigma - coarse.sigma) / 3.0;
  const Eigen::Matrix2d sym = 0.5 * (pair.dsigma + pair.dsigma.transpose());
  pair.dsigma = sym;
  pair.error_estimate =
      combined_norm(fine.v - coarse.v, fine.sigma - coarse.sigma) / 3.0;
  pair.step = h;
  pair.accuracy_warning =
      pair.error_estimate > 1e-6 * combined_norm(pair.dv, pair.dsigma);
  if (!pair.dv.allFinite() || !pair.dsigma.allFinite()) {
    throw NumericalError("non-finite derivative");
  }
  return pair;
}

double purity_derivative_uncertainty(const DerivativePair& pair) {
  const Eigen::Matrix2d& sigma = pair.state.sigma();
  double dsigma_error = pair.error_estimate;
  if (pair.step > 0.0) {
    dsigma_error += 4.0 * std::numeric_limits<double>::epsilon() * sigma.norm() / pair.step;
  }
  return 0.5 * purity(pair.state) * sigma.inverse().norm() * dsigma_error;
}

QfiTerms qfi_terms(const DerivativePair& pair) {
  const Eigen::Matrix2d& sigma = pair.state.sigma();
  const double det = sigma.determinant();
  if (!(det > 0.0)) throw NumericalError("covariance matrix is not invertible");
  const Eigen::Matrix2d inv = sigma.inverse();
  const Eigen::Matrix2d m = inv * pair.dsigma;

  const double mu = purity(pair.state);
  const double dmu = -0.5 * mu * m.trace();
  const double mu2 = mu * mu;

  QfiTerms terms;
  terms.covariance = 0.5 * (m * m).trace() / (1.0 + mu2);
  const double one_minus_mu4 = 1.0 - mu2 * mu2;
  if (one_minus_mu4 < kPureStateThreshold) {
    const double tolerance =
        std::max(kPurityDerivativeTolerance, 10.0 * purity_derivative_uncertainty(pair));
    if (std::abs(dmu) >= tolerance) {
      throw PureStateSingularityError(
          "purity is one but its derivative is not negligible");
    }
  } else {
    terms.purity = 2.0 * dmu * dmu / one_minus_mu4;
  }
  terms.displacement = 2.0 * pair.dv.dot(inv * pair.dv);
  return terms;
}

double qfi(const DerivativePair& pair) { return qfi_terms(pair).total(); }

double gaussian_fidelity(const GaussianStated& a, const GaussianStated& b) {
  const Eigen::Matrix2d sum = a.sigma() + b.sigma();
  const Eigen::Vector2d dv = a.v() - b.v();
  const double delta = (0.5 * sum).determinant();
  if (!(delta > 0.0)) throw NumericalError("singular covariance sum");
  const double lambda = std::max(
      0.0, 0.25 * (a.sigma().determinant() - 1.0) * (b.sigma().determinant() - 1.0));
  const double exponent = -dv.dot(sum.inverse() * dv);
  const double overlap = (std::sqrt(delta + lambda) + std::sqrt(lambda)) / delta;
  return std::exp(exponent) * overlap;
}

double qfi_fidelity_oracle(const StateFamily& family, double dtheta) {
  if (!(dtheta >= 1e-6 && dtheta <= 1e-3)) {
    throw DomainError("dtheta must lie in [1e-6, 1e-3]");
  }
  const GaussianStated plus = family(0.5 * dtheta);
  const GaussianStated minus = family(-0.5 * dtheta);
  const double f = gaussian_fidelity(plus, minus);
  // 1 − √F computed without cancellation
  const double one_minus_root = -std::expm1(0.5 * std::log(f));
  return std::max(0.0, 8.0 * one_minus_root / (dtheta * dtheta));
}

double homodyne_variance(const Eigen::Matrix2d& sigma, double psi) {
  const double c = std::cos(psi);
  const double s = std::sin(psi);
  return c * c * sigma(0, 0) + s * s * sigma(1, 1) + 2.0 * s * c * sigma(0, 1);
}

double fi_homodyne(const DerivativePair& pair, HomodyneSetting setting) {
  const double psi = setting.psi;
  const double var = homodyne_variance(pair.state.sigma(), psi);
  if (!(var > 1e-12)) {
    throw InvalidStateError("homodyne variance is not positive");
  }
  const double dvar = homodyne_variance(pair.dsigma, psi);
  const double dmean = std::cos(psi) * pair.dv(0) + std::sin(psi) * pair.dv(1);
  return (4.0 * var * dmean * dmean + dvar * dvar) / (2.0 * var * var);
}

double snr_photon_counting(const DerivativePair& pair) {
  const double variance = photon_variance(pair.state);
  if (!(variance > 1e-15)) {
    throw DegenerateError("photon-number variance vanishes");
  }
  const double dn = 0.25 * pair.dsigma.trace();
  return dn * dn / variance;
}

}  // namespace cqsense
