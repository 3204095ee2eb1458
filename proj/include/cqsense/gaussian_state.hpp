#ifndef CQSENSE_GAUSSIAN_STATE_HPP
#define CQSENSE_GAUSSIAN_STATE_HPP

// Single-mode Gaussian states in the (x, p) quadrature basis with
// x = (a + a†)/√2, p = -i(a - a†)/√2. The covariance matrix uses the
// convention in which the vacuum is the identity.

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "cqsense/errors.hpp"

namespace cqsense {

/// Coherent amplitude α = magnitude · e^{i phase}.
struct DisplacementAmplitude {
  double magnitude = 0.0;
  double phase = 0.0;
};

/// Squeezing parameter ξ = r · e^{i phase}. Positive r with zero phase
/// stretches the x variance by e^{2r} and squeezes p by e^{-2r}.
struct SqueezeParam {
  double r = 0.0;
  double phase = 0.0;
};

namespace detail {

/// Slack added to the 1e-9 hard-fail threshold so that the rounding error of
/// det(Σ) for strongly squeezed states does not trip the uncertainty check.
template <typename Scalar>
Scalar determinant_rounding_slack(const Eigen::Matrix<Scalar, 2, 2>& sigma) {
  using std::abs;
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  return Scalar(64) * eps *
         (abs(sigma(0, 0) * sigma(1, 1)) + sigma(0, 1) * sigma(0, 1));
}

}  // namespace detail

/// Hard-fail threshold for violations of det(Σ) ≥ 1.
inline constexpr double kPhysicalityHardTolerance = 1e-9;
/// Tolerance for symmetry and for clamping purity to one.
inline constexpr double kPhysicalitySoftTolerance = 1e-12;

/// Immutable first and second moments of a single-mode Gaussian state.
template <typename Scalar>
class GaussianState {
 public:
  using Vector = Eigen::Matrix<Scalar, 2, 1>;
  using Matrix = Eigen::Matrix<Scalar, 2, 2>;

  /// Throws InvalidStateError when sigma is not symmetric, not finite, or
  /// violates the uncertainty relation by more than the hard tolerance.
  GaussianState(const Vector& v, const Matrix& sigma) : v_(v), sigma_(sigma) {
    using std::abs;
    if (!v.allFinite() || !sigma.allFinite()) {
      throw InvalidStateError("Gaussian state has non-finite moments");
    }
    const Scalar scale = std::max(Scalar(1), sigma.cwiseAbs().maxCoeff());
    if (abs(sigma(0, 1) - sigma(1, 0)) > Scalar(1e-9) * scale) {
      throw InvalidStateError("covariance matrix is not symmetric");
    }
    const Scalar off = (sigma(0, 1) + sigma(1, 0)) / Scalar(2);
    sigma_(0, 1) = off;
    sigma_(1, 0) = off;
    const Scalar det = sigma_.determinant();
    if (det < Scalar(1) - Scalar(kPhysicalityHardTolerance) -
                  detail::determinant_rounding_slack(sigma_)) {
      std::ostringstream msg;
      msg << "covariance violates the uncertainty relation: det = " << det;
      throw InvalidStateError(msg.str());
    }
  }

  static GaussianState vacuum() {
    return GaussianState(Vector::Zero(), Matrix::Identity());
  }

  const Vector& v() const noexcept { return v_; }
  const Matrix& sigma() const noexcept { return sigma_; }

 private:
  Vector v_;
  Matrix sigma_;
};

using GaussianStated = GaussianState<double>;

/// Counter-clockwise phase-space rotation R(θ).
template <typename Scalar = double>
Eigen::Matrix<Scalar, 2, 2> rotation_matrix(Scalar theta) {
  using std::cos;
  using std::sin;
  Eigen::Matrix<Scalar, 2, 2> r;
  r << cos(theta), -sin(theta), sin(theta), cos(theta);
  return r;
}

/// Symplectic matrix of S(ξ): stretch by e^{r} along the axis at angle
/// phase/2 and squeeze by e^{-r} orthogonally.
template <typename Scalar = double>
Eigen::Matrix<Scalar, 2, 2> squeeze_symplectic(const SqueezeParam& s) {
  using std::exp;
  const auto rot = rotation_matrix<Scalar>(Scalar(s.phase) / Scalar(2));
  Eigen::Matrix<Scalar, 2, 2> d = Eigen::Matrix<Scalar, 2, 2>::Zero();
  d(0, 0) = exp(Scalar(s.r));
  d(1, 1) = exp(-Scalar(s.r));
  return rot * d * rot.transpose();
}

template <typename Scalar = double>
GaussianState<Scalar> thermal_state(Scalar n_bath) {
  if (!(n_bath >= Scalar(0)) || !std::isfinite(static_cast<double>(n_bath))) {
    throw DomainError("thermal occupation must be finite and nonnegative");
  }
  using State = GaussianState<Scalar>;
  return State(State::Vector::Zero(),
               (Scalar(1) + Scalar(2) * n_bath) * State::Matrix::Identity());
}

/// Congruence v → S v, Σ → S Σ Sᵀ for an arbitrary symplectic S.
template <typename Scalar>
GaussianState<Scalar> apply_symplectic(
    const GaussianState<Scalar>& state,
    const Eigen::Matrix<Scalar, 2, 2>& symplectic) {
  const Eigen::Matrix<Scalar, 2, 2> sigma =
      symplectic * state.sigma() * symplectic.transpose();
  return GaussianState<Scalar>(symplectic * state.v(), sigma);
}

template <typename Scalar>
GaussianState<Scalar> apply_squeeze(const GaussianState<Scalar>& state,
                                    const SqueezeParam& s) {
  return apply_symplectic(state, squeeze_symplectic<Scalar>(s));
}

template <typename Scalar>
GaussianState<Scalar> apply_rotation(const GaussianState<Scalar>& state,
                                     Scalar theta) {
  return apply_symplectic(state, rotation_matrix<Scalar>(theta));
}

/// Shifts the means by √2·(|α|cos φ, |α|sin φ); the covariance is untouched.
template <typename Scalar>
GaussianState<Scalar> apply_displace(const GaussianState<Scalar>& state,
                                     const DisplacementAmplitude& d) {
  if (!(d.magnitude >= 0.0)) {
    throw DomainError("displacement magnitude must be nonnegative");
  }
  using std::cos;
  using std::sin;
  using std::sqrt;
  typename GaussianState<Scalar>::Vector shift;
  shift << sqrt(Scalar(2)) * Scalar(d.magnitude) * cos(Scalar(d.phase)),
      sqrt(Scalar(2)) * Scalar(d.magnitude) * sin(Scalar(d.phase));
  return GaussianState<Scalar>(state.v() + shift, state.sigma());
}

/// ⟨a†a⟩ = tr(Σ)/4 − 1/2 + |v|²/2.
template <typename Scalar>
Scalar mean_photons(const GaussianState<Scalar>& state) {
  return state.sigma().trace() / Scalar(4) - Scalar(1) / Scalar(2) +
         state.v().squaredNorm() / Scalar(2);
}

/// Photon-number variance of a zero-mean state,
/// (Σ₁₁² + Σ₂₂² + 2Σ₁₂²)/8 − 1/4.
template <typename Scalar>
Scalar photon_variance(const GaussianState<Scalar>& state) {
  if (state.v().norm() >= Scalar(1e-12)) {
    throw PreconditionError(
        "photon_variance requires a state with zero first moments");
  }
  const auto& s = state.sigma();
  return (s(0, 0) * s(0, 0) + s(1, 1) * s(1, 1) + Scalar(2) * s(0, 1) * s(0, 1)) /
             Scalar(8) -
         Scalar(1) / Scalar(4);
}

/// μ = 1/√det Σ, clamped to one within the soft tolerance.
template <typename Scalar>
Scalar purity(const GaussianState<Scalar>& state) {
  using std::sqrt;
  const Scalar det = state.sigma().determinant();
  if (det < Scalar(1) - Scalar(kPhysicalityHardTolerance) -
                detail::determinant_rounding_slack(state.sigma())) {
    throw InvalidStateError("purity undefined: det(sigma) < 1");
  }
  const Scalar mu = Scalar(1) / sqrt(det);
  return mu > Scalar(1) ? Scalar(1) : mu;
}

}  // namespace cqsense

#endif  // CQSENSE_GAUSSIAN_STATE_HPP
