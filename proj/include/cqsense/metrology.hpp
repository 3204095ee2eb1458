#ifndef CQSENSE_METROLOGY_HPP
#define CQSENSE_METROLOGY_HPP

#include <functional>

#include <Eigen/Dense>

#include "cqsense/gaussian_state.hpp"

namespace cqsense {

/// A state at δω = 0 together with its derivative with respect to δω.
struct DerivativePair {
  GaussianStated state;
  Eigen::Vector2d dv = Eigen::Vector2d::Zero();
  Eigen::Matrix2d dsigma = Eigen::Matrix2d::Zero();
  /// Step-halving estimate of the absolute error in (dv, dsigma).
  double error_estimate = 0.0;
  /// Set when error_estimate exceeds 1e-6 of the derivative norm.
  bool accuracy_warning = false;
  /// Finite-difference step used; zero for analytic derivatives.
  double step = 0.0;
};

using StateFamily = std::function<GaussianStated(double)>;

struct DifferentiationOptions {
  double h = 1e-5;
};

/// Central differences at ±h and ±h/2 combined by Richardson extrapolation.
DerivativePair differentiate_at_zero_shift(const StateFamily& family,
                                           DifferentiationOptions options = {});

struct QfiTerms {
  double covariance = 0.0;   // ½ tr[(Σ⁻¹∂Σ)²]/(1+μ²)
  double purity = 0.0;       // 2(∂μ)²/(1−μ⁴)
  double displacement = 0.0; // 2 ∂vᵀ Σ⁻¹ ∂v
  double total() const noexcept { return covariance + purity + displacement; }
};

/// Below this value of 1 − μ⁴ the state is treated as pure.
inline constexpr double kPureStateThreshold = 1e-9;
/// Largest |∂μ| for which the purity term may be dropped at a pure state.
/// The effective tolerance is raised to the propagated uncertainty of ∂μ
/// when the derivative carries a larger numerical error.
inline constexpr double kPurityDerivativeTolerance = 1e-7;

/// Uncertainty of ∂μ implied by the error estimate and rounding floor of
/// the derivative pair.
double purity_derivative_uncertainty(const DerivativePair& pair);

QfiTerms qfi_terms(const DerivativePair& pair);
double qfi(const DerivativePair& pair);

/// Fidelity (Tr√(√ρ₁ ρ₂ √ρ₁))² between two single-mode Gaussian states.
double gaussian_fidelity(const GaussianStated& a, const GaussianStated& b);

/// 8(1 − √F)/dθ² with F the fidelity between family(dθ/2) and family(−dθ/2).
double qfi_fidelity_oracle(const StateFamily& family, double dtheta);

struct HomodyneSetting {
  double psi = 0.0;
};

/// Variance of x(ψ) = cos ψ·x + sin ψ·p in the covariance convention.
double homodyne_variance(const Eigen::Matrix2d& sigma, double psi);

double fi_homodyne(const DerivativePair& pair, HomodyneSetting setting);

/// (∂N)²/Δ²N for a zero-mean family.
double snr_photon_counting(const DerivativePair& pair);

}  // namespace cqsense

#endif  // CQSENSE_METROLOGY_HPP
