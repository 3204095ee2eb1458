#ifndef CQSENSE_DYNAMICS_HPP
#define CQSENSE_DYNAMICS_HPP

#include <complex>
#include <string_view>

#include <Eigen/Dense>

#include "cqsense/gaussian_state.hpp"

namespace cqsense {

/// Single-mode cavity with squeezing drive and a thermal bath.
/// ω = omega0 + delta_omega; delta_omega is the shift to be estimated.
struct SystemParams {
  double omega0 = 1.0;
  double delta_omega = 0.0;
  double epsilon = 0.0;
  double gamma = 1.0;
  double n_bath = 0.0;

  double omega() const noexcept { return omega0 + delta_omega; }
  /// √(ω² + Γ²)
  double epsilon_c() const noexcept;
  SystemParams with_shift(double shift) const noexcept {
    SystemParams p = *this;
    p.delta_omega = shift;
    return p;
  }
  /// Throws DomainError on negative or non-finite fields.
  void validate() const;
};

enum class Regime {
  below_eigenvalue_split,  // ε < ω
  exceptional,             // ε ≈ ω
  transient_split,         // ω < ε < ε_c
  critical,                // ε ≈ ε_c
  above_threshold          // ε > ε_c
};

std::string_view to_string(Regime regime) noexcept;

/// Relative width of the degeneracy windows used by the regime classifier.
inline constexpr double kRegimeWindow = 1e-9;

struct SpectralInfo {
  std::complex<double> lambda_minus;
  std::complex<double> lambda_plus;
  double epsilon_c = 0.0;
  Regime regime = Regime::below_eigenvalue_split;
};

/// λ± = Γ ± √(ε² − ω²) with the principal square root.
SpectralInfo spectral_info(const SystemParams& params);

struct DriftDiffusion {
  Eigen::Matrix2d drift;      // A
  Eigen::Matrix2d diffusion;  // D
};

/// dv/dt = A v,  dΣ/dt = A Σ + Σ Aᵀ + D.
DriftDiffusion drift_and_diffusion(const SystemParams& params);

/// Closed-form propagator over time t: v(t) = transfer·v(0) and
/// Σ(t) = transfer·Σ(0)·transferᵀ + noise.
struct Propagator {
  Eigen::Matrix2d transfer;
  Eigen::Matrix2d noise;
};

Propagator propagator(const SystemParams& params, double t);

GaussianStated evolve_critical(const SystemParams& params,
                               const GaussianStated& state0, double t);

/// Throws NoSteadyStateError unless Γ > 0 and ε < ε_c.
GaussianStated steady_state(const SystemParams& params);

/// Mean photon number at time t starting from thermal(n_bath).
double mean_photons_vs_time(const SystemParams& params, double t);

/// Free damped evolution (ε = 0) in the frame rotating at omega0.
GaussianStated evolve_passive(const SystemParams& params,
                              const GaussianStated& state0, double t);

/// Purity at time t starting from thermal(n_bath).
double purity_vs_time(const SystemParams& params, double t);

/// Test hook: while alive, the ε-dependent (a† ↔ a mixing) part of the
/// transfer matrix is scaled by (1 + relative_error). The noise term and
/// drift_and_diffusion are left untouched, so any comparison against an
/// independent integrator exposes the mutation.
class ScopedC2Perturbation {
 public:
  explicit ScopedC2Perturbation(double relative_error);
  ~ScopedC2Perturbation();
  ScopedC2Perturbation(const ScopedC2Perturbation&) = delete;
  ScopedC2Perturbation& operator=(const ScopedC2Perturbation&) = delete;

 private:
  double previous_;
};

}  // namespace cqsense

#endif  // CQSENSE_DYNAMICS_HPP
