#ifndef CQSENSE_ORACLE_HPP
#define CQSENSE_ORACLE_HPP

// Independent integrators used to cross-check the closed-form Gaussian
// calculus: RK4 on the moment equations and RK4 on the truncated Fock-space
// master equation.

#include <Eigen/Dense>

#include "cqsense/dynamics.hpp"

namespace cqsense {

/// Largest step accepted without complaint by lyapunov_rk4:
/// 0.01/max(|λ₊|, Γ, |ω|, ε).
double default_rk4_step(const SystemParams& params);

/// Classical RK4 with n = ⌈t/dt⌉ equal steps; no accuracy check.
GaussianStated lyapunov_rk4_fixed(const SystemParams& params,
                                  const GaussianStated& state0, double t, double dt);

/// As lyapunov_rk4_fixed, but also integrates with dt/2 and throws
/// AccuracyError if the two runs disagree by more than 1e-6 relative.
GaussianStated lyapunov_rk4(const SystemParams& params, const GaussianStated& state0,
                            double t, double dt);

struct FockDensityMatrix {
  int dim = 0;
  Eigen::MatrixXcd matrix;

  /// Throws NumericalError when Hermiticity, positivity or the trace
  /// bounds are violated.
  void validate(double leak_budget = 1e-8) const;
};

FockDensityMatrix fock_thermal(double n_bath, int dim);

/// Truncated Fock representation of a Gaussian state, built as
/// D(α)·U(θ)·S(r)·ρ_th·S†·U†·D† in an enlarged space and then cut to dim.
FockDensityMatrix fock_from_gaussian(const GaussianStated& state, int dim);

/// First and second moments of a density matrix in the Gaussian convention.
GaussianStated fock_moments(const FockDensityMatrix& rho);
double fock_mean_photons(const FockDensityMatrix& rho);

struct FockEvolution {
  FockDensityMatrix rho;
  /// Population of the top max(2, dim/10) levels.
  double leakage = 0.0;
};

/// Leakage above this value rejects a run.
inline constexpr double kLeakageBudget = 1e-8;

/// RK4 on the Lindblad generator. The internal step is the smaller of dt
/// and a stability limit derived from the generator norm.
FockEvolution fock_evolve(const SystemParams& params, const FockDensityMatrix& rho0,
                          double t, double dt);

/// Uhlmann fidelity (Tr√(√ρ σ √ρ))².
double uhlmann_fidelity(const FockDensityMatrix& rho, const FockDensityMatrix& sigma);

/// 8(1 − √F)/dθ² between the states evolved at δω = ±dθ/2 from rho0.
double fock_qfi_fidelity(const SystemParams& params, const FockDensityMatrix& rho0,
                         double t, double dtheta);
/// Same, starting from thermal(n_bath) truncated to dim.
double fock_qfi_fidelity(const SystemParams& params, double t, double dtheta, int dim);

}  // namespace cqsense

#endif  // CQSENSE_ORACLE_HPP
