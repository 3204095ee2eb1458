#include "cqsense/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include <Eigen/Sparse>
#include <unsupported/Eigen/MatrixFunctions>

namespace cqsense {

namespace {

using cd = std::complex<double>;
using SparseC = Eigen::SparseMatrix<cd>;

void require_step(double t, double dt) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("time must be nonnegative");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("step must be positive");
}

SparseC annihilation(int dim) {
  std::vector<Eigen::Triplet<cd>> entries;
  for (int k = 1; k < dim; ++k) entries.emplace_back(k - 1, k, std::sqrt(double(k)));
  SparseC a(dim, dim);
  a.setFromTriplets(entries.begin(), entries.end());
  return a;
}

Eigen::MatrixXcd dense_annihilation(int dim) { return Eigen::MatrixXcd(annihilation(dim)); }

double top_population(const Eigen::MatrixXcd& rho) {
  const int dim = static_cast<int>(rho.rows());
  const int band = std::max(2, dim / 10);
  double pop = 0.0;
  for (int k = dim - band; k < dim; ++k) pop += rho(k, k).real();
  return pop;
}

Eigen::MatrixXcd hermitian_sqrt(const Eigen::MatrixXcd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(0.5 * (m + m.adjoint()));
  Eigen::VectorXd values = eig.eigenvalues();
  if (values.minCoeff() < -1e-9) {
    throw NumericalError("density matrix has a negative eigenvalue");
  }
  values = values.cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * values.asDiagonal() * eig.eigenvectors().adjoint();
}

// Generator L(ρ) = Kρ + ρK† + 2Γ(1+n)·aρa† + 2Γn·a†ρa with the anti-Hermitian
// and damping parts collected in K.
struct Lindbladian {
  SparseC k;
  SparseC a;
  SparseC ad;
  double down = 0.0;
  double up = 0.0;

  Lindbladian(const SystemParams& params, int dim) {
    a = annihilation(dim);
    ad = SparseC(a.adjoint());
    const SparseC n = ad * a;
    const SparseC aad = a * ad;
    const SparseC a2 = a * a;
    const SparseC ad2 = ad * ad;
    const double g = params.gamma;
    const double nb = params.n_bath;
    const SparseC h = params.omega() * n + 0.5 * params.epsilon * (a2 + ad2);
    k = cd(0.0, -1.0) * h - cd(g * (1.0 + nb), 0.0) * n - cd(g * nb, 0.0) * aad;
    down = 2.0 * g * (1.0 + nb);
    up = 2.0 * g * nb;
  }

  Eigen::MatrixXcd operator()(const Eigen::MatrixXcd& rho) const {
    const Eigen::MatrixXcd krho = k * rho;
    Eigen::MatrixXcd out = krho + krho.adjoint();
    if (down != 0.0) {
      const Eigen::MatrixXcd arho = a * rho;
      out += down * (a * arho.adjoint()).adjoint();
    }
    if (up != 0.0) {
      const Eigen::MatrixXcd adrho = ad * rho;
      out += up * (ad * adrho.adjoint()).adjoint();
    }
    return out;
  }
};

Eigen::Vector2d drift_v(const Eigen::Matrix2d& a, const Eigen::Vector2d& v) { return a * v; }

Eigen::Matrix2d drift_sigma(const Eigen::Matrix2d& a, const Eigen::Matrix2d& d,
                            const Eigen::Matrix2d& s) {
  return a * s + s * a.transpose() + d;
}

}  // namespace

double default_rk4_step(const SystemParams& params) {
  const SpectralInfo info = spectral_info(params);
  const double rate = std::max({std::abs(info.lambda_plus), params.gamma,
                                std::abs(params.omega()), params.epsilon});
  return rate > 0.0 ? 0.01 / rate : 0.01;
}

GaussianStated lyapunov_rk4_fixed(const SystemParams& params,
                                  const GaussianStated& state0, double t, double dt) {
  require_step(t, dt);
  const DriftDiffusion dd = drift_and_diffusion(params);
  const Eigen::Matrix2d& a = dd.drift;
  const Eigen::Matrix2d& d = dd.diffusion;
  const long steps = std::max(1L, static_cast<long>(std::ceil(t / dt - 1e-12)));
  const double h = t / steps;
  Eigen::Vector2d v = state0.v();
  Eigen::Matrix2d s = state0.sigma();
  for (long i = 0; i < steps && t > 0.0; ++i) {
    const Eigen::Vector2d kv1 = drift_v(a, v);
    const Eigen::Matrix2d ks1 = drift_sigma(a, d, s);
    const Eigen::Vector2d kv2 = drift_v(a, v + 0.5 * h * kv1);
    const Eigen::Matrix2d ks2 = drift_sigma(a, d, s + 0.5 * h * ks1);
    const Eigen::Vector2d kv3 = drift_v(a, v + 0.5 * h * kv2);
    const Eigen::Matrix2d ks3 = drift_sigma(a, d, s + 0.5 * h * ks2);
    const Eigen::Vector2d kv4 = drift_v(a, v + h * kv3);
    const Eigen::Matrix2d ks4 = drift_sigma(a, d, s + h * ks3);
    v += h / 6.0 * (kv1 + 2.0 * kv2 + 2.0 * kv3 + kv4);
    s += h / 6.0 * (ks1 + 2.0 * ks2 + 2.0 * ks3 + ks4);
  }
  if (!v.allFinite() || !s.allFinite()) throw NumericalError("RK4 integration diverged");
  return GaussianStated(v, 0.5 * (s + s.transpose()));
}

GaussianStated lyapunov_rk4(const SystemParams& params, const GaussianStated& state0,
                            double t, double dt) {
  const GaussianStated coarse = lyapunov_rk4_fixed(params, state0, t, dt);
  const GaussianStated fine = lyapunov_rk4_fixed(params, state0, t, 0.5 * dt);
  const double scale = std::sqrt(fine.sigma().squaredNorm() + fine.v().squaredNorm());
  const double diff = std::sqrt((fine.sigma() - coarse.sigma()).squaredNorm() +
                                (fine.v() - coarse.v()).squaredNorm());
  if (diff > 1e-6 * scale) {
    throw AccuracyError("RK4 step-halving disagreement exceeds 1e-6; reduce dt");
  }
  return coarse;
}

void FockDensityMatrix::validate(double leak_budget) const {
  if (matrix.rows() != dim || matrix.cols() != dim) {
    throw NumericalError("density matrix shape does not match dim");
  }
  if ((matrix - matrix.adjoint()).cwiseAbs().maxCoeff() > 1e-10) {
    throw NumericalError("density matrix is not Hermitian");
  }
  const double tr = matrix.trace().real();
  if (tr > 1.0 + 1e-10 || tr < 1.0 - leak_budget) {
    throw NumericalError("density matrix trace out of range");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(matrix, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-9) {
    throw NumericalError("density matrix is not positive semidefinite");
  }
}

FockDensityMatrix fock_thermal(double n_bath, int dim) {
  if (!(n_bath >= 0.0)) throw DomainError("n_bath must be nonnegative");
  if (dim < 2) throw DomainError("dim must be at least 2");
  FockDensityMatrix rho{dim, Eigen::MatrixXcd::Zero(dim, dim)};
  const double ratio = n_bath / (1.0 + n_bath);
  double p = 1.0 / (1.0 + n_bath);
  for (int k = 0; k < dim; ++k) {
    rho.matrix(k, k) = p;
    p *= ratio;
  }
  return rho;
}

FockDensityMatrix fock_from_gaussian(const GaussianStated& state, int dim) {
  if (dim < 2) throw DomainError("dim must be at least 2");
  const int big = 2 * dim + 20;
  const Eigen::Matrix2d& sigma = state.sigma();
  const double nu = std::sqrt(std::max(1.0, sigma.determinant()));
  const double n_th = 0.5 * (nu - 1.0);

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(sigma / nu);
  const double lo = eig.eigenvalues()(0);
  const double hi = eig.eigenvalues()(1);
  const double r = 0.25 * std::log(hi / lo);
  const Eigen::Vector2d axis = eig.eigenvectors().col(1);
  const double theta = std::atan2(axis(1), axis(0));

  const Eigen::MatrixXcd a = dense_annihilation(big);
  const Eigen::MatrixXcd ad = a.adjoint();
  const Eigen::MatrixXcd squeeze = (0.5 * r * (ad * ad - a * a)).exp();
  Eigen::MatrixXcd rotate = Eigen::MatrixXcd::Zero(big, big);
  for (int k = 0; k < big; ++k) rotate(k, k) = std::polar(1.0, theta * k);
  const cd alpha(state.v()(0) / std::sqrt(2.0), state.v()(1) / std::sqrt(2.0));
  const Eigen::MatrixXcd displace = (alpha * ad - std::conj(alpha) * a).exp();

  const Eigen::MatrixXcd u = displace * rotate * squeeze;
  const Eigen::MatrixXcd full = u * fock_thermal(n_th, big).matrix * u.adjoint();
  FockDensityMatrix rho{dim, full.topLeftCorner(dim, dim)};
  rho.matrix = 0.5 * (rho.matrix + rho.matrix.adjoint()).eval();
  if (rho.matrix.trace().real() < 1.0 - kLeakageBudget) {
    throw TruncationError("Gaussian state does not fit in the truncated space",
                          static_cast<int>(std::ceil(1.5 * dim)));
  }
  return rho;
}

GaussianStated fock_moments(const FockDensityMatrix& rho) {
  const Eigen::MatrixXcd a = dense_annihilation(rho.dim);
  const double norm = rho.matrix.trace().real();
  const cd mean_a = (a * rho.matrix).trace() / norm;
  const cd mean_a2 = (a * a * rho.matrix).trace() / norm;
  const double n = fock_mean_photons(rho);
  Eigen::Vector2d v(std::sqrt(2.0) * mean_a.real(), std::sqrt(2.0) * mean_a.imag());
  Eigen::Matrix2d sigma;
  sigma(0, 0) = 2.0 * mean_a2.real() + 2.0 * n + 1.0 - 2.0 * v(0) * v(0);
  sigma(1, 1) = -2.0 * mean_a2.real() + 2.0 * n + 1.0 - 2.0 * v(1) * v(1);
  sigma(0, 1) = sigma(1, 0) = 2.0 * mean_a2.imag() - 2.0 * v(0) * v(1);
  return GaussianStated(v, sigma);
}

double fock_mean_photons(const FockDensityMatrix& rho) {
  double n = 0.0;
  for (int k = 0; k < rho.dim; ++k) n += k * rho.matrix(k, k).real();
  return n / rho.matrix.trace().real();
}

FockEvolution fock_evolve(const SystemParams& params, const FockDensityMatrix& rho0,
                          double t, double dt) {
  params.validate();
  require_step(t, dt);
  const int dim = rho0.dim;
  rho0.validate(1e-6);

  // Predicted photon number from the Gaussian moments of the input.
  const GaussianStated moments = fock_moments(rho0);
  double predicted = mean_photons(moments);
  for (int i = 1; i <= 16; ++i) {
    predicted = std::max(predicted, mean_photons(evolve_critical(params, moments, t * i / 16.0)));
  }
  if (predicted > dim / 12.0) {
    throw TruncationError("truncation too small for the predicted photon number",
                          std::max(30, static_cast<int>(std::ceil(12.0 * predicted))));
  }

  const Lindbladian lindblad(params, dim);
  const double norm_estimate = 2.0 * (std::abs(params.omega()) + params.epsilon) * dim +
                               4.0 * params.gamma * (1.0 + 2.0 * params.n_bath) * dim;
  double step = dt;
  if (norm_estimate > 0.0) step = std::min(step, 2.5 / norm_estimate);
  const long steps = t > 0.0 ? static_cast<long>(std::ceil(t / step - 1e-12)) : 0;
  const double h = steps > 0 ? t / steps : 0.0;

  Eigen::MatrixXcd rho = rho0.matrix;
  for (long i = 0; i < steps; ++i) {
    const Eigen::MatrixXcd k1 = lindblad(rho);
    const Eigen::MatrixXcd k2 = lindblad(rho + 0.5 * h * k1);
    const Eigen::MatrixXcd k3 = lindblad(rho + 0.5 * h * k2);
    const Eigen::MatrixXcd k4 = lindblad(rho + h * k3);
    rho += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    rho = 0.5 * (rho + rho.adjoint()).eval();
  }
  FockEvolution out{{dim, rho}, top_population(rho)};
  if (out.leakage > kLeakageBudget) {
    throw TruncationError("population reached the truncation edge",
                          static_cast<int>(std::ceil(1.5 * dim)));
  }
  return out;
}

double uhlmann_fidelity(const FockDensityMatrix& rho, const FockDensityMatrix& sigma) {
  if (rho.dim != sigma.dim) throw DomainError("density matrices differ in dimension");
  const Eigen::MatrixXcd product = hermitian_sqrt(rho.matrix) * hermitian_sqrt(sigma.matrix);
  // Tr√(√ρ σ √ρ) is the nuclear norm of √ρ√σ.
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(product);
  const double root = svd.singularValues().sum();
  return root * root;
}

double fock_qfi_fidelity(const SystemParams& params, const FockDensityMatrix& rho0,
                         double t, double dtheta) {
  if (!(dtheta >= 1e-4 && dtheta <= 1e-2)) {
    throw DomainError("dtheta must lie in [1e-4, 1e-2]");
  }
  if (t == 0.0) return 0.0;
  const double base = params.delta_omega;
  const double dt = default_rk4_step(params);
  const FockEvolution plus = fock_evolve(params.with_shift(base + 0.5 * dtheta), rho0, t, dt);
  const FockEvolution minus = fock_evolve(params.with_shift(base - 0.5 * dtheta), rho0, t, dt);
  const double f = uhlmann_fidelity(plus.rho, minus.rho);
  const double one_minus_root = -std::expm1(0.5 * std::log(f));
  return std::max(0.0, 8.0 * one_minus_root / (dtheta * dtheta));
}

double fock_qfi_fidelity(const SystemParams& params, double t, double dtheta, int dim) {
  return fock_qfi_fidelity(params, fock_thermal(params.n_bath, dim), t, dtheta);
}

}  // namespace cqsense
