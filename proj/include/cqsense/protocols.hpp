#ifndef CQSENSE_PROTOCOLS_HPP
#define CQSENSE_PROTOCOLS_HPP

#include <functional>
#include <optional>
#include <string_view>
#include <utility>

#include "cqsense/dynamics.hpp"
#include "cqsense/metrology.hpp"

namespace cqsense {

struct ResourceBudget {
  double n_max = 1.0;
  double total_time = 1.0;
  double t_pm = 0.0;

  void validate() const;
  /// M = T/(t + t_pm)
  double repetitions(double t_single) const;
};

enum class ProtocolKind { cqs, pqs };

std::string_view to_string(ProtocolKind kind) noexcept;

struct PqsInput {
  DisplacementAmplitude alpha;
  SqueezeParam squeeze;
};

struct ProtocolSpec {
  ProtocolKind kind = ProtocolKind::cqs;
  SystemParams params;
  std::optional<PqsInput> pqs_input;
  ResourceBudget budget;
};

struct MetrologyReport {
  double qfi_single_shot = 0.0;
  double fi_homodyne_best = 0.0;
  double best_psi = 0.0;
  double photons_at_t = 0.0;
  double repetitions = 0.0;
  double total_qfi = 0.0;
  double bound_value = 0.0;
  double bound_cap = 0.0;
  double t_opt = 0.0;
  bool accuracy_warning = false;
};

// ---------------------------------------------------------------------------
// Single-shot Fisher information

/// Finite-difference step for the critical family: a fixed fraction of the
/// smallest frequency scale on which the state at time t changes.
double critical_step(const SystemParams& params, double t);

DerivativePair cqs_pair(const SystemParams& params, double t);
double cqs_qfi(const SystemParams& params, double t);

/// Derivative pair of the exact steady state.
DerivativePair cqs_steady_pair(const SystemParams& params);
double cqs_steady_qfi(const SystemParams& params);

/// D(α) S(ξ) ρ_th(n_bath)
GaussianStated pqs_input_state(const PqsInput& input, double n_bath);
/// |α|² + (1 + 2n_B) sinh²r + n_B
double pqs_input_photons(const PqsInput& input, double n_bath);

DerivativePair pqs_pair(const PqsInput& input, const SystemParams& params, double t);
double pqs_qfi(const PqsInput& input, const SystemParams& params, double t);

struct PqsOptimum {
  double value = 0.0;
  PqsInput input;
};

/// Best split of the photon budget between displacement and squeezing
/// (real α, real r) for the QFI at time t.
PqsOptimum pqs_optimal_qfi(double n_max, const SystemParams& params, double t);

/// Same search for homodyne detection of the p quadrature.
PqsOptimum pqs_optimal_homodyne(double n_max, const SystemParams& params, double t);

struct HomodyneOptimum {
  double fi = 0.0;
  double psi = 0.0;
};

HomodyneOptimum best_homodyne(const DerivativePair& pair);

// ---------------------------------------------------------------------------
// Closed-form optima

/// Drive strength whose steady state holds exactly n_max photons.
double epsilon_opt(double n_max, const SystemParams& params);

/// Squeezing that maximizes p-quadrature homodyne FI at zero temperature.
SqueezeParam optimal_squeezing_homodyne(double n_max, double gamma, double t);
/// Homodyne FI at the optimal squeezing, in closed form.
double optimal_homodyne_fi(double n_max, double gamma, double t);
/// Displacement/squeezing pair used with optimal_squeezing_homodyne.
PqsInput optimal_homodyne_input(double n_max, double gamma, double t);

// ---------------------------------------------------------------------------
// Time optimization and resource accounting

using RateFunction = std::function<double(double)>;

struct TimeOptimum {
  double t_opt = 0.0;
  double best_rate = 0.0;
};

/// Maximizes I(t)/(t + t_pm) over the bracket.
TimeOptimum optimize_time(const RateFunction& rate_fn, const ResourceBudget& budget,
                          std::pair<double, double> bracket);

/// Maximizes I(t) itself over the bracket.
TimeOptimum maximize_single_shot(const RateFunction& rate_fn,
                                 std::pair<double, double> bracket);

struct BoundResult {
  double integral = 0.0;  // ∫ 2N/(Γ(1+2n_B−n_B/(N+1))) dt
  double cap = 0.0;       // same with N replaced by its supremum
};

using PhotonTrajectory = std::function<double(double)>;

BoundResult fundamental_bound(const PhotonTrajectory& photons, double total_time,
                              double gamma, double n_bath);

/// Evaluates one sensing window of length t_single repeated over the budget.
/// Throws ConstraintError when the photon budget is violated.
MetrologyReport total_qfi(const ProtocolSpec& spec, double t_single);

// ---------------------------------------------------------------------------
// Beyond threshold (Γ = 0, ε > ε_c)

double beyond_threshold_qfi(const SystemParams& params, double t);
/// 4N²(t)/(ε² − ε_c²)
double beyond_threshold_asymptote(const SystemParams& params, double t);
/// ε² = ε_c² + log²(4N_max)/(4T²)
double beyond_threshold_epsilon(double n_max, double total_time,
                                const SystemParams& params);
/// ε solving N(T) = n_max exactly.
double beyond_threshold_epsilon_exact(double n_max, double total_time,
                                      const SystemParams& params);

/// Noiseless drive at the exceptional point ε = ω₀ = √N_max/T, which reaches
/// N(T) = N_max; returns the QFI at T.
double below_threshold_noiseless_qfi(double n_max, double total_time);

}  // namespace cqsense

#endif  // CQSENSE_PROTOCOLS_HPP
