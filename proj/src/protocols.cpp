#include "cqsense/protocols.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "cqsense/numerics.hpp"

namespace cqsense {

namespace {

constexpr double kStepFraction = 1e-3;
constexpr double kDefaultStep = 1e-5;
constexpr double kBudgetSlack = 1e-9;
constexpr double kBoundSlack = 1e-6;

double passive_step(double t) { return t > 0.0 ? kStepFraction / t : kDefaultStep; }

void require_positive_time(double t, const char* what) {
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError(what);
}

PqsInput split_budget(double budget, double n_bath, double r) {
  const double squeezed = (1.0 + 2.0 * n_bath) * std::sinh(r) * std::sinh(r);
  PqsInput input;
  input.alpha.magnitude = std::sqrt(std::max(0.0, budget - squeezed));
  input.squeeze.r = r;
  return input;
}

template <typename Objective>
PqsOptimum optimize_split(double n_max, double n_bath, Objective objective) {
  const double budget = n_max - n_bath;
  if (!(budget >= 0.0)) {
    throw ConstraintError("photon budget is below the thermal occupation");
  }
  const double r_max = std::asinh(std::sqrt(budget / (1.0 + 2.0 * n_bath)));
  if (r_max == 0.0) {
    PqsInput input = split_budget(budget, n_bath, 0.0);
    return {objective(input), input};
  }
  const auto f = [&](double r) { return objective(split_budget(budget, n_bath, r)); };
  const numerics::Extremum best = numerics::grid_maximize(f, 0.0, r_max, 64, false, 1e-8);
  return {best.value, split_budget(budget, n_bath, best.x)};
}

}  // namespace

void ResourceBudget::validate() const {
  if (!(n_max > 0.0) || !std::isfinite(n_max)) throw DomainError("n_max must be positive");
  if (!(total_time > 0.0) || !std::isfinite(total_time)) {
    throw DomainError("total_time must be positive");
  }
  if (!(t_pm >= 0.0) || !std::isfinite(t_pm)) throw DomainError("t_pm must be nonnegative");
}

double ResourceBudget::repetitions(double t_single) const {
  return total_time / (t_single + t_pm);
}

std::string_view to_string(ProtocolKind kind) noexcept {
  return kind == ProtocolKind::cqs ? "CQS" : "PQS";
}

double critical_step(const SystemParams& params, double t) {
  if (!(t > 0.0)) return kDefaultStep;
  const double w = std::abs(params.omega());
  const double e = params.epsilon;
  const double g = params.gamma;
  double scale = 1.0 / t;
  const double ec = params.epsilon_c();
  if (g > 0.0 && e < ec) {
    const double gap = (ec - e) * (ec + e);
    scale = std::min(scale, gap / (2.0 * w + std::sqrt(gap)));
  }
  if (w > 0.0) {
    const double tau = g > 0.0 ? std::min(t, 1.0 / g) : t;
    const double kappa = std::sqrt(std::abs(e * e - w * w));
    scale = std::min(scale, std::max(1.0 / (2.0 * w * tau * tau), kappa / (w * tau)));
  }
  return kStepFraction * scale;
}

DerivativePair cqs_pair(const SystemParams& params, double t) {
  params.validate();
  const GaussianStated start = thermal_state(params.n_bath);
  const double base = params.delta_omega;
  return differentiate_at_zero_shift(
      [&](double d) { return evolve_critical(params.with_shift(base + d), start, t); },
      {critical_step(params, t)});
}

double cqs_qfi(const SystemParams& params, double t) {
  if (t == 0.0) return 0.0;
  return qfi(cqs_pair(params, t));
}

DerivativePair cqs_steady_pair(const SystemParams& params) {
  params.validate();
  const double base = params.delta_omega;
  const double w = std::abs(params.omega());
  const double ec = params.epsilon_c();
  const double gap = (ec - params.epsilon) * (ec + params.epsilon);
  const double h = gap > 0.0 ? kStepFraction * gap / (2.0 * w + std::sqrt(gap)) : kDefaultStep;
  return differentiate_at_zero_shift(
      [&](double d) { return steady_state(params.with_shift(base + d)); }, {h});
}

double cqs_steady_qfi(const SystemParams& params) { return qfi(cqs_steady_pair(params)); }

GaussianStated pqs_input_state(const PqsInput& input, double n_bath) {
  return apply_displace(apply_squeeze(thermal_state(n_bath), input.squeeze), input.alpha);
}

double pqs_input_photons(const PqsInput& input, double n_bath) {
  const double sh = std::sinh(input.squeeze.r);
  return input.alpha.magnitude * input.alpha.magnitude +
         (1.0 + 2.0 * n_bath) * sh * sh + n_bath;
}

DerivativePair pqs_pair(const PqsInput& input, const SystemParams& params, double t) {
  params.validate();
  const GaussianStated start = pqs_input_state(input, params.n_bath);
  const double base = params.delta_omega;
  return differentiate_at_zero_shift(
      [&](double d) { return evolve_passive(params.with_shift(base + d), start, t); },
      {passive_step(t)});
}

double pqs_qfi(const PqsInput& input, const SystemParams& params, double t) {
  if (t == 0.0) return 0.0;
  return qfi(pqs_pair(input, params, t));
}

PqsOptimum pqs_optimal_qfi(double n_max, const SystemParams& params, double t) {
  return optimize_split(n_max, params.n_bath,
                        [&](const PqsInput& in) { return pqs_qfi(in, params, t); });
}

PqsOptimum pqs_optimal_homodyne(double n_max, const SystemParams& params, double t) {
  const HomodyneSetting p_quadrature{std::numbers::pi / 2.0};
  return optimize_split(n_max, params.n_bath, [&](const PqsInput& in) {
    if (t == 0.0) return 0.0;
    return fi_homodyne(pqs_pair(in, params, t), p_quadrature);
  });
}

HomodyneOptimum best_homodyne(const DerivativePair& pair) {
  constexpr int kGrid = 256;
  const double pi = std::numbers::pi;
  const double spacing = pi / kGrid;
  const auto f = [&](double psi) { return fi_homodyne(pair, {psi}); };

  std::vector<double> candidates;
  for (int i = 0; i < kGrid; ++i) candidates.push_back(i * spacing);
  // Squeezed and anti-squeezed axes can host maxima narrower than the grid.
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(pair.state.sigma());
  for (int k = 0; k < 2; ++k) {
    const Eigen::Vector2d axis = eig.eigenvectors().col(k);
    double psi = std::atan2(axis(1), axis(0));
    if (psi < 0.0) psi += pi;
    candidates.push_back(psi);
  }
  std::vector<std::pair<double, double>> scored;
  for (double psi : candidates) scored.emplace_back(f(psi), psi);
  std::sort(scored.begin(), scored.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });

  HomodyneOptimum best{scored.front().first, scored.front().second};
  for (std::size_t i = 0; i < std::min<std::size_t>(3, scored.size()); ++i) {
    const double centre = scored[i].second;
    const numerics::Extremum e =
        numerics::golden_section_maximize(f, centre - spacing, centre + spacing, 1e-10);
    if (e.value > best.fi) best = {e.value, e.x};
  }
  best.psi = std::fmod(std::fmod(best.psi, pi) + pi, pi);
  return best;
}

double epsilon_opt(double n_max, const SystemParams& params) {
  params.validate();
  if (!(n_max > params.n_bath)) {
    throw ConstraintError("photon budget must exceed the thermal occupation");
  }
  const double ec = params.epsilon_c();
  return ec * std::sqrt(2.0 * (n_max - params.n_bath) / (1.0 + 2.0 * n_max));
}

SqueezeParam optimal_squeezing_homodyne(double n_max, double gamma, double t) {
  if (!(gamma * t > 0.0)) throw DomainError("optimal squeezing requires gamma*t > 0");
  if (!(n_max > 0.0)) throw DomainError("n_max must be positive");
  // ½(coth x − 1)(√(e^{4x} + 4N(e^{2x} − 1)) − 1) rewritten in y = e^{-2x}
  const double y = std::exp(-2.0 * gamma * t);
  const double one_minus_y = -std::expm1(-2.0 * gamma * t);
  const double growth = 4.0 * n_max * y * one_minus_y;
  const double numerator = growth / (std::sqrt(1.0 + growth) + 1.0) + one_minus_y;
  const double r = 0.5 * std::log(numerator / one_minus_y);
  const double sh = std::sinh(r);
  if (sh * sh > n_max * (1.0 + kBudgetSlack)) {
    throw ConstraintError("optimal squeezing exceeds the photon budget");
  }
  return {r, 0.0};
}

double optimal_homodyne_fi(double n_max, double gamma, double t) {
  const double gt = gamma * t;
  const double e2 = std::exp(2.0 * gt);
  const double root = std::sqrt(e2 * e2 + 4.0 * n_max * std::expm1(2.0 * gt));
  return 8.0 * n_max * (1.0 + n_max) * t * t / (e2 * (1.0 + 2.0 * n_max) - 2.0 * n_max + root);
}

PqsInput optimal_homodyne_input(double n_max, double gamma, double t) {
  const SqueezeParam s = optimal_squeezing_homodyne(n_max, gamma, t);
  PqsInput input;
  input.squeeze = s;
  const double sh = std::sinh(s.r);
  input.alpha.magnitude = std::sqrt(std::max(0.0, n_max - sh * sh));
  return input;
}

TimeOptimum optimize_time(const RateFunction& rate_fn, const ResourceBudget& budget,
                          std::pair<double, double> bracket) {
  if (!(bracket.first > 0.0) || !(bracket.second > bracket.first)) {
    throw SearchError("time bracket must satisfy 0 < t_lo < t_hi");
  }
  const double t_pm = budget.t_pm;
  const numerics::Extremum e = numerics::grid_maximize(
      [&](double t) { return rate_fn(t) / (t + t_pm); }, bracket.first, bracket.second, 128,
      true, 1e-6);
  return {e.x, e.value};
}

TimeOptimum maximize_single_shot(const RateFunction& rate_fn,
                                 std::pair<double, double> bracket) {
  if (!(bracket.first > 0.0) || !(bracket.second > bracket.first)) {
    throw SearchError("time bracket must satisfy 0 < t_lo < t_hi");
  }
  const numerics::Extremum e =
      numerics::grid_maximize(rate_fn, bracket.first, bracket.second, 128, true, 1e-6);
  return {e.x, e.value};
}

BoundResult fundamental_bound(const PhotonTrajectory& photons, double total_time,
                              double gamma, double n_bath) {
  require_positive_time(total_time, "bound requires a positive total time");
  if (!(gamma >= 0.0) || !(n_bath >= 0.0)) {
    throw DomainError("gamma and n_bath must be nonnegative");
  }
  double sup = 0.0;
  const auto integrand = [&](double s) {
    const double n = photons(s);
    if (!std::isfinite(n)) throw NumericalError("photon trajectory is not finite");
    if (n < -1e-12) throw DomainError("photon number must be nonnegative");
    const double np = std::max(0.0, n);
    sup = std::max(sup, np);
    return 2.0 * np / (1.0 + 2.0 * n_bath - n_bath / (np + 1.0));
  };
  const double integral = numerics::adaptive_simpson(integrand, 0.0, total_time, 1e-8);
  BoundResult out;
  if (gamma == 0.0) {
    out.integral = integral > 0.0 ? INFINITY : 0.0;
    out.cap = sup > 0.0 ? INFINITY : 0.0;
    return out;
  }
  out.integral = integral / gamma;
  out.cap = 2.0 * sup * total_time / (gamma * (1.0 + 2.0 * n_bath - n_bath / (sup + 1.0)));
  return out;
}

MetrologyReport total_qfi(const ProtocolSpec& spec, double t_single) {
  spec.budget.validate();
  spec.params.validate();
  require_positive_time(t_single, "t_single must be positive");
  const SystemParams& params = spec.params;
  const double limit = spec.budget.n_max * (1.0 + kBudgetSlack);

  MetrologyReport report;
  std::optional<DerivativePair> pair;
  PhotonTrajectory trajectory;
  if (spec.kind == ProtocolKind::pqs) {
    if (!spec.pqs_input) throw PreconditionError("PQS requires an input state");
    if (params.epsilon != 0.0) throw PreconditionError("PQS requires epsilon = 0");
    if (pqs_input_photons(*spec.pqs_input, params.n_bath) > limit) {
      throw ConstraintError("PQS input state exceeds the photon budget");
    }
    const GaussianStated start = pqs_input_state(*spec.pqs_input, params.n_bath);
    trajectory = [params, start](double s) {
      return mean_photons(evolve_passive(params, start, s));
    };
    pair.emplace(pqs_pair(*spec.pqs_input, params, t_single));
  } else {
    if (params.gamma > 0.0) {
      if (params.epsilon >= params.epsilon_c()) {
        throw UnsupportedRegimeError(
            "dissipative CQS above threshold has no photon-number bound");
      }
      if (mean_photons(steady_state(params)) > limit) {
        throw ConstraintError("steady-state photon number exceeds the budget");
      }
    } else if (mean_photons_vs_time(params, t_single) > limit) {
      throw ConstraintError("photon number at the end of the window exceeds the budget");
    }
    trajectory = [params](double s) { return mean_photons_vs_time(params, s); };
    pair.emplace(cqs_pair(params, t_single));
  }

  report.qfi_single_shot = qfi(*pair);
  report.accuracy_warning = pair->accuracy_warning;
  const HomodyneOptimum hom = best_homodyne(*pair);
  report.fi_homodyne_best = hom.fi;
  report.best_psi = hom.psi;
  report.photons_at_t = trajectory(t_single);
  report.repetitions = spec.budget.repetitions(t_single);
  report.total_qfi = report.repetitions * report.qfi_single_shot;
  const BoundResult bound =
      fundamental_bound(trajectory, t_single, params.gamma, params.n_bath);
  report.bound_value = report.repetitions * bound.integral;
  report.bound_cap = report.repetitions * bound.cap;
  report.t_opt = t_single;
  if (report.total_qfi > report.bound_value * (1.0 + kBoundSlack)) {
    throw NumericalError("total QFI exceeds the fundamental bound");
  }
  return report;
}

double beyond_threshold_qfi(const SystemParams& params, double t) {
  params.validate();
  if (params.gamma > 0.0) {
    throw UnsupportedRegimeError("beyond-threshold analysis requires gamma = 0");
  }
  if (params.n_bath != 0.0) throw PreconditionError("beyond-threshold analysis requires n_bath = 0");
  if (!(params.epsilon > params.epsilon_c())) {
    throw PreconditionError("beyond-threshold analysis requires epsilon > epsilon_c");
  }
  return cqs_qfi(params, t);
}

double beyond_threshold_asymptote(const SystemParams& params, double t) {
  const double ec = params.epsilon_c();
  const double n = mean_photons_vs_time(params, t);
  return 4.0 * n * n / ((params.epsilon - ec) * (params.epsilon + ec));
}

double beyond_threshold_epsilon(double n_max, double total_time, const SystemParams& params) {
  require_positive_time(total_time, "total time must be positive");
  if (!(n_max > 0.25)) throw DomainError("beyond-threshold choice needs n_max > 1/4");
  const double ec = params.epsilon_c();
  const double l = std::log(4.0 * n_max);
  return std::sqrt(ec * ec + l * l / (4.0 * total_time * total_time));
}

double beyond_threshold_epsilon_exact(double n_max, double total_time,
                                      const SystemParams& params) {
  const double guess = beyond_threshold_epsilon(n_max, total_time, params);
  SystemParams p = params;
  const auto excess = [&](double e) {
    p.epsilon = e;
    return mean_photons_vs_time(p, total_time) - n_max;
  };
  const double lo = params.epsilon_c();
  double hi = guess;
  while (excess(hi) < 0.0) hi *= 2.0;
  return numerics::bisect(excess, lo, hi);
}

double below_threshold_noiseless_qfi(double n_max, double total_time) {
  require_positive_time(total_time, "total time must be positive");
  SystemParams p;
  p.gamma = 0.0;
  p.omega0 = std::sqrt(n_max) / total_time;
  p.epsilon = p.omega0;
  return cqs_qfi(p, total_time);
}

}  // namespace cqsense
