#include "cqsense/validate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <regex>

#include "cqsense/errors.hpp"
#include "cqsense/numerics.hpp"
#include "cqsense/oracle.hpp"
#include "cqsense/protocols.hpp"

namespace cqsense {

namespace {

struct Measurement {
  double measured;
  double tolerance;
};

struct Check {
  const char* name;
  std::function<Measurement()> run;
};

SystemParams make(double omega0, double epsilon, double gamma, double n_bath = 0.0) {
  SystemParams p;
  p.omega0 = omega0;
  p.epsilon = epsilon;
  p.gamma = gamma;
  p.n_bath = n_bath;
  return p;
}

double relative(const Eigen::Matrix2d& a, const Eigen::Matrix2d& b) {
  return (a - b).norm() / b.norm();
}

/// One representative per dynamical regime.
std::vector<std::pair<SystemParams, double>> regime_samples() {
  return {{make(1.0, 0.5, 1.0), 2.0},
          {make(1.0, 1.0, 1.0, 1.0), 2.0},
          {make(1.0, 1.3, 0.5), 3.0},
          {make(1.0, 0.9975 * std::sqrt(2.0), 1.0), 5.0},
          {make(1.0, 2.0 * std::sqrt(2.0), 1.0), 1.0},
          {make(1.0, 2.0, 0.0), 1.5},
          {make(2.0, 0.0, 0.3, 0.5), 4.0}};
}

Measurement propagator_vs_rk4() {
  double worst = 0.0;
  for (const auto& [p, t] : regime_samples()) {
    const GaussianStated start = thermal_state(p.n_bath);
    const GaussianStated exact = evolve_critical(p, start, t);
    const GaussianStated rk4 = lyapunov_rk4(p, start, t, 0.25 * default_rk4_step(p));
    worst = std::max(worst, relative(exact.sigma(), rk4.sigma()));
  }
  return {worst, 1e-8};
}

Measurement displaced_propagator_vs_rk4() {
  double worst = 0.0;
  for (const auto& [p, t] : regime_samples()) {
    const GaussianStated start =
        apply_displace(apply_squeeze(thermal_state(p.n_bath), {0.4, 0.7}), {1.2, 0.3});
    const GaussianStated exact = evolve_critical(p, start, t);
    const GaussianStated rk4 = lyapunov_rk4(p, start, t, 0.25 * default_rk4_step(p));
    worst = std::max(worst, relative(exact.sigma(), rk4.sigma()));
    worst = std::max(worst, (exact.v() - rk4.v()).norm() / rk4.v().norm());
  }
  return {worst, 1e-8};
}

Measurement steady_state_limit() {
  double worst = 0.0;
  for (double ratio : {0.3, 0.6, 0.9, 0.9975}) {
    for (double n_bath : {0.0, 1.0}) {
      SystemParams p = make(1.0, 0.0, 1.0, n_bath);
      p.epsilon = ratio * p.epsilon_c();
      const double lambda = p.gamma - std::sqrt(std::max(0.0, p.epsilon * p.epsilon - 1.0));
      const GaussianStated late = evolve_critical(p, thermal_state(n_bath), 20.0 / lambda);
      worst = std::max(worst, relative(late.sigma(), steady_state(p).sigma()));
    }
  }
  return {worst, 1e-6};
}

Measurement epsilon_opt_budget() {
  double worst = 0.0;
  for (double n_max : {1.0, 100.0, 1e4}) {
    SystemParams p = make(1.0, 0.0, 1.0);
    p.epsilon = epsilon_opt(n_max, p);
    worst = std::max(worst, std::abs(mean_photons(steady_state(p)) / n_max - 1.0));
  }
  return {worst, 1e-9};
}

Measurement noiseless_passive_law() {
  double worst = 0.0;
  for (double n : {1.0, 10.0, 100.0}) {
    for (double t : {0.1, 1.0}) {
      PqsInput input;
      input.squeeze.r = std::asinh(std::sqrt(n));
      const double q = pqs_qfi(input, make(1.0, 0.0, 0.0), t);
      worst = std::max(worst, std::abs(q / (8.0 * n * (1.0 + n) * t * t) - 1.0));
    }
  }
  return {worst, 1e-8};
}

Measurement qfi_vs_fidelity() {
  double worst = 0.0;
  SystemParams p = make(1.0, 0.0, 1.0);
  p.epsilon = 0.8 * p.epsilon_c();
  const GaussianStated start = thermal_state(0.0);
  for (double t : {0.5, 2.0}) {
    const double q = cqs_qfi(p, t);
    const double oracle = qfi_fidelity_oracle(
        [&](double d) { return evolve_critical(p.with_shift(d), start, t); }, 1e-4);
    worst = std::max(worst, std::abs(oracle / q - 1.0));
  }
  PqsInput input;
  input.alpha.magnitude = 2.0;
  input.squeeze.r = 0.8;
  const SystemParams passive = make(1.0, 0.0, 1.0, 0.5);
  const GaussianStated pqs_start = pqs_input_state(input, passive.n_bath);
  const double q = pqs_qfi(input, passive, 0.7);
  const double oracle = qfi_fidelity_oracle(
      [&](double d) { return evolve_passive(passive.with_shift(d), pqs_start, 0.7); }, 1e-4);
  worst = std::max(worst, std::abs(oracle / q - 1.0));
  return {worst, 1e-4};
}

Measurement fock_moments_agreement() {
  const SystemParams p = make(1.0, 0.6, 1.0, 0.2);
  const double t = 1.0;
  const FockEvolution run = fock_evolve(p, fock_thermal(p.n_bath, 60), t, 1e-3);
  if (run.leakage > kLeakageBudget) throw TruncationError("leakage above budget", 120);
  const GaussianStated fock = fock_moments(run.rho);
  const GaussianStated gauss = evolve_critical(p, thermal_state(p.n_bath), t);
  const double dsigma = (fock.sigma() - gauss.sigma()).cwiseAbs().maxCoeff();
  const double dv = (fock.v() - gauss.v()).cwiseAbs().maxCoeff();
  return {std::max(dsigma, dv), 1e-4};
}

Measurement fock_qfi_agreement() {
  const SystemParams p = make(1.0, 0.6, 1.0);
  const double t = 1.0;
  const double fock = fock_qfi_fidelity(p, t, 1e-3, 60);
  return {std::abs(fock / cqs_qfi(p, t) - 1.0), 0.02};
}

Measurement homodyne_below_qfi() {
  double worst = 0.0;
  SystemParams p = make(1.0, 0.0, 1.0);
  p.epsilon = epsilon_opt(100.0, p);
  for (double t : {0.3, 3.0, 30.0}) {
    const DerivativePair pair = cqs_pair(p, t);
    worst = std::max(worst, best_homodyne(pair).fi / qfi(pair) - 1.0);
  }
  const DerivativePair steady = cqs_steady_pair(p);
  worst = std::max(worst, best_homodyne(steady).fi / qfi(steady) - 1.0);
  return {std::max(worst, 0.0), 1e-6};
}

Measurement bound_gate() {
  double worst = 0.0;
  ProtocolSpec cqs;
  cqs.params = make(1.0, 0.0, 1.0);
  cqs.params.epsilon = epsilon_opt(100.0, cqs.params);
  cqs.budget = {100.0, 10.0, 0.0};
  ProtocolSpec pqs;
  pqs.kind = ProtocolKind::pqs;
  pqs.params = make(1.0, 0.0, 1.0);
  pqs.budget = {100.0, 10.0, 0.0};
  for (double t : {0.05, 0.8, 5.0}) {
    const MetrologyReport rc = total_qfi(cqs, t);
    worst = std::max(worst, rc.total_qfi / rc.bound_value);
    pqs.pqs_input = pqs_optimal_qfi(100.0, pqs.params, t).input;
    const MetrologyReport rp = total_qfi(pqs, t);
    worst = std::max(worst, rp.total_qfi / rp.bound_value);
  }
  return {worst, 1.0 + 1e-6};
}

Measurement physicality_along_trajectories() {
  double worst = 0.0;
  for (const auto& [p, t_end] : regime_samples()) {
    for (double t : numerics::linear_space(0.0, t_end, 25)) {
      const GaussianStated s = evolve_critical(p, thermal_state(p.n_bath), t);
      worst = std::max(worst, 1.0 - s.sigma().determinant());
      worst = std::max(worst, purity(s) - 1.0);
    }
  }
  return {std::max(worst, 0.0), 1e-9};
}

const std::vector<Check>& checks() {
  static const std::vector<Check> all = {
      {"oracle.propagator_vs_rk4", propagator_vs_rk4},
      {"oracle.displaced_propagator_vs_rk4", displaced_propagator_vs_rk4},
      {"oracle.qfi_vs_fidelity", qfi_vs_fidelity},
      {"oracle.fock_moments", fock_moments_agreement},
      {"oracle.fock_qfi", fock_qfi_agreement},
      {"dynamics.steady_state_limit", steady_state_limit},
      {"dynamics.physicality", physicality_along_trajectories},
      {"protocols.epsilon_opt_budget", epsilon_opt_budget},
      {"protocols.noiseless_passive_law", noiseless_passive_law},
      {"protocols.bound_gate", bound_gate},
      {"metrology.homodyne_below_qfi", homodyne_below_qfi},
  };
  return all;
}

}  // namespace

std::vector<std::string> validation_check_names() {
  std::vector<std::string> names;
  for (const auto& c : checks()) names.emplace_back(c.name);
  return names;
}

std::vector<CheckResult> run_validation(const ValidationOptions& options) {
  const std::regex pattern(options.filter.empty() ? ".*" : options.filter);
  const ScopedC2Perturbation hook(options.c2_error);
  std::vector<CheckResult> results;
  for (const auto& c : checks()) {
    if (!std::regex_search(c.name, pattern)) continue;
    CheckResult r;
    r.name = c.name;
    try {
      const Measurement m = c.run();
      r.measured = m.measured;
      r.tolerance = m.tolerance;
      r.passed = std::isfinite(m.measured) && m.measured <= m.tolerance;
    } catch (const std::exception& e) {
      r.measured = NAN;
      r.detail = e.what();
    }
    results.push_back(std::move(r));
  }
  return results;
}

std::string format_validation_table(const std::vector<CheckResult>& results) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof line, "%-40s %-14s %-14s %s\n", "check", "measured", "tolerance",
                "status");
  out += line;
  int failed = 0;
  for (const auto& r : results) {
    std::snprintf(line, sizeof line, "%-40s %-14.6g %-14.6g %s\n", r.name.c_str(), r.measured,
                  r.tolerance, r.passed ? "PASS" : "FAIL");
    out += line;
    if (!r.detail.empty()) out += "    " + r.detail + "\n";
    if (!r.passed) ++failed;
  }
  std::snprintf(line, sizeof line, "%zu checks, %d failed\n", results.size(), failed);
  out += line;
  return out;
}

}  // namespace cqsense
