#include "cqsense/figures.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>

#include "cqsense/errors.hpp"
#include "cqsense/numerics.hpp"
#include "cqsense/parallel.hpp"
#include "cqsense/protocols.hpp"

namespace cqsense {

namespace {

constexpr double kNmax = 100.0;
constexpr double kNearThreshold = 0.9975;

using Row = std::vector<double>;

SystemParams unit_params() {
  SystemParams p;
  p.omega0 = 1.0;
  p.gamma = 1.0;
  return p;
}

/// 1/(Γ − √max(0, ε² − ω²)): the slowest relaxation time.
double slowest_time(const SystemParams& p) {
  const double w = p.omega();
  const double kappa = std::sqrt(std::max(0.0, p.epsilon * p.epsilon - w * w));
  return 1.0 / (p.gamma - kappa);
}

CsvTable tabulate(std::vector<std::string> header, const std::vector<double>& xs,
                  const std::function<Row(double)>& row_fn) {
  CsvTable table;
  table.header = std::move(header);
  table.rows = parallel_map(xs.size(), [&](std::size_t i) { return row_fn(xs[i]); });
  return table;
}

SystemParams cqs_params(double n_max) {
  SystemParams p = unit_params();
  p.epsilon = epsilon_opt(n_max, p);
  return p;
}

ProtocolSpec pqs_spec(const PqsInput& input, double t_pm) {
  ProtocolSpec spec;
  spec.kind = ProtocolKind::pqs;
  spec.params = unit_params();
  spec.pqs_input = input;
  spec.budget = {kNmax, 1.0, t_pm};
  return spec;
}

ProtocolSpec cqs_spec(double t_pm) {
  ProtocolSpec spec;
  spec.kind = ProtocolKind::cqs;
  spec.params = cqs_params(kNmax);
  spec.budget = {kNmax, 1.0, t_pm};
  return spec;
}

double bound_ratio(const ProtocolSpec& spec, double t) {
  const MetrologyReport r = total_qfi(spec, t);
  return r.bound_value > 0.0 ? r.total_qfi / r.bound_value : 0.0;
}

CsvTable fig2() {
  const SystemParams cqs = cqs_params(kNmax);
  const SystemParams pqs = unit_params();
  const auto ts = numerics::log_space(1e-2, 12.0 * slowest_time(cqs), 200);
  return tabulate({"t", "qfi_pqs", "qfi_cqs", "log1p_qfi_pqs", "log1p_qfi_cqs", "photons_pqs",
                   "photons_cqs", "bound_ratio_pqs", "bound_ratio_cqs"},
                  ts, [&](double t) -> Row {
                    const PqsOptimum best = pqs_optimal_qfi(kNmax, pqs, t);
                    const double qc = cqs_qfi(cqs, t);
                    const GaussianStated start = pqs_input_state(best.input, 0.0);
                    return {t,
                            best.value,
                            qc,
                            std::log1p(best.value),
                            std::log1p(qc),
                            mean_photons(evolve_passive(pqs, start, t)),
                            mean_photons_vs_time(cqs, t),
                            bound_ratio(pqs_spec(best.input, 0.0), t),
                            bound_ratio(cqs_spec(0.0), t)};
                  });
}

CsvTable fig3() {
  const SystemParams cqs = cqs_params(kNmax);
  const SystemParams pqs = unit_params();
  const auto ts = numerics::log_space(1e-3, 12.0 * slowest_time(cqs), 200);
  const HomodyneSetting p_quadrature{std::numbers::pi / 2.0};
  return tabulate(
      {"t", "pqs_tpm0", "pqs_tpm2", "cqs_tpm0", "cqs_tpm2", "hom_opt_r_tpm0", "hom_opt_r_tpm2",
       "hom_numeric_tpm0", "hom_numeric_tpm2", "photons_pqs", "photons_cqs", "bound_ratio_pqs",
       "bound_ratio_cqs"},
      ts, [&](double t) -> Row {
        const auto rate = [&](double info, double t_pm) { return info / (kNmax * (t + t_pm)); };
        const PqsOptimum best = pqs_optimal_qfi(kNmax, pqs, t);
        const double qc = cqs_qfi(cqs, t);
        const PqsInput opt_r = optimal_homodyne_input(kNmax, pqs.gamma, t);
        const double hom_r = fi_homodyne(pqs_pair(opt_r, pqs, t), p_quadrature);
        const double hom_num = pqs_optimal_homodyne(kNmax, pqs, t).value;
        const GaussianStated start = pqs_input_state(best.input, 0.0);
        return {t,
                rate(best.value, 0.0),
                rate(best.value, 2.0),
                rate(qc, 0.0),
                rate(qc, 2.0),
                rate(hom_r, 0.0),
                rate(hom_r, 2.0),
                rate(hom_num, 0.0),
                rate(hom_num, 2.0),
                mean_photons(evolve_passive(pqs, start, t)),
                mean_photons_vs_time(cqs, t),
                bound_ratio(pqs_spec(best.input, 2.0), t),
                bound_ratio(cqs_spec(2.0), t)};
      });
}

CsvTable fig4() {
  SystemParams below = unit_params();
  below.epsilon = 0.99;
  SystemParams above = unit_params();
  above.epsilon = kNearThreshold * above.epsilon_c();
  const auto ts = numerics::log_space(1e-2, 12.0 * slowest_time(above), 256);
  return tabulate({"t", "purity_below", "purity_above", "photons_below", "photons_above"}, ts,
                  [&](double t) -> Row {
                    return {t, purity_vs_time(below, t), purity_vs_time(above, t),
                            mean_photons_vs_time(below, t), mean_photons_vs_time(above, t)};
                  });
}

CsvTable fig7() {
  const SystemParams p = cqs_params(kNmax);
  const DerivativePair pair = cqs_steady_pair(p);
  const double q = qfi(pair);
  const auto psis = numerics::linear_space(0.0, std::numbers::pi, 181);
  return tabulate({"psi", "fi", "qfi", "ratio"}, psis, [&](double psi) -> Row {
    const double fi = fi_homodyne(pair, {psi});
    return {psi, fi, q, fi / q};
  });
}

CsvTable fignoisy() {
  constexpr double kNoisyBudget = 300.0;
  constexpr double kNoisyBath = 1.0;
  SystemParams cold = unit_params();
  SystemParams warm = unit_params();
  warm.n_bath = kNoisyBath;

  // (a) pure squeezing that saturates the warm budget, same input at both temperatures
  PqsInput squeezed;
  squeezed.squeeze.r =
      std::asinh(std::sqrt((kNoisyBudget - kNoisyBath) / (1.0 + 2.0 * kNoisyBath)));

  SystemParams cr_cold = unit_params();
  cr_cold.epsilon = kNearThreshold * cr_cold.epsilon_c();
  SystemParams cr_warm = cr_cold;
  cr_warm.n_bath = kNoisyBath;

  const HomodyneSetting p_quadrature{std::numbers::pi / 2.0};
  const auto ts = numerics::log_space(1e-2, 50.0, 200);
  return tabulate({"t", "ratio_qfi_pas", "ratio_fi_pas", "ratio_qfi_cr"}, ts,
                  [&](double t) -> Row {
                    const double qa =
                        pqs_qfi(squeezed, warm, t) / pqs_qfi(squeezed, cold, t);
                    // (b) homodyne-optimal input for the cold budget
                    const PqsInput opt = optimal_homodyne_input(kNmax, cold.gamma, t);
                    const double fb = fi_homodyne(pqs_pair(opt, warm, t), p_quadrature) /
                                      fi_homodyne(pqs_pair(opt, cold, t), p_quadrature);
                    const double qc = cqs_qfi(cr_warm, t) / cqs_qfi(cr_cold, t);
                    return {t, qa, fb, qc};
                  });
}

const std::map<std::string, std::function<CsvTable()>>& registry() {
  static const std::map<std::string, std::function<CsvTable()>> r = {
      {"fig2", fig2}, {"fig3", fig3}, {"fig4", fig4}, {"fig7", fig7}, {"fignoisy", fignoisy}};
  return r;
}

}  // namespace

std::vector<std::string> figure_names() {
  std::vector<std::string> names;
  for (const auto& [name, fn] : registry()) names.push_back(name);
  return names;
}

CsvTable make_figure(const std::string& name) {
  const auto it = registry().find(name);
  if (it == registry().end()) throw DomainError("unknown figure: " + name);
  return it->second();
}

}  // namespace cqsense
