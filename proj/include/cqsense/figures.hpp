#ifndef CQSENSE_FIGURES_HPP
#define CQSENSE_FIGURES_HPP

#include <string>
#include <vector>

#include "cqsense/csv.hpp"

namespace cqsense {

/// fig2: single-shot QFI of PQS and CQS, ω₀ = Γ = 1, N_max = 100, ε = ε_opt.
///   t, qfi_pqs, qfi_cqs, log1p_qfi_pqs, log1p_qfi_cqs, photons_pqs,
///   photons_cqs, bound_ratio_pqs, bound_ratio_cqs
/// fig3: rates I/(N_max(t + t_pm)) for t_pm = 0 and 2/Γ.
///   t, pqs_tpm0, pqs_tpm2, cqs_tpm0, cqs_tpm2, hom_opt_r_tpm0,
///   hom_opt_r_tpm2, hom_numeric_tpm0, hom_numeric_tpm2, photons_pqs,
///   photons_cqs, bound_ratio_pqs, bound_ratio_cqs
/// fig4: ω = Γ = 1, n_B = 0, ε = 0.99 (below) and ε = 0.9975 ε_c (above).
///   t, purity_below, purity_above, photons_below, photons_above
/// fig7: steady-state homodyne FI over ψ at ε = ε_opt(100), ω₀ = Γ = 1.
///   psi, fi, qfi, ratio
/// fignoisy: N_max = 300, n_B = 1, ω₀ = Γ = 1, ε = 0.9975 ε_c.
///   t, ratio_qfi_pas, ratio_fi_pas, ratio_qfi_cr
std::vector<std::string> figure_names();

/// Throws DomainError for an unknown name.
CsvTable make_figure(const std::string& name);

}  // namespace cqsense

#endif  // CQSENSE_FIGURES_HPP
