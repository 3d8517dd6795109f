#pragma once

#include "caloric/spectral/field.hpp"

namespace caloric::spectral {

// The fixed base bump chi: even, equal to 1 on |z| <= 5/4, 0 on |z| >= 8/5,
// and a C-infinity monotone step in between built from exp(-1/t).
double lp_bump(double z) noexcept;

// chi_k(|xi|) = chi(|xi| / 2^k) - chi(|xi| / 2^(k-1)).
double lp_shell_multiplier(double xi_abs, int k) noexcept;
// chi(|xi| / 2^k), the symbol of P_{<=k}.
double lp_low_multiplier(double xi_abs, int k) noexcept;

// P_k. Shells with 2^(k+1) above the Nyquist wavenumber are still applied;
// use Grid2::shell_truncated(k) to detect them.
ScalarField lp_project(const ScalarField& f, int k);
VecField lp_project(const VecField& f, int k);
ScalarField lp_project_low(const ScalarField& f, int k);
VecField lp_project_low(const VecField& f, int k);
ScalarField lp_project_high(const ScalarField& f, int k);  // I - P_{<=k}
VecField lp_project_high(const VecField& f, int k);

// Fraction of ||f - mean f||_2^2 lying outside the grid's resolved shells.
double unresolved_mass_fraction(const VecField& f);

}  // namespace caloric::spectral
