#include "caloric/spectral/littlewood_paley.hpp"

#include <cmath>

#include "caloric/spectral/spectral.hpp"

namespace caloric::spectral {

namespace {

constexpr double kPlateau = 1.25;  // chi = 1 for |z| <= 5/4
constexpr double kSupport = 1.6;   // chi = 0 for |z| >= 8/5

double flat_exp(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

}  // namespace

double lp_bump(double z) noexcept {
  const double a = std::abs(z);
  if (a <= kPlateau) return 1.0;
  if (a >= kSupport) return 0.0;
  const double t = (a - kPlateau) / (kSupport - kPlateau);
  const double rise = flat_exp(t);
  return 1.0 - rise / (rise + flat_exp(1.0 - t));
}

double lp_shell_multiplier(double xi_abs, int k) noexcept {
  return lp_bump(std::ldexp(xi_abs, -k)) - lp_bump(std::ldexp(xi_abs, 1 - k));
}

double lp_low_multiplier(double xi_abs, int k) noexcept { return lp_bump(std::ldexp(xi_abs, -k)); }

ScalarField lp_project(const ScalarField& f, int k) {
  const Grid2& g = f.grid();
  return apply_multiplier(f, [&](std::size_t m) { return lp_shell_multiplier(g.xi_norm(m), k); });
}

VecField lp_project(const VecField& f, int k) {
  const Grid2& g = f.grid();
  return apply_multiplier(f, [&](std::size_t m) { return lp_shell_multiplier(g.xi_norm(m), k); });
}

ScalarField lp_project_low(const ScalarField& f, int k) {
  const Grid2& g = f.grid();
  return apply_multiplier(f, [&](std::size_t m) { return lp_low_multiplier(g.xi_norm(m), k); });
}

VecField lp_project_low(const VecField& f, int k) {
  const Grid2& g = f.grid();
  return apply_multiplier(f, [&](std::size_t m) { return lp_low_multiplier(g.xi_norm(m), k); });
}

ScalarField lp_project_high(const ScalarField& f, int k) { return f - lp_project_low(f, k); }

VecField lp_project_high(const VecField& f, int k) { return f - lp_project_low(f, k); }

double unresolved_mass_fraction(const VecField& f) {
  const Grid2& g = f.grid();
  const int top = g.resolved_shell_max();
  double total = 0.0, outside = 0.0;
  for (int c = 0; c < f.components(); ++c) {
    const Spectrum s = dft_forward(f.component_field(c));
    for (std::size_t m = 1; m < s.size(); ++m) {
      const double e = g.mode_weight(m) * std::norm(s[m]);
      total += e;
      // Portion of the mode carried by shells above the resolved range.
      outside += e * (1.0 - lp_low_multiplier(g.xi_norm(m), top));
    }
  }
  return total > 0.0 ? outside / total : 0.0;
}

}  // namespace caloric::spectral
