#include "caloric/spectral/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "caloric/error.hpp"

namespace caloric::spectral {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

Grid2::Grid2(int n_points_per_side, double side_length)
    : n_(n_points_per_side), side_length_(side_length) {
  if (n_ < 8 || !is_power_of_two(n_)) {
    throw Error("spectral", "grid size must be a power of two >= 8, got " + std::to_string(n_));
  }
  if (!(side_length_ > 0.0) || !std::isfinite(side_length_)) {
    throw Error("spectral", "side length must be positive and finite");
  }

  auto tables = std::make_shared<Tables>();
  const std::size_t modes = mode_count();
  tables->kx.resize(modes);
  tables->ky.resize(modes);
  tables->xi_sq.resize(modes);
  tables->xi_abs.resize(modes);
  tables->weight.resize(modes);
  tables->dealias.resize(modes);
  const int cols = half_columns();
  const int cutoff = n_ / 3;
  for (int row = 0; row < n_; ++row) {
    for (int col = 0; col < cols; ++col) {
      const std::size_t m = static_cast<std::size_t>(row) * cols + col;
      tables->kx[m] = derivative_wavenumber(col);
      tables->ky[m] = derivative_wavenumber(row);
      const double ax = axis_wavenumber(col);
      const double ay = axis_wavenumber(row);
      tables->xi_sq[m] = ax * ax + ay * ay;
      tables->xi_abs[m] = std::sqrt(tables->xi_sq[m]);
      tables->weight[m] = (col == 0 || col == n_ / 2) ? 1.0 : 2.0;
      const bool kept = std::abs(signed_index(col)) <= cutoff && std::abs(signed_index(row)) <= cutoff;
      tables->dealias[m] = kept ? 1.0 : 0.0;
    }
  }
  tables_ = std::move(tables);

  // Shell k touches |xi| in (5/8 2^k, 8/5 2^k).
  const double xi_lo = fundamental();
  const double xi_hi = std::sqrt(2.0) * nyquist();
  int k = static_cast<int>(std::floor(std::log2(xi_lo))) - 3;
  while (std::ldexp(1.6, k) <= xi_lo) ++k;
  shell_min_ = k;
  k = static_cast<int>(std::floor(std::log2(xi_hi))) + 3;
  while (std::ldexp(0.625, k) >= xi_hi) --k;
  shell_max_ = k;
  resolved_shell_max_ = static_cast<int>(std::floor(std::log2(nyquist()) + 1e-12)) - 1;
}

double Grid2::fundamental() const noexcept { return 2.0 * std::numbers::pi / side_length_; }

double Grid2::nyquist() const noexcept { return std::numbers::pi * n_ / side_length_; }

double Grid2::derivative_wavenumber(int m) const noexcept {
  if (m == n_ / 2) return 0.0;
  return fundamental() * signed_index(m);
}

double Grid2::axis_wavenumber(int m) const noexcept {
  return fundamental() * std::abs(signed_index(m));
}

}  // namespace caloric::spectral
