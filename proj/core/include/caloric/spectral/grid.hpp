#pragma once

#include <cstddef>
#include <memory>
#include <vector>

namespace caloric::spectral {

// Periodic square [0, L)^2 sampled on n x n points, standing in for R^2.
//
// Spectral data uses the FFTW real-to-complex layout: n rows (y-modes) by
// n/2 + 1 columns (x-modes, non-negative half). A "mode" index is
// row * (n/2 + 1) + col.
class Grid2 {
 public:
  Grid2(int n_points_per_side, double side_length);

  int n() const noexcept { return n_; }
  double side_length() const noexcept { return side_length_; }
  double spacing() const noexcept { return side_length_ / n_; }
  double cell_area() const noexcept { return spacing() * spacing(); }
  std::size_t point_count() const noexcept { return static_cast<std::size_t>(n_) * n_; }
  int half_columns() const noexcept { return n_ / 2 + 1; }
  std::size_t mode_count() const noexcept { return static_cast<std::size_t>(n_) * half_columns(); }

  double coordinate(int i) const noexcept { return i * spacing(); }
  std::size_t point_index(int ix, int iy) const noexcept {
    return static_cast<std::size_t>(iy) * n_ + ix;
  }

  double fundamental() const noexcept;  // 2 pi / L, lowest nonzero |xi| per axis
  double nyquist() const noexcept;      // pi n / L

  // Signed index of DFT bin m in [0, n): m for m <= n/2, m - n above.
  int signed_index(int m) const noexcept { return m <= n_ / 2 ? m : m - n_; }
  // Wavenumber for odd-order derivatives. Antisymmetric under m -> -m mod n,
  // which forces the self-paired Nyquist bin to zero.
  double derivative_wavenumber(int m) const noexcept;
  // |xi| along one axis including the full Nyquist value.
  double axis_wavenumber(int m) const noexcept;

  double kx(std::size_t mode) const noexcept { return tables_->kx[mode]; }
  double ky(std::size_t mode) const noexcept { return tables_->ky[mode]; }
  double xi_norm_sq(std::size_t mode) const noexcept { return tables_->xi_sq[mode]; }
  double xi_norm(std::size_t mode) const noexcept { return tables_->xi_abs[mode]; }
  // Multiplicity of a half-spectrum mode in the full spectrum (1 or 2).
  double mode_weight(std::size_t mode) const noexcept { return tables_->weight[mode]; }
  // 2/3-rule mask: 1 when both |signed indices| <= n/3, else 0.
  double dealias_mask(std::size_t mode) const noexcept { return tables_->dealias[mode]; }

  // Littlewood-Paley shells whose multiplier touches some represented mode.
  int shell_min() const noexcept { return shell_min_; }
  int shell_max() const noexcept { return shell_max_; }
  // Largest shell with 2^(k+1) <= nyquist; shells above it are truncated.
  int resolved_shell_max() const noexcept { return resolved_shell_max_; }
  bool shell_truncated(int k) const noexcept { return k > resolved_shell_max_; }

  friend bool operator==(const Grid2& a, const Grid2& b) noexcept {
    return a.n_ == b.n_ && a.side_length_ == b.side_length_;
  }

 private:
  struct Tables {
    std::vector<double> kx, ky, xi_sq, xi_abs, weight, dealias;
  };

  int n_;
  double side_length_;
  int shell_min_ = 0;
  int shell_max_ = 0;
  int resolved_shell_max_ = 0;
  std::shared_ptr<const Tables> tables_;
};

}  // namespace caloric::spectral
