#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "caloric/spectral/grid.hpp"

namespace caloric::spectral {

class ScalarField {
 public:
  explicit ScalarField(Grid2 grid, double value = 0.0);
  ScalarField(Grid2 grid, std::vector<double> values);

  const Grid2& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }
  double& operator[](std::size_t p) noexcept { return values_[p]; }
  double operator[](std::size_t p) const noexcept { return values_[p]; }

  ScalarField& operator+=(const ScalarField& other);
  ScalarField& operator-=(const ScalarField& other);
  ScalarField& operator*=(double factor) noexcept;

  bool all_finite() const noexcept;

 private:
  Grid2 grid_;
  std::vector<double> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double factor, ScalarField a);

// N >= 0 real components per grid point, stored as contiguous component planes
// (component c occupies [c * n^2, (c + 1) * n^2)).
class VecField {
 public:
  VecField(Grid2 grid, int components, double value = 0.0);

  const Grid2& grid() const noexcept { return grid_; }
  int components() const noexcept { return components_; }
  std::size_t point_count() const noexcept { return grid_.point_count(); }

  std::span<double> component(int c) noexcept;
  std::span<const double> component(int c) const noexcept;
  ScalarField component_field(int c) const;
  void set_component(int c, const ScalarField& f);

  double& at(int c, std::size_t p) noexcept { return data_[c * point_count() + p]; }
  double at(int c, std::size_t p) const noexcept { return data_[c * point_count() + p]; }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  VecField& operator+=(const VecField& other);
  VecField& operator-=(const VecField& other);
  VecField& operator*=(double factor) noexcept;

  bool all_finite() const noexcept;

 private:
  Grid2 grid_;
  int components_;
  std::vector<double> data_;
};

VecField operator+(VecField a, const VecField& b);
VecField operator-(VecField a, const VecField& b);
VecField operator*(double factor, VecField a);

// Half-spectrum DFT coefficients of a real field, unnormalised forward
// convention: c_m = sum_j f_j exp(-i xi_m . x_j).
class Spectrum {
 public:
  explicit Spectrum(Grid2 grid);
  Spectrum(Grid2 grid, std::vector<std::complex<double>> coeffs);

  const Grid2& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return coeffs_.size(); }
  std::span<std::complex<double>> coeffs() noexcept { return coeffs_; }
  std::span<const std::complex<double>> coeffs() const noexcept { return coeffs_; }
  std::complex<double>& operator[](std::size_t m) noexcept { return coeffs_[m]; }
  const std::complex<double>& operator[](std::size_t m) const noexcept { return coeffs_[m]; }

 private:
  Grid2 grid_;
  std::vector<std::complex<double>> coeffs_;
};

}  // namespace caloric::spectral
