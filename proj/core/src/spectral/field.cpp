#include "caloric/spectral/field.hpp"

#include <algorithm>
#include <cmath>

#include "caloric/error.hpp"

namespace caloric::spectral {

namespace {

void require_same_grid(const Grid2& a, const Grid2& b) {
  if (!(a == b)) throw Error("spectral", "field dimensions do not match");
}

bool finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

ScalarField::ScalarField(Grid2 grid, double value)
    : grid_(std::move(grid)), values_(grid_.point_count(), value) {}

ScalarField::ScalarField(Grid2 grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.point_count()) {
    throw Error("spectral", "field dimensions do not match grid");
  }
}

ScalarField& ScalarField::operator+=(const ScalarField& other) {
  require_same_grid(grid_, other.grid_);
  for (std::size_t p = 0; p < values_.size(); ++p) values_[p] += other.values_[p];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& other) {
  require_same_grid(grid_, other.grid_);
  for (std::size_t p = 0; p < values_.size(); ++p) values_[p] -= other.values_[p];
  return *this;
}

ScalarField& ScalarField::operator*=(double factor) noexcept {
  for (auto& v : values_) v *= factor;
  return *this;
}

bool ScalarField::all_finite() const noexcept { return finite(values_); }

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double factor, ScalarField a) { return a *= factor; }

VecField::VecField(Grid2 grid, int components, double value)
    : grid_(std::move(grid)), components_(components) {
  if (components_ < 0) throw Error("spectral", "vector field needs a nonnegative component count");
  data_.assign(static_cast<std::size_t>(components_) * grid_.point_count(), value);
}

std::span<double> VecField::component(int c) noexcept {
  return std::span<double>(data_).subspan(c * point_count(), point_count());
}

std::span<const double> VecField::component(int c) const noexcept {
  return std::span<const double>(data_).subspan(c * point_count(), point_count());
}

ScalarField VecField::component_field(int c) const {
  auto comp = component(c);
  return ScalarField(grid_, std::vector<double>(comp.begin(), comp.end()));
}

void VecField::set_component(int c, const ScalarField& f) {
  require_same_grid(grid_, f.grid());
  std::copy(f.values().begin(), f.values().end(), component(c).begin());
}

VecField& VecField::operator+=(const VecField& other) {
  require_same_grid(grid_, other.grid_);
  if (components_ != other.components_) throw Error("spectral", "component count mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

VecField& VecField::operator-=(const VecField& other) {
  require_same_grid(grid_, other.grid_);
  if (components_ != other.components_) throw Error("spectral", "component count mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

VecField& VecField::operator*=(double factor) noexcept {
  for (auto& v : data_) v *= factor;
  return *this;
}

bool VecField::all_finite() const noexcept { return finite(data_); }

VecField operator+(VecField a, const VecField& b) { return a += b; }
VecField operator-(VecField a, const VecField& b) { return a -= b; }
VecField operator*(double factor, VecField a) { return a *= factor; }

Spectrum::Spectrum(Grid2 grid) : grid_(std::move(grid)), coeffs_(grid_.mode_count()) {}

Spectrum::Spectrum(Grid2 grid, std::vector<std::complex<double>> coeffs)
    : grid_(std::move(grid)), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != grid_.mode_count()) {
    throw Error("spectral", "spectrum dimensions do not match grid");
  }
}

}  // namespace caloric::spectral
