#pragma once

#include <memory>

#include "caloric/spectral/field.hpp"
#include "caloric/target/target.hpp"

namespace caloric::heatflow {

inline constexpr double kConstraintTolerance = 1e-10;

// A map from the grid into the embedded target, stored as N ambient component
// planes. Construction checks that every point lies on the target.
class MapField {
 public:
  MapField(std::shared_ptr<const target::TargetManifold> target, spectral::VecField values);

  // u == Q.
  static MapField constant(std::shared_ptr<const target::TargetManifold> target, const spectral::Grid2& grid);

  const spectral::Grid2& grid() const noexcept { return values_.grid(); }
  const spectral::VecField& values() const noexcept { return values_; }
  const target::TargetManifold& target() const noexcept { return *target_; }
  const std::shared_ptr<const target::TargetManifold>& target_ptr() const noexcept { return target_; }
  std::size_t point_count() const noexcept { return values_.point_count(); }

  target::Vec point(std::size_t p) const;

  double max_constraint_violation() const;
  // sup_x |u(x) - q|.
  double sup_distance(const target::Vec& q) const;
  double sup_distance_to_base() const { return sup_distance(target_->base_point()); }

 private:
  std::shared_ptr<const target::TargetManifold> target_;
  spectral::VecField values_;
};

target::Vec point_of(const spectral::VecField& f, std::size_t p);
void set_point(spectral::VecField& f, std::size_t p, const target::Vec& value);

// Retracts every point of an ambient field onto the target.
spectral::VecField retract_field(const target::TargetManifold& target, const spectral::VecField& f);

// E(u) = 1/2 int |du|^2, evaluated from the spectrum.
double energy(const MapField& u);
double energy(const spectral::VecField& u);
// sup_x sum_a |d_a u|^2.
double gradient_sup_sq(const spectral::VecField& u);

}  // namespace caloric::heatflow
