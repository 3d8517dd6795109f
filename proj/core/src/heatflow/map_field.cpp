#include "caloric/heatflow/map_field.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>

#include "caloric/error.hpp"
#include "caloric/parallel.hpp"
#include "caloric/spectral/spectral.hpp"

namespace caloric::heatflow {

using spectral::VecField;
using target::Vec;

Vec point_of(const VecField& f, std::size_t p) {
  Vec v(f.components());
  for (int c = 0; c < f.components(); ++c) v(c) = f.at(c, p);
  return v;
}

void set_point(VecField& f, std::size_t p, const Vec& value) {
  for (int c = 0; c < f.components(); ++c) f.at(c, p) = value(c);
}

MapField::MapField(std::shared_ptr<const target::TargetManifold> target, VecField values)
    : target_(std::move(target)), values_(std::move(values)) {
  if (!target_) throw Error("heatflow", "map field needs a target");
  if (values_.components() != target_->ambient_dim()) {
    throw Error("heatflow", "map field has " + std::to_string(values_.components()) +
                                " components, target needs " + std::to_string(target_->ambient_dim()));
  }
  if (!values_.all_finite()) throw InvariantViolation("heatflow", "map field has non-finite values");
  const double violation = max_constraint_violation();
  if (!(violation <= kConstraintTolerance)) {
    std::ostringstream msg;
    msg << "map field is off the target by " << violation;
    throw InvariantViolation("heatflow", msg.str());
  }
}

MapField MapField::constant(std::shared_ptr<const target::TargetManifold> target, const spectral::Grid2& grid) {
  VecField values(grid, target->ambient_dim());
  const Vec& q = target->base_point();
  for (int c = 0; c < values.components(); ++c) std::ranges::fill(values.component(c), q(c));
  return MapField(std::move(target), std::move(values));
}

Vec MapField::point(std::size_t p) const { return point_of(values_, p); }

double MapField::max_constraint_violation() const {
  double worst = 0.0;
  for (std::size_t p = 0; p < point_count(); ++p) worst = std::max(worst, target_->distance_to_manifold(point(p)));
  return worst;
}

double MapField::sup_distance(const Vec& q) const {
  double worst = 0.0;
  for (std::size_t p = 0; p < point_count(); ++p) worst = std::max(worst, (point(p) - q).norm());
  return worst;
}

VecField retract_field(const target::TargetManifold& target, const VecField& f) {
  VecField out(f.grid(), f.components());
  const double radius = target.retract_radius();
  std::atomic<bool> too_far{false};
  parallel_for(f.point_count(), [&](std::size_t p) {
    const Vec q = point_of(f, p);
    if (!(target.distance_to_manifold(q) < radius)) {
      too_far = true;
      return;
    }
    set_point(out, p, target.retract(target::trusted, q));
  });
  if (too_far) throw InvariantViolation("heatflow", "state left the retraction neighbourhood");
  return out;
}

double energy(const VecField& u) {
  const double d = spectral::derivative_l2_norm(u, 1);
  return 0.5 * d * d;
}

double energy(const MapField& u) { return energy(u.values()); }

double gradient_sup_sq(const VecField& u) {
  const VecField dx = spectral::partial(u, 0);
  const VecField dy = spectral::partial(u, 1);
  double worst = 0.0;
  for (std::size_t p = 0; p < u.point_count(); ++p) {
    double acc = 0.0;
    for (int c = 0; c < u.components(); ++c) acc += dx.at(c, p) * dx.at(c, p) + dy.at(c, p) * dy.at(c, p);
    worst = std::max(worst, acc);
  }
  return worst;
}

}  // namespace caloric::heatflow
