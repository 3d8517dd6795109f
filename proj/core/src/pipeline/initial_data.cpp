#include "caloric/pipeline/initial_data.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "caloric/error.hpp"
#include "caloric/spectral/spectral.hpp"

namespace caloric::pipeline {

namespace {

using heatflow::MapField;
using spectral::Grid2;
using spectral::VecField;
using target::Vec;

std::array<Vec, 2> mixing_directions(const target::TargetManifold& target) {
  const auto& frame = target.reference_frame();
  Vec x = Vec::Zero(target.ambient_dim()), y = Vec::Zero(target.ambient_dim());
  for (std::size_t i = 0; i < frame.size(); ++i) {
    x += std::cos(0.7 * i + 0.3) * frame[i];
    y += std::sin(1.3 * i + 0.5) * frame[i];
  }
  return {x.normalized(), y.normalized()};
}

// Grid indices of the symmetry centre.
std::array<int, 2> centre_index(const InitialDataSpec& spec, const Grid2& grid) {
  std::array<int, 2> out{};
  for (int a = 0; a < 2; ++a) {
    const double c = spec.center[a] < 0.0 ? grid.side_length() / 2.0 : spec.center[a];
    out[a] = static_cast<int>(std::lround(c / grid.spacing())) % grid.n();
  }
  return out;
}

double wrapped(double d, double length) { return d - length * std::round(d / length); }

VecField bump_profile(const InitialDataSpec& spec, const Grid2& grid, const target::TargetManifold& target) {
  if (!(spec.width > 0.0)) throw Error("pipeline", "bump width must be positive");
  if (spec.scales < 1) throw Error("pipeline", "bump needs at least one scale");
  const auto [x_dir, y_dir] = mixing_directions(target);
  const auto [cx, cy] = centre_index(spec, grid);
  VecField b(grid, target.ambient_dim());
  for (int iy = 0; iy < grid.n(); ++iy) {
    for (int ix = 0; ix < grid.n(); ++ix) {
      const double dx = wrapped((ix - cx) * grid.spacing(), grid.side_length());
      const double dy = wrapped((iy - cy) * grid.spacing(), grid.side_length());
      double weight = 0.0;
      for (int m = 0; m < spec.scales; ++m) {
        const double w = std::ldexp(spec.width, -m);
        weight += std::exp(-(dx * dx + dy * dy) / (w * w)) / w;
      }
      heatflow::set_point(b, grid.point_index(ix, iy), weight * (dx * x_dir + dy * y_dir));
    }
  }
  return b;
}

VecField shell_profile(const InitialDataSpec& spec, const Grid2& grid, const target::TargetManifold& target) {
  const auto [x_dir, y_dir] = mixing_directions(target);
  const auto [cx, cy] = centre_index(spec, grid);
  const long m = std::lround(std::ldexp(1.0, spec.shell) / grid.fundamental());
  if (m < 1 || m >= grid.n() / 2) throw Error("pipeline", "shell " + std::to_string(spec.shell) + " is not representable");
  const double xi = m * grid.fundamental();
  VecField b(grid, target.ambient_dim());
  for (int iy = 0; iy < grid.n(); ++iy) {
    for (int ix = 0; ix < grid.n(); ++ix) {
      const double x = (ix - cx) * grid.spacing();
      const double y = (iy - cy) * grid.spacing();
      heatflow::set_point(b, grid.point_index(ix, iy), std::sin(xi * x) * x_dir + std::sin(xi * y) * y_dir);
    }
  }
  return b;
}

VecField random_profile(const InitialDataSpec& spec, const Grid2& grid, const target::TargetManifold& target) {
  if (!(spec.smoothing > 0.0)) throw Error("pipeline", "random smoothing scale must be positive");
  const auto& frame = target.reference_frame();
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<spectral::ScalarField> coeffs;
  for (std::size_t i = 0; i < frame.size(); ++i) {
    spectral::ScalarField f(grid);
    for (auto& value : f.values()) value = normal(rng);
    coeffs.push_back(spectral::heat_semigroup(f, spec.smoothing * spec.smoothing / 4.0));
  }
  const auto [cx, cy] = centre_index(spec, grid);
  const int n = grid.n();
  VecField b(grid, target.ambient_dim());
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      const std::size_t p = grid.point_index(ix, iy);
      const std::size_t q = grid.point_index(((2 * cx - ix) % n + n) % n, ((2 * cy - iy) % n + n) % n);
      Vec v = Vec::Zero(target.ambient_dim());
      for (std::size_t i = 0; i < frame.size(); ++i) v += 0.5 * (coeffs[i][p] - coeffs[i][q]) * frame[i];
      heatflow::set_point(b, p, v);
    }
  }
  return b;
}

MapField exp_of(const VecField& b, double amplitude, const std::shared_ptr<const target::TargetManifold>& target) {
  const Vec& q = target->base_point();
  VecField u(b.grid(), target->ambient_dim());
  for (std::size_t p = 0; p < b.point_count(); ++p) {
    heatflow::set_point(u, p, target->exp_map(target::trusted, q, amplitude * heatflow::point_of(b, p)));
  }
  return MapField(target, std::move(u));
}

double grad_norm_of(const MapField& u) { return spectral::derivative_l2_norm(u.values(), 1); }

}  // namespace

VecField tangent_profile(const InitialDataSpec& spec, const Grid2& grid, const target::TargetManifold& target) {
  if (spec.family == "bump") return bump_profile(spec, grid, target);
  if (spec.family == "shell") return shell_profile(spec, grid, target);
  if (spec.family == "random") return random_profile(spec, grid, target);
  return VecField(grid, 0);
}

InitialData initial_data(const InitialDataSpec& spec, const Grid2& grid,
                         std::shared_ptr<const target::TargetManifold> target) {
  if (spec.family == "constant") {
    MapField u = MapField::constant(target, grid);
    return {std::move(u), 0.0, 0.0};
  }
  if (spec.family == "helix") {
    if (target->kind() != target::TargetKind::Sphere2) throw Error("pipeline", "helix data needs the sphere2 target");
    const double xi = spec.helix_k * grid.fundamental();
    const double th = spec.helix_theta;
    VecField u(grid, 3);
    for (int iy = 0; iy < grid.n(); ++iy) {
      for (int ix = 0; ix < grid.n(); ++ix) {
        const std::size_t p = grid.point_index(ix, iy);
        const double phase = xi * grid.coordinate(ix);
        u.at(0, p) = std::cos(th);
        u.at(1, p) = std::sin(th) * std::cos(phase);
        u.at(2, p) = std::sin(th) * std::sin(phase);
      }
    }
    MapField field(target, std::move(u));
    const double g = grad_norm_of(field);
    return {std::move(field), th, g};
  }
  if (spec.family != "bump" && spec.family != "shell" && spec.family != "random") {
    throw Error("pipeline", "unknown initial family '" + spec.family + "' (valid: constant | bump | shell | helix | random)");
  }

  const VecField b = tangent_profile(spec, grid, *target);
  double amplitude = spec.amplitude;
  if (spec.grad_norm > 0.0) {
    // ||d exp_Q(A b)|| is A ||db|| to leading order; a few secant steps fix the rest.
    const double linear = spectral::derivative_l2_norm(b, 1);
    if (!(linear > 0.0)) throw Error("pipeline", "initial profile is constant");
    double a0 = spec.grad_norm / linear;
    double f0 = grad_norm_of(exp_of(b, a0, target)) - spec.grad_norm;
    double a1 = a0 * (1.0 - f0 / spec.grad_norm);
    for (int it = 0; it < 30 && std::abs(f0) > 1e-14 * spec.grad_norm; ++it) {
      const double f1 = grad_norm_of(exp_of(b, a1, target)) - spec.grad_norm;
      if (f1 == f0) break;
      const double a2 = a1 - f1 * (a1 - a0) / (f1 - f0);
      a0 = a1;
      f0 = f1;
      a1 = a2;
    }
    amplitude = a0;
  }
  MapField u = exp_of(b, amplitude, target);
  const double g = grad_norm_of(u);
  return {std::move(u), amplitude, g};
}

}  // namespace caloric::pipeline
