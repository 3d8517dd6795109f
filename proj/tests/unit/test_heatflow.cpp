#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "caloric/error.hpp"
#include "caloric/heatflow/heat.hpp"
#include "caloric/spectral/field_io.hpp"
#include "support.hpp"

using namespace caloric;
using namespace caloric::heatflow;
using testing_support::max_abs_diff;
using testing_support::small_bump;
using testing_support::square;

namespace {

const target::TargetKind kAll[] = {target::TargetKind::Sphere2, target::TargetKind::FlatTorus2,
                                   target::TargetKind::SphereProduct};

MapField advance(const MapField& v, double span, int steps) {
  MapField out = v;
  for (int i = 0; i < steps; ++i) out = heat_step(out, span / steps);
  return out;
}

// Great-circle band on S^2: u = (sin f(x1), 0, cos f(x1)).
MapField band(const spectral::Grid2& grid) {
  const auto t = target::make_target(target::TargetKind::Sphere2);
  spectral::VecField u(grid, 3);
  for (int iy = 0; iy < grid.n(); ++iy)
    for (int ix = 0; ix < grid.n(); ++ix) {
      const double f = 0.2 * std::sin(grid.coordinate(ix));
      const std::size_t p = grid.point_index(ix, iy);
      u.at(0, p) = std::sin(f);
      u.at(2, p) = std::cos(f);
    }
  return MapField(t, std::move(u));
}

}  // namespace

TEST_CASE("map fields validate the constraint") {
  const auto grid = square(16);
  const auto t = target::make_target(target::TargetKind::Sphere2);
  CHECK_THROWS_AS(MapField(t, spectral::VecField(grid, 3)), Error);
  CHECK_THROWS_AS(MapField(t, spectral::VecField(grid, 2)), Error);
  const MapField q = MapField::constant(t, grid);
  CHECK(q.max_constraint_violation() == 0.0);
  CHECK(q.sup_distance_to_base() == 0.0);
  CHECK(energy(q) == 0.0);
}

TEST_CASE("constants are stationary") {
  for (auto kind : kAll) {
    const auto grid = square(32);
    const MapField q = MapField::constant(target::make_target(kind), grid);
    const MapField next = heat_step(q, 0.1);
    CHECK(max_abs_diff(next.values(), q.values()) < 1e-12);
    const auto traj = heat_solve(q);
    CHECK(traj.converged_to_q);
    CHECK(traj.sup_distance == 0.0);
  }
}

TEST_CASE("stability bound is enforced") {
  const auto grid = square(32);
  const auto data = small_bump(grid, target::TargetKind::Sphere2, 0.3);
  const double bound = heat_stability_bound(data.u);
  CHECK(bound == doctest::Approx(0.5 / gradient_sup_sq(data.u.values())));
  CHECK_THROWS_AS(heat_step(data.u, 1.01 * bound), Error);
  CHECK_NOTHROW(heat_step(data.u, bound));
}

TEST_CASE("tension is the tangential part of the extrinsic right-hand side") {
  for (auto kind : kAll) {
    const auto grid = square(32);
    const auto data = small_bump(grid, kind, 0.1);
    const auto& u = data.u;
    const spectral::VecField lap = spectral::laplacian(u.values());
    const spectral::VecField tau = tension(u);
    double worst = 0.0;
    for (std::size_t p = 0; p < u.point_count(); ++p) {
      const target::Vec q = u.point(p);
      const target::Vec expected = u.target().project_tangent(q, point_of(lap, p));
      worst = std::max(worst, (point_of(tau, p) - expected).norm());
      worst = std::max(worst, (u.target().project_tangent(q, point_of(tau, p)) - point_of(tau, p)).norm());
    }
    CHECK(worst < 1e-8);
  }
}

TEST_CASE("great-circle band loses energy at every step") {
  const auto grid = square(32);
  MapField v = band(grid);
  double e = energy(v);
  for (int i = 0; i < 20; ++i) {
    v = heat_step(v, 0.01);
    const double next = energy(v);
    CHECK(next < e);
    e = next;
  }
  // The band stays in the x1-x3 great circle.
  double off = 0.0;
  for (double value : v.values().component(1)) off = std::max(off, std::abs(value));
  CHECK(off < 1e-14);
}

TEST_CASE("band agrees with the 1-D linearised profile for tiny amplitude") {
  // For f << 1 the angle obeys f_s = f_xx up to O(f^3); f = a sin x decays as e^{-s}.
  const auto grid = square(32);
  const auto t = target::make_target(target::TargetKind::Sphere2);
  const double a = 1e-4;
  spectral::VecField u(grid, 3);
  for (int iy = 0; iy < grid.n(); ++iy)
    for (int ix = 0; ix < grid.n(); ++ix) {
      const std::size_t p = grid.point_index(ix, iy);
      const double f = a * std::sin(grid.coordinate(ix));
      u.at(0, p) = std::sin(f);
      u.at(2, p) = std::cos(f);
    }
  const MapField v = advance(MapField(t, std::move(u)), 0.5, 50);
  double worst = 0.0;
  for (int ix = 0; ix < grid.n(); ++ix) {
    const std::size_t p = grid.point_index(ix, 0);
    const double angle = std::atan2(v.values().at(0, p), v.values().at(2, p));
    worst = std::max(worst, std::abs(angle - a * std::exp(-0.5) * std::sin(grid.coordinate(ix))));
  }
  CHECK(worst < 1e-3 * a);
}

TEST_CASE("second-order self-convergence on every target") {
  for (auto kind : kAll) {
    CAPTURE(target::to_string(kind));
    const auto grid = square(32);
    const auto data = small_bump(grid, kind, 0.1);
    const double span = 0.05;
    const MapField a = advance(data.u, span, 2);
    const MapField b = advance(data.u, span, 4);
    const MapField c = advance(data.u, span, 8);
    const double order = std::log2(max_abs_diff(a.values(), b.values()) / max_abs_diff(b.values(), c.values()));
    CHECK(order >= 1.7);
    CHECK(order <= 2.3);
  }
}

TEST_CASE("heat levels") {
  const auto grid = square(32);
  const auto levels = heat_levels(grid, {});
  CHECK(levels.front() == 0.0);
  CHECK(levels.back() == doctest::Approx(64.0));
  for (std::size_t i = 1; i < levels.size(); ++i) CHECK(levels[i] > levels[i - 1]);
  // At least four levels in each dyadic block [2^(2j-1), 2^(2j+1)] inside the geometric part.
  for (int j = -2; j <= 2; ++j) {
    const double lo = std::ldexp(1.0, 2 * j - 1), hi = std::ldexp(1.0, 2 * j + 1);
    int count = 0;
    for (double s : levels) count += s >= lo && s <= hi;
    CHECK(count >= 4);
  }
}

TEST_CASE("small bump converges to Q with monotone energy and distance") {
  for (auto kind : kAll) {
    CAPTURE(target::to_string(kind));
    const auto grid = square(32);
    const auto data = small_bump(grid, kind);
    const auto traj = heat_solve(data.u);
    CHECK(traj.converged_to_q);
    CHECK(traj.sup_distance <= 1e-6);
    for (std::size_t k = 1; k < traj.size(); ++k) {
      CHECK(traj.energies[k] <= traj.energies[k - 1] + 1e-8 * traj.energies.front());
      CHECK(traj.states[k].max_constraint_violation() < 1e-10);
    }
    // Past the burn-in the distance to Q only shrinks.
    for (std::size_t k = traj.size() / 4 + 1; k < traj.size(); ++k) {
      CHECK(traj.states[k].sup_distance_to_base() <= traj.states[k - 1].sup_distance_to_base());
    }
  }
}

TEST_CASE("smallness precondition") {
  const auto grid = square(32);
  const auto data = small_bump(grid, target::TargetKind::Sphere2, 1.0);
  CHECK_THROWS_AS(heat_solve(data.u), Error);
}

TEST_CASE("large data: no NaN and monotone energy") {
  const auto grid = square(32);
  const auto data = small_bump(grid, target::TargetKind::Sphere2, 2.0, 1.0);
  HeatOptions options;
  options.enforce_smallness = false;
  options.s_max = 4.0;
  const auto traj = heat_solve(data.u, options);
  for (std::size_t k = 0; k < traj.size(); ++k) {
    CHECK(traj.states[k].values().all_finite());
    if (k > 0) CHECK(traj.energies[k] <= traj.energies[k - 1] + 1e-8 * traj.energies.front());
  }
}

TEST_CASE("decay rates on multi-scale data") {
  const auto grid = square(64);
  pipeline::InitialDataSpec spec;
  spec.grad_norm = 0.03;
  spec.width = 0.8;
  spec.scales = 4;
  const auto data = pipeline::initial_data(spec, grid, target::make_target(target::TargetKind::Sphere2));
  const auto traj = heat_solve(data.u);
  const auto j0 = decay_rate(traj, 0);
  const auto j1 = decay_rate(traj, 1);
  const auto j2 = decay_rate(traj, 2);
  CHECK(j0.samples >= 5);
  CHECK(j0.expected == 0.0);
  CHECK(j1.expected == -0.5);
  // Finitely many scales leave the window at both ends, so the energy slope
  // is negative but bounded away from the next rate.
  CHECK(j0.slope <= 0.05);
  CHECK(j0.slope >= -0.45);
  CHECK(std::abs(j1.slope + 0.5) <= 0.2);
  CHECK(std::abs(j2.slope + 1.0) <= 0.25);
  CHECK(j0.slope > j1.slope);
  CHECK(j1.slope > j2.slope);

  heatflow::DecayWindow empty{10.0, 10.5};
  CHECK_THROWS_AS(decay_rate(traj, 1, empty), Error);
}

TEST_CASE("frequency decay profiles") {
  const auto grid = square(32);
  const auto t = target::make_target(target::TargetKind::Sphere2);
  const auto zero = heat_solve(MapField::constant(t, grid));
  const auto p0 = frequency_decay_profile(zero, 2, 2.0);
  CHECK(p0.weighted_sup == 0.0);

  pipeline::InitialDataSpec spec;
  spec.family = "shell";
  spec.shell = 3;
  spec.amplitude = 0.004;
  const auto data = pipeline::initial_data(spec, grid, t);
  const auto traj = heat_solve(data.u);
  const auto m2 = frequency_decay_profile(traj, 3, 2.0);
  CHECK(m2.initial_value > 0.0);
  CHECK(m2.weighted_sup <= 4.0 * m2.initial_value);
  const auto m0 = frequency_decay_profile(traj, 3, 0.0);
  CHECK(m0.weighted_sup <= 1.1 * m0.initial_value);
  CHECK_THROWS_AS(frequency_decay_profile(traj, 40, 1.0), Error);
}

TEST_CASE("trajectory files") {
  const auto grid = square(16);
  const auto data = small_bump(grid, target::TargetKind::Sphere2);
  const auto traj = heat_solve(data.u);
  const auto dir = std::filesystem::temp_directory_path() / "caloric_traj_test";
  std::filesystem::remove_all(dir);
  const auto files = write_trajectory(traj, dir);
  CHECK(files.size() == traj.size() + 1);
  std::ifstream index(dir / "index.csv");
  std::string header;
  std::getline(index, header);
  CHECK(header == "level,s,energy,sup_dist_Q");
  const auto first = spectral::read_field_dump(dir / "level_0000.cslf");
  CHECK(max_abs_diff(first, data.u.values()) == 0.0);
  std::filesystem::remove_all(dir);
}
