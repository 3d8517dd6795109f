#include "caloric/pipeline/check.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "caloric/gauge/gauge.hpp"
#include "caloric/pipeline/initial_data.hpp"
#include "caloric/slflow/slflow.hpp"
#include "caloric/spectral/spectral.hpp"

namespace caloric::pipeline {

namespace {

using target::Vec;

void add(std::vector<CheckResult>& out, std::string name, double value, double tolerance) {
  out.push_back({std::move(name), value, tolerance, std::isfinite(value) && value <= tolerance});
}

void target_checks(const target::TargetManifold& t, std::vector<CheckResult>& out) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto random_tangent = [&](const Vec& p) {
    Vec x(t.ambient_dim());
    for (int i = 0; i < x.size(); ++i) x(i) = normal(rng);
    return t.project_tangent(p, x);
  };
  double kahler = 0.0, gauss = 0.0, bianchi = 0.0, j_parallel = 0.0, retract = 0.0;
  for (int trial = 0; trial < 16; ++trial) {
    const Vec p = t.exp_map(t.base_point(), 0.8 * random_tangent(t.base_point()));
    const Vec x = random_tangent(p), y = random_tangent(p), z = random_tangent(p);
    const Vec jx = t.complex_structure(p, x);
    kahler = std::max(kahler, (t.complex_structure(p, jx) + x).norm());
    kahler = std::max(kahler, std::abs(jx.dot(t.complex_structure(p, y)) - x.dot(y)));
    const double numerator = t.curvature(p, x, y, y).dot(x);
    const Vec sxx = t.second_fundamental_form(p, x, x), syy = t.second_fundamental_form(p, y, y);
    const Vec sxy = t.second_fundamental_form(p, x, y);
    gauss = std::max(gauss, std::abs(numerator - (sxx.dot(syy) - sxy.squaredNorm())));
    bianchi = std::max(bianchi, (t.curvature(p, x, y, z) + t.curvature(p, y, z, x) + t.curvature(p, z, x, y)).norm());
    j_parallel = std::max(j_parallel, (t.curvature(p, x, y, t.complex_structure(p, z)) -
                                       t.complex_structure(p, t.curvature(p, x, y, z)))
                                          .norm());
    const Vec off = p + 1e-3 * random_tangent(p);
    const Vec r = t.retract(off);
    retract = std::max(retract, (t.retract(r) - r).norm() + t.distance_to_manifold(r));
  }
  add(out, "target.kahler", kahler, 1e-12);
  add(out, "target.gauss_equation", gauss, 1e-10);
  add(out, "target.bianchi", bianchi, 1e-12);
  add(out, "target.j_parallel", j_parallel, 1e-12);
  add(out, "target.retract_idempotent", retract, 1e-12);
}

}  // namespace

std::vector<CheckResult> check_invariants(target::TargetKind kind, int n) {
  std::vector<CheckResult> out;
  const auto t = target::make_target(kind);
  target_checks(*t, out);

  const spectral::Grid2 grid(n, 2.0 * std::numbers::pi);
  {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> normal(0.0, 1.0);
    spectral::ScalarField f(grid);
    for (auto& v : f.values()) v = normal(rng);
    const double physical = spectral::l2_norm(f);
    add(out, "spectral.parseval", std::abs(physical - spectral::l2_norm_spectral(f)) / physical, 1e-12);
    const auto back = spectral::dft_inverse(spectral::dft_forward(f));
    double gap = 0.0;
    for (std::size_t p = 0; p < f.size(); ++p) gap = std::max(gap, std::abs(back[p] - f[p]));
    add(out, "spectral.round_trip", gap, 1e-12);
  }

  InitialDataSpec spec;
  spec.family = "bump";
  spec.grad_norm = 0.03;
  spec.width = 0.6;
  const auto data = initial_data(spec, grid, t);

  const auto traj = heatflow::heat_solve(data.u);
  double increase = 0.0;
  for (std::size_t k = 1; k < traj.size(); ++k) increase = std::max(increase, traj.energies[k] - traj.energies[k - 1]);
  add(out, "heat.energy_increase", increase / traj.energies.front(), 1e-8);
  add(out, "heat.sup_distance", traj.sup_distance, 1e-6);

  const auto report = gauge::verify_gauge(traj, true);
  add(out, "gauge.torsion", report.torsion.max_abs, 1e-5);
  add(out, "gauge.commutator", report.commutator.max_abs, 1e-5);
  add(out, "gauge.heat_tension", report.heat_tension.max_abs, 1e-5);
  add(out, "gauge.antisymmetry", report.antisymmetry, 1e-12);
  add(out, "gauge.frame_orthonormality", report.summary.frame.orthonormality, 1e-9);
  if (report.separation) add(out, "gauge.separation_remainder", report.separation->remainder_sup, 1e-7);

  const double dt = slflow::sl_stability_bound(grid);
  const int steps = 40;
  auto u = data.u;
  for (int i = 0; i < steps; ++i) u = slflow::sl_step(u, dt);
  const double e0 = heatflow::energy(data.u);
  add(out, "sl.energy_drift", std::abs(heatflow::energy(u) - e0) / e0, 1e-6);
  for (int i = 0; i < steps; ++i) u = slflow::sl_step(u, -dt);
  double back = 0.0;
  for (std::size_t p = 0; p < u.point_count(); ++p) back = std::max(back, (u.point(p) - data.u.point(p)).norm());
  add(out, "sl.time_reversal", back, 1e-6);
  return out;
}

}  // namespace caloric::pipeline
