#include "caloric/heatflow/heat.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "caloric/error.hpp"
#include "caloric/format.hpp"
#include "caloric/parallel.hpp"
#include "caloric/spectral/field_io.hpp"
#include "caloric/spectral/littlewood_paley.hpp"
#include "caloric/spectral/spectral.hpp"

namespace caloric::heatflow {

namespace {

using spectral::Grid2;
using spectral::Spectrum;
using spectral::VecField;
using target::Vec;
using cplx = std::complex<double>;

double phi1(double z) {
  if (std::abs(z) < 1e-3) return 1.0 + z / 2.0 + z * z / 6.0 + z * z * z / 24.0 + z * z * z * z / 120.0;
  return std::expm1(z) / z;
}

double phi2(double z) {
  if (std::abs(z) < 1e-3) return 0.5 + z / 6.0 + z * z / 24.0 + z * z * z / 120.0 + z * z * z * z / 720.0;
  return (std::expm1(z) - z) / (z * z);
}

std::vector<Spectrum> forward(const VecField& f) {
  std::vector<Spectrum> out;
  out.reserve(f.components());
  for (int c = 0; c < f.components(); ++c) out.push_back(spectral::dft_forward(f.component_field(c)));
  return out;
}

VecField inverse(const std::vector<Spectrum>& s, const Grid2& grid) {
  VecField out(grid, static_cast<int>(s.size()));
  for (std::size_t c = 0; c < s.size(); ++c) out.set_component(static_cast<int>(c), spectral::dft_inverse(s[c]));
  return out;
}

}  // namespace

VecField heat_nonlinearity(const MapField& v) {
  const auto& target = v.target();
  const VecField dx = spectral::partial(v.values(), 0);
  const VecField dy = spectral::partial(v.values(), 1);
  VecField out(v.grid(), target.ambient_dim());
  parallel_for(v.point_count(), [&](std::size_t p) {
    const Vec q = v.point(p);
    const Vec a = target.project_tangent(target::trusted, q, point_of(dx, p));
    const Vec b = target.project_tangent(target::trusted, q, point_of(dy, p));
    set_point(out, p,
              -(target.second_fundamental_form(target::trusted, q, a, a) +
                target.second_fundamental_form(target::trusted, q, b, b)));
  });
  return spectral::dealias(out);
}

VecField tension(const MapField& v) {
  const auto& target = v.target();
  const VecField lap = spectral::laplacian(v.values());
  VecField out(v.grid(), target.ambient_dim());
  parallel_for(v.point_count(), [&](std::size_t p) {
    set_point(out, p, target.project_tangent(target::trusted, v.point(p), point_of(lap, p)));
  });
  return out;
}

double heat_stability_bound(const MapField& v) {
  const double g = gradient_sup_sq(v.values());
  return g > 0.0 ? 0.5 / g : std::numeric_limits<double>::infinity();
}

MapField heat_step(const MapField& v, double ds) {
  if (!(ds > 0.0)) throw Error("heatflow", "heat step needs ds > 0");
  const double bound = heat_stability_bound(v);
  if (ds > bound) {
    std::ostringstream msg;
    msg << "heat step ds = " << ds << " exceeds the stability bound " << bound;
    throw Error("heatflow", msg.str());
  }
  const Grid2& grid = v.grid();
  const auto& target = v.target_ptr();

  const std::vector<Spectrum> u_hat = forward(v.values());
  const std::vector<Spectrum> n0 = forward(heat_nonlinearity(v));
  std::vector<double> decay(grid.mode_count()), p1(grid.mode_count()), p2(grid.mode_count());
  for (std::size_t m = 0; m < grid.mode_count(); ++m) {
    const double z = -ds * grid.xi_norm_sq(m);
    decay[m] = std::exp(z);
    p1[m] = ds * phi1(z);
    p2[m] = ds * phi2(z);
  }

  std::vector<Spectrum> a_hat = u_hat;
  for (std::size_t c = 0; c < a_hat.size(); ++c) {
    for (std::size_t m = 0; m < grid.mode_count(); ++m) a_hat[c][m] = decay[m] * u_hat[c][m] + p1[m] * n0[c][m];
  }
  const MapField a(target, retract_field(*target, inverse(a_hat, grid)));
  const std::vector<Spectrum> n1 = forward(heat_nonlinearity(a));

  std::vector<Spectrum> next = std::move(a_hat);
  for (std::size_t c = 0; c < next.size(); ++c) {
    for (std::size_t m = 0; m < grid.mode_count(); ++m) next[c][m] += p2[m] * (n1[c][m] - n0[c][m]);
  }
  return MapField(target, retract_field(*target, inverse(next, grid)));
}

std::vector<double> heat_levels(const Grid2& grid, const HeatOptions& options) {
  const double scale = grid.side_length() / (2.0 * std::numbers::pi);
  const double s_max = options.s_max > 0.0 ? options.s_max : 64.0 * scale * scale;
  const double h = options.ramp_step > 0.0 ? options.ramp_step : grid.spacing() * grid.spacing() / 4.0;
  const double r = options.level_ratio;
  if (!(r > 1.0)) throw Error("heatflow", "level ratio must exceed 1");
  if (!(s_max > h)) throw Error("heatflow", "s_max must exceed the ramp step");
  std::vector<double> levels{0.0};
  const int ramp = static_cast<int>(std::ceil(1.0 / (r - 1.0)));
  for (int i = 1; i <= ramp && i * h < s_max; ++i) levels.push_back(i * h);
  while (levels.back() * r < s_max) levels.push_back(levels.back() * r);
  levels.push_back(s_max);
  return levels;
}

HeatTrajectory heat_solve(const MapField& u, const HeatOptions& options) {
  const double e0 = energy(u);
  if (options.enforce_smallness && e0 > options.energy_threshold) {
    std::ostringstream msg;
    msg << "initial energy " << e0 << " exceeds the smallness threshold " << options.energy_threshold;
    throw Error("heatflow", msg.str());
  }
  HeatTrajectory traj;
  traj.s_levels = heat_levels(u.grid(), options);
  traj.states.reserve(traj.s_levels.size());
  traj.energies.reserve(traj.s_levels.size());
  traj.states.push_back(u);
  traj.energies.push_back(e0);

  for (std::size_t k = 0; k + 1 < traj.s_levels.size(); ++k) {
    const double gap = traj.s_levels[k + 1] - traj.s_levels[k];
    MapField v = traj.states.back();
    double cap = 0.8 * heat_stability_bound(v);
    if (options.max_substep > 0.0) cap = std::min(cap, options.max_substep);
    const int steps = std::max(options.min_substeps, static_cast<int>(std::ceil(gap / cap)));
    const double ds = gap / steps;
    for (int i = 0; i < steps; ++i) v = heat_step(v, ds);
    const double e = energy(v);
    if (e > traj.energies.back() + 1e-8 * e0) {
      std::ostringstream msg;
      msg << "energy increased from " << traj.energies.back() << " to " << e << " at s = " << traj.s_levels[k + 1];
      throw InvariantViolation("heatflow", msg.str());
    }
    traj.energies.push_back(e);
    traj.states.push_back(std::move(v));
  }
  traj.sup_distance = traj.final_state().sup_distance_to_base();
  traj.converged_to_q = traj.sup_distance <= options.tol_q;
  return traj;
}

DecayWindow decay_window(const MapField& u) {
  const Grid2& grid = u.grid();
  std::vector<std::pair<double, double>> shells;  // (|xi|, energy density)
  shells.reserve(grid.mode_count());
  std::vector<double> density(grid.mode_count(), 0.0);
  for (int c = 0; c < u.values().components(); ++c) {
    const Spectrum s = spectral::dft_forward(u.values().component_field(c));
    for (std::size_t m = 0; m < s.size(); ++m) density[m] += grid.mode_weight(m) * grid.xi_norm_sq(m) * std::norm(s[m]);
  }
  double total = 0.0;
  for (std::size_t m = 0; m < density.size(); ++m) {
    if (density[m] > 0.0) shells.emplace_back(grid.xi_norm(m), density[m]);
    total += density[m];
  }
  if (!(total > 0.0)) throw Error("heatflow", "decay window needs non-constant data");
  std::ranges::sort(shells);
  double acc = 0.0, xi10 = 0.0, xi90 = 0.0;
  for (const auto& [xi, e] : shells) {
    const double before = acc;
    acc += e;
    if (before < 0.1 * total && acc >= 0.1 * total) xi10 = xi;
    if (before < 0.9 * total && acc >= 0.9 * total) xi90 = xi;
  }
  return {1.0 / (xi90 * xi90), 1.0 / (xi10 * xi10)};
}

DecayRate decay_rate(const HeatTrajectory& traj, int j, std::optional<DecayWindow> window) {
  if (j < 0 || j > 3) throw Error("heatflow", "decay rate order j must lie in 0..3");
  DecayRate out;
  out.j = j;
  out.expected = -0.5 * j;
  out.window = window ? *window : decay_window(traj.states.front());
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const double s = traj.s_levels[k];
    if (s <= 0.0 || s < out.window.s_lo || s > out.window.s_hi) continue;
    const double y = spectral::derivative_l2_norm(traj.states[k].values(), j + 1);
    if (!(y > 0.0)) continue;
    xs.push_back(std::log(s));
    ys.push_back(std::log(y));
  }
  out.samples = static_cast<int>(xs.size());
  if (out.samples < 5) {
    throw Error("heatflow", "decay window holds " + std::to_string(out.samples) + " usable levels, need 5");
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= xs.size();
  my /= ys.size();
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  out.slope = sxy / sxx;
  return out;
}

FrequencyProfile frequency_decay_profile(const HeatTrajectory& traj, int k, double weight_exponent) {
  const Grid2& grid = traj.states.front().grid();
  if (k < grid.shell_min() || k > grid.shell_max()) {
    throw Error("heatflow", "shell " + std::to_string(k) + " is not represented on this grid");
  }
  FrequencyProfile out;
  out.k = k;
  out.weight_exponent = weight_exponent;
  const double two_k = std::ldexp(1.0, k);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double s = traj.s_levels[i];
    const double value = two_k * spectral::l2_norm(spectral::lp_project(traj.states[i].values(), k));
    out.s.push_back(s);
    out.values.push_back(value);
    out.weighted_sup = std::max(out.weighted_sup, std::pow(1.0 + s * two_k * two_k, weight_exponent) * value);
  }
  out.initial_value = out.values.front();
  if (!std::isfinite(out.weighted_sup)) throw InvariantViolation("heatflow", "frequency profile is not finite");
  return out;
}

std::vector<std::filesystem::path> write_trajectory(const HeatTrajectory& traj, const std::filesystem::path& dir,
                                                    bool dumps) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> files{dir / "index.csv"};
  std::ofstream index(files.front());
  if (!index) throw Error("heatflow", "cannot write " + files.front().string());
  index << "level,s,energy,sup_dist_Q\n";
  for (std::size_t k = 0; k < traj.size(); ++k) {
    if (dumps) {
      char name[32];
      std::snprintf(name, sizeof name, "level_%04zu.cslf", k);
      spectral::write_field_dump(dir / name, traj.states[k].values());
      files.push_back(dir / name);
    }
    index << k << ',' << format_double(traj.s_levels[k]) << ',' << format_double(traj.energies[k]) << ','
          << format_double(traj.states[k].sup_distance_to_base()) << '\n';
  }
  return files;
}

}  // namespace caloric::heatflow
