#include "caloric/slflow/slflow.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "caloric/error.hpp"
#include "caloric/format.hpp"
#include "caloric/parallel.hpp"
#include "caloric/spectral/spectral.hpp"

namespace caloric::slflow {

namespace {

using heatflow::point_of;
using heatflow::set_point;
using target::Vec;

double sup_abs(const VecField& f) {
  double out = 0.0;
  for (double x : f.data()) out = std::max(out, std::abs(x));
  return out;
}

VecField combine(double a, const VecField& x, double b, const VecField& y) {
  VecField out = x;
  out *= a;
  auto o = out.data();
  const auto in = y.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] += b * in[i];
  return out;
}

MapField retracted(const MapField& like, const VecField& values) {
  return MapField(like.target_ptr(), heatflow::retract_field(like.target(), values));
}

}  // namespace

VecField sl_rhs(const MapField& u) {
  const auto& target = u.target();
  const VecField lap = spectral::laplacian(u.values());
  VecField out(u.grid(), target.ambient_dim());
  parallel_for(u.point_count(), [&](std::size_t p) {
    const Vec q = u.point(p);
    const Vec t = target.project_tangent(target::trusted, q, point_of(lap, p));
    set_point(out, p, target.complex_structure(target::trusted, q, t));
  });
  return out;
}

double sl_stability_bound(const spectral::Grid2& grid) {
  const double pi = std::numbers::pi;
  return 0.2 * grid.spacing() * grid.spacing() / (pi * pi);
}

MapField sl_step(const MapField& u, double dt) {
  const double bound = sl_stability_bound(u.grid());
  if (!(std::abs(dt) <= bound) || dt == 0.0) {
    std::ostringstream msg;
    msg << "SL step |dt| = " << std::abs(dt) << " must be nonzero and at most " << bound;
    throw Error("slflow", msg.str());
  }
  const VecField& u0 = u.values();
  const MapField u1 = retracted(u, combine(1.0, u0, dt, sl_rhs(u)));
  const VecField s1 = combine(1.0, u1.values(), dt, sl_rhs(u1));
  const MapField u2 = retracted(u, combine(0.75, u0, 0.25, s1));
  const VecField s2 = combine(1.0, u2.values(), dt, sl_rhs(u2));
  return retracted(u, combine(1.0 / 3.0, u0, 2.0 / 3.0, s2));
}

double mass(const MapField& u, const Vec& q) {
  double acc = 0.0;
  for (std::size_t p = 0; p < u.point_count(); ++p) acc += (u.point(p) - q).squaredNorm();
  return 0.5 * acc * u.grid().cell_area();
}

double mass(const MapField& u) { return mass(u, u.target().base_point()); }

double SLSeries::energy_drift() const {
  double worst = 0.0;
  for (double e : energy) worst = std::max(worst, std::abs(e - energy.front()));
  return energy.front() > 0.0 ? worst / energy.front() : worst;
}

SLSeries sl_solve(const MapField& u0, double T, double dt, int record_every) {
  if (!(T >= 0.0)) throw Error("slflow", "final time must be nonnegative");
  if (!(dt > 0.0)) throw Error("slflow", "time step must be positive");
  if (record_every < 1) throw Error("slflow", "record stride must be at least 1");
  const long steps = std::lround(T / dt);
  if (std::abs(steps * dt - T) > 1e-9 * std::max(1.0, T)) throw Error("slflow", "T must be a multiple of dt");
  SLSeries series;
  series.dt = dt;
  series.sample_spacing = dt * record_every;
  const Vec& q = u0.target().base_point();
  auto record = [&](double t, const MapField& u) {
    series.t.push_back(t);
    series.energy.push_back(heatflow::energy(u));
    series.mass.push_back(mass(u, q));
    series.supdist.push_back(u.sup_distance(q));
    series.residual.push_back(std::numeric_limits<double>::quiet_NaN());
    series.states.push_back(u);
  };
  MapField u = u0;
  record(0.0, u);
  for (long i = 1; i <= steps; ++i) {
    u = sl_step(u, dt);
    if (i % record_every == 0 || i == steps) record(i * dt, u);
  }
  return series;
}

DecayReport asymptotic_decay_check(const SLSeries& series, const Vec& q) {
  if (series.size() < 16) throw Error("slflow", "decay check needs at least 16 samples");
  DecayReport out;
  for (const auto& u : series.states) out.supdist.push_back(u.sup_distance(q));
  out.initial = out.supdist.front();
  out.final_value = out.supdist.back();
  out.window_min = *std::ranges::min_element(out.supdist);
  const std::size_t half = series.size() / 2;
  double mt = 0.0, my = 0.0;
  const double count = static_cast<double>(series.size() - half);
  for (std::size_t i = half; i < series.size(); ++i) {
    mt += series.t[i];
    my += out.supdist[i];
  }
  mt /= count;
  my /= count;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = half; i < series.size(); ++i) {
    sxy += (series.t[i] - mt) * (out.supdist[i] - my);
    sxx += (series.t[i] - mt) * (series.t[i] - mt);
  }
  out.trend = sxx > 0.0 ? sxy / sxx : 0.0;
  out.decreased = out.final_value < out.initial;
  return out;
}

HelixError helix_error(const MapField& u, double theta, int k, double t) {
  const spectral::Grid2& grid = u.grid();
  const double xi = k * grid.fundamental();
  const double omega = xi * xi * std::cos(theta);
  double sx = 0.0, cx = 0.0, dist = 0.0;
  for (int iy = 0; iy < grid.n(); ++iy) {
    for (int ix = 0; ix < grid.n(); ++ix) {
      const std::size_t p = grid.point_index(ix, iy);
      const double phase = xi * grid.coordinate(ix) - omega * t;
      const Vec exact = (Vec(3) << std::cos(theta), std::sin(theta) * std::cos(phase), std::sin(theta) * std::sin(phase)).finished();
      const Vec got = u.point(p);
      dist = std::max(dist, (got - exact).norm());
      const double delta = std::atan2(got(2), got(1)) - phase;
      sx += std::sin(delta);
      cx += std::cos(delta);
    }
  }
  return {std::atan2(sx, cx), dist};
}

GaugedResidual gauged_residual(const SLSeries& series, std::size_t index, const heatflow::HeatOptions& heat,
                               gauge::GaugeOptions options) {
  if (index == 0 || index + 1 >= series.size()) throw Error("slflow", "gauged residual needs an interior sample");
  const double h = series.t[index + 1] - series.t[index];
  const double h_back = series.t[index] - series.t[index - 1];
  if (std::abs(h - h_back) > 1e-12 * std::max(1.0, h)) throw Error("slflow", "gauged residual needs a uniform t-grid");

  const heatflow::HeatTrajectory before = heatflow::heat_solve(series.states[index - 1], heat);
  const heatflow::HeatTrajectory here = heatflow::heat_solve(series.states[index], heat);
  const heatflow::HeatTrajectory after = heatflow::heat_solve(series.states[index + 1], heat);
  if (before.size() != here.size() || after.size() != here.size()) throw Error("slflow", "heat levels differ across t");

  options.connection_integral = false;
  auto psi_at_zero = [&](const heatflow::HeatTrajectory& traj) {
    std::array<VecField, 2> psi{VecField(traj.final_state().grid(), 0), VecField(traj.final_state().grid(), 0)};
    gauge::caloric_sweep(traj, options, [&](const gauge::GaugeLevel& level) {
      if (level.level == 0) psi = *level.psi;
    });
    return psi;
  };
  const std::array<VecField, 2> psi_before = psi_at_zero(before);
  const std::array<VecField, 2> psi_after = psi_at_zero(after);

  options.contraction = false;
  options.time_derivative = [&](std::size_t level) {
    return combine(0.5 / h, after.states[level].values(), -0.5 / h, before.states[level].values());
  };
  GaugedResidual out;
  out.spacing = h;
  gauge::caloric_sweep(here, options, [&](const gauge::GaugeLevel& level) {
    if (level.level != 0) return;
    const auto& psi = *level.psi;
    const auto& a = *level.a_direct;
    const VecField contraction = gauge::curvature_contraction(*level.v, *level.frame);
    const int m = psi[0].components();
    VecField tension_frame = gauge::covariant_derivative(psi[0], a[0], 0);
    tension_frame += gauge::covariant_derivative(psi[1], a[1], 1);
    out.phi_t = sup_abs(*level.psi_t - gauge::apply_j(tension_frame));
    for (int i = 0; i < 2; ++i) {
      VecField dt_psi = combine(0.5 / h, psi_after[i], -0.5 / h, psi_before[i]);
      dt_psi += gauge::connection_apply(*level.a_t, psi[i]);
      out.scale = std::max(out.scale, sup_abs(dt_psi));
      out.torsion_t = std::max(out.torsion_t, sup_abs(dt_psi - gauge::covariant_derivative(*level.psi_t, a[i], i)));
      VecField residual = gauge::apply_j(dt_psi);
      residual *= -1.0;
      for (int j = 0; j < 2; ++j) {
        residual -= gauge::covariant_derivative(gauge::covariant_derivative(psi[i], a[j], j), a[j], j);
      }
      for (std::size_t p = 0; p < residual.point_count(); ++p) {
        for (int d = 0; d < m; ++d) {
          double acc = 0.0;
          for (int j = 0; j < 2; ++j)
            for (int x = 0; x < m; ++x)
              for (int y = 0; y < m; ++y)
                for (int z = 0; z < m; ++z) {
                  acc += psi[i].at(x, p) * psi[j].at(y, p) * psi[j].at(z, p) *
                         contraction.at(((x * m + y) * m + z) * m + d, p);
                }
          residual.at(d, p) -= acc;
        }
      }
      out.equation = std::max(out.equation, sup_abs(residual));
    }
  });
  return out;
}

void write_series_csv(const SLSeries& series, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("slflow", "cannot write " + path.string());
  out << "t,energy,mass,supdist_Q,residual\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    out << format_double(series.t[i]) << ',' << format_double(series.energy[i]) << ','
        << format_double(series.mass[i]) << ',' << format_double(series.supdist[i]) << ',';
    if (!std::isnan(series.residual[i])) out << format_double(series.residual[i]);
    out << '\n';
  }
}

}  // namespace caloric::slflow
