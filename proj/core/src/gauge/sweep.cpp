#include <algorithm>
#include <cmath>
#include <sstream>

#include "caloric/error.hpp"
#include "caloric/gauge/gauge.hpp"
#include "caloric/spectral/spectral.hpp"

namespace caloric::gauge {

namespace {

using heatflow::HeatTrajectory;
using heatflow::MapField;

double sup_abs(const VecField& f) {
  double out = 0.0;
  for (double x : f.data()) out = std::max(out, std::abs(x));
  return out;
}

double sup_diff(const VecField& a, const VecField& b) {
  double out = 0.0;
  const auto x = a.data();
  const auto y = b.data();
  for (std::size_t i = 0; i < x.size(); ++i) out = std::max(out, std::abs(x[i] - y[i]));
  return out;
}

void axpy(VecField& y, double a, const VecField& x) {
  auto out = y.data();
  const auto in = x.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += a * in[i];
}

// Backward accumulation of I(s) = int_s^{s_max} K for samples arriving in
// decreasing s. Each interval [s_k, s_{k+1}] uses the quadratic through
// levels k, k+1, k+2 when available, the trapezoid otherwise.
class TailIntegral {
 public:
  TailIntegral(const spectral::Grid2& grid, int components) : value_(grid, components) {}

  void push(double s, VecField integrand) {
    if (!samples_.empty()) {
      const double x0 = s;
      const double x1 = samples_[0].s;
      const double h0 = x1 - x0;
      if (samples_.size() >= 2) {
        const double x2 = samples_[1].s;
        const double h1 = x2 - x1;
        const double big = h0 + h1;
        axpy(value_, h0 / 2.0 - h0 * h0 / (6.0 * big), integrand);
        axpy(value_, h0 * (3.0 * big - 2.0 * h0) / (6.0 * h1), samples_[0].k);
        axpy(value_, -h0 * h0 * h0 / (6.0 * big * h1), samples_[1].k);
      } else {
        axpy(value_, h0 / 2.0, integrand);
        axpy(value_, h0 / 2.0, samples_[0].k);
      }
    }
    samples_.insert(samples_.begin(), Sample{s, std::move(integrand)});
    if (samples_.size() > 2) samples_.pop_back();
  }

  const VecField& value() const noexcept { return value_; }

 private:
  struct Sample {
    double s;
    VecField k;
  };
  VecField value_;
  std::vector<Sample> samples_;
};

}  // namespace

SweepSummary caloric_sweep(const HeatTrajectory& traj, const GaugeOptions& options,
                           const std::function<void(const GaugeLevel&)>& visit) {
  if (traj.size() == 0) throw Error("gauge", "empty heat trajectory");
  if (!(traj.sup_distance <= options.converged_tolerance)) {
    std::ostringstream msg;
    msg << "heat trajectory has not converged to Q (sup distance " << traj.sup_distance << ")";
    throw Error("gauge", msg.str());
  }
  const MapField& last = traj.final_state();
  const auto& target = last.target();
  const spectral::Grid2& grid = last.grid();
  const int m = target.real_dim();
  const std::vector<Vec>& reference = options.reference_frame ? *options.reference_frame : target.reference_frame();

  SweepSummary summary;
  std::array<TailIntegral, 2> a_int{TailIntegral(grid, m * m), TailIntegral(grid, m * m)};
  TailIntegral a_t(grid, m * m);
  std::array<VecField, 2> a_integral{VecField(grid, m * m), VecField(grid, m * m)};
  VecField a_t_value(grid, m * m);
  double k_last_sup = 0.0, k_prev_sup = 0.0;

  const std::size_t top = traj.size() - 1;
  VecField frame = seed_frame(last, reference);
  VecField tension = heatflow::tension(last);
  for (std::size_t step = 0; step <= top; ++step) {
    const std::size_t k = top - step;
    const MapField& v = traj.states[k];
    const double s = traj.s_levels[k];
    if (k < top) {
      VecField next_tension = heatflow::tension(v);
      frame = transport_frame(traj.states[k + 1], tension, frame, v, next_tension, s - traj.s_levels[k + 1]);
      tension = std::move(next_tension);
    }
    const FrameStats stats = frame_stats(v, frame);
    if (stats.orthonormality > 1e-8 || stats.tangency > 1e-8 || stats.j_compatibility > 1e-8) {
      std::ostringstream msg;
      msg << "frame drifted at s = " << s << " (orthonormality " << stats.orthonormality << ")";
      throw InvariantViolation("gauge", msg.str());
    }
    summary.frame.merge(stats);

    const std::array<VecField, 2> dv{spectral::partial(v.values(), 0), spectral::partial(v.values(), 1)};
    const std::array<VecField, 2> psi{frame_components(v, frame, dv[0]), frame_components(v, frame, dv[1])};
    const VecField psi_s = frame_components(v, frame, tension);
    const std::array<VecField, 2> a_direct = connection_direct(v, frame);

    GaugeLevel level;
    level.level = k;
    level.s = s;
    level.v = &v;
    level.frame = &frame;
    level.tension = &tension;
    level.psi = &psi;
    level.psi_s = &psi_s;
    level.a_direct = &a_direct;

    if (options.connection_integral) {
      double k_sup = 0.0;
      for (int i = 0; i < 2; ++i) {
        VecField integrand = curvature_in_frame(v, frame, tension, dv[i]);
        k_sup = std::max(k_sup, sup_abs(integrand));
        a_int[i].push(s, std::move(integrand));
        a_integral[i] = a_int[i].value();
        a_integral[i] *= -1.0;
      }
      summary.integrand_peak = std::max(summary.integrand_peak, k_sup);
      if (step == 0) k_last_sup = k_sup;
      if (step == 1) k_prev_sup = k_sup;
      level.a_integral = &a_integral;
    }

    VecField psi_t(grid, m);
    if (options.time_derivative) {
      const VecField dt_v = options.time_derivative(k);
      psi_t = frame_components(v, frame, dt_v);
      a_t.push(s, curvature_in_frame(v, frame, tension, dt_v));
      a_t_value = a_t.value();
      a_t_value *= -1.0;
      level.psi_t = &psi_t;
      level.a_t = &a_t_value;
    }

    VecField contraction(grid, 0);
    if (options.contraction) {
      contraction = curvature_contraction(v, frame);
      level.contraction = &contraction;
    }
    visit(level);
  }

  if (options.connection_integral) {
    summary.integrand_at_s_max = k_last_sup;
    if (top >= 1 && k_last_sup > 0.0) {
      const double gap = traj.s_levels[top] - traj.s_levels[top - 1];
      const double rate = std::log(k_prev_sup / k_last_sup) / gap;
      summary.tail_bound = rate > 0.0 ? k_last_sup / rate : k_last_sup * traj.s_levels[top];
    }
    if (summary.integrand_peak > 0.0 && k_last_sup > options.tail_ratio * summary.integrand_peak) {
      std::ostringstream msg;
      msg << "curvature integrand at s_max is " << k_last_sup / summary.integrand_peak
          << " of its peak; increase s_max";
      throw Error("gauge", msg.str());
    }
  }
  return summary;
}

Frame build_caloric_frame(const HeatTrajectory& traj, const GaugeOptions& options) {
  GaugeOptions local = options;
  local.connection_integral = false;
  local.contraction = false;
  local.time_derivative = nullptr;
  Frame out;
  out.s_levels = traj.s_levels;
  out.levels.assign(traj.size(), VecField(traj.final_state().grid(), 0));
  caloric_sweep(traj, local, [&](const GaugeLevel& level) { out.levels[level.level] = *level.frame; });
  return out;
}

GaugeData build_gauge(const HeatTrajectory& traj, const GaugeOptions& options) {
  GaugeData out;
  out.s_levels = traj.s_levels;
  const std::size_t count = traj.size();
  const spectral::Grid2& grid = traj.final_state().grid();
  const VecField empty(grid, 0);
  out.psi.assign(count, {empty, empty});
  out.psi_s.assign(count, empty);
  out.a_direct.assign(count, {empty, empty});
  out.a_integral.assign(count, {empty, empty});
  out.summary = caloric_sweep(traj, options, [&](const GaugeLevel& level) {
    out.psi[level.level] = *level.psi;
    out.psi_s[level.level] = *level.psi_s;
    out.a_direct[level.level] = *level.a_direct;
    if (level.a_integral) out.a_integral[level.level] = *level.a_integral;
  });
  return out;
}

GaugeReport verify_gauge(const HeatTrajectory& traj, bool separation, GaugeOptions options) {
  options.contraction = separation;
  GaugeReport report;
  const std::size_t top = traj.size() - 1;
  VecField limit(traj.final_state().grid(), 0);
  std::vector<double> limit_value;
  DynamicSeparation sep;
  const auto& target = traj.final_state().target();
  const int m = target.real_dim();
  const int ambient = target.ambient_dim();
  // Integrand of int psi_s^l (nabla_{e_l} R)(e_a, e_b) e_c . e_d, trapezoid in s.
  VecField remainder(traj.final_state().grid(), separation ? m * m * m * m : 0);
  VecField prev_integrand = remainder;
  double prev_s = 0.0;

  report.summary = caloric_sweep(traj, options, [&](const GaugeLevel& level) {
    report.torsion.merge(torsion_residual(*level.psi, *level.a_direct));
    report.commutator.merge(commutator_residual(*level.v, *level.frame, *level.a_direct));
    report.heat_tension.merge(heat_tension_residual(*level.psi_s, *level.psi, *level.a_direct));
    for (int i = 0; i < 2; ++i) {
      report.antisymmetry = std::max(report.antisymmetry, antisymmetry_residual((*level.a_direct)[i]));
      report.connection_scale = std::max(report.connection_scale, sup_abs((*level.a_direct)[i]));
      if (level.a_integral) {
        report.connection_gap = std::max(report.connection_gap, sup_diff((*level.a_direct)[i], (*level.a_integral)[i]));
      }
      if (level.level == top) report.tail_connection = std::max(report.tail_connection, sup_abs((*level.a_direct)[i]));
    }
    if (options.observer) options.observer(level);
    if (!separation) return;

    const VecField& g = *level.contraction;
    if (level.level == top) {
      limit_value.resize(g.components());
      for (int c = 0; c < g.components(); ++c) limit_value[c] = g.at(c, 0);
      for (std::size_t p = 0; p < g.point_count(); ++p) {
        for (int c = 0; c < g.components(); ++c) {
          sep.limit_variation = std::max(sep.limit_variation, std::abs(g.at(c, p) - limit_value[c]));
        }
      }
    }
    for (std::size_t p = 0; p < g.point_count(); ++p) {
      for (int c = 0; c < g.components(); ++c) {
        sep.remainder_sup = std::max(sep.remainder_sup, std::abs(g.at(c, p) - limit_value[c]));
      }
    }
    if (target.locally_symmetric()) return;
    VecField integrand(g.grid(), g.components());
    for (std::size_t p = 0; p < g.point_count(); ++p) {
      const Vec q = level.v->point(p);
      std::vector<Vec> e(m);
      for (int f = 0; f < m; ++f) e[f] = frame_vector(*level.frame, f, p, ambient);
      for (int l = 0; l < m; ++l) {
        const Vec dirs[1] = {e[l]};
        for (int a = 0; a < m; ++a)
          for (int b = 0; b < m; ++b)
            for (int c = 0; c < m; ++c) {
              const Vec r = target.curvature_cov_derivative(q, dirs, e[a], e[b], e[c]);
              for (int d = 0; d < m; ++d) {
                integrand.at(((a * m + b) * m + c) * m + d, p) += level.psi_s->at(l, p) * r.dot(e[d]);
              }
            }
      }
    }
    if (level.level < top) axpy(remainder, 0.5 * (prev_s - level.s), integrand + prev_integrand);
    sep.remainder_integral_sup = std::max(sep.remainder_integral_sup, sup_abs(remainder));
    prev_integrand = std::move(integrand);
    prev_s = level.s;
  });
  if (separation) {
    sep.limit = limit_value;
    report.separation = sep;
  }
  return report;
}

}  // namespace caloric::gauge
