#include "caloric/diagnostics/norms.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "caloric/error.hpp"

namespace caloric::diagnostics {

namespace {

double pointwise_norm(const spectral::VecField& g, std::size_t p) {
  double acc = 0.0;
  for (int c = 0; c < g.components(); ++c) acc += g.at(c, p) * g.at(c, p);
  return std::sqrt(acc);
}

}  // namespace

NormBlocks norm_blocks(const std::vector<spectral::VecField>& g, const std::vector<double>& t) {
  if (g.size() < 2 || g.size() != t.size()) throw Error("diagnostics", "norm blocks need at least two time samples");
  const double dt = t[1] - t[0];
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (std::abs((t[i] - t[i - 1]) - dt) > 1e-9 * std::max(1.0, std::abs(dt)) || !(dt > 0.0)) {
      throw Error("diagnostics", "norm blocks need a uniform increasing t-grid");
    }
  }
  const spectral::Grid2& grid = g.front().grid();
  const double area = grid.cell_area();
  const std::size_t points = grid.point_count();
  NormBlocks out;
  std::vector<double> sup_t(points, 0.0);
  double l4_acc = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!(g[i].grid() == grid)) throw Error("diagnostics", "norm block samples live on different grids");
    double l2 = 0.0, l4 = 0.0;
    for (std::size_t p = 0; p < points; ++p) {
      const double v = pointwise_norm(g[i], p);
      l2 += v * v;
      l4 += v * v * v * v;
      sup_t[p] = std::max(sup_t[p], v);
    }
    out.linf_t_l2_x = std::max(out.linf_t_l2_x, std::sqrt(l2 * area));
    const double w = (i == 0 || i + 1 == g.size()) ? 0.5 * dt : dt;
    l4_acc += w * l4 * area;
  }
  out.l4_tx = std::pow(l4_acc, 0.25);
  double acc = 0.0;
  for (double v : sup_t) acc += v * v * v * v;
  out.l4_x_linf_t = std::pow(acc * area, 0.25);
  return out;
}

DecayFit decay_fit(const std::vector<double>& s, const std::vector<double>& y, int k) {
  if (s.size() != y.size()) throw Error("diagnostics", "decay fit needs matching s and y");
  DecayFit fit;
  double peak = 0.0;
  for (double v : y) {
    if (!std::isfinite(v) || v < 0.0) throw Error("diagnostics", "decay profile must be finite and nonnegative");
    peak = std::max(peak, v);
  }
  if (!(peak > 0.0)) return fit;

  const double scale = std::exp2(2.0 * k);
  std::vector<double> xs, ys;
  double s_lo = 0.0, s_hi = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (y[i] < 1e-2 * peak) continue;
    xs.push_back(std::log1p(s[i] * scale));
    ys.push_back(y[i]);
    if (s[i] > 0.0) {
      s_lo = s_lo > 0.0 ? std::min(s_lo, s[i]) : s[i];
      s_hi = std::max(s_hi, s[i]);
    }
  }
  fit.samples = static_cast<int>(xs.size());
  if (fit.samples < 6 || !(s_hi >= 4.0 * s_lo)) {
    throw Error("diagnostics", "decay fit needs six samples spanning two dyadic s-blocks");
  }

  // log y = log A - M x, x = log(1 + s 4^k).
  Eigen::MatrixXd design(xs.size(), 2);
  Eigen::VectorXd rhs(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    design(i, 0) = 1.0;
    design(i, 1) = -xs[i];
    rhs(i) = std::log(ys[i]);
  }
  Eigen::Vector2d p = design.colPivHouseholderQr().solve(rhs);
  double amplitude = std::exp(p(0));
  double exponent = p(1);

  auto cost = [&](double a, double m) {
    double acc = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double r = a * std::exp(-m * xs[i]) - ys[i];
      acc += r * r;
    }
    return acc;
  };
  double current = cost(amplitude, exponent);
  for (int it = 0; it < 100; ++it) {
    Eigen::MatrixXd jac(xs.size(), 2);
    Eigen::VectorXd res(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double e = std::exp(-exponent * xs[i]);
      jac(i, 0) = e;
      jac(i, 1) = -amplitude * xs[i] * e;
      res(i) = amplitude * e - ys[i];
    }
    const Eigen::Vector2d step = jac.colPivHouseholderQr().solve(-res);
    double t = 1.0;
    bool improved = false;
    for (int h = 0; h < 30; ++h, t *= 0.5) {
      const double trial = cost(amplitude + t * step(0), exponent + t * step(1));
      if (trial < current) {
        amplitude += t * step(0);
        exponent += t * step(1);
        improved = trial < current * (1.0 - 1e-15);
        current = trial;
        break;
      }
    }
    if (!improved) break;
  }
  double norm = 0.0;
  for (double v : ys) norm += v * v;
  fit.defined = true;
  fit.amplitude = amplitude;
  fit.exponent = exponent;
  fit.residual = std::sqrt(current / norm);
  return fit;
}

}  // namespace caloric::diagnostics
