#include "caloric/spectral/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "caloric/error.hpp"

namespace caloric::spectral {

namespace {

using cplx = std::complex<double>;

template <class Symbol>
ScalarField transform(const ScalarField& f, Symbol&& symbol) {
  Spectrum s = dft_forward(f);
  for (std::size_t m = 0; m < s.size(); ++m) s[m] *= symbol(m);
  return dft_inverse(s);
}

template <class Op>
VecField per_component(const VecField& f, Op&& op) {
  VecField out(f.grid(), f.components());
  for (int c = 0; c < f.components(); ++c) out.set_component(c, op(f.component_field(c)));
  return out;
}

}  // namespace

ScalarField apply_multiplier(const ScalarField& f, const std::function<double(std::size_t)>& multiplier) {
  return transform(f, [&](std::size_t m) { return multiplier(m); });
}

VecField apply_multiplier(const VecField& f, const std::function<double(std::size_t)>& multiplier) {
  return per_component(f, [&](const ScalarField& c) { return apply_multiplier(c, multiplier); });
}

ScalarField partial(const ScalarField& f, int axis) {
  if (axis != 0 && axis != 1) throw Error("spectral", "axis must be 0 or 1");
  const Grid2& g = f.grid();
  return transform(f, [&](std::size_t m) { return cplx(0.0, axis == 0 ? g.kx(m) : g.ky(m)); });
}

std::array<ScalarField, 2> gradient(const ScalarField& f) {
  const Grid2& g = f.grid();
  const Spectrum s = dft_forward(f);
  Spectrum sx(g), sy(g);
  for (std::size_t m = 0; m < s.size(); ++m) {
    sx[m] = cplx(0.0, g.kx(m)) * s[m];
    sy[m] = cplx(0.0, g.ky(m)) * s[m];
  }
  return {dft_inverse(sx), dft_inverse(sy)};
}

ScalarField laplacian(const ScalarField& f) {
  const Grid2& g = f.grid();
  return transform(f, [&](std::size_t m) { return -g.xi_norm_sq(m); });
}

ScalarField divergence(const ScalarField& fx, const ScalarField& fy) {
  return partial(fx, 0) + partial(fy, 1);
}

VecField partial(const VecField& f, int axis) {
  return per_component(f, [axis](const ScalarField& c) { return partial(c, axis); });
}

VecField laplacian(const VecField& f) {
  return per_component(f, [](const ScalarField& c) { return laplacian(c); });
}

ScalarField heat_semigroup(const ScalarField& f, double s) {
  if (!(s >= 0.0)) throw Error("spectral", "heat semigroup needs s >= 0");
  const Grid2& g = f.grid();
  return transform(f, [&](std::size_t m) { return std::exp(-s * g.xi_norm_sq(m)); });
}

VecField heat_semigroup(const VecField& f, double s) {
  return per_component(f, [s](const ScalarField& c) { return heat_semigroup(c, s); });
}

ScalarField dealias(const ScalarField& f) {
  const Grid2& g = f.grid();
  return transform(f, [&](std::size_t m) { return g.dealias_mask(m); });
}

VecField dealias(const VecField& f) {
  return per_component(f, [](const ScalarField& c) { return dealias(c); });
}

SpatialNorms spatial_norms(const ScalarField& f) {
  double s2 = 0.0, s4 = 0.0, mx = 0.0;
  for (double v : f.values()) {
    const double a = v * v;
    s2 += a;
    s4 += a * a;
    mx = std::max(mx, std::abs(v));
  }
  const double area = f.grid().cell_area();
  return {std::sqrt(s2 * area), std::pow(s4 * area, 0.25), mx};
}

SpatialNorms spatial_norms(const VecField& f) {
  double s2 = 0.0, s4 = 0.0, mx = 0.0;
  for (std::size_t p = 0; p < f.point_count(); ++p) {
    double a = 0.0;
    for (int c = 0; c < f.components(); ++c) a += f.at(c, p) * f.at(c, p);
    s2 += a;
    s4 += a * a;
    mx = std::max(mx, std::sqrt(a));
  }
  const double area = f.grid().cell_area();
  return {std::sqrt(s2 * area), std::pow(s4 * area, 0.25), mx};
}

double l2_norm(const ScalarField& f) { return spatial_norms(f).l2; }
double l2_norm(const VecField& f) { return spatial_norms(f).l2; }
double linf_norm(const VecField& f) { return spatial_norms(f).linf; }

double l2_norm_spectral(const ScalarField& f) {
  const Grid2& g = f.grid();
  const Spectrum s = dft_forward(f);
  double acc = 0.0;
  for (std::size_t m = 0; m < s.size(); ++m) acc += g.mode_weight(m) * std::norm(s[m]);
  return std::sqrt(acc * g.cell_area() / static_cast<double>(g.point_count()));
}

double mean(const ScalarField& f) {
  double acc = 0.0;
  for (double v : f.values()) acc += v;
  return acc / static_cast<double>(f.size());
}

double derivative_l2_norm(const VecField& f, int order) {
  if (order < 0) throw Error("spectral", "derivative order must be nonnegative");
  const Grid2& g = f.grid();
  double acc = 0.0;
  for (int c = 0; c < f.components(); ++c) {
    const Spectrum s = dft_forward(f.component_field(c));
    for (std::size_t m = 0; m < s.size(); ++m) {
      acc += g.mode_weight(m) * std::pow(g.xi_norm_sq(m), order) * std::norm(s[m]);
    }
  }
  return std::sqrt(acc * g.cell_area() / static_cast<double>(g.point_count()));
}

}  // namespace caloric::spectral
