#pragma once

#include <vector>

#include "caloric/spectral/field.hpp"

namespace caloric::diagnostics {

struct NormBlocks {
  double linf_t_l2_x = 0.0;
  double l4_tx = 0.0;
  double l4_x_linf_t = 0.0;
};

// Mixed norms of g(t, x) sampled on a uniform t-grid: trapezoid in t, grid sum
// in x, pointwise Euclidean norm across components.
NormBlocks norm_blocks(const std::vector<spectral::VecField>& g, const std::vector<double>& t);

struct DecayFit {
  bool defined = false;
  double exponent = 0.0;   // M
  double amplitude = 0.0;
  double residual = 0.0;   // ||fit - y||_2 / ||y||_2 over the fitted samples
  int samples = 0;
};

// Fits y(s) = A (1 + s 4^k)^{-M} to the samples with y >= 1e-2 max y: a
// log-linear least-squares start, then Gauss-Newton on the plain residuals.
// Needs >= 6 such samples whose positive s span a factor >= 4; an all-zero
// profile returns an undefined fit with amplitude 0.
DecayFit decay_fit(const std::vector<double>& s, const std::vector<double>& y, int k);

}  // namespace caloric::diagnostics
