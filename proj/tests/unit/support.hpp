#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "caloric/pipeline/initial_data.hpp"
#include "caloric/spectral/spectral.hpp"

namespace testing_support {

using namespace caloric;

inline spectral::Grid2 square(int n) { return spectral::Grid2(n, 2.0 * std::numbers::pi); }

inline spectral::ScalarField random_field(const spectral::Grid2& grid, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  spectral::ScalarField f(grid);
  for (auto& v : f.values()) v = normal(rng);
  return f;
}

// Random field with modes only inside the dealiased band.
inline spectral::ScalarField band_limited(const spectral::Grid2& grid, unsigned seed) {
  return spectral::dealias(random_field(grid, seed));
}

inline double max_abs_diff(const spectral::ScalarField& a, const spectral::ScalarField& b) {
  double m = 0.0;
  for (std::size_t p = 0; p < a.size(); ++p) m = std::max(m, std::abs(a[p] - b[p]));
  return m;
}

inline double max_abs_diff(const spectral::VecField& a, const spectral::VecField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

inline pipeline::InitialData small_bump(const spectral::Grid2& grid, target::TargetKind kind, double grad_norm = 0.03,
                                        double width = 0.6) {
  pipeline::InitialDataSpec spec;
  spec.family = "bump";
  spec.grad_norm = grad_norm;
  spec.width = width;
  return pipeline::initial_data(spec, grid, target::make_target(kind));
}

}  // namespace testing_support
