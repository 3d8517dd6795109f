#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "caloric/heatflow/map_field.hpp"

namespace caloric::pipeline {

// Families:
//   constant  u == Q
//   bump      u = exp_Q(b), b(x) = A sum_m g(|x - c| / w_m) ((x1 - c1) X + (x2 - c2) Y) / w_m,
//             w_m = width 2^-m over `scales` dyadic widths; odd about c
//   shell     u = exp_Q(A (sin(xi x1) X + sin(xi x2) Y)), xi the wavenumber nearest 2^shell
//   helix     S^2 only: (cos th, sin th cos(xi x1), sin th sin(xi x1)), xi = 2 pi k / L
//   random    seeded normal tangent noise, heat-mollified, made odd about c
// X and Y are fixed unit tangent vectors at Q mixing every e~_a and J e~_a.
// For bump/shell/random, grad_norm > 0 selects A so that ||du||_2 matches it.
struct InitialDataSpec {
  std::string family = "bump";
  double amplitude = 0.0;
  double grad_norm = -1.0;
  double width = 0.4;
  std::array<double, 2> center{-1.0, -1.0};  // negative: domain centre
  int scales = 1;
  int shell = 2;
  double helix_theta = 0.5;
  int helix_k = 1;
  std::uint64_t seed = 1;
  double smoothing = 0.3;

  friend bool operator==(const InitialDataSpec&, const InitialDataSpec&) = default;
};

struct InitialData {
  heatflow::MapField u;
  double amplitude = 0.0;
  double grad_norm = 0.0;  // ||du||_2 as built
};

InitialData initial_data(const InitialDataSpec& spec, const spectral::Grid2& grid,
                         std::shared_ptr<const target::TargetManifold> target);

// Tangent-space profile b at Q (ambient components) for unit amplitude; empty
// for families that are not of the form exp_Q(A b).
spectral::VecField tangent_profile(const InitialDataSpec& spec, const spectral::Grid2& grid,
                                   const target::TargetManifold& target);

}  // namespace caloric::pipeline
