#pragma once

#include <array>
#include <functional>

#include "caloric/spectral/field.hpp"

namespace caloric::spectral {

Spectrum dft_forward(const ScalarField& f);
ScalarField dft_inverse(const Spectrum& spectrum);

// Applies a real Fourier multiplier m(mode) to f.
ScalarField apply_multiplier(const ScalarField& f, const std::function<double(std::size_t)>& multiplier);
VecField apply_multiplier(const VecField& f, const std::function<double(std::size_t)>& multiplier);

ScalarField partial(const ScalarField& f, int axis);
std::array<ScalarField, 2> gradient(const ScalarField& f);
ScalarField laplacian(const ScalarField& f);
ScalarField divergence(const ScalarField& fx, const ScalarField& fy);

VecField partial(const VecField& f, int axis);
VecField laplacian(const VecField& f);

// e^{s Lap} f. Throws for s < 0.
ScalarField heat_semigroup(const ScalarField& f, double s);
VecField heat_semigroup(const VecField& f, double s);

// Zeroes the upper third of the represented modes along either axis.
ScalarField dealias(const ScalarField& f);
VecField dealias(const VecField& f);

struct SpatialNorms {
  double l2 = 0.0;
  double l4 = 0.0;
  double linf = 0.0;
};

// Grid-sum quadrature (sum times cell area); exact for the discrete measure.
SpatialNorms spatial_norms(const ScalarField& f);
SpatialNorms spatial_norms(const VecField& f);  // pointwise Euclidean norm
double l2_norm(const ScalarField& f);
double l2_norm(const VecField& f);
double linf_norm(const VecField& f);
// L2 norm from the spectrum (Parseval).
double l2_norm_spectral(const ScalarField& f);
double mean(const ScalarField& f);

// L2 norm of the full (j)-th derivative tensor, sum over |xi|^{2j} |f^|^2.
double derivative_l2_norm(const VecField& f, int order);

}  // namespace caloric::spectral
