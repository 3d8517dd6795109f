#pragma once

#include <filesystem>
#include <vector>

#include "caloric/heatflow/map_field.hpp"

namespace caloric::diagnostics {

inline constexpr double kDefaultDelta = 1.0 / 800.0;

// sigma lattice m / 8, m = 0..16.
inline constexpr int kSigmaDenominator = 8;
inline constexpr int kSigmaLatticeMax = 16;

// Lattice index of sigma; throws unless 8 sigma is an integer in [0, 16].
int sigma_index(double sigma);
inline double lattice_sigma(int m) { return static_cast<double>(m) / kSigmaDenominator; }

// Values c_k over shells k_min, k_min + 1, ...
struct FrequencyEnvelope {
  double delta = kDefaultDelta;
  double sigma = 0.0;
  int k_min = 0;
  int iterate = 0;
  std::vector<double> values;

  int k_max() const noexcept { return k_min + static_cast<int>(values.size()) - 1; }
  double at(int k) const { return values.at(static_cast<std::size_t>(k - k_min)); }
  double ell2_norm() const;
  // Largest c_j 2^{-delta |l - j|} / c_l over pairs with c_l > 0 (<= 1 for an envelope).
  double slow_variation_ratio() const;
};

// a~_j = sup_j' a_j' 2^{-delta |j - j'|}, computed in two sweeps with the
// factor 2^{-delta}, which makes domination and idempotency exact.
std::vector<double> envelope_of_sequence(const std::vector<double>& a, double delta);

// Envelope of 2^{sigma k + k} ||P_k (u - Q)||_2 over the grid's shells.
FrequencyEnvelope field_envelope(const spectral::VecField& u, double sigma, double delta = kDefaultDelta);
FrequencyEnvelope field_envelope(const heatflow::MapField& u, double sigma, double delta = kDefaultDelta);

// gamma(sigma) on the lattice; members[m] has sigma = m / 8.
struct EnvelopeFamily {
  int iterate = 0;
  std::vector<FrequencyEnvelope> members;

  int max_index() const noexcept { return static_cast<int>(members.size()) - 1; }
  const FrequencyEnvelope& at_index(int m) const;
  const FrequencyEnvelope& at(double sigma) const { return at_index(sigma_index(sigma)); }
};

EnvelopeFamily envelope_family(const spectral::VecField& u, double delta = kDefaultDelta);

// Iterated family gamma^(j), j = 0..4. gamma^(1) equals gamma for
// sigma <= 99/100 and gamma(sigma) + gamma(sigma - 3/8) gamma(3/8) up to 5/4;
// for j >= 2, gamma^(j-1) up to (j + 3) / 4 and
// gamma(sigma) + gamma^(j-1)(sigma - 3/8) gamma(3/8) up to (j + 4) / 4.
// Breakpoints are compared in exact integer arithmetic. The result carries
// order 2^j delta.
EnvelopeFamily envelope_iterate(const EnvelopeFamily& base, int j);

// gamma^(j) of a field built from a base family of order delta / 2^j, so
// every member has order delta.
EnvelopeFamily field_iterate(const spectral::VecField& u, double delta, int j);

// Columns k, sigma, value, delta, iterate_j.
void write_envelope_csv(const std::vector<EnvelopeFamily>& families, const std::filesystem::path& path);

}  // namespace caloric::diagnostics
