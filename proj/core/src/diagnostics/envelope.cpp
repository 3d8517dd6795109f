#include "caloric/diagnostics/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "caloric/error.hpp"
#include "caloric/format.hpp"
#include "caloric/spectral/littlewood_paley.hpp"
#include "caloric/spectral/spectral.hpp"

namespace caloric::diagnostics {

int sigma_index(double sigma) {
  const double scaled = sigma * kSigmaDenominator;
  const double m = std::round(scaled);
  if (!(std::abs(scaled - m) <= 1e-12) || m < 0 || m > kSigmaLatticeMax) {
    throw Error("diagnostics", "sigma " + format_double(sigma) + " is not on the 1/8 lattice in [0, 2]");
  }
  return static_cast<int>(m);
}

double FrequencyEnvelope::ell2_norm() const {
  double acc = 0.0;
  for (double c : values) acc += c * c;
  return std::sqrt(acc);
}

double FrequencyEnvelope::slow_variation_ratio() const {
  double worst = 0.0;
  for (std::size_t l = 0; l < values.size(); ++l) {
    if (!(values[l] > 0.0)) continue;
    for (std::size_t j = 0; j < values.size(); ++j) {
      const double gap = std::abs(static_cast<double>(l) - static_cast<double>(j));
      worst = std::max(worst, values[j] * std::exp2(-delta * gap) / values[l]);
    }
  }
  return worst;
}

std::vector<double> envelope_of_sequence(const std::vector<double>& a, double delta) {
  if (!(delta > 0.0)) throw Error("diagnostics", "envelope order must be positive");
  for (double x : a) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw Error("diagnostics", "envelope input must be finite and nonnegative");
  }
  const double r = std::exp2(-delta);
  std::vector<double> out = a;
  for (std::size_t j = 1; j < out.size(); ++j) out[j] = std::max(out[j], out[j - 1] * r);
  for (std::size_t j = out.size(); j-- > 1;) out[j - 1] = std::max(out[j - 1], out[j] * r);
  return out;
}

FrequencyEnvelope field_envelope(const spectral::VecField& u, double sigma, double delta) {
  const spectral::Grid2& grid = u.grid();
  FrequencyEnvelope out;
  out.delta = delta;
  out.sigma = sigma;
  out.k_min = grid.shell_min();
  std::vector<double> a;
  for (int k = grid.shell_min(); k <= grid.shell_max(); ++k) {
    const double weight = std::exp2(sigma * k + k);
    a.push_back(weight * spectral::l2_norm(spectral::lp_project(u, k)));
  }
  out.values = envelope_of_sequence(a, delta);
  return out;
}

FrequencyEnvelope field_envelope(const heatflow::MapField& u, double sigma, double delta) {
  return field_envelope(u.values(), sigma, delta);
}

const FrequencyEnvelope& EnvelopeFamily::at_index(int m) const {
  if (m < 0 || m > max_index()) {
    throw Error("diagnostics", "sigma index " + std::to_string(m) + " lies outside the family's domain");
  }
  return members[static_cast<std::size_t>(m)];
}

EnvelopeFamily envelope_family(const spectral::VecField& u, double delta) {
  // Shell norms do not depend on sigma; project once.
  const spectral::Grid2& grid = u.grid();
  std::vector<double> norms;
  for (int k = grid.shell_min(); k <= grid.shell_max(); ++k) norms.push_back(spectral::l2_norm(spectral::lp_project(u, k)));
  EnvelopeFamily family;
  for (int m = 0; m <= kSigmaLatticeMax; ++m) {
    FrequencyEnvelope e;
    e.delta = delta;
    e.sigma = lattice_sigma(m);
    e.k_min = grid.shell_min();
    std::vector<double> a(norms.size());
    for (std::size_t i = 0; i < norms.size(); ++i) {
      const int k = grid.shell_min() + static_cast<int>(i);
      a[i] = std::exp2(e.sigma * k + k) * norms[i];
    }
    e.values = envelope_of_sequence(a, delta);
    family.members.push_back(std::move(e));
  }
  return family;
}

EnvelopeFamily envelope_iterate(const EnvelopeFamily& base, int j) {
  if (j < 0 || j > 4) throw Error("diagnostics", "envelope iterate j must lie in 0..4");
  if (base.iterate != 0) throw Error("diagnostics", "envelope_iterate needs the base family gamma^(0)");
  if (j == 0) return base;
  // sigma = m / 8; 3/8 is index 3.
  constexpr int shift = 3;
  const EnvelopeFamily previous = j == 1 ? base : envelope_iterate(base, j - 1);
  const int top = std::min(2 * (j + 4), kSigmaLatticeMax);
  if (base.max_index() < top) throw Error("diagnostics", "base family does not cover the iterate's sigma range");
  const FrequencyEnvelope& g38 = base.at_index(shift);

  EnvelopeFamily out;
  out.iterate = j;
  for (int m = 0; m <= top; ++m) {
    // j = 1: first branch iff m / 8 <= 99 / 100; j >= 2: iff m / 8 <= (j + 3) / 4.
    const bool first = j == 1 ? 100 * m <= 99 * kSigmaDenominator : 4 * m <= (j + 3) * kSigmaDenominator;
    const FrequencyEnvelope& g = base.at_index(m);
    FrequencyEnvelope e;
    e.sigma = g.sigma;
    e.k_min = g.k_min;
    e.iterate = j;
    e.delta = g.delta * std::exp2(j);
    if (first) {
      e.values = j == 1 ? g.values : previous.at_index(m).values;
    } else {
      const FrequencyEnvelope& lower = j == 1 ? base.at_index(m - shift) : previous.at_index(m - shift);
      e.values.resize(g.values.size());
      for (std::size_t i = 0; i < e.values.size(); ++i) e.values[i] = g.values[i] + lower.values[i] * g38.values[i];
    }
    out.members.push_back(std::move(e));
  }
  return out;
}

EnvelopeFamily field_iterate(const spectral::VecField& u, double delta, int j) {
  return envelope_iterate(envelope_family(u, delta * std::exp2(-j)), j);
}

void write_envelope_csv(const std::vector<EnvelopeFamily>& families, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("diagnostics", "cannot write " + path.string());
  out << "k,sigma,value,delta,iterate_j\n";
  for (const auto& family : families) {
    for (const auto& e : family.members) {
      for (int k = e.k_min; k <= e.k_max(); ++k) {
        out << k << ',' << format_double(e.sigma) << ',' << format_double(e.at(k)) << ',' << format_double(e.delta)
            << ',' << family.iterate << '\n';
      }
    }
  }
}

}  // namespace caloric::diagnostics
