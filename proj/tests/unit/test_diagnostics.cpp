#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <string>

#include "caloric/diagnostics/envelope.hpp"
#include "caloric/diagnostics/norms.hpp"
#include "caloric/error.hpp"
#include "support.hpp"

using namespace caloric;
using namespace caloric::diagnostics;
using testing_support::square;

namespace {

std::vector<double> random_sequence(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> a(n);
  for (auto& x : a) x = u(rng) < 0.2 ? 0.0 : std::exp(8.0 * u(rng) - 4.0);
  return a;
}

// Straight from the definition: sup over all pairs.
std::vector<double> brute_envelope(const std::vector<double>& a, double delta) {
  std::vector<double> out(a.size(), 0.0);
  for (std::size_t j = 0; j < a.size(); ++j)
    for (std::size_t l = 0; l < a.size(); ++l) {
      const double gap = std::abs(static_cast<double>(j) - static_cast<double>(l));
      out[j] = std::max(out[j], a[l] * std::pow(2.0, -delta * gap));
    }
  return out;
}

EnvelopeFamily random_family(std::mt19937_64& rng, std::size_t shells) {
  EnvelopeFamily f;
  for (int m = 0; m <= kSigmaLatticeMax; ++m) {
    FrequencyEnvelope e;
    e.sigma = lattice_sigma(m);
    e.values = random_sequence(rng, shells);
    f.members.push_back(std::move(e));
  }
  return f;
}

// Second implementation of the iterated family, written from the displayed
// recursion with rational sigma = num / 8 and memoised by (j, num).
class IterateOracle {
 public:
  explicit IterateOracle(const EnvelopeFamily& base) : base_(base) {}

  std::vector<double> operator()(int j, int num) {
    const auto key = std::make_pair(j, num);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    std::vector<double> out;
    const auto& g = base_.members.at(num).values;
    if (j == 0) {
      out = g;
    } else {
      // j = 1 keeps gamma up to 99/100; j >= 2 keeps gamma^(j-1) up to (j+3)/4.
      const bool keep = j == 1 ? num * 100 <= 99 * 8 : num * 4 <= (j + 3) * 8;
      REQUIRE(num * 4 <= (j + 4) * 8);
      if (keep) {
        out = (*this)(j == 1 ? 0 : j - 1, num);
      } else {
        const std::vector<double> lower = (*this)(j == 1 ? 0 : j - 1, num - 3);
        const auto& g38 = base_.members.at(3).values;
        out.resize(g.size());
        for (std::size_t k = 0; k < g.size(); ++k) out[k] = g[k] + lower[k] * g38[k];
      }
    }
    memo_[key] = out;
    return out;
  }

 private:
  const EnvelopeFamily& base_;
  std::map<std::pair<int, int>, std::vector<double>> memo_;
};

spectral::VecField single_mode(const spectral::Grid2& grid, int kx, int ky, int components = 3) {
  spectral::VecField u(grid, components);
  for (int iy = 0; iy < grid.n(); ++iy)
    for (int ix = 0; ix < grid.n(); ++ix) {
      const double phase = kx * grid.coordinate(ix) + ky * grid.coordinate(iy);
      u.at(1, grid.point_index(ix, iy)) = std::cos(phase);
    }
  u *= 1.0 / spectral::l2_norm(u);
  return u;
}

spectral::VecField constant_field(const spectral::Grid2& grid, double c) {
  spectral::VecField g(grid, 1);
  for (auto& x : g.data()) x = c;
  return g;
}

}  // namespace

TEST_CASE("sigma lattice") {
  CHECK(sigma_index(0.0) == 0);
  CHECK(sigma_index(0.375) == 3);
  CHECK(sigma_index(2.0) == 16);
  CHECK(lattice_sigma(9) == 1.125);
  CHECK_THROWS_AS(sigma_index(0.99), Error);
  CHECK_THROWS_AS(sigma_index(2.125), Error);
  CHECK_THROWS_AS(sigma_index(-0.125), Error);
}

TEST_CASE("envelope of a spike is the closed form") {
  const double delta = 1.0 / 800.0;
  std::vector<double> a(12, 0.0);
  a[5] = 1.0;
  const auto e = envelope_of_sequence(a, delta);
  for (int j = 0; j < 12; ++j) CHECK(e[j] == doctest::Approx(std::exp2(-delta * std::abs(j - 5))).epsilon(1e-14));
  CHECK(e[5] == 1.0);
}

TEST_CASE("envelope axioms on random sequences") {
  std::mt19937_64 rng(7);
  for (double delta : {1.0 / 800.0, 0.25, 1.0}) {
    for (int trial = 0; trial < 200; ++trial) {
      const auto a = random_sequence(rng, 12);
      const auto e = envelope_of_sequence(a, delta);
      for (std::size_t j = 0; j < a.size(); ++j) CHECK(e[j] >= a[j]);
      CHECK(envelope_of_sequence(e, delta) == e);
      const auto brute = brute_envelope(a, delta);
      for (std::size_t j = 0; j < a.size(); ++j) CHECK(e[j] == doctest::Approx(brute[j]).epsilon(1e-13));
      FrequencyEnvelope env;
      env.delta = delta;
      env.values = e;
      CHECK(env.slow_variation_ratio() <= 1.0 + 1e-14);
      double sa = 0.0;
      for (double x : a) sa += x * x;
      // Sum of squares grows by at most sum_j 2^{-2 delta |j|}.
      double bound = 0.0;
      for (int j = -11; j <= 11; ++j) bound += std::exp2(-2.0 * delta * std::abs(j));
      CHECK(env.ell2_norm() * env.ell2_norm() <= bound * sa * (1 + 1e-12));
    }
  }
}

TEST_CASE("slowly varying input is returned unchanged") {
  std::vector<double> a;
  for (int j = 0; j < 10; ++j) a.push_back(std::exp2(-0.001 * j));
  CHECK(envelope_of_sequence(a, 1.0 / 800.0) == a);
}

TEST_CASE("envelope input is validated") {
  CHECK_THROWS_AS(envelope_of_sequence({1.0, -1e-300}, 0.1), Error);
  CHECK_THROWS_AS(envelope_of_sequence({1.0, NAN}, 0.1), Error);
  CHECK_THROWS_AS(envelope_of_sequence({1.0}, 0.0), Error);
  CHECK(envelope_of_sequence({}, 0.1).empty());
}

TEST_CASE("field envelope: constant map is zero") {
  const auto t = target::make_target(target::TargetKind::Sphere2);
  const auto q = heatflow::MapField::constant(t, square(32));
  for (double sigma : {0.0, 1.0}) {
    const auto e = field_envelope(q, sigma);
    for (double c : e.values) CHECK(c == 0.0);
  }
}

TEST_CASE("field envelope of a single-shell mode") {
  const spectral::Grid2 grid = square(32);
  // |xi| = 5 sits where only shell 2 is active.
  const auto u = single_mode(grid, 3, 4);
  for (double sigma : {0.0, 0.375, 1.0}) {
    const auto e = field_envelope(u, sigma);
    const double peak = std::exp2(2.0 * sigma + 2.0);  // 2^{sigma k0 + k0}, k0 = 2
    REQUIRE(e.k_min <= 2);
    for (int k = e.k_min; k <= e.k_max(); ++k) {
      const double expected = peak * std::exp2(-e.delta * std::abs(k - 2));
      CHECK(std::abs(e.at(k) - expected) <= 0.05 * expected);
    }
  }
}

TEST_CASE("field envelope: sigma monotonicity against the definition") {
  std::mt19937_64 rng(3);
  const spectral::Grid2 grid = square(64);
  spectral::VecField u(grid, 2);
  std::normal_distribution<double> normal;
  for (auto& x : u.data()) x = normal(rng);
  const EnvelopeFamily family = envelope_family(u);
  for (int m = 0; m < kSigmaLatticeMax; ++m) {
    const auto& lo = family.at_index(m);
    const auto& hi = family.at_index(m + 1);
    const auto direct = field_envelope(u, lo.sigma);
    CHECK(direct.values == lo.values);
    for (int k = lo.k_min; k <= lo.k_max(); ++k) {
      // Weights at neighbouring sigma differ by 2^{k'/8}, k' within the shell range.
      CHECK(hi.at(k) >= std::exp2(lo.k_min / 8.0) * lo.at(k) * (1 - 1e-14));
      CHECK(hi.at(k) <= std::exp2(lo.k_max() / 8.0) * lo.at(k) * (1 + 1e-14));
    }
  }
}

TEST_CASE("field iterates are built from an order delta / 2^j base") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> normal;
  spectral::VecField u(square(64), 3);
  for (auto& x : u.data()) x = normal(rng);
  const double delta = 0.05;
  CHECK(field_iterate(u, delta, 0).members.front().values == envelope_family(u, delta).members.front().values);
  for (int j = 0; j <= 4; ++j) {
    const EnvelopeFamily family = field_iterate(u, delta, j);
    const EnvelopeFamily direct = envelope_iterate(envelope_family(u, delta / std::exp2(j)), j);
    for (int m = 0; m <= family.max_index(); ++m) {
      const auto& e = family.at_index(m);
      CHECK(e.delta == delta);
      CHECK(e.values == direct.at_index(m).values);
      CHECK(e.slow_variation_ratio() <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("family lookup") {
  std::mt19937_64 rng(1);
  const EnvelopeFamily f = random_family(rng, 4);
  CHECK(&f.at(0.375) == &f.members[3]);
  CHECK_THROWS_AS(f.at(0.3), Error);
  CHECK_THROWS_AS(f.at_index(17), Error);
}

TEST_CASE("iterated envelopes against an independent recursion") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const EnvelopeFamily base = random_family(rng, 6);
    IterateOracle oracle(base);
    for (int j = 0; j <= 4; ++j) {
      const EnvelopeFamily it = envelope_iterate(base, j);
      CHECK(it.iterate == j);
      CHECK(it.max_index() == (j == 0 ? 16 : std::min(2 * (j + 4), 16)));
      for (int m = 0; m <= it.max_index(); ++m) CHECK(it.at_index(m).values == oracle(j, m));
    }
  }
}

TEST_CASE("iterate: first branch and nine-eighths example") {
  std::mt19937_64 rng(5);
  const EnvelopeFamily base = random_family(rng, 8);
  const EnvelopeFamily one = envelope_iterate(base, 1);
  for (int m = 0; m <= 7; ++m) CHECK(one.at_index(m).values == base.at_index(m).values);
  // sigma = 1 > 99/100 takes the second branch.
  CHECK(one.at_index(8).values != base.at_index(8).values);
  CHECK(one.max_index() == 10);

  const EnvelopeFamily two = envelope_iterate(base, 2);
  const auto& g98 = base.at(1.125).values;
  const auto& g38 = base.at(0.375).values;
  const auto& prev = one.at(0.75).values;
  for (std::size_t k = 0; k < g98.size(); ++k) CHECK(two.at(1.125).values[k] == g98[k] + prev[k] * g38[k]);
  for (int j = 2; j <= 4; ++j) {
    const EnvelopeFamily cur = envelope_iterate(base, j);
    const EnvelopeFamily before = envelope_iterate(base, j - 1);
    for (int m = 0; 4 * m <= (j + 3) * 8; ++m) CHECK(cur.at_index(m).values == before.at_index(m).values);
    CHECK(cur.at_index(0).delta == base.at_index(0).delta * std::exp2(j));
  }
}

TEST_CASE("iterate: zero family and input checks") {
  EnvelopeFamily zero;
  for (int m = 0; m <= kSigmaLatticeMax; ++m) {
    FrequencyEnvelope e;
    e.sigma = lattice_sigma(m);
    e.values.assign(5, 0.0);
    zero.members.push_back(e);
  }
  for (int j = 0; j <= 4; ++j)
    for (const auto& e : envelope_iterate(zero, j).members)
      for (double c : e.values) CHECK(c == 0.0);
  CHECK_THROWS_AS(envelope_iterate(zero, 5), Error);
  CHECK_THROWS_AS(envelope_iterate(zero, -1), Error);
  CHECK_THROWS_AS(envelope_iterate(envelope_iterate(zero, 1), 2), Error);
  EnvelopeFamily short_family = zero;
  short_family.members.resize(9);
  CHECK_NOTHROW(envelope_iterate(short_family, 0));
  CHECK_THROWS_AS(envelope_iterate(short_family, 1), Error);
}

TEST_CASE("envelope csv") {
  std::mt19937_64 rng(9);
  const EnvelopeFamily base = random_family(rng, 3);
  const auto path = std::filesystem::temp_directory_path() / "caloric_envelope_test.csv";
  write_envelope_csv({base, envelope_iterate(base, 1)}, path);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "k,sigma,value,delta,iterate_j");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 3 * (17 + 11));
  std::filesystem::remove(path);
}

TEST_CASE("norm blocks: closed forms for constants") {
  const spectral::Grid2 grid = square(16);
  const double L = grid.side_length();
  for (double c : {0.0, 1.5, -2.0}) {
    std::vector<spectral::VecField> g;
    std::vector<double> t;
    for (int i = 0; i <= 10; ++i) {
      g.push_back(constant_field(grid, c));
      t.push_back(0.1 * i);
    }
    const NormBlocks b = norm_blocks(g, t);
    const double T = 1.0;
    CHECK(b.linf_t_l2_x == doctest::Approx(std::abs(c) * L).epsilon(1e-13));
    CHECK(b.l4_tx == doctest::Approx(std::abs(c) * std::pow(L * L * T, 0.25)).epsilon(1e-13));
    CHECK(b.l4_x_linf_t == doctest::Approx(std::abs(c) * std::sqrt(L)).epsilon(1e-13));
  }
}

TEST_CASE("norm blocks: homogeneity, ordering and monotonicity") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal;
  const spectral::Grid2 grid = square(16);
  std::vector<spectral::VecField> g;
  std::vector<double> t;
  for (int i = 0; i < 9; ++i) {
    spectral::VecField f(grid, 2);
    for (auto& x : f.data()) x = normal(rng);
    g.push_back(f);
    t.push_back(0.25 * i);
  }
  const NormBlocks b = norm_blocks(g, t);
  auto scaled = g;
  for (auto& f : scaled) f *= 2.0;
  const NormBlocks b2 = norm_blocks(scaled, t);
  CHECK(b2.linf_t_l2_x == 2.0 * b.linf_t_l2_x);
  CHECK(b2.l4_tx == 2.0 * b.l4_tx);
  CHECK(b2.l4_x_linf_t == 2.0 * b.l4_x_linf_t);
  for (auto& f : scaled) f *= -0.25;
  const NormBlocks bh = norm_blocks(scaled, t);
  CHECK(bh.l4_tx == 0.5 * b.l4_tx);

  double worst_l4x = 0.0;
  for (const auto& f : g) {
    double acc = 0.0;
    for (std::size_t p = 0; p < f.point_count(); ++p) acc += std::pow(std::hypot(f.at(0, p), f.at(1, p)), 4);
    worst_l4x = std::max(worst_l4x, std::pow(acc * grid.cell_area(), 0.25));
  }
  CHECK(b.l4_x_linf_t >= worst_l4x);

  auto longer = g;
  auto t_longer = t;
  longer.push_back(g.front());
  t_longer.push_back(t.back() + 0.25);
  const NormBlocks bl = norm_blocks(longer, t_longer);
  CHECK(bl.linf_t_l2_x >= b.linf_t_l2_x);
  CHECK(bl.l4_x_linf_t >= b.l4_x_linf_t);
}

TEST_CASE("norm blocks: errors") {
  const spectral::Grid2 grid = square(8);
  const auto z = constant_field(grid, 0.0);
  CHECK_THROWS_AS(norm_blocks({z}, {0.0}), Error);
  CHECK_THROWS_AS(norm_blocks({z, z, z}, {0.0, 1.0, 2.5}), Error);
  CHECK_THROWS_AS(norm_blocks({z, z}, {1.0, 0.0}), Error);
  CHECK_THROWS_AS(norm_blocks({z, constant_field(square(16), 0.0)}, {0.0, 1.0}), Error);
  const NormBlocks b = norm_blocks({z, z}, {0.0, 1.0});
  CHECK(b.linf_t_l2_x == 0.0);
  CHECK(b.l4_tx == 0.0);
  CHECK(b.l4_x_linf_t == 0.0);
}

TEST_CASE("decay fit recovers its own model") {
  for (int k : {1, 2, 3}) {
    std::vector<double> s, y;
    for (int i = 0; i <= 40; ++i) {
      s.push_back(std::exp2(-2.0 * k) * std::exp2(-3.0 + 0.2 * i));
      y.push_back(0.7 * std::pow(1.0 + s.back() * std::exp2(2.0 * k), -4.0));
    }
    const DecayFit fit = decay_fit(s, y, k);
    REQUIRE(fit.defined);
    CHECK(std::abs(fit.exponent - 4.0) <= 0.015 * 4.0);
    CHECK(fit.exponent == doctest::Approx(4.0).epsilon(1e-8));
    CHECK(fit.amplitude == doctest::Approx(0.7).epsilon(1e-8));
    CHECK(fit.residual < 1e-8);
  }
}

TEST_CASE("decay fit with multiplicative noise") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> noise(0.0, 0.01);
  std::vector<double> s, y;
  for (int i = 0; i <= 30; ++i) {
    s.push_back(0.01 * std::exp2(0.25 * i));
    y.push_back(2.0 * std::pow(1.0 + 4.0 * s.back(), -4.0) * (1.0 + noise(rng)));
  }
  const DecayFit fit = decay_fit(s, y, 1);
  CHECK(fit.exponent == doctest::Approx(4.0).epsilon(0.015));
  CHECK(fit.residual < 0.05);
}

TEST_CASE("decay fit: degenerate inputs") {
  const std::vector<double> s{0.0, 0.1, 0.2, 0.4, 0.8, 1.6, 3.2};
  const DecayFit zero = decay_fit(s, std::vector<double>(s.size(), 0.0), 1);
  CHECK_FALSE(zero.defined);
  CHECK(zero.amplitude == 0.0);
  CHECK_THROWS_AS(decay_fit(s, {1, 1, 1}, 1), Error);
  CHECK_THROWS_AS(decay_fit({0.1, 0.2, 0.3}, {1, 1, 1}, 1), Error);
  CHECK_THROWS_AS(decay_fit({0.1, 0.11, 0.12, 0.13, 0.14, 0.15}, {1, 1, 1, 1, 1, 1}, 1), Error);
  CHECK_THROWS_AS(decay_fit(s, {1, 1, 1, 1, 1, 1, -1}, 1), Error);
}
