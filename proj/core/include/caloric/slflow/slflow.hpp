#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "caloric/gauge/gauge.hpp"

namespace caloric::slflow {

using heatflow::MapField;
using spectral::VecField;

// F(u) = J_u P_u (Delta u).
VecField sl_rhs(const MapField& u);

// 0.2 dx^2 / pi^2.
double sl_stability_bound(const spectral::Grid2& grid);

// One SSP-RK3 step of u_t = F(u), every stage retracted. Negative dt runs
// backwards. Throws if |dt| exceeds the stability bound.
MapField sl_step(const MapField& u, double dt);

double mass(const MapField& u, const target::Vec& q);
double mass(const MapField& u);  // about the target's base point

struct SLSeries {
  double dt = 0.0;           // integrator step
  double sample_spacing = 0.0;
  std::vector<double> t;
  std::vector<MapField> states;
  std::vector<double> energy;
  std::vector<double> mass;
  std::vector<double> supdist;   // sup |u - Q|
  std::vector<double> residual;  // NaN where not computed

  std::size_t size() const noexcept { return t.size(); }
  double energy_drift() const;   // max |E(t) - E(0)| / E(0)
};

// Integrates to T with step dt, recording every `record_every` steps.
SLSeries sl_solve(const MapField& u0, double T, double dt, int record_every = 1);

struct DecayReport {
  std::vector<double> supdist;
  double initial = 0.0;
  double final_value = 0.0;
  double window_min = 0.0;
  double trend = 0.0;  // least-squares slope over the final half
  bool decreased = false;
};

// Needs at least 16 samples.
DecayReport asymptotic_decay_check(const SLSeries& series, const target::Vec& q);

// Phase of a helix sample relative to the closed form, in radians, wrapped to
// (-pi, pi]; and the max pointwise distance to the closed form.
struct HelixError {
  double phase = 0.0;
  double distance = 0.0;
};
HelixError helix_error(const MapField& u, double theta, int k, double t);

struct GaugedResidual {
  double equation = 0.0;  // -J D_t psi_i - sum_j (D_j D_j psi_i + R(psi_i, psi_j) psi_j)
  double phi_t = 0.0;     // psi_t - J sum_j D_j psi_j
  double torsion_t = 0.0; // D_t psi_i - D_i psi_t
  double scale = 0.0;     // sup |D_t psi_i|
  double spacing = 0.0;
};

// Gauged equation at s = 0 and sample `index` (interior), with t-derivatives
// from centred differences of neighbouring samples and A_t from the integral
// formula along the heat direction.
GaugedResidual gauged_residual(const SLSeries& series, std::size_t index,
                               const heatflow::HeatOptions& heat = {}, gauge::GaugeOptions options = {});

// Columns t, energy, mass, supdist_Q, residual.
void write_series_csv(const SLSeries& series, const std::filesystem::path& path);

}  // namespace caloric::slflow
