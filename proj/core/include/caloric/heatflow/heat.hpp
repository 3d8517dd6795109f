#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "caloric/heatflow/map_field.hpp"

namespace caloric::heatflow {

// Nonlinear part of the extrinsic flow, -S(v)(dv, dv) with S the second
// fundamental form, dealiased by the 2/3 rule.
spectral::VecField heat_nonlinearity(const MapField& v);
// Tension field P_v(Delta v), no dealiasing. This is d_s v along the flow.
spectral::VecField tension(const MapField& v);

// Largest step heat_step accepts: 0.5 / sup |dv|^2.
double heat_stability_bound(const MapField& v);

// One ETDRK2 step followed by retraction. Throws if ds exceeds the stability
// bound or the retracted state misses the constraint.
MapField heat_step(const MapField& v, double ds);

struct HeatOptions {
  double s_max = -1.0;              // <= 0: 64 (L / 2 pi)^2
  double tol_q = 1e-6;              // convergence threshold on sup |v - Q|
  double level_ratio = 1.189207115002721;  // 2^(1/4)
  double ramp_step = -1.0;          // <= 0: dx^2 / 4
  int min_substeps = 2;             // ETDRK2 steps per level gap, at least
  double max_substep = -1.0;        // <= 0: no cap beyond stability
  double energy_threshold = 0.05;   // smallness precondition on E(u)
  bool enforce_smallness = true;

  friend bool operator==(const HeatOptions&, const HeatOptions&) = default;
};

// Linear ramp 0, h, 2h, ... up to where the geometric ratio takes over, then
// geometric to s_max (last level clipped to s_max).
std::vector<double> heat_levels(const spectral::Grid2& grid, const HeatOptions& options);

struct HeatTrajectory {
  std::vector<double> s_levels;
  std::vector<MapField> states;
  std::vector<double> energies;
  bool converged_to_q = false;
  double sup_distance = 0.0;  // sup |v(s_max) - Q|

  std::size_t size() const noexcept { return s_levels.size(); }
  const MapField& final_state() const { return states.back(); }
};

// Energy must be monotone to 1e-8 E(u) across levels; a breach throws.
HeatTrajectory heat_solve(const MapField& u, const HeatOptions& options = {});

struct DecayWindow {
  double s_lo = 0.0;
  double s_hi = 0.0;
};

// Window of s over which the shells holding the middle 80% of the initial
// energy are being damped: [1 / xi_90^2, 1 / xi_10^2].
DecayWindow decay_window(const MapField& u);

struct DecayRate {
  int j = 0;
  double slope = 0.0;
  double expected = 0.0;  // -j / 2
  DecayWindow window;
  int samples = 0;
};

// Least-squares slope of log ||d^(j+1) v(s)||_2 against log s. Throws if fewer
// than five levels fall in the window.
DecayRate decay_rate(const HeatTrajectory& traj, int j, std::optional<DecayWindow> window = std::nullopt);

struct FrequencyProfile {
  int k = 0;
  double weight_exponent = 0.0;  // M
  std::vector<double> s;
  std::vector<double> values;    // 2^k ||P_k v(s)||_2
  double weighted_sup = 0.0;     // max_s (1 + s 4^k)^M values(s)
  double initial_value = 0.0;
};

FrequencyProfile frequency_decay_profile(const HeatTrajectory& traj, int k, double weight_exponent);

// index.csv (level, s, energy, sup_dist_Q), plus level_XXXX.cslf dumps when
// `dumps` is set. Returns the files written.
std::vector<std::filesystem::path> write_trajectory(const HeatTrajectory& traj, const std::filesystem::path& dir,
                                                    bool dumps = true);

}  // namespace caloric::heatflow
