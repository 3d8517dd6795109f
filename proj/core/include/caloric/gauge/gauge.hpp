#pragma once

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "caloric/heatflow/heat.hpp"

namespace caloric::gauge {

using spectral::VecField;
using target::Vec;

// Field layouts, with m = 2n frame vectors and N ambient components:
//   frame      component f * N + c  = ambient component c of e_f
//   psi        component p          = <X, e_p>  (realified phi)
//   connection component p * m + q  = A[p][q] = <d e_p, e_q>
//   contraction component ((a m + b) m + c) m + d = <R(e_a, e_b) e_c, e_d>
// Frame order is e_1, J e_1, ..., e_n, J e_n.

// Projects `vectors` onto T_p and re-orthonormalizes them J-compatibly:
// Gram-Schmidt on e_a against all earlier e_b, J e_b, then J e_a := J(e_a).
void orthonormalize(const target::TargetManifold& target, const Vec& p, std::vector<Vec>& vectors);

Vec frame_vector(const VecField& frame, int f, std::size_t p, int ambient);

// Reference frame projected to T_{v(x)} and orthonormalized, at every point.
VecField seed_frame(const heatflow::MapField& v, const std::vector<Vec>& reference);

// One Heun step of d e / ds = S(v)(d_s v, e) from (v_from, tension_from) to
// (v_to, tension_to), h = s_to - s_from, then orthonormalized at v_to.
VecField transport_frame(const heatflow::MapField& v_from, const VecField& tension_from, const VecField& frame,
                         const heatflow::MapField& v_to, const VecField& tension_to, double h);

struct FrameStats {
  double orthonormality = 0.0;  // max |<e_a, e_b> - delta_ab|
  double j_compatibility = 0.0; // max |e_{2a+1} - J e_{2a}|
  double tangency = 0.0;        // max |e_a - P e_a|
  void merge(const FrameStats& o);
};
FrameStats frame_stats(const heatflow::MapField& v, const VecField& frame);

// <X, e_p> for an ambient field X.
VecField frame_components(const heatflow::MapField& v, const VecField& frame, const VecField& x);
std::array<VecField, 2> differential_fields(const heatflow::MapField& v, const VecField& frame);
// <d_s v, e_p> with d_s v the tension field of v.
VecField heat_tension(const heatflow::MapField& v, const VecField& frame);

std::array<VecField, 2> connection_direct(const heatflow::MapField& v, const VecField& frame);
// <R(x, y) e_p, e_q> as a connection-layout field.
VecField curvature_in_frame(const heatflow::MapField& v, const VecField& frame, const VecField& x, const VecField& y);
VecField curvature_contraction(const heatflow::MapField& v, const VecField& frame);

// d_axis psi + A^T psi.
VecField covariant_derivative(const VecField& psi, const VecField& connection, int axis);
// Realified J on frame coefficients: (J psi)_{2a} = -psi_{2a+1}, (J psi)_{2a+1} = psi_{2a}.
VecField apply_j(const VecField& psi);
// A^T psi pointwise.
VecField connection_apply(const VecField& connection, const VecField& psi);
// max |A + A^T|.
double antisymmetry_residual(const VecField& connection);

struct Residual {
  double max_abs = 0.0;
  double l2 = 0.0;
  double scale = 0.0;  // sup of the compared quantity, for relative reporting
  double relative() const { return scale > 0.0 ? max_abs / scale : max_abs; }
  void merge(const Residual& o);
};

Residual residual_of(const VecField& difference, const VecField& reference);

// D_1 psi_2 - D_2 psi_1.
Residual torsion_residual(const std::array<VecField, 2>& psi, const std::array<VecField, 2>& connection);
// (d_1 A_2 - d_2 A_1 + A_2 A_1 - A_1 A_2)[p][q] against <R(d_1 v, d_2 v) e_p, e_q>.
Residual commutator_residual(const heatflow::MapField& v, const VecField& frame,
                             const std::array<VecField, 2>& connection);
// psi_s - sum_j D_j psi_j.
Residual heat_tension_residual(const VecField& psi_s, const std::array<VecField, 2>& psi,
                               const std::array<VecField, 2>& connection);

struct GaugeLevel;

struct GaugeOptions {
  std::optional<std::vector<Vec>> reference_frame;  // defaults to the target's
  bool connection_integral = true;
  bool contraction = false;
  // d_t v at a level; enables psi_t and A_t.
  std::function<VecField(std::size_t level)> time_derivative;
  // Integrand at s_max must be below tail_ratio times its peak.
  double tail_ratio = 1e-10;
  double converged_tolerance = 1e-6;
  // verify_gauge hands every level here after its own checks.
  std::function<void(const GaugeLevel&)> observer;
};

// Everything the sweep knows at one s-level. Optional members are null when
// not requested.
struct GaugeLevel {
  std::size_t level = 0;
  double s = 0.0;
  const heatflow::MapField* v = nullptr;
  const VecField* frame = nullptr;
  const VecField* tension = nullptr;
  const std::array<VecField, 2>* psi = nullptr;
  const VecField* psi_s = nullptr;
  const std::array<VecField, 2>* a_direct = nullptr;
  const std::array<VecField, 2>* a_integral = nullptr;
  const VecField* psi_t = nullptr;
  const VecField* a_t = nullptr;
  const VecField* contraction = nullptr;
};

struct SweepSummary {
  FrameStats frame;
  double integrand_peak = 0.0;
  double integrand_at_s_max = 0.0;
  double tail_bound = 0.0;  // bound on the truncated int_{s_max}^infty
};

// Builds the caloric gauge level by level from s_max down to 0 and hands each
// level to `visit`; nothing is kept between levels except the running
// integrals. Throws if the trajectory has not converged to Q, if frames drift
// by more than 1e-8, or if the integrand tail is too fat for s_max.
SweepSummary caloric_sweep(const heatflow::HeatTrajectory& traj, const GaugeOptions& options,
                           const std::function<void(const GaugeLevel&)>& visit);

struct Frame {
  std::vector<double> s_levels;
  std::vector<VecField> levels;
};

Frame build_caloric_frame(const heatflow::HeatTrajectory& traj, const GaugeOptions& options = {});

struct GaugeData {
  std::vector<double> s_levels;
  std::vector<std::array<VecField, 2>> psi;
  std::vector<VecField> psi_s;
  std::vector<std::array<VecField, 2>> a_direct;
  std::vector<std::array<VecField, 2>> a_integral;
  SweepSummary summary;
};

GaugeData build_gauge(const heatflow::HeatTrajectory& traj, const GaugeOptions& options = {});

struct DynamicSeparation {
  double remainder_sup = 0.0;           // sup_{s,x} |G(s) - Gamma_inf|
  double limit_variation = 0.0;         // sup_x |G(s_max, x) - G(s_max, x0)|
  double remainder_integral_sup = 0.0;  // sup of the int psi_s (nabla R) term
  double tail_tolerance = 1e-7;        // allowed gap beyond the integral term
  std::vector<double> limit;            // Gamma_inf at the first grid point
};

struct GaugeReport {
  Residual torsion;
  Residual commutator;
  Residual heat_tension;
  double connection_gap = 0.0;    // max |A_direct - A_integral|
  double connection_scale = 0.0;  // max |A_direct|
  double antisymmetry = 0.0;
  double tail_connection = 0.0;   // max |A_direct(s_max)|
  std::optional<DynamicSeparation> separation;
  SweepSummary summary;
};

// One sweep evaluating every identity; `separation` adds the curvature
// contraction and its limit decomposition.
GaugeReport verify_gauge(const heatflow::HeatTrajectory& traj, bool separation, GaugeOptions options = {});

// Constant rotation O of the reference frame: e~'_q = sum_p O[p][q] e~_p.
std::vector<Vec> rotate_reference(const std::vector<Vec>& reference, const Eigen::MatrixXd& rotation);

}  // namespace caloric::gauge
