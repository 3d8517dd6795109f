#include <algorithm>
#include <cmath>

#include "caloric/error.hpp"
#include "caloric/gauge/gauge.hpp"
#include "caloric/parallel.hpp"
#include "caloric/spectral/spectral.hpp"

namespace caloric::gauge {

namespace {

using heatflow::MapField;
using heatflow::point_of;
using heatflow::set_point;

constexpr int kMaxFrame = 4;
using FrameVectors = std::array<Vec, kMaxFrame>;

int frame_size(const VecField& frame, int ambient) { return frame.components() / ambient; }

FrameVectors load(const VecField& frame, std::size_t p, int m, int ambient) {
  FrameVectors out;
  for (int f = 0; f < m; ++f) out[f] = frame_vector(frame, f, p, ambient);
  return out;
}

double sup_abs(const VecField& f) {
  double out = 0.0;
  for (double x : f.data()) out = std::max(out, std::abs(x));
  return out;
}

}  // namespace

void FrameStats::merge(const FrameStats& o) {
  orthonormality = std::max(orthonormality, o.orthonormality);
  j_compatibility = std::max(j_compatibility, o.j_compatibility);
  tangency = std::max(tangency, o.tangency);
}

void Residual::merge(const Residual& o) {
  max_abs = std::max(max_abs, o.max_abs);
  l2 = std::max(l2, o.l2);
  scale = std::max(scale, o.scale);
}

Vec frame_vector(const VecField& frame, int f, std::size_t p, int ambient) {
  Vec v(ambient);
  for (int c = 0; c < ambient; ++c) v(c) = frame.at(f * ambient + c, p);
  return v;
}

void orthonormalize(const target::TargetManifold& target, const Vec& p, std::vector<Vec>& vectors) {
  const int n = target.complex_dim();
  if (static_cast<int>(vectors.size()) != 2 * n) throw Error("gauge", "frame has the wrong number of vectors");
  for (int a = 0; a < n; ++a) {
    Vec e = target.project_tangent(target::trusted, p, vectors[2 * a]);
    for (int pass = 0; pass < 2; ++pass) {
      for (int b = 0; b < a; ++b) {
        e -= e.dot(vectors[2 * b]) * vectors[2 * b] + e.dot(vectors[2 * b + 1]) * vectors[2 * b + 1];
      }
    }
    const double norm = e.norm();
    if (!(norm > 1e-6)) throw InvariantViolation("gauge", "frame degenerated during orthonormalization");
    e /= norm;
    vectors[2 * a] = e;
    vectors[2 * a + 1] = target.complex_structure(target::trusted, p, e);
  }
}

VecField seed_frame(const MapField& v, const std::vector<Vec>& reference) {
  const auto& target = v.target();
  const int ambient = target.ambient_dim();
  const int m = target.real_dim();
  VecField out(v.grid(), m * ambient);
  parallel_for(v.point_count(), [&](std::size_t p) {
    std::vector<Vec> vectors = reference;
    orthonormalize(target, v.point(p), vectors);
    for (int f = 0; f < m; ++f) {
      for (int c = 0; c < ambient; ++c) out.at(f * ambient + c, p) = vectors[f](c);
    }
  });
  return out;
}

VecField transport_frame(const MapField& v_from, const VecField& tension_from, const VecField& frame,
                         const MapField& v_to, const VecField& tension_to, double h) {
  const auto& target = v_to.target();
  const int ambient = target.ambient_dim();
  const int m = frame_size(frame, ambient);
  VecField out(frame.grid(), frame.components());
  parallel_for(frame.point_count(), [&](std::size_t p) {
    const Vec q1 = v_from.point(p);
    const Vec t1 = point_of(tension_from, p);
    const Vec q0 = v_to.point(p);
    const Vec t0 = point_of(tension_to, p);
    std::vector<Vec> vectors(m);
    for (int f = 0; f < m; ++f) {
      const Vec e = frame_vector(frame, f, p, ambient);
      const Vec k1 = target.second_fundamental_form(target::trusted, q1, t1, e);
      const Vec pred = target.project_tangent(target::trusted, q0, e + h * k1);
      const Vec k2 = target.second_fundamental_form(target::trusted, q0, t0, pred);
      vectors[f] = e + 0.5 * h * (k1 + k2);
    }
    orthonormalize(target, q0, vectors);
    for (int f = 0; f < m; ++f) {
      for (int c = 0; c < ambient; ++c) out.at(f * ambient + c, p) = vectors[f](c);
    }
  });
  return out;
}

FrameStats frame_stats(const MapField& v, const VecField& frame) {
  const auto& target = v.target();
  const int ambient = target.ambient_dim();
  const int m = frame_size(frame, ambient);
  FrameStats out;
  for (std::size_t p = 0; p < v.point_count(); ++p) {
    const Vec q = v.point(p);
    const FrameVectors e = load(frame, p, m, ambient);
    for (int a = 0; a < m; ++a) {
      for (int b = 0; b < m; ++b) {
        out.orthonormality = std::max(out.orthonormality, std::abs(e[a].dot(e[b]) - (a == b ? 1.0 : 0.0)));
      }
      out.tangency = std::max(out.tangency, (e[a] - target.project_tangent(target::trusted, q, e[a])).norm());
    }
    for (int a = 0; a < m / 2; ++a) {
      out.j_compatibility = std::max(
          out.j_compatibility, (e[2 * a + 1] - target.complex_structure(target::trusted, q, e[2 * a])).norm());
    }
  }
  return out;
}

VecField frame_components(const MapField& v, const VecField& frame, const VecField& x) {
  const int ambient = v.target().ambient_dim();
  const int m = frame_size(frame, ambient);
  VecField out(v.grid(), m);
  parallel_for(v.point_count(), [&](std::size_t p) {
    for (int f = 0; f < m; ++f) {
      double acc = 0.0;
      for (int c = 0; c < ambient; ++c) acc += x.at(c, p) * frame.at(f * ambient + c, p);
      out.at(f, p) = acc;
    }
  });
  return out;
}

std::array<VecField, 2> differential_fields(const MapField& v, const VecField& frame) {
  return {frame_components(v, frame, spectral::partial(v.values(), 0)),
          frame_components(v, frame, spectral::partial(v.values(), 1))};
}

VecField heat_tension(const MapField& v, const VecField& frame) {
  return frame_components(v, frame, heatflow::tension(v));
}

std::array<VecField, 2> connection_direct(const MapField& v, const VecField& frame) {
  const int ambient = v.target().ambient_dim();
  const int m = frame_size(frame, ambient);
  std::array<VecField, 2> out{VecField(v.grid(), m * m), VecField(v.grid(), m * m)};
  for (int axis = 0; axis < 2; ++axis) {
    const VecField d = spectral::partial(frame, axis);
    VecField& a = out[axis];
    parallel_for(v.point_count(), [&](std::size_t p) {
      for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
          double acc = 0.0;
          for (int c = 0; c < ambient; ++c) acc += d.at(i * ambient + c, p) * frame.at(j * ambient + c, p);
          a.at(i * m + j, p) = acc;
        }
      }
    });
  }
  return out;
}

VecField curvature_in_frame(const MapField& v, const VecField& frame, const VecField& x, const VecField& y) {
  const auto& target = v.target();
  const int ambient = target.ambient_dim();
  const int m = frame_size(frame, ambient);
  VecField out(v.grid(), m * m);
  parallel_for(v.point_count(), [&](std::size_t p) {
    const Vec q = v.point(p);
    const Vec xp = target.project_tangent(target::trusted, q, point_of(x, p));
    const Vec yp = target.project_tangent(target::trusted, q, point_of(y, p));
    const FrameVectors e = load(frame, p, m, ambient);
    for (int i = 0; i < m; ++i) {
      const Vec r = target.curvature(target::trusted, q, xp, yp, e[i]);
      for (int j = 0; j < m; ++j) out.at(i * m + j, p) = r.dot(e[j]);
    }
  });
  return out;
}

VecField curvature_contraction(const MapField& v, const VecField& frame) {
  const auto& target = v.target();
  const int ambient = target.ambient_dim();
  const int m = frame_size(frame, ambient);
  VecField out(v.grid(), m * m * m * m);
  parallel_for(v.point_count(), [&](std::size_t p) {
    const Vec q = v.point(p);
    const FrameVectors e = load(frame, p, m, ambient);
    for (int a = 0; a < m; ++a) {
      for (int b = 0; b < m; ++b) {
        for (int c = 0; c < m; ++c) {
          const Vec r = target.curvature(target::trusted, q, e[a], e[b], e[c]);
          for (int d = 0; d < m; ++d) out.at(((a * m + b) * m + c) * m + d, p) = r.dot(e[d]);
        }
      }
    }
  });
  return out;
}

VecField connection_apply(const VecField& connection, const VecField& psi) {
  const int m = psi.components();
  if (connection.components() != m * m) throw Error("gauge", "connection and field sizes do not match");
  VecField out(psi.grid(), m);
  parallel_for(psi.point_count(), [&](std::size_t p) {
    for (int q = 0; q < m; ++q) {
      double acc = 0.0;
      for (int i = 0; i < m; ++i) acc += connection.at(i * m + q, p) * psi.at(i, p);
      out.at(q, p) = acc;
    }
  });
  return out;
}

VecField covariant_derivative(const VecField& psi, const VecField& connection, int axis) {
  VecField out = spectral::partial(psi, axis);
  out += connection_apply(connection, psi);
  return out;
}

VecField apply_j(const VecField& psi) {
  VecField out(psi.grid(), psi.components());
  for (int a = 0; a < psi.components() / 2; ++a) {
    for (std::size_t p = 0; p < psi.point_count(); ++p) {
      out.at(2 * a, p) = -psi.at(2 * a + 1, p);
      out.at(2 * a + 1, p) = psi.at(2 * a, p);
    }
  }
  return out;
}

double antisymmetry_residual(const VecField& connection) {
  const int m = static_cast<int>(std::lround(std::sqrt(connection.components())));
  double out = 0.0;
  for (std::size_t p = 0; p < connection.point_count(); ++p) {
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        out = std::max(out, std::abs(connection.at(i * m + j, p) + connection.at(j * m + i, p)));
      }
    }
  }
  return out;
}

Residual residual_of(const VecField& difference, const VecField& reference) {
  Residual out;
  double acc = 0.0;
  for (std::size_t p = 0; p < difference.point_count(); ++p) {
    double local = 0.0;
    for (int c = 0; c < difference.components(); ++c) {
      const double d = difference.at(c, p);
      out.max_abs = std::max(out.max_abs, std::abs(d));
      local += d * d;
    }
    acc += local;
  }
  out.l2 = std::sqrt(acc * difference.grid().cell_area());
  out.scale = sup_abs(reference);
  return out;
}

Residual torsion_residual(const std::array<VecField, 2>& psi, const std::array<VecField, 2>& connection) {
  const VecField d12 = covariant_derivative(psi[1], connection[0], 0);
  const VecField d21 = covariant_derivative(psi[0], connection[1], 1);
  return residual_of(d12 - d21, d12);
}

Residual commutator_residual(const MapField& v, const VecField& frame, const std::array<VecField, 2>& connection) {
  const VecField curvature =
      curvature_in_frame(v, frame, spectral::partial(v.values(), 0), spectral::partial(v.values(), 1));
  const int m = static_cast<int>(std::lround(std::sqrt(connection[0].components())));
  VecField lhs = spectral::partial(connection[1], 0);
  lhs -= spectral::partial(connection[0], 1);
  const VecField& a1 = connection[0];
  const VecField& a2 = connection[1];
  parallel_for(lhs.point_count(), [&](std::size_t p) {
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        double acc = 0.0;
        for (int k = 0; k < m; ++k) acc += a2.at(i * m + k, p) * a1.at(k * m + j, p) - a1.at(i * m + k, p) * a2.at(k * m + j, p);
        lhs.at(i * m + j, p) += acc;
      }
    }
  });
  return residual_of(lhs - curvature, curvature);
}

Residual heat_tension_residual(const VecField& psi_s, const std::array<VecField, 2>& psi,
                               const std::array<VecField, 2>& connection) {
  VecField rhs = covariant_derivative(psi[0], connection[0], 0);
  rhs += covariant_derivative(psi[1], connection[1], 1);
  return residual_of(psi_s - rhs, psi_s);
}

std::vector<Vec> rotate_reference(const std::vector<Vec>& reference, const Eigen::MatrixXd& rotation) {
  const int m = static_cast<int>(reference.size());
  if (rotation.rows() != m || rotation.cols() != m) throw Error("gauge", "rotation has the wrong size");
  std::vector<Vec> out(m, Vec::Zero(reference.front().size()));
  for (int q = 0; q < m; ++q) {
    for (int p = 0; p < m; ++p) out[q] += rotation(p, q) * reference[p];
  }
  return out;
}

}  // namespace caloric::gauge
