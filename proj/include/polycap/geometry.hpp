#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <vector>

#include <Eigen/Dense>

#include "polycap/errors.hpp"
#include "polycap/vertex_search.hpp"

namespace polycap {

/// Convex polytope in task space (dim 1..3): canonical vertices plus, when
/// the point set is full-dimensional, boundary facets (segments in 2D,
/// triangles in 3D) and the outer halfspace description normal·x <= offset.
struct Polytope {
  struct Halfspace {
    Eigen::VectorXd normal;  // unit length, outward
    double offset = 0.0;
  };

  int dim = 0;
  VertexSet vset;
  std::vector<std::vector<int>> facets;
  std::vector<Halfspace> halfspaces;
  bool degenerate = false;

  const std::vector<Eigen::VectorXd>& vertices() const { return vset.vertices; }
};

/// Centered quadratic set {x : (x-c)^T E (x-c) <= 1} with E symmetric
/// positive definite.
struct Ellipsoid {
  Eigen::VectorXd center;
  Eigen::MatrixXd shape;

  int dim() const { return static_cast<int>(center.size()); }
};

namespace detail {

inline double hull_tol(const std::vector<Eigen::VectorXd>& pts) {
  const double d = bbox_diameter(pts);
  return d > 0.0 ? 1e-9 * d : 1e-12;
}

/// 2D boundary cycle: canonical vertices are already in convex position, so
/// ordering them by angle around the centroid yields the hull cycle.
inline void build_facets_2d(Polytope& poly) {
  const auto& vs = poly.vset.vertices;
  const int k = static_cast<int>(vs.size());
  if (k < 3) {
    poly.degenerate = true;
    return;
  }
  Eigen::Vector2d c = Eigen::Vector2d::Zero();
  for (const auto& v : vs) c += v;
  c /= k;

  std::vector<int> order(k);
  for (int i = 0; i < k; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double ang_a = std::atan2(vs[a][1] - c[1], vs[a][0] - c[0]);
    const double ang_b = std::atan2(vs[b][1] - c[1], vs[b][0] - c[0]);
    if (ang_a != ang_b) return ang_a < ang_b;
    return a < b;
  });

  for (int i = 0; i < k; ++i) {
    const int u = order[i], v = order[(i + 1) % k];
    poly.facets.push_back({u, v});
    Eigen::Vector2d e = vs[v].head<2>() - vs[u].head<2>();
    const double len = e.norm();
    if (len == 0.0) continue;
    Polytope::Halfspace hs;
    hs.normal = Eigen::Vector2d(e[1] / len, -e[0] / len);  // outward for a CCW cycle
    hs.offset = hs.normal.dot(vs[u]);
    poly.halfspaces.push_back(hs);
  }
}

struct Tri {
  std::array<int, 3> v;
  Eigen::Vector3d normal;  // outward, unit
  double offset = 0.0;
  bool alive = true;
};

inline bool make_plane(const std::vector<Eigen::VectorXd>& pts, Tri& t) {
  const Eigen::Vector3d a = pts[t.v[0]].head<3>();
  const Eigen::Vector3d b = pts[t.v[1]].head<3>();
  const Eigen::Vector3d c = pts[t.v[2]].head<3>();
  Eigen::Vector3d nrm = (b - a).cross(c - a);
  const double len = nrm.norm();
  if (len == 0.0) return false;
  t.normal = nrm / len;
  t.offset = t.normal.dot(a);
  return true;
}

/// Incremental 3D hull over points already reduced to extreme candidates.
/// Returns triangles with outward orientation, or false when the input is
/// not full-dimensional at the coplanarity tolerance.
inline bool build_facets_3d(Polytope& poly) {
  const auto& pts = poly.vset.vertices;
  const int k = static_cast<int>(pts.size());
  if (k < 4) return false;
  const double tol = hull_tol(pts);

  // Seed simplex: spread apart along successive dimensions.
  int i0 = 0, i1 = -1;
  double best = -1.0;
  for (int i = 1; i < k; ++i) {
    const double d = (pts[i] - pts[i0]).norm();
    if (d > best) {
      best = d;
      i1 = i;
    }
  }
  if (best <= tol) return false;
  int i2 = -1;
  best = -1.0;
  const Eigen::Vector3d p0 = pts[i0].head<3>(), p1 = pts[i1].head<3>();
  for (int i = 0; i < k; ++i) {
    const double d = (pts[i].head<3>() - p0).cross(p1 - p0).norm();
    if (d > best) {
      best = d;
      i2 = i;
    }
  }
  if (best <= tol * (p1 - p0).norm()) return false;
  Eigen::Vector3d nrm = (p1 - p0).cross(pts[i2].head<3>() - p0).normalized();
  int i3 = -1;
  best = -1.0;
  for (int i = 0; i < k; ++i) {
    const double d = std::abs(nrm.dot(pts[i].head<3>() - p0));
    if (d > best) {
      best = d;
      i3 = i;
    }
  }
  if (best <= tol) return false;

  std::vector<Tri> tris;
  auto add_tri = [&](int a, int b, int c, const Eigen::Vector3d& inside) {
    Tri t;
    t.v = {a, b, c};
    if (!make_plane(pts, t)) return;
    if (t.normal.dot(inside) > t.offset) {  // flip to face away from the interior
      std::swap(t.v[1], t.v[2]);
      make_plane(pts, t);
    }
    tris.push_back(t);
  };
  const Eigen::Vector3d centroid =
      (pts[i0].head<3>() + pts[i1].head<3>() + pts[i2].head<3>() + pts[i3].head<3>()) / 4.0;
  add_tri(i0, i1, i2, centroid);
  add_tri(i0, i1, i3, centroid);
  add_tri(i0, i2, i3, centroid);
  add_tri(i1, i2, i3, centroid);
  if (tris.size() != 4) return false;

  for (int p = 0; p < k; ++p) {
    if (p == i0 || p == i1 || p == i2 || p == i3) continue;
    const Eigen::Vector3d x = pts[p].head<3>();
    std::vector<int> visible;
    for (int t = 0; t < static_cast<int>(tris.size()); ++t)
      if (tris[t].alive && tris[t].normal.dot(x) > tris[t].offset + tol) visible.push_back(t);
    if (visible.empty()) continue;

    // Horizon = edges shared by exactly one visible triangle.
    std::map<std::pair<int, int>, std::pair<int, int>> edges;  // undirected -> directed
    for (int t : visible) {
      for (int e = 0; e < 3; ++e) {
        const int a = tris[t].v[e], b = tris[t].v[(e + 1) % 3];
        const auto key = std::minmax(a, b);
        auto it = edges.find(key);
        if (it == edges.end()) edges[key] = {a, b};
        else edges.erase(it);
      }
      tris[t].alive = false;
    }
    for (const auto& [key, dir] : edges) add_tri(dir.first, dir.second, p, centroid);
  }

  std::vector<char> used(k, 0);
  for (const auto& t : tris)
    if (t.alive)
      for (int v : t.v) used[v] = 1;

  // Reindex onto the surviving canonical vertex list.
  std::vector<int> remap(k, -1);
  std::vector<Eigen::VectorXd> final_pts;
  for (int i = 0; i < k; ++i) {
    if (used[i]) {
      remap[i] = static_cast<int>(final_pts.size());
      final_pts.push_back(pts[i]);
    }
  }
  poly.vset.vertices = std::move(final_pts);

  for (const auto& t : tris) {
    if (!t.alive) continue;
    std::vector<int> f = {remap[t.v[0]], remap[t.v[1]], remap[t.v[2]]};
    poly.facets.push_back(f);
    Polytope::Halfspace hs;
    hs.normal = t.normal;
    hs.offset = t.offset;
    poly.halfspaces.push_back(hs);
  }

  // Merge coplanar duplicates so the halfspace list is the exact hull.
  std::sort(poly.halfspaces.begin(), poly.halfspaces.end(),
            [](const Polytope::Halfspace& a, const Polytope::Halfspace& b) {
              for (int i = 0; i < 3; ++i) {
                if (a.normal[i] < b.normal[i]) return true;
                if (a.normal[i] > b.normal[i]) return false;
              }
              return a.offset < b.offset;
            });
  std::vector<Polytope::Halfspace> dedup;
  for (const auto& hs : poly.halfspaces) {
    bool same = false;
    for (const auto& kept : dedup) {
      if ((kept.normal - hs.normal).norm() < 1e-9 && std::abs(kept.offset - hs.offset) < tol) {
        same = true;
        break;
      }
    }
    if (!same) dedup.push_back(hs);
  }
  poly.halfspaces = std::move(dedup);
  return true;
}

}  // namespace detail

/// Convex hull of a 2D or 3D point cloud: canonicalizes the points, then
/// attaches facets and halfspaces. Affinely dependent input yields a
/// degenerate polytope with vertices only.
inline Polytope hull(const std::vector<Eigen::VectorXd>& points) {
  if (points.empty()) throw InputError("hull: needs at least one point");
  const int dim = static_cast<int>(points.front().size());
  if (dim < 2 || dim > 3) throw InputError("hull: supports dim 2 and 3");
  for (const auto& p : points)
    if (static_cast<int>(p.size()) != dim) throw InputError("hull: mixed point dimensions");

  const double diam = detail::bbox_diameter(points);
  Polytope poly;
  poly.dim = dim;
  poly.vset = canonicalize(points, diam > 0.0 ? 1e-9 * diam : 1e-12, dim);

  if (dim == 2) {
    detail::build_facets_2d(poly);
  } else {
    if (!detail::build_facets_3d(poly)) {
      poly.degenerate = true;
      poly.facets.clear();
      poly.halfspaces.clear();
    }
  }
  return poly;
}

/// Wraps an already-canonical vertex set as a Polytope, building facets for
/// dims 2 and 3 and the interval halfspaces for dim 1.
inline Polytope polytope_from_vertices(const VertexSet& vs) {
  if (vs.task_dim < 1 || vs.task_dim > 3)
    throw InputError("polytope: supports task dims 1..3, got " + std::to_string(vs.task_dim));
  if (vs.task_dim == 1) {
    Polytope poly;
    poly.dim = 1;
    poly.vset = vs;
    if (vs.vertices.size() == 2) {
      Polytope::Halfspace upper, lower;
      upper.normal = Eigen::VectorXd::Ones(1);
      upper.offset = vs.vertices[1][0];
      lower.normal = -Eigen::VectorXd::Ones(1);
      lower.offset = -vs.vertices[0][0];
      poly.halfspaces = {lower, upper};
    } else {
      poly.degenerate = true;
    }
    return poly;
  }
  if (vs.vertices.empty()) {
    Polytope poly;
    poly.dim = vs.task_dim;
    poly.vset = vs;
    poly.degenerate = true;
    return poly;
  }
  Polytope poly = hull(vs.vertices);
  poly.vset.stats = vs.stats;
  return poly;
}

/// Exact Minkowski sum of convex polytopes: hull of the pairwise vertex sums.
inline Polytope minkowski_sum(const Polytope& P, const Polytope& Q) {
  if (P.dim != Q.dim) throw InputError("minkowski_sum: dimension mismatch");
  if (P.vertices().empty() || Q.vertices().empty())
    throw InputError("minkowski_sum: empty operand");
  std::vector<Eigen::VectorXd> sums;
  sums.reserve(P.vertices().size() * Q.vertices().size());
  for (const auto& p : P.vertices())
    for (const auto& q : Q.vertices()) sums.push_back(p + q);
  if (P.dim == 1) {
    VertexSet vs = canonicalize(sums, 1e-12 + 1e-9 * detail::bbox_diameter(sums), 1);
    return polytope_from_vertices(vs);
  }
  return hull(sums);
}

/// Feasible-wrench intersection of two robots acting on the same point,
/// computed through the stacked system [J1 J2] with concatenated limits.
inline Polytope intersection_stacked(const Eigen::MatrixXd& J1, const Eigen::MatrixXd& J2,
                                     const TorqueBox& box1, const TorqueBox& box2,
                                     const SearchOptions& opts = SearchOptions()) {
  if (J1.rows() != J2.rows()) throw InputError("intersection: task dimension mismatch");
  const int n1 = static_cast<int>(J1.cols());
  const int n2 = static_cast<int>(J2.cols());
  if (box1.dim() != n1 || box2.dim() != n2)
    throw InputError("intersection: limit box dimension mismatch");
  Eigen::MatrixXd J(J1.rows(), n1 + n2);
  J << J1, J2;
  Eigen::VectorXd lo(n1 + n2), hi(n1 + n2);
  lo << box1.lo, box2.lo;
  hi << box1.hi, box2.hi;
  return polytope_from_vertices(force_polytope_vertices(J, TorqueBox(lo, hi), opts));
}

enum class EllipsoidKind { Force, Velocity };

/// Manipulability ellipsoid scaled by half the limit ranges
/// and centered at the interval midpoint image.
inline Ellipsoid ellipsoid(const Eigen::MatrixXd& J, const TorqueBox& limits,
                           EllipsoidKind kind, double sv_tol = 1e-8) {
  const SvdFactors f = decompose(J, sv_tol);
  const Eigen::VectorXd half = (limits.hi - limits.lo) / 2.0;
  const Eigen::VectorXd mid = (limits.hi + limits.lo) / 2.0;
  if (limits.dim() != f.joint_dim()) throw InputError("ellipsoid: limit dimension mismatch");
  Ellipsoid e;
  if (kind == EllipsoidKind::Velocity) {
    const Eigen::MatrixXd A = J * half.asDiagonal();
    e.shape = (A * A.transpose()).inverse();
    e.center = J * mid;
  } else {
    const Eigen::MatrixXd JT = J.transpose();
    e.shape = J * half.cwiseInverse().cwiseAbs2().asDiagonal() * JT;
    e.center = f.JT_pinv * mid;
  }
  e.shape = ((e.shape + e.shape.transpose()) / 2.0).eval();
  return e;
}

/// Boundary point of the ellipsoid along a unit direction in the
/// whitened coordinates: x = c + E^{-1/2} u.
inline Eigen::VectorXd ellipsoid_boundary_point(const Ellipsoid& e, const Eigen::VectorXd& u) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(e.shape);
  const Eigen::MatrixXd inv_sqrt = eig.eigenvectors() *
                                   eig.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                                   eig.eigenvectors().transpose();
  return e.center + inv_sqrt * u.normalized();
}

/// Halfspace membership within tol. Degenerate polytopes have no halfspace
/// form and are refused.
inline bool contains(const Polytope& P, const Eigen::VectorXd& x, double tol = 1e-9) {
  if (static_cast<int>(x.size()) != P.dim) throw InputError("contains: dimension mismatch");
  if (P.halfspaces.empty())
    throw DegenerateError("contains: polytope has no halfspace description");
  for (const auto& hs : P.halfspaces)
    if (hs.normal.dot(x) > hs.offset + tol) return false;
  return true;
}

/// Support function h_P(d) = max_v <v, d>.
inline double support(const Polytope& P, const Eigen::VectorXd& d) {
  if (static_cast<int>(d.size()) != P.dim) throw InputError("support: dimension mismatch");
  if (d.norm() == 0.0) throw InputError("support: zero direction");
  if (P.vertices().empty()) throw InputError("support: empty polytope");
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& v : P.vertices()) best = std::max(best, v.dot(d));
  return best;
}

}  // namespace polycap
