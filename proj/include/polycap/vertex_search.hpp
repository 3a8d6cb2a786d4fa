#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "polycap/errors.hpp"
#include "polycap/linprog.hpp"

namespace polycap {

/// Tunables for the polytope vertex searches.
struct SearchOptions {
  double sv_tol = 1e-8;         // rank threshold, relative to largest singular value
  double alpha_tol = 1e-9;      // acceptance slack on alpha in [0,1]
  double dedup_rel_tol = 1e-7;  // vertex dedup tolerance, relative to diameter
  bool prune_bounds = true;     // skip origins outside the T-image bounding box
  int threads = 1;              // parallelotope-face workers
};

/// SVD of an m×n Jacobian split into the pieces the face solves need.
/// Columns of V1 span the preimage of the task space, columns of V2 span
/// the kernel of J, JT_pinv is the pseudo-inverse of J^T.
struct SvdFactors {
  Eigen::MatrixXd U;        // m×m
  Eigen::VectorXd S;        // m singular values, descending
  Eigen::MatrixXd V1;       // n×m
  Eigen::MatrixXd V2;       // n×(n-m)
  Eigen::MatrixXd JT_pinv;  // m×n
  int rank = 0;

  int task_dim() const { return static_cast<int>(S.size()); }
  int joint_dim() const { return static_cast<int>(V1.rows()); }
};

/// Axis-aligned joint-limit box. The i-th base vector is implicitly the
/// i-th coordinate axis scaled by hi[i]-lo[i].
struct TorqueBox {
  Eigen::VectorXd lo, hi;

  TorqueBox() = default;
  TorqueBox(Eigen::VectorXd lower, Eigen::VectorXd upper)
      : lo(std::move(lower)), hi(std::move(upper)) {
    validate();
  }

  static TorqueBox symmetric(const Eigen::VectorXd& magnitude) {
    return TorqueBox(-magnitude, magnitude);
  }

  int dim() const { return static_cast<int>(lo.size()); }
  double range(int i) const { return hi[i] - lo[i]; }

  void validate() const {
    if (lo.size() != hi.size()) throw InputError("limit box: lo/hi size mismatch");
    if (!lo.allFinite() || !hi.allFinite()) throw InputError("limit box: limits must be finite");
    for (int i = 0; i < dim(); ++i)
      if (!(lo[i] < hi[i]))
        throw InputError("limit box: lo < hi violated at component " + std::to_string(i));
  }
};

/// One choice of m parallelotope coordinates to pin at their limits.
/// fixed_vals bit k set means the k-th fixed coordinate sits at its upper
/// limit; it identifies a single face from the 2^m parallel set.
struct AlphaPartition {
  std::vector<int> fixed_idx;  // sorted, size m
  std::vector<int> free_idx;   // sorted, size n-m
  std::uint32_t fixed_vals = 0;
};

/// Per-query accounting. For the face searches faces_total = C(n,m) and the
/// three face categories partition it; the corner and halfspace paths fill
/// only the fields that apply to them.
struct SearchStats {
  long faces_total = 0;
  long faces_pruned_bounds = 0;
  long faces_singular = 0;
  long systems_solved = 0;
  long raw_hits = 0;
  long long runtime_ns = 0;
};

/// Canonical task-space vertex list: lexicographically sorted, deduplicated,
/// extreme points only.
struct VertexSet {
  int task_dim = 0;
  std::vector<Eigen::VectorXd> vertices;
  SearchStats stats;

  int size() const { return static_cast<int>(vertices.size()); }
};

struct FaceHit {
  std::uint32_t origin_bits = 0;  // which face of the parallel set produced it
  Eigen::VectorXd alpha2;         // free coordinates, each in [0,1]
  Eigen::VectorXd tau_vert;       // joint-space vertex
  Eigen::VectorXd f_vert;         // task-space vertex
};

namespace detail {

inline long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// All C(n,m) sorted index combinations, lexicographic.
inline std::vector<AlphaPartition> enumerate_partitions(int n, int m) {
  std::vector<AlphaPartition> parts;
  parts.reserve(static_cast<size_t>(binomial(n, m)));
  std::vector<int> comb(m);
  for (int i = 0; i < m; ++i) comb[i] = i;
  while (true) {
    AlphaPartition p;
    p.fixed_idx = comb;
    p.free_idx.reserve(n - m);
    for (int i = 0, c = 0; i < n; ++i) {
      if (c < m && comb[c] == i) ++c;
      else p.free_idx.push_back(i);
    }
    parts.push_back(std::move(p));
    int k = m - 1;
    while (k >= 0 && comb[k] == n - m + k) --k;
    if (k < 0) break;
    ++comb[k];
    for (int j = k + 1; j < m; ++j) comb[j] = comb[j - 1] + 1;
  }
  return parts;
}

inline bool lex_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return true;
    if (a[i] > b[i]) return false;
  }
  return false;
}

inline double bbox_diameter(const std::vector<Eigen::VectorXd>& pts) {
  if (pts.empty()) return 0.0;
  Eigen::VectorXd mn = pts.front(), mx = pts.front();
  for (const auto& p : pts) {
    mn = mn.cwiseMin(p);
    mx = mx.cwiseMax(p);
  }
  return (mx - mn).norm();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// SVD factorization
// ---------------------------------------------------------------------------

/// Full SVD of J with rank decided at sv_tol relative to the top singular
/// value. Refuses rank-deficient Jacobians: a singular configuration has no
/// well-defined m-dimensional polytope.
inline SvdFactors decompose(const Eigen::MatrixXd& J, double sv_tol = 1e-8) {
  const int m = static_cast<int>(J.rows());
  const int n = static_cast<int>(J.cols());
  if (m > n) throw InputError("decompose: requires task dim <= joint dim");

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(J, Eigen::ComputeFullU | Eigen::ComputeFullV);
  SvdFactors f;
  f.U = svd.matrixU();
  f.S = svd.singularValues();
  const Eigen::MatrixXd& V = svd.matrixV();
  f.V1 = V.leftCols(m);
  f.V2 = V.rightCols(n - m);

  const double top = f.S.size() > 0 ? f.S[0] : 0.0;
  f.rank = 0;
  for (Eigen::Index i = 0; i < f.S.size(); ++i)
    if (f.S[i] > sv_tol * top) ++f.rank;
  if (top == 0.0) f.rank = 0;
  if (f.rank < m) {
    std::vector<double> sv(f.S.data(), f.S.data() + f.S.size());
    throw RankDeficientError("rank-deficient Jacobian (rank " + std::to_string(f.rank) + " < " +
                                 std::to_string(m) + ")",
                             sv);
  }

  // (J^T)^+ = U S^-1 V1^T
  f.JT_pinv = f.U * f.S.cwiseInverse().asDiagonal() * f.V1.transpose();
  return f;
}

// ---------------------------------------------------------------------------
// Face solves
// ---------------------------------------------------------------------------

/// Row-wise positive/negative sums of T: for any alpha in [0,1]^k the image
/// T alpha lies in [t_lb, t_ub].
inline std::pair<Eigen::VectorXd, Eigen::VectorXd> face_bounds(const Eigen::MatrixXd& T) {
  if (T.rows() != T.cols()) throw InputError("face_bounds: T must be square");
  Eigen::VectorXd lb = T.cwiseMin(0.0).rowwise().sum();
  Eigen::VectorXd ub = T.cwiseMax(0.0).rowwise().sum();
  return {lb, ub};
}

struct FaceSolveResult {
  std::vector<FaceHit> hits;
  int origins_pruned = 0;
  bool singular = false;
  bool solved = false;  // T was factorized
};

/// Solves one set of 2^m parallel faces: builds the reduced (n-m)×(n-m)
/// system once, prunes origins whose kernel image falls outside the face
/// bounds, and accepts solutions with every free coordinate in [0,1].
inline FaceSolveResult solve_face(const SvdFactors& f, const TorqueBox& box,
                                  const AlphaPartition& part,
                                  const SearchOptions& opts = SearchOptions()) {
  const int n = f.joint_dim();
  const int m = f.task_dim();
  const int k = n - m;
  if (box.dim() != n) throw InputError("solve_face: box dimension mismatch");

  FaceSolveResult res;
  Eigen::MatrixXd T(k, k);
  for (int j = 0; j < k; ++j)
    T.col(j) = -f.V2.row(part.free_idx[j]).transpose() * box.range(part.free_idx[j]);

  Eigen::VectorXd t_lb, t_ub, prune_slack;
  if (opts.prune_bounds && k > 0) {
    std::tie(t_lb, t_ub) = face_bounds(T);
    // Accepting alpha slightly outside [0,1] widens the reachable image by
    // alpha_tol * sum_j |t_ij| per row; keep pruning sound under that slack.
    prune_slack = ((t_ub - t_lb).array() * opts.alpha_tol + 1e-14).matrix();
  }

  const std::uint32_t origin_count = 1u << m;
  std::vector<std::uint32_t> surviving;
  std::vector<Eigen::VectorXd> rhs_list;
  surviving.reserve(origin_count);

  Eigen::VectorXd tau_o(n);
  for (std::uint32_t bits = 0; bits < origin_count; ++bits) {
    tau_o = box.lo;
    for (int i = 0; i < m; ++i)
      if (bits & (1u << i)) tau_o[part.fixed_idx[i]] = box.hi[part.fixed_idx[i]];
    Eigen::VectorXd rhs = f.V2.transpose() * tau_o;
    if (opts.prune_bounds && k > 0) {
      bool inside = true;
      for (int r = 0; r < k; ++r) {
        if (rhs[r] < t_lb[r] - prune_slack[r] || rhs[r] > t_ub[r] + prune_slack[r]) {
          inside = false;
          break;
        }
      }
      if (!inside) {
        ++res.origins_pruned;
        continue;
      }
    }
    surviving.push_back(bits);
    rhs_list.push_back(std::move(rhs));
  }
  if (surviving.empty()) return res;

  Eigen::FullPivLU<Eigen::MatrixXd> lu;
  if (k > 0) {
    lu.compute(T);
    if (lu.rank() < k) {
      // Face parallel to the image subspace; its boundary vertices are
      // reached through adjacent partitions.
      res.singular = true;
      return res;
    }
  }
  res.solved = true;

  for (size_t s = 0; s < surviving.size(); ++s) {
    const std::uint32_t bits = surviving[s];
    Eigen::VectorXd alpha2 =
        k > 0 ? Eigen::VectorXd(lu.solve(rhs_list[s])) : Eigen::VectorXd(0);
    bool ok = true;
    for (int j = 0; j < k; ++j) {
      if (alpha2[j] < -opts.alpha_tol || alpha2[j] > 1.0 + opts.alpha_tol) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;

    FaceHit hit;
    hit.origin_bits = bits;
    hit.alpha2 = alpha2;
    hit.tau_vert = box.lo;
    for (int i = 0; i < m; ++i)
      if (bits & (1u << i)) hit.tau_vert[part.fixed_idx[i]] = box.hi[part.fixed_idx[i]];
    for (int j = 0; j < k; ++j)
      hit.tau_vert[part.free_idx[j]] += alpha2[j] * box.range(part.free_idx[j]);
    hit.f_vert = f.JT_pinv * hit.tau_vert;
    res.hits.push_back(std::move(hit));
  }
  return res;
}

// ---------------------------------------------------------------------------
// Canonical form
// ---------------------------------------------------------------------------

/// Sorts lexicographically, drops near-duplicates, then drops every point
/// lying in the convex hull of the remaining ones. Output is deterministic
/// for a given input multiset regardless of its order.
inline VertexSet canonicalize(std::vector<Eigen::VectorXd> raw, double dedup_tol,
                              int task_dim) {
  VertexSet out;
  out.task_dim = task_dim;
  if (raw.empty()) return out;

  std::sort(raw.begin(), raw.end(), detail::lex_less);

  std::vector<Eigen::VectorXd> kept;
  kept.reserve(raw.size());
  for (const auto& p : raw) {
    bool dup = false;
    for (const auto& q : kept) {
      if ((p - q).norm() <= dedup_tol) {
        dup = true;
        break;
      }
    }
    if (!dup) kept.push_back(p);
  }

  std::vector<char> extreme(kept.size(), 1);
  for (int i = 0; i < static_cast<int>(kept.size()); ++i) {
    if (in_convex_hull(kept[i], kept, extreme, i)) extreme[i] = 0;
  }
  for (int i = 0; i < static_cast<int>(kept.size()); ++i)
    if (extreme[i]) out.vertices.push_back(kept[i]);
  return out;
}

/// Symmetric Hausdorff distance between two vertex lists; infinity when one
/// side is empty and the other is not.
inline double set_distance(const std::vector<Eigen::VectorXd>& a,
                           const std::vector<Eigen::VectorXd>& b) {
  if (a.empty() && b.empty()) return 0.0;
  if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  auto one_way = [&](const std::vector<Eigen::VectorXd>& from,
                     const std::vector<Eigen::VectorXd>& to) {
    for (const auto& p : from) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& q : to) best = std::min(best, (p - q).norm());
      worst = std::max(worst, best);
    }
  };
  one_way(a, b);
  one_way(b, a);
  return worst;
}

inline double set_distance(const VertexSet& a, const VertexSet& b) {
  return set_distance(a.vertices, b.vertices);
}

// ---------------------------------------------------------------------------
// Force polytope: reduced face search
// ---------------------------------------------------------------------------

namespace detail {

inline VertexSet assemble(std::vector<Eigen::VectorXd> raw, SearchStats stats, int task_dim,
                          double dedup_rel_tol,
                          std::chrono::steady_clock::time_point t0) {
  const double diam = bbox_diameter(raw);
  const double tol = diam > 0.0 ? dedup_rel_tol * diam : 1e-12;
  VertexSet out = canonicalize(std::move(raw), tol, task_dim);
  out.stats = stats;
  out.stats.runtime_ns =
      std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - t0)
          .count();
  return out;
}

}  // namespace detail

/// Enumerates the C(n,m) sets of (n-m)-dimensional parallelotope faces,
/// solves the reduced system per set and canonicalizes the accepted task
/// vertices. Face sets are independent; with opts.threads > 1 they are
/// solved in parallel and merged in partition order, so the result does not
/// depend on the schedule.
inline VertexSet force_polytope_vertices(const Eigen::MatrixXd& J, const TorqueBox& box,
                                         const SearchOptions& opts = SearchOptions()) {
  const auto t0 = std::chrono::steady_clock::now();
  const int m = static_cast<int>(J.rows());
  const int n = static_cast<int>(J.cols());
  box.validate();
  if (box.dim() != n) throw InputError("force polytope: box dimension mismatch");

  const SvdFactors factors = decompose(J, opts.sv_tol);
  const std::vector<AlphaPartition> parts = detail::enumerate_partitions(n, m);

  std::vector<FaceSolveResult> results(parts.size());
  const int workers = std::max(1, std::min<int>(opts.threads, static_cast<int>(parts.size())));
  if (workers == 1) {
    for (size_t i = 0; i < parts.size(); ++i) results[i] = solve_face(factors, box, parts[i], opts);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (size_t i = static_cast<size_t>(w); i < parts.size(); i += workers)
          results[i] = solve_face(factors, box, parts[i], opts);
      });
    }
    for (auto& th : pool) th.join();
  }

  SearchStats stats;
  stats.faces_total = static_cast<long>(parts.size());
  std::vector<Eigen::VectorXd> raw;
  for (const auto& r : results) {
    if (r.solved) ++stats.systems_solved;
    else if (r.singular) ++stats.faces_singular;
    else ++stats.faces_pruned_bounds;
    stats.raw_hits += static_cast<long>(r.hits.size());
    for (const auto& h : r.hits) raw.push_back(h.f_vert);
  }
  return detail::assemble(std::move(raw), stats, m, opts.dedup_rel_tol, t0);
}

// ---------------------------------------------------------------------------
// Force polytope: unreduced baseline
// ---------------------------------------------------------------------------

/// Baseline that solves the full n×n system [J^T | -tau_free] per face set
/// instead of the reduced one. Kept as the equivalence witness and the
/// benchmark comparison point.
inline VertexSet full_system_solve(const Eigen::MatrixXd& J, const TorqueBox& box,
                                   const SearchOptions& opts = SearchOptions()) {
  const auto t0 = std::chrono::steady_clock::now();
  const int m = static_cast<int>(J.rows());
  const int n = static_cast<int>(J.cols());
  box.validate();
  if (box.dim() != n) throw InputError("force polytope: box dimension mismatch");
  decompose(J, opts.sv_tol);  // rank gate only

  SearchStats stats;
  std::vector<Eigen::VectorXd> raw;
  Eigen::MatrixXd Z(n, n);
  Z.leftCols(m) = J.transpose();

  for (const AlphaPartition& part : detail::enumerate_partitions(n, m)) {
    ++stats.faces_total;
    const int k = n - m;
    for (int j = 0; j < k; ++j) {
      Z.col(m + j).setZero();
      Z(part.free_idx[j], m + j) = -box.range(part.free_idx[j]);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(Z);
    if (lu.rank() < n) {
      ++stats.faces_singular;
      continue;
    }
    ++stats.systems_solved;

    Eigen::VectorXd tau_o(n);
    for (std::uint32_t bits = 0; bits < (1u << m); ++bits) {
      tau_o = box.lo;
      for (int i = 0; i < m; ++i)
        if (bits & (1u << i)) tau_o[part.fixed_idx[i]] = box.hi[part.fixed_idx[i]];
      const Eigen::VectorXd x = lu.solve(tau_o);
      bool ok = true;
      for (int j = 0; j < k; ++j) {
        const double a = x[m + j];
        if (a < -opts.alpha_tol || a > 1.0 + opts.alpha_tol) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      ++stats.raw_hits;
      raw.push_back(x.head(m));
    }
  }
  return detail::assemble(std::move(raw), stats, m, opts.dedup_rel_tol, t0);
}

// ---------------------------------------------------------------------------
// Velocity polytope
// ---------------------------------------------------------------------------

/// Maps every joint-velocity box corner through J and keeps the extreme
/// images. Exact for the sizes this library targets; refuses n > 24.
inline VertexSet velocity_polytope_vertices(const Eigen::MatrixXd& J, const TorqueBox& qd_box,
                                            const SearchOptions& opts = SearchOptions()) {
  const auto t0 = std::chrono::steady_clock::now();
  const int m = static_cast<int>(J.rows());
  const int n = static_cast<int>(J.cols());
  qd_box.validate();
  if (qd_box.dim() != n) throw InputError("velocity polytope: box dimension mismatch");
  if (n > 24)
    throw CapacityError("velocity polytope: corner enumeration refuses n > 24 (got n = " +
                        std::to_string(n) + ")");
  decompose(J, opts.sv_tol);  // rank gate

  SearchStats stats;
  std::vector<Eigen::VectorXd> raw;
  raw.reserve(1u << n);
  Eigen::VectorXd qd(n);
  for (std::uint64_t bits = 0; bits < (1ull << n); ++bits) {
    for (int i = 0; i < n; ++i) qd[i] = (bits & (1ull << i)) ? qd_box.hi[i] : qd_box.lo[i];
    raw.push_back(J * qd);
  }
  stats.raw_hits = static_cast<long>(raw.size());
  return detail::assemble(std::move(raw), stats, m, opts.dedup_rel_tol, t0);
}

// ---------------------------------------------------------------------------
// Brute-force halfspace oracle
// ---------------------------------------------------------------------------

/// Independent oracle: the feasible wrench set is the intersection of the 2n
/// halfspaces lo <= J^T f <= hi. Every combination of m constraint planes is
/// solved and kept when feasible for all constraints. No pruning, no SVD on
/// the solve path.
inline VertexSet oracle_halfspace_enum(const Eigen::MatrixXd& J, const TorqueBox& box,
                                       const SearchOptions& opts = SearchOptions()) {
  const auto t0 = std::chrono::steady_clock::now();
  const int m = static_cast<int>(J.rows());
  const int n = static_cast<int>(J.cols());
  box.validate();
  if (box.dim() != n) throw InputError("oracle: box dimension mismatch");
  decompose(J, opts.sv_tol);  // rank gate

  // Constraints A f <= b, rows: J^T f <= hi then -J^T f <= -lo.
  Eigen::MatrixXd A(2 * n, m);
  A.topRows(n) = J.transpose();
  A.bottomRows(n) = -J.transpose();
  Eigen::VectorXd b(2 * n);
  b.head(n) = box.hi;
  b.tail(n) = -box.lo;

  const double scale = b.cwiseAbs().maxCoeff();
  const double feas_tol = 1e-9 * std::max(scale, 1e-30);

  SearchStats stats;
  stats.faces_total = detail::binomial(2 * n, m);
  std::vector<Eigen::VectorXd> raw;

  std::vector<int> comb(m);
  for (int i = 0; i < m; ++i) comb[i] = i;
  Eigen::MatrixXd M(m, m);
  Eigen::VectorXd rhs(m);
  while (true) {
    for (int i = 0; i < m; ++i) {
      M.row(i) = A.row(comb[i]);
      rhs[i] = b[comb[i]];
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
    lu.setThreshold(1e-10);
    if (lu.rank() == m) {
      ++stats.systems_solved;
      const Eigen::VectorXd f = lu.solve(rhs);
      if (((A * f - b).array() <= feas_tol).all()) {
        ++stats.raw_hits;
        raw.push_back(f);
      }
    } else {
      ++stats.faces_singular;
    }
    int k = m - 1;
    while (k >= 0 && comb[k] == 2 * n - m + k) --k;
    if (k < 0) break;
    ++comb[k];
    for (int j = k + 1; j < m; ++j) comb[j] = comb[j - 1] + 1;
  }
  return detail::assemble(std::move(raw), stats, m, opts.dedup_rel_tol, t0);
}

}  // namespace polycap
