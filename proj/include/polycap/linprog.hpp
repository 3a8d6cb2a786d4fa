#pragma once

#include <numeric>
#include <vector>

#include <Eigen/Dense>

namespace polycap {

/// Phase-1 simplex feasibility test for {x >= 0 : A x = b}.
/// Dense tableau with Bland's rule, so it terminates and is deterministic.
/// Sized for the small systems this library produces (a handful of rows,
/// up to a few hundred columns).
inline bool lp_feasible(Eigen::MatrixXd A, Eigen::VectorXd b, double eps = 1e-9) {
  const int rows = static_cast<int>(A.rows());
  const int cols = static_cast<int>(A.cols());
  if (rows == 0) return true;

  for (int i = 0; i < rows; ++i) {
    if (b[i] < 0.0) {
      A.row(i) = -A.row(i);
      b[i] = -b[i];
    }
  }

  // Tableau over [A | I]; artificial variables start basic.
  const int total = cols + rows;
  Eigen::MatrixXd tab(rows, total);
  tab << A, Eigen::MatrixXd::Identity(rows, rows);
  Eigen::VectorXd rhs = b;
  std::vector<int> basis(rows);
  std::iota(basis.begin(), basis.end(), cols);

  // Reduced costs for minimizing the artificial sum.
  Eigen::VectorXd cost = Eigen::VectorXd::Zero(total);
  for (int j = 0; j < cols; ++j) cost[j] = -A.col(j).sum();
  double objective = -b.sum();  // negative of current artificial sum

  const double pivot_tol = 1e-11;
  const int max_iter = 200 * (rows + cols);
  for (int iter = 0; iter < max_iter; ++iter) {
    // Bland: entering = lowest-index column with negative reduced cost.
    int enter = -1;
    for (int j = 0; j < total; ++j) {
      if (cost[j] < -eps * 1e-3) {
        enter = j;
        break;
      }
    }
    if (enter < 0) break;

    int leave = -1;
    double best_ratio = 0.0;
    for (int i = 0; i < rows; ++i) {
      const double a = tab(i, enter);
      if (a > pivot_tol) {
        const double ratio = rhs[i] / a;
        if (leave < 0 || ratio < best_ratio - 1e-15 ||
            (ratio <= best_ratio + 1e-15 && basis[i] < basis[leave])) {
          leave = i;
          best_ratio = ratio;
        }
      }
    }
    if (leave < 0) break;  // unbounded cannot happen in phase 1; bail out

    const double piv = tab(leave, enter);
    tab.row(leave) /= piv;
    rhs[leave] /= piv;
    for (int i = 0; i < rows; ++i) {
      if (i == leave) continue;
      const double f = tab(i, enter);
      if (f != 0.0) {
        tab.row(i) -= f * tab.row(leave);
        rhs[i] -= f * rhs[leave];
      }
    }
    const double fc = cost[enter];
    cost -= fc * tab.row(leave).transpose();
    objective -= fc * rhs[leave];
    basis[leave] = enter;
  }

  return -objective <= eps;  // artificial sum ~ 0 means the system is feasible
}

/// True when p lies in the convex hull of `points` (indices != skip).
/// Coordinates are recentred on p and scaled so eps is dimensionless.
inline bool in_convex_hull(const Eigen::VectorXd& p,
                           const std::vector<Eigen::VectorXd>& points,
                           const std::vector<char>& active, int skip, double eps = 1e-9) {
  const int dim = static_cast<int>(p.size());
  std::vector<int> idx;
  idx.reserve(points.size());
  double scale = 0.0;
  for (int j = 0; j < static_cast<int>(points.size()); ++j) {
    if (j == skip || !active[j]) continue;
    idx.push_back(j);
    scale = std::max(scale, (points[j] - p).lpNorm<Eigen::Infinity>());
  }
  if (idx.empty()) return false;
  if (scale == 0.0) return true;  // some other point coincides with p

  Eigen::MatrixXd A(dim + 1, static_cast<int>(idx.size()));
  for (int c = 0; c < static_cast<int>(idx.size()); ++c) {
    A.block(0, c, dim, 1) = (points[idx[c]] - p) / scale;
    A(dim, c) = 1.0;
  }
  Eigen::VectorXd b = Eigen::VectorXd::Zero(dim + 1);
  b[dim] = 1.0;
  return lp_feasible(std::move(A), std::move(b), eps);
}

}  // namespace polycap
