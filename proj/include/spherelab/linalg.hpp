#pragma once

#include <Eigen/Dense>

namespace spherelab {

/// Result of a rank-revealing Cholesky factorization `R = F * F^T`.
struct PivotedFactor {
  Eigen::MatrixXd factor;  ///< k x rank, rows in the original order of R
  int rank = 0;
  double residual = 0.0;  ///< max |F F^T - R| entrywise
};

/// Pivoted (outer-product) Cholesky for symmetric positive semidefinite
/// matrices. Elimination stops once the largest remaining diagonal entry
/// falls to `rank_tolerance`; the dropped block is the residual.
/// Throws NumericalError if the residual exceeds `residual_tolerance`.
PivotedFactor pivoted_cholesky(const Eigen::MatrixXd& matrix, double rank_tolerance = 1e-10,
                               double residual_tolerance = 1e-9);

/// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue(const Eigen::MatrixXd& symmetric);

}  // namespace spherelab
