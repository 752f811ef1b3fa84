#include "spherelab/linalg.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "spherelab/error.hpp"

namespace spherelab {

PivotedFactor pivoted_cholesky(const Eigen::MatrixXd& matrix, double rank_tolerance,
                               double residual_tolerance) {
  const Eigen::Index k = matrix.rows();
  if (matrix.cols() != k) throw InvalidArgument("pivoted_cholesky: matrix must be square");

  Eigen::MatrixXd columns = Eigen::MatrixXd::Zero(k, k);
  Eigen::VectorXd remaining = matrix.diagonal();
  std::vector<bool> used(static_cast<std::size_t>(k), false);

  int rank = 0;
  for (; rank < k; ++rank) {
    Eigen::Index pivot = -1;
    double best = rank_tolerance;
    for (Eigen::Index i = 0; i < k; ++i) {
      if (!used[static_cast<std::size_t>(i)] && remaining(i) > best) {
        best = remaining(i);
        pivot = i;
      }
    }
    if (pivot < 0) break;
    used[static_cast<std::size_t>(pivot)] = true;
    const double root = std::sqrt(remaining(pivot));
    for (Eigen::Index i = 0; i < k; ++i) {
      if (used[static_cast<std::size_t>(i)] && i != pivot) continue;
      double value = matrix(i, pivot);
      for (int l = 0; l < rank; ++l) value -= columns(i, l) * columns(pivot, l);
      columns(i, rank) = (i == pivot) ? root : value / root;
    }
    for (Eigen::Index i = 0; i < k; ++i) {
      if (!used[static_cast<std::size_t>(i)]) remaining(i) -= columns(i, rank) * columns(i, rank);
    }
  }

  PivotedFactor out;
  out.rank = rank;
  out.factor = columns.leftCols(rank);
  out.residual = (out.factor * out.factor.transpose() - matrix).cwiseAbs().maxCoeff();
  if (k > 0 && !(out.residual <= residual_tolerance)) {
    throw NumericalError("pivoted_cholesky: residual " + std::to_string(out.residual) +
                         " exceeds tolerance (matrix not positive semidefinite?)");
  }
  return out;
}

double min_eigenvalue(const Eigen::MatrixXd& symmetric) {
  if (symmetric.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetric, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

}  // namespace spherelab
