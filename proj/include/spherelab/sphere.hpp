#pragma once

#include <vector>

#include <Eigen/Dense>

#include "spherelab/linalg.hpp"
#include "spherelab/random.hpp"

namespace spherelab {

inline constexpr double kUnitNormTolerance = 1e-12;
inline constexpr double kGramTolerance = 1e-10;

/// A point on S^{n-1}, n >= 3. Construction checks the unit-norm invariant.
class UnitVector {
 public:
  explicit UnitVector(Eigen::VectorXd coords);

  /// Normalizes `v` first; throws if `v` is (numerically) zero.
  static UnitVector normalized(const Eigen::VectorXd& v);
  /// The i-th standard basis vector of R^n.
  static UnitVector basis(int n, int i);

  int dim() const { return static_cast<int>(coords_.size()); }
  const Eigen::VectorXd& coords() const { return coords_; }
  double operator[](int i) const { return coords_(i); }
  double dot(const UnitVector& other) const { return coords_.dot(other.coords_); }
  UnitVector operator-() const;

 private:
  Eigen::VectorXd coords_;
};

/// Target Gram matrix of a k-point configuration: symmetric, unit diagonal,
/// off-diagonal entries in (-1, 1), positive semidefinite.
class GramSpec {
 public:
  explicit GramSpec(Eigen::MatrixXd entries);

  int k() const { return static_cast<int>(entries_.rows()); }
  const Eigen::MatrixXd& entries() const { return entries_; }
  double operator()(int i, int j) const { return entries_(i, j); }

 private:
  Eigen::MatrixXd entries_;
};

/// Band-pattern configuration: <v_i, v_j> = r_{min(i,j)} for i != j.
struct InductiveConfiguration {
  std::vector<double> r_values;

  int k() const { return static_cast<int>(r_values.size()) + 1; }
  /// Simplex with all pairwise inner products equal to r.
  static InductiveConfiguration simplex(int k, double r);
};

/// Uniform point on S^{n-1}: a normalized isotropic Gaussian vector.
UnitVector sample_uniform(int n, RandomStream& rng);

/// Uniform point on the link subsphere {y : x.y = r}.
UnitVector sample_subsphere(const UnitVector& x, double r, RandomStream& rng);

/// Haar-distributed n x m matrix with orthonormal columns (Gaussian matrix,
/// Householder QR, columns sign-corrected so that diag(R) > 0).
Eigen::MatrixXd haar_frame(int n, int m, RandomStream& rng);

/// Draws rotation-invariant tuples with a prescribed Gram matrix.
/// The factorization is done once; each call maps a fresh Haar frame
/// through it.
class ConfigurationSampler {
 public:
  ConfigurationSampler(int n, const GramSpec& gram);

  std::vector<UnitVector> operator()(RandomStream& rng) const;

  int n() const { return n_; }
  int k() const { return static_cast<int>(factor_.factor.rows()); }
  const PivotedFactor& factor() const { return factor_; }

 private:
  int n_;
  PivotedFactor factor_;
};

std::vector<UnitVector> sample_configuration(int n, const GramSpec& gram, RandomStream& rng);

/// Normalized component of `xi` orthogonal to `x1`, where x1.xi = c:
/// y = (xi - c x1) / |xi - c x1|.
UnitVector project_to_link(const UnitVector& x1, const UnitVector& xi, double c);

/// Gram matrix of a list of vectors.
Eigen::MatrixXd gram_of(const std::vector<UnitVector>& points);

}  // namespace spherelab
