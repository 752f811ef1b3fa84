#include "spherelab/sphere.hpp"

#include <cmath>
#include <string>

#include "spherelab/error.hpp"

namespace spherelab {
namespace {

void check_dimension(int n) {
  if (n < 3) throw InvalidArgument("dimension n must be >= 3, got " + std::to_string(n));
}

Eigen::VectorXd gaussian_vector(int n, RandomStream& rng) {
  Eigen::VectorXd g(n);
  for (int i = 0; i < n; ++i) g(i) = rng.normal();
  return g;
}

}  // namespace

UnitVector::UnitVector(Eigen::VectorXd coords) : coords_(std::move(coords)) {
  check_dimension(dim());
  const double norm = coords_.norm();
  if (!(std::abs(norm - 1.0) <= kUnitNormTolerance)) {
    throw InvalidArgument("UnitVector: norm " + std::to_string(norm) + " is not 1");
  }
}

UnitVector UnitVector::normalized(const Eigen::VectorXd& v) {
  const double norm = v.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) throw InvalidArgument("cannot normalize zero vector");
  return UnitVector(v / norm);
}

UnitVector UnitVector::basis(int n, int i) {
  check_dimension(n);
  if (i < 0 || i >= n) throw InvalidArgument("basis index out of range");
  Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
  e(i) = 1.0;
  return UnitVector(std::move(e));
}

UnitVector UnitVector::operator-() const { return UnitVector(-coords_); }

GramSpec::GramSpec(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
  const auto k = entries_.rows();
  if (k < 1 || entries_.cols() != k) throw InvalidArgument("GramSpec: matrix must be square, k >= 1");
  for (Eigen::Index i = 0; i < k; ++i) {
    if (entries_(i, i) != 1.0) throw InvalidArgument("GramSpec: diagonal must be 1");
    for (Eigen::Index j = 0; j < i; ++j) {
      if (entries_(i, j) != entries_(j, i)) throw InvalidArgument("GramSpec: matrix must be symmetric");
      if (!(std::abs(entries_(i, j)) < 1.0)) {
        throw InvalidArgument("GramSpec: off-diagonal entries must lie in (-1, 1)");
      }
    }
  }
  if (min_eigenvalue(entries_) < -kGramTolerance) {
    throw InvalidConfiguration("GramSpec: matrix is not positive semidefinite");
  }
}

InductiveConfiguration InductiveConfiguration::simplex(int k, double r) {
  if (k < 2) throw InvalidArgument("simplex needs k >= 2");
  return InductiveConfiguration{std::vector<double>(static_cast<std::size_t>(k - 1), r)};
}

UnitVector sample_uniform(int n, RandomStream& rng) {
  check_dimension(n);
  for (;;) {
    Eigen::VectorXd g = gaussian_vector(n, rng);
    const double norm = g.norm();
    if (norm > 0.0) return UnitVector(g / norm);
  }
}

UnitVector sample_subsphere(const UnitVector& x, double r, RandomStream& rng) {
  if (!(std::abs(r) < 1.0)) throw InvalidArgument("sample_subsphere: |r| must be < 1");
  const int n = x.dim();
  const Eigen::VectorXd& xc = x.coords();
  for (;;) {
    Eigen::VectorXd g = gaussian_vector(n, rng);
    g -= g.dot(xc) * xc;
    const double norm = g.norm();
    if (!(norm > 0.0)) continue;
    Eigen::VectorXd y = r * xc + std::sqrt(1.0 - r * r) * (g / norm);
    return UnitVector(y / y.norm());
  }
}

Eigen::MatrixXd haar_frame(int n, int m, RandomStream& rng) {
  if (m < 0 || m > n) throw InvalidArgument("haar_frame: need 0 <= m <= n");
  Eigen::MatrixXd g(n, m);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < n; ++i) g(i, j) = rng.normal();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, m);
  const Eigen::MatrixXd& packed = qr.matrixQR();
  for (int j = 0; j < m; ++j) {
    if (packed(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

ConfigurationSampler::ConfigurationSampler(int n, const GramSpec& gram)
    : n_(n), factor_(pivoted_cholesky(gram.entries(), kGramTolerance)) {
  check_dimension(n);
  if (gram.k() > n) throw InvalidArgument("sample_configuration: k must be <= n");
  // Rows of the factor are the configuration in R^rank; renormalize to
  // absorb the dropped (sub-tolerance) block.
  for (Eigen::Index i = 0; i < factor_.factor.rows(); ++i) {
    factor_.factor.row(i) /= factor_.factor.row(i).norm();
  }
}

std::vector<UnitVector> ConfigurationSampler::operator()(RandomStream& rng) const {
  const Eigen::MatrixXd frame = haar_frame(n_, factor_.rank, rng);
  const Eigen::MatrixXd points = frame * factor_.factor.transpose();
  std::vector<UnitVector> out;
  out.reserve(static_cast<std::size_t>(points.cols()));
  for (Eigen::Index i = 0; i < points.cols(); ++i) {
    Eigen::VectorXd p = points.col(i);
    out.emplace_back(p / p.norm());
  }
  return out;
}

std::vector<UnitVector> sample_configuration(int n, const GramSpec& gram, RandomStream& rng) {
  return ConfigurationSampler(n, gram)(rng);
}

UnitVector project_to_link(const UnitVector& x1, const UnitVector& xi, double c) {
  if (!(std::abs(c) < 1.0)) throw InvalidArgument("project_to_link: |c| must be < 1 (degenerate link)");
  if (x1.dim() != xi.dim()) throw InvalidArgument("project_to_link: dimension mismatch");
  if (!(std::abs(x1.dot(xi) - c) <= 1e-8)) {
    throw InvalidArgument("project_to_link: x1.xi does not equal c");
  }
  Eigen::VectorXd d = xi.coords() - c * x1.coords();
  const double norm = d.norm();
  if (!(norm >= 1e-14)) throw NumericalError("project_to_link: residual norm below 1e-14");
  return UnitVector(d / norm);
}

Eigen::MatrixXd gram_of(const std::vector<UnitVector>& points) {
  const auto k = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd g(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j)
      g(i, j) = points[static_cast<std::size_t>(i)].dot(points[static_cast<std::size_t>(j)]);
  return g;
}

}  // namespace spherelab
