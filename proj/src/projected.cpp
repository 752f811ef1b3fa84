#include "spherelab/projected.hpp"

#include <cmath>

#include "spherelab/error.hpp"

namespace spherelab {
namespace {

constexpr double kFrameRankTolerance = 1e-14;

Eigen::MatrixXd frame_factor(const AxisFrame& frame) {
  if (frame.size() == 0) return Eigen::MatrixXd(0, 0);
  return pivoted_cholesky(frame.gram(), kFrameRankTolerance).factor;
}

// First `m` coordinates of a uniform point on S^{dim-1}.
void leading_sphere_coordinates(int m, int dim, RandomStream& rng, Eigen::VectorXd& out) {
  out.resize(m);
  double norm2 = 0.0;
  do {
    for (int i = 0; i < m; ++i) {
      out(i) = rng.normal();
    }
    norm2 = out.squaredNorm();
    if (dim > m) norm2 += rng.chi_squared(dim - m);
  } while (!(norm2 > 0.0));
  out /= std::sqrt(norm2);
}

}  // namespace

ProjectedTupleSampler::ProjectedTupleSampler(const AxisFrame& frame, const GramSpec& gram, SamplerKind kind)
    : frame_(&frame), kind_(kind), k_(gram.k()) {
  if (gram.k() > frame.n()) throw InvalidArgument("configuration needs k <= n");
  if (kind_ == SamplerKind::direct) {
    direct_.emplace(frame.n(), gram);
    return;
  }
  PivotedFactor f = pivoted_cholesky(gram.entries(), kGramTolerance);
  config_factor_ = f.factor;
  for (Eigen::Index i = 0; i < config_factor_.rows(); ++i) config_factor_.row(i) /= config_factor_.row(i).norm();
  axis_factor_ = frame_factor(frame);
  if (frame.n() - axis_factor_.cols() < config_factor_.cols()) {
    throw InvalidArgument("reduced sampler needs n >= rank(axes) + rank(R); use the direct sampler");
  }
}

void ProjectedTupleSampler::draw(RandomStream& rng, Eigen::MatrixXd& dots) const {
  const int m = frame_->size();
  dots.resize(k_, m);
  if (kind_ == SamplerKind::direct) {
    const auto points = (*direct_)(rng);
    std::vector<double> row(static_cast<std::size_t>(m));
    for (int i = 0; i < k_; ++i) {
      frame_->project(points[static_cast<std::size_t>(i)], row);
      for (int j = 0; j < m; ++j) dots(i, j) = row[static_cast<std::size_t>(j)];
    }
    return;
  }
  if (m == 0) return;

  const auto p = config_factor_.cols();
  const auto mp = axis_factor_.cols();
  const int dof = frame_->n() - static_cast<int>(mp);

  Eigen::MatrixXd top(mp, p);
  for (Eigen::Index j = 0; j < p; ++j)
    for (Eigen::Index i = 0; i < mp; ++i) top(i, j) = rng.normal();

  // Bartlett factor of Wishart_p(dof, I).
  Eigen::MatrixXd bartlett = Eigen::MatrixXd::Zero(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    bartlett(i, i) = std::sqrt(rng.chi_squared(dof - static_cast<double>(i)));
    for (Eigen::Index j = 0; j < i; ++j) bartlett(i, j) = rng.normal();
  }

  Eigen::MatrixXd scatter = top.transpose() * top;
  scatter.noalias() += bartlett * bartlett.transpose();
  Eigen::LLT<Eigen::MatrixXd> llt(scatter);
  if (llt.info() != Eigen::Success) throw NumericalError("reduced sampler: scatter matrix not positive definite");
  // Rows mp of Q = G R^{-1}, transposed: L^{-1} top^T (p x m').
  const Eigen::MatrixXd frame_rows = llt.matrixL().solve(top.transpose());
  dots.noalias() = config_factor_ * frame_rows * axis_factor_.transpose();
}

ProjectedLinkSampler::ProjectedLinkSampler(const AxisFrame& frame, double r, SamplerKind kind)
    : frame_(&frame), r_(r), kind_(kind) {
  if (!(std::abs(r) < 1.0)) throw InvalidArgument("link sampler: |r| must be < 1");
  gram_ = frame.gram();
  axis_factor_ = frame_factor(frame);
}

LinkCenter ProjectedLinkSampler::draw_center(RandomStream& rng) const {
  LinkCenter c;
  const int m = frame_->size();
  if (kind_ == SamplerKind::direct) {
    c.point = sample_uniform(frame_->n(), rng);
    c.dots.resize(m);
    frame_->project(*c.point, std::span<double>(c.dots.data(), static_cast<std::size_t>(m)));
    return c;
  }
  Eigen::VectorXd coords;
  leading_sphere_coordinates(static_cast<int>(axis_factor_.cols()), frame_->n(), rng, coords);
  c.dots = m == 0 ? Eigen::VectorXd(0) : Eigen::VectorXd(axis_factor_ * coords);
  if (m > 0) {
    const Eigen::MatrixXd residual = gram_ - c.dots * c.dots.transpose();
    c.link_factor = pivoted_cholesky(residual, kFrameRankTolerance).factor;
  }
  return c;
}

void ProjectedLinkSampler::draw_link(const LinkCenter& center, RandomStream& rng, std::span<double> dots) const {
  const int m = frame_->size();
  const double s = std::sqrt(1.0 - r_ * r_);
  if (kind_ == SamplerKind::direct) {
    const UnitVector y = sample_subsphere(*center.point, r_, rng);
    frame_->project(y, dots);
    return;
  }
  if (m == 0) return;
  // z is uniform on the unit sphere of x^perp (dimension n - 1).
  Eigen::VectorXd coords;
  leading_sphere_coordinates(static_cast<int>(center.link_factor.cols()), frame_->n() - 1, rng, coords);
  const Eigen::VectorXd z = center.link_factor * coords;
  for (int j = 0; j < m; ++j) dots[static_cast<std::size_t>(j)] = r_ * center.dots(j) + s * z(j);
}

}  // namespace spherelab
