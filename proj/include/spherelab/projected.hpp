#pragma once

#include <optional>
#include <span>

#include <Eigen/Dense>

#include "spherelab/linalg.hpp"
#include "spherelab/regions.hpp"
#include "spherelab/sphere.hpp"

namespace spherelab {

// Region membership only depends on the inner products of a point with the
// frame axes. These samplers draw those inner products directly.
//
// `reduced` draws them from their exact joint law in O(m^2 k + k^3) per tuple,
// independent of n: for a Haar frame Q = G R^{-1} only the top m' rows of the
// Gaussian matrix G are needed, and the remaining rows enter through a
// Wishart(n - m') block drawn with the Bartlett decomposition.
// `direct` builds full vectors with the reference samplers and projects them.

/// Draws k-point configurations with Gram matrix R, returned as the k x m
/// matrix of inner products with the frame axes.
class ProjectedTupleSampler {
 public:
  ProjectedTupleSampler(const AxisFrame& frame, const GramSpec& gram, SamplerKind kind);

  void draw(RandomStream& rng, Eigen::MatrixXd& dots) const;

  int k() const { return k_; }
  SamplerKind kind() const { return kind_; }

 private:
  const AxisFrame* frame_;
  SamplerKind kind_;
  int k_;
  Eigen::MatrixXd config_factor_;  // k x p
  Eigen::MatrixXd axis_factor_;    // m x m'
  std::optional<ConfigurationSampler> direct_;
};

/// A centre x together with what is needed to sample its link {y : x.y = r}.
struct LinkCenter {
  Eigen::VectorXd dots;              ///< x.v_j
  std::optional<UnitVector> point;   ///< full vector (direct mode only)
  Eigen::MatrixXd link_factor;       ///< factor of <v_i - (x.v_i)x, v_j - (x.v_j)x> (reduced mode)
};

class ProjectedLinkSampler {
 public:
  ProjectedLinkSampler(const AxisFrame& frame, double r, SamplerKind kind);

  /// Uniform centre on S^{n-1}.
  LinkCenter draw_center(RandomStream& rng) const;
  /// One uniform point of the link of `center`, as inner products with the axes.
  void draw_link(const LinkCenter& center, RandomStream& rng, std::span<double> dots) const;

  double r() const { return r_; }

 private:
  const AxisFrame* frame_;
  double r_;
  SamplerKind kind_;
  Eigen::MatrixXd gram_;
  Eigen::MatrixXd axis_factor_;
};

}  // namespace spherelab
