#pragma once

#include <functional>
#include <vector>

namespace spherelab {

/// Gauss-Legendre rule on [-1, 1].
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

QuadratureRule gauss_legendre(int order);

/// Nodes t_i = x.v and weights w_i (summing to 1) such that
/// sum_i w_i h(t_i) approximates E_sigma[h(x.v)] on S^{n-1}.
///
/// Gauss-Legendre in the polar angle theta in (0, pi), with the latitude
/// density sin^{n-2}(theta) folded into the weights.
QuadratureRule latitude_rule(int n, int order);

/// Adaptive driver: evaluates `functional` on rules of order 32, 64, ...
/// until two successive values agree within `tolerance * max(1, |value|)`.
/// Returns the last value if `max_order` is reached first.
double adaptive_latitude(int n, const std::function<double(const QuadratureRule&)>& functional,
                         double tolerance = 1e-12, int max_order = 1 << 14);

/// E_sigma[h(x.v)] for a profile h on [-1, 1].
double latitude_mean(int n, const std::function<double(double)>& profile,
                     double tolerance = 1e-12);

}  // namespace spherelab
