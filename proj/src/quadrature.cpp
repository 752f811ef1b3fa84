#include "spherelab/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "spherelab/error.hpp"

namespace spherelab {

QuadratureRule gauss_legendre(int order) {
  if (order < 1) throw InvalidArgument("gauss_legendre: order must be >= 1");
  QuadratureRule rule;
  rule.nodes.resize(static_cast<std::size_t>(order));
  rule.weights.resize(static_cast<std::size_t>(order));
  const int half = (order + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double derivative = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int j = 2; j <= order; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      derivative = order * (x * p1 - p0) / (x * x - 1.0);
      const double step = p1 / derivative;
      x -= step;
      if (std::abs(step) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * derivative * derivative);
    rule.nodes[static_cast<std::size_t>(i)] = x;
    rule.nodes[static_cast<std::size_t>(order - 1 - i)] = -x;
    rule.weights[static_cast<std::size_t>(i)] = w;
    rule.weights[static_cast<std::size_t>(order - 1 - i)] = w;
  }
  if (order % 2 == 1) rule.nodes[static_cast<std::size_t>(order / 2)] = 0.0;
  return rule;
}

QuadratureRule latitude_rule(int n, int order) {
  if (n < 3) throw InvalidArgument("latitude_rule: n must be >= 3");
  QuadratureRule base = gauss_legendre(order);
  QuadratureRule rule;
  rule.nodes.resize(base.nodes.size());
  rule.weights.resize(base.nodes.size());
  double total = 0.0;
  for (std::size_t i = 0; i < base.nodes.size(); ++i) {
    const double theta = 0.5 * std::numbers::pi * (base.nodes[i] + 1.0);
    const double w = base.weights[i] * std::pow(std::sin(theta), n - 2);
    rule.nodes[i] = std::cos(theta);
    rule.weights[i] = w;
    total += w;
  }
  for (double& w : rule.weights) w /= total;
  return rule;
}

double adaptive_latitude(int n, const std::function<double(const QuadratureRule&)>& functional,
                         double tolerance, int max_order) {
  int order = 32;
  double previous = functional(latitude_rule(n, order));
  while (order < max_order) {
    order *= 2;
    const double current = functional(latitude_rule(n, order));
    if (std::abs(current - previous) <= tolerance * std::max(1.0, std::abs(current))) return current;
    previous = current;
  }
  return previous;
}

double latitude_mean(int n, const std::function<double(double)>& profile, double tolerance) {
  return adaptive_latitude(
      n,
      [&](const QuadratureRule& rule) {
        double sum = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * profile(rule.nodes[i]);
        return sum;
      },
      tolerance);
}

}  // namespace spherelab
