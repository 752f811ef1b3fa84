#include "spherelab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "spherelab/error.hpp"
#include "spherelab/quadrature.hpp"

namespace spherelab {
namespace {

void check_degree_dimension(int k, int n) {
  if (k < 0) throw InvalidArgument("degree k must be >= 0");
  if (n < 3) throw InvalidArgument("dimension n must be >= 3");
}

void check_latitude(double t) {
  if (!(std::abs(t) <= 1.0)) throw InvalidArgument("latitude t must lie in [-1, 1]");
}

void check_same_sector(const ZonalFunction& f, const ZonalFunction& g) {
  if (f.dim() != g.dim() || f.axis().coords() != g.axis().coords()) {
    throw InvalidArgument("zonal functions must share axis and dimension");
  }
}

double f_log_f(double v) { return v > 0.0 ? v * std::log(v) : 0.0; }

}  // namespace

std::vector<double> gegenbauer_all(int max_degree, int n, double t) {
  check_degree_dimension(max_degree, n);
  check_latitude(t);
  std::vector<double> g(static_cast<std::size_t>(max_degree) + 1);
  g[0] = 1.0;
  if (max_degree >= 1) g[1] = t;
  for (int k = 2; k <= max_degree; ++k) {
    const auto i = static_cast<std::size_t>(k);
    g[i] = ((2.0 * k + n - 4.0) * t * g[i - 1] - (k - 1.0) * g[i - 2]) / (n + k - 3.0);
  }
  return g;
}

double gegenbauer_eval(int k, int n, double t) { return gegenbauer_all(k, n, t).back(); }

double link_coordinate_even_moment(int a, int n) {
  if (a < 0) throw InvalidArgument("moment order must be >= 0");
  if (n < 3) throw InvalidArgument("dimension n must be >= 3");
  long double m = 1.0L;
  for (int j = 0; j < a; ++j) m *= (2.0L * j + 1.0L) / (n - 1.0L + 2.0L * j);
  return static_cast<double>(m);
}

double gegenbauer_moment_oracle(int k, int n, double t) {
  check_degree_dimension(k, n);
  check_latitude(t);
  if (k > 60) throw InvalidArgument("gegenbauer_moment_oracle: k > 60 would overflow");
  const long double tt = t;
  const long double s2 = 1.0L - tt * tt;
  long double sum = 0.0L;
  long double binom = 1.0L;  // C(k, 2a)
  for (int a = 0; 2 * a <= k; ++a) {
    if (a > 0) {
      binom *= static_cast<long double>(k - 2 * a + 2) * (k - 2 * a + 1) / ((2.0L * a - 1.0L) * (2.0L * a));
    }
    long double term = binom * std::pow(tt, k - 2 * a) * std::pow(s2, a);
    long double moment = 1.0L;
    for (int j = 0; j < a; ++j) moment *= (2.0L * j + 1.0L) / (n - 1.0L + 2.0L * j);
    term *= moment;
    sum += (a % 2 == 0) ? term : -term;
  }
  return static_cast<double>(sum);
}

MomentBound moment_bound_check(int a, int n) {
  if (a < 1) throw InvalidArgument("moment_bound_check: a must be >= 1");
  if (n < 5) throw InvalidArgument("moment_bound_check: n must be >= 5");
  return {link_coordinate_even_moment(a, n), std::pow(2.0 * a / (n - 4.0), a)};
}

EigenTable eigen_table(int n, double r, int max_degree) {
  if (!(std::abs(r) < 1.0)) throw InvalidArgument("eigen_table: |r| must be < 1");
  return {n, r, gegenbauer_all(max_degree, n, r)};
}

std::vector<double> eigenvalue_deviation_table(const std::vector<int>& dimensions, double r,
                                               int max_degree) {
  if (!(std::abs(r) < 1.0) || r == 0.0) throw InvalidArgument("deviation table: r must be in (-1,1)\\{0}");
  std::vector<double> out;
  out.reserve(dimensions.size());
  for (int n : dimensions) {
    const auto mu = gegenbauer_all(max_degree, n, r);
    double worst = 0.0;
    double power = 1.0;
    for (int k = 0; k <= max_degree; ++k) {
      worst = std::max(worst, std::abs(mu[static_cast<std::size_t>(k)] - power));
      power *= r;
    }
    out.push_back(worst);
  }
  return out;
}

double harmonic_dimension(int k, int n) {
  check_degree_dimension(k, n);
  if (k == 0) return 1.0;
  long double binom = 1.0L;  // C(k+n-2, k)
  for (int j = 1; j <= k; ++j) binom *= static_cast<long double>(n - 2 + j) / j;
  return static_cast<double>(binom * (2.0L * k + n - 2.0L) / (k + n - 2.0L));
}

double zonal_norm_squared(int k, int n) { return 1.0 / harmonic_dimension(k, n); }

ZonalFunction::ZonalFunction(UnitVector axis, std::vector<double> coefficients)
    : axis_(std::move(axis)), coefficients_(std::move(coefficients)) {
  if (coefficients_.empty()) throw InvalidArgument("ZonalFunction needs at least one coefficient");
}

ZonalFunction ZonalFunction::linear_perturbation(const UnitVector& axis, double eps) {
  return ZonalFunction(axis, {1.0, eps * std::sqrt(static_cast<double>(axis.dim()))});
}

double ZonalFunction::profile(double t) const {
  const auto g = gegenbauer_all(max_degree(), dim(), std::clamp(t, -1.0, 1.0));
  double sum = 0.0;
  for (std::size_t k = 0; k < coefficients_.size(); ++k) sum += coefficients_[k] * g[k];
  return sum;
}

double ZonalFunction::operator()(const UnitVector& x) const {
  if (x.dim() != dim()) throw InvalidArgument("ZonalFunction: dimension mismatch");
  return profile(x.dot(axis_));
}

SemigroupTime::SemigroupTime(double t) : t_(t) {
  if (!(t >= 0.0)) throw InvalidArgument("semigroup time must be >= 0");
}

SemigroupTime SemigroupTime::from_r(double r) {
  if (!(r > 0.0 && r <= 1.0)) throw InvalidArgument("SemigroupTime::from_r: r must lie in (0, 1]");
  return SemigroupTime(-std::log(r));
}

ZonalFunction apply_poisson(const ZonalFunction& f, SemigroupTime t) {
  std::vector<double> a = f.coefficients();
  for (std::size_t k = 0; k < a.size(); ++k) a[k] *= std::exp(-static_cast<double>(k) * t.value());
  return ZonalFunction(f.axis(), std::move(a));
}

double poisson_kernel(const UnitVector& x, const UnitVector& y, double r) {
  if (!(std::abs(r) < 1.0)) throw InvalidArgument("poisson_kernel: |r| must be < 1");
  if (x.dim() != y.dim()) throw InvalidArgument("poisson_kernel: dimension mismatch");
  const double dist2 = std::max(0.0, 1.0 - 2.0 * r * x.dot(y) + r * r);
  return (1.0 - r * r) * std::exp(-0.5 * x.dim() * std::log(dist2));
}

ZonalFunction apply_ar_zonal(const ZonalFunction& f, double r) {
  if (!(std::abs(r) < 1.0)) throw InvalidArgument("apply_ar_zonal: |r| must be < 1");
  const auto mu = gegenbauer_all(f.max_degree(), f.dim(), r);
  std::vector<double> a = f.coefficients();
  for (std::size_t k = 0; k < a.size(); ++k) a[k] *= mu[k];
  return ZonalFunction(f.axis(), std::move(a));
}

McEstimate apply_ar_mc(const PointFunction& f, const UnitVector& x, double r, std::uint64_t samples,
                       RandomStream& rng) {
  if (samples == 0) throw InvalidArgument("apply_ar_mc: samples must be > 0");
  double mean = 0.0;
  double m2 = 0.0;
  for (std::uint64_t i = 0; i < samples; ++i) {
    const double v = f(sample_subsphere(x, r, rng));
    const double delta = v - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (v - mean);
  }
  const double variance = samples > 1 ? m2 / static_cast<double>(samples - 1) : 0.0;
  return {mean, std::sqrt(variance / static_cast<double>(samples)), samples};
}

double l2_inner(const ZonalFunction& f, const ZonalFunction& g) {
  check_same_sector(f, g);
  const std::size_t shared = std::min(f.coefficients().size(), g.coefficients().size());
  double sum = 0.0;
  for (std::size_t k = 0; k < shared; ++k) {
    sum += f.coefficients()[k] * g.coefficients()[k] * zonal_norm_squared(static_cast<int>(k), f.dim());
  }
  return sum;
}

double l2_norm(const ZonalFunction& f) { return std::sqrt(l2_inner(f, f)); }

double entropy_profile(int n, const std::function<double(double)>& profile) {
  return adaptive_latitude(n, [&](const QuadratureRule& rule) {
    std::vector<double> values(rule.nodes.size());
    double mean = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      values[i] = profile(rule.nodes[i]);
      if (values[i] < 0.0) {
        throw InvalidArgument("entropy: function is negative at t = " + std::to_string(rule.nodes[i]));
      }
      mean += rule.weights[i] * values[i];
    }
    if (mean <= 0.0) return 0.0;
    // E[f log(f / E f)] equals Ent(f) and avoids cancelling two O(1) terms.
    double sum = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (values[i] > 0.0) sum += rule.weights[i] * values[i] * std::log(values[i] / mean);
    }
    return sum;
  });
}

double entropy(const ZonalFunction& f) {
  return entropy_profile(f.dim(), [&](double t) { return f.profile(t); });
}

double entropy_of_square(const ZonalFunction& f) {
  return entropy_profile(f.dim(), [&](double t) {
    const double v = f.profile(t);
    return v * v;
  });
}

double entropy_mc(const PointFunction& f, int n, std::uint64_t samples, RandomStream& rng) {
  if (samples == 0) throw InvalidArgument("entropy_mc: samples must be > 0");
  double sum = 0.0;
  double sum_flogf = 0.0;
  for (std::uint64_t i = 0; i < samples; ++i) {
    const double v = f(sample_uniform(n, rng));
    if (v < 0.0) throw InvalidArgument("entropy_mc: function is negative");
    sum += v;
    sum_flogf += f_log_f(v);
  }
  const double mean = sum / static_cast<double>(samples);
  return sum_flogf / static_cast<double>(samples) - f_log_f(mean);
}

double dirichlet_form(const ZonalFunction& f, const ZonalFunction& g) {
  check_same_sector(f, g);
  const std::size_t shared = std::min(f.coefficients().size(), g.coefficients().size());
  double sum = 0.0;
  for (std::size_t k = 1; k < shared; ++k) {
    sum += static_cast<double>(k) * f.coefficients()[k] * g.coefficients()[k] *
           zonal_norm_squared(static_cast<int>(k), f.dim());
  }
  return sum;
}

double quasi_norm_profile(int n, const std::function<double(double)>& profile, double p) {
  if (p == 0.0) throw InvalidArgument("quasi_norm: p must be nonzero");
  const double moment = adaptive_latitude(n, [&](const QuadratureRule& rule) {
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double v = profile(rule.nodes[i]);
      if (v < 0.0 || (p < 0.0 && v <= 0.0)) {
        throw InvalidArgument("quasi_norm: function must be nonnegative (strictly positive for p < 0)");
      }
      sum += rule.weights[i] * std::pow(v, p);
    }
    return sum;
  });
  return std::pow(moment, 1.0 / p);
}

double quasi_norm(const ZonalFunction& f, double p) {
  return quasi_norm_profile(f.dim(), [&](double t) { return f.profile(t); }, p);
}

double quasi_norm_mc(const PointFunction& f, int n, double p, std::uint64_t samples, RandomStream& rng) {
  if (p == 0.0) throw InvalidArgument("quasi_norm: p must be nonzero");
  if (samples == 0) throw InvalidArgument("quasi_norm_mc: samples must be > 0");
  double sum = 0.0;
  for (std::uint64_t i = 0; i < samples; ++i) {
    const double v = f(sample_uniform(n, rng));
    if (v < 0.0 || (p < 0.0 && v <= 0.0)) {
      throw InvalidArgument("quasi_norm: function must be nonnegative (strictly positive for p < 0)");
    }
    sum += std::pow(v, p);
  }
  return std::pow(sum / static_cast<double>(samples), 1.0 / p);
}

double indicator_quasi_norm(double measure, double p) {
  if (!(p > 0.0)) throw InvalidArgument("indicator_quasi_norm: p must be > 0");
  if (!(measure >= 0.0 && measure <= 1.0)) throw InvalidArgument("measure must lie in [0, 1]");
  return std::pow(measure, 1.0 / p);
}

}  // namespace spherelab
