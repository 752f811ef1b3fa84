#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "spherelab/random.hpp"
#include "spherelab/sphere.hpp"

namespace spherelab {

inline constexpr int kDefaultMaxDegree = 64;

// ---------------------------------------------------------------------------
// Gegenbauer polynomials, normalized so that G_k(1) = 1 on S^{n-1}.
// G_k(r) is the eigenvalue of the fixed-inner-product averaging operator A_r
// on degree-k spherical harmonics.
// ---------------------------------------------------------------------------

/// G_k(t) via the normalized three-term recurrence
///   (n+k-3) G_k = (2k+n-4) t G_{k-1} - (k-1) G_{k-2},  G_0 = 1, G_1 = t.
double gegenbauer_eval(int k, int n, double t);

/// G_0(t), ..., G_K(t) in one pass of the recurrence.
std::vector<double> gegenbauer_all(int max_degree, int n, double t);

/// E[(t + i X_1 sqrt(1-t^2))^k] with X uniform on S^{n-2}, summed over even
/// powers with exact moments. Independent of the recurrence; k <= 60.
double gegenbauer_moment_oracle(int k, int n, double t);

/// E[X_1^{2a}] for X uniform on S^{n-2}: (2a-1)!! / prod_{j<a} (n-1+2j).
double link_coordinate_even_moment(int a, int n);

struct MomentBound {
  double exact;
  double bound;  ///< (2a/(n-4))^a
};

/// Exact even moment next to the polynomial bound used for the eigenvalue
/// estimate; requires n >= 5.
MomentBound moment_bound_check(int a, int n);

struct EigenTable {
  int n;
  double r;
  std::vector<double> values;  ///< mu_{0,r}, ..., mu_{K,r}
};

EigenTable eigen_table(int n, double r, int max_degree = kDefaultMaxDegree);

/// max_{k <= K} |mu_{k,r} - r^k| for every n in `dimensions`.
std::vector<double> eigenvalue_deviation_table(const std::vector<int>& dimensions, double r,
                                               int max_degree = kDefaultMaxDegree);

/// Dimension c_{k,n} of the degree-k harmonic space on S^{n-1}.
double harmonic_dimension(int k, int n);

/// <G_k, G_k> in L^2(sigma), which equals 1 / c_{k,n}.
double zonal_norm_squared(int k, int n);

// ---------------------------------------------------------------------------
// Zonal functions f(x) = sum_k a_k G_k(x.v).
// ---------------------------------------------------------------------------

class ZonalFunction {
 public:
  ZonalFunction(UnitVector axis, std::vector<double> coefficients);

  /// 1 + eps * Y_1 with Y_1 = sqrt(n) G_1 the L^2-normalized degree-1 zonal harmonic.
  static ZonalFunction linear_perturbation(const UnitVector& axis, double eps);

  int dim() const { return axis_.dim(); }
  const UnitVector& axis() const { return axis_; }
  const std::vector<double>& coefficients() const { return coefficients_; }
  int max_degree() const { return static_cast<int>(coefficients_.size()) - 1; }

  /// Value as a function of the latitude t = x.v.
  double profile(double t) const;
  double operator()(const UnitVector& x) const;
  double mean() const { return coefficients_.empty() ? 0.0 : coefficients_.front(); }

 private:
  UnitVector axis_;
  std::vector<double> coefficients_;
};

/// t >= 0; r = e^{-t}.
class SemigroupTime {
 public:
  explicit SemigroupTime(double t);
  static SemigroupTime from_r(double r);
  double value() const { return t_; }

 private:
  double t_;
};

/// Poisson semigroup on the zonal sector: a_k -> e^{-kt} a_k.
ZonalFunction apply_poisson(const ZonalFunction& f, SemigroupTime t);

/// K_r(x, y) = (1 - r^2) / |x - r y|^n.
double poisson_kernel(const UnitVector& x, const UnitVector& y, double r);

/// A_r on the zonal sector: a_k -> G_k(r) a_k.
ZonalFunction apply_ar_zonal(const ZonalFunction& f, double r);

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;
};

using PointFunction = std::function<double(const UnitVector&)>;

/// Monte Carlo A_r f(x): mean of f over uniform draws from {y : x.y = r}.
McEstimate apply_ar_mc(const PointFunction& f, const UnitVector& x, double r, std::uint64_t samples,
                       RandomStream& rng);

/// <f, g> and ||f||_2 in L^2(sigma), from coefficients.
double l2_inner(const ZonalFunction& f, const ZonalFunction& g);
double l2_norm(const ZonalFunction& f);

/// Ent(f) = E[f log f] - E[f] log E[f] for a nonnegative latitude profile,
/// with 0 log 0 = 0. Throws if the profile is negative at a node.
double entropy_profile(int n, const std::function<double(double)>& profile);
double entropy(const ZonalFunction& f);
/// Ent(f^2), the left-hand side of the log-Sobolev inequality.
double entropy_of_square(const ZonalFunction& f);
/// Monte Carlo entropy of a nonnegative point function.
double entropy_mc(const PointFunction& f, int n, std::uint64_t samples, RandomStream& rng);

/// Dirichlet form of the Poisson semigroup, E(f, g) = sum_k k a_k b_k <G_k, G_k>.
double dirichlet_form(const ZonalFunction& f, const ZonalFunction& g);

/// (E f^p)^{1/p}, p != 0; for p < 0 the profile must be strictly positive.
double quasi_norm_profile(int n, const std::function<double(double)>& profile, double p);
double quasi_norm(const ZonalFunction& f, double p);
double quasi_norm_mc(const PointFunction& f, int n, double p, std::uint64_t samples, RandomStream& rng);
/// ||1_A||_p = sigma(A)^{1/p} for p > 0.
double indicator_quasi_norm(double measure, double p);

}  // namespace spherelab
