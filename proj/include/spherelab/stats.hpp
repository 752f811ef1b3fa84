#pragma once

#include <cstdint>
#include <span>
#include <string>

namespace spherelab {

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

/// Two-sided standard normal quantile for a central `confidence` mass.
double normal_two_sided_quantile(double confidence);

/// Wilson score interval for a binomial proportion.
Interval wilson_interval(std::uint64_t hits, std::uint64_t trials, double confidence = 0.95);

/// One-sided Clopper-Pearson upper bound on the success probability.
double clopper_pearson_upper(std::uint64_t hits, std::uint64_t trials, double confidence = 0.95);

/// A Monte Carlo proportion with its interval. Zero-hit outcomes carry a
/// one-sided Clopper-Pearson upper bound instead of a degenerate interval.
struct ProportionEstimate {
  std::uint64_t hits = 0;
  std::uint64_t trials = 0;
  double value = 0.0;
  double std_error = 0.0;  ///< sqrt(p(1-p)/N)
  Interval ci;
  std::string interval_method;  ///< "wilson" or "clopper_pearson_upper"
};

ProportionEstimate estimate_proportion(std::uint64_t hits, std::uint64_t trials, double confidence = 0.95);

/// Streaming mean/variance with a deterministic pairwise merge.
struct MeanAccumulator {
  std::uint64_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double value);
  void merge(const MeanAccumulator& other);
  double variance() const;
  double std_error() const;
};

/// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
double ks_statistic(std::span<const double> a, std::span<const double> b);

/// True if the two samples are compatible at significance `alpha`
/// (asymptotic critical value).
bool ks_two_sample_accepts(std::span<const double> a, std::span<const double> b, double alpha = 0.01);

/// Least-squares slope of y against x.
double fit_slope(std::span<const double> x, std::span<const double> y);

}  // namespace spherelab
