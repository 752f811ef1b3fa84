#include "spherelab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/beta.hpp>

#include "spherelab/error.hpp"

namespace spherelab {

double normal_two_sided_quantile(double confidence) {
  if (!(confidence > 0.0 && confidence < 1.0)) throw InvalidArgument("confidence must lie in (0, 1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(), 0.5 + 0.5 * confidence);
}

Interval wilson_interval(std::uint64_t hits, std::uint64_t trials, double confidence) {
  if (trials == 0) throw InvalidArgument("wilson_interval: trials must be > 0");
  if (hits > trials) throw InvalidArgument("wilson_interval: hits > trials");
  const double z = normal_two_sided_quantile(confidence);
  const double nt = static_cast<double>(trials);
  const double p = static_cast<double>(hits) / nt;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nt;
  const double center = (p + z2 / (2.0 * nt)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nt + z2 / (4.0 * nt * nt)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

double clopper_pearson_upper(std::uint64_t hits, std::uint64_t trials, double confidence) {
  if (trials == 0) throw InvalidArgument("clopper_pearson_upper: trials must be > 0");
  if (hits >= trials) return 1.0;
  if (hits == 0) return 1.0 - std::pow(1.0 - confidence, 1.0 / static_cast<double>(trials));
  return boost::math::ibeta_inv(static_cast<double>(hits + 1), static_cast<double>(trials - hits), confidence);
}

ProportionEstimate estimate_proportion(std::uint64_t hits, std::uint64_t trials, double confidence) {
  ProportionEstimate e;
  e.hits = hits;
  e.trials = trials;
  e.value = static_cast<double>(hits) / static_cast<double>(trials);
  e.std_error = std::sqrt(e.value * (1.0 - e.value) / static_cast<double>(trials));
  if (hits == 0) {
    e.ci = {0.0, clopper_pearson_upper(0, trials, confidence)};
    e.interval_method = "clopper_pearson_upper";
  } else {
    e.ci = wilson_interval(hits, trials, confidence);
    e.interval_method = "wilson";
  }
  return e;
}

void MeanAccumulator::add(double value) {
  ++count;
  const double delta = value - mean;
  mean += delta / static_cast<double>(count);
  m2 += delta * (value - mean);
}

void MeanAccumulator::merge(const MeanAccumulator& other) {
  if (other.count == 0) return;
  if (count == 0) {
    *this = other;
    return;
  }
  const double total = static_cast<double>(count + other.count);
  const double delta = other.mean - mean;
  mean += delta * static_cast<double>(other.count) / total;
  m2 += other.m2 + delta * delta * static_cast<double>(count) * static_cast<double>(other.count) / total;
  count += other.count;
}

double MeanAccumulator::variance() const { return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0; }

double MeanAccumulator::std_error() const {
  return count > 0 ? std::sqrt(variance() / static_cast<double>(count)) : 0.0;
}

double ks_statistic(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw InvalidArgument("ks_statistic: empty sample");
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  std::size_t i = 0;
  std::size_t j = 0;
  double worst = 0.0;
  while (i < sa.size() && j < sb.size()) {
    const double v = std::min(sa[i], sb[j]);
    while (i < sa.size() && sa[i] <= v) ++i;
    while (j < sb.size() && sb[j] <= v) ++j;
    const double fa = static_cast<double>(i) / static_cast<double>(sa.size());
    const double fb = static_cast<double>(j) / static_cast<double>(sb.size());
    worst = std::max(worst, std::abs(fa - fb));
  }
  return worst;
}

bool ks_two_sample_accepts(std::span<const double> a, std::span<const double> b, double alpha) {
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double critical = std::sqrt(-0.5 * std::log(0.5 * alpha)) * std::sqrt((na + nb) / (na * nb));
  return ks_statistic(a, b) <= critical;
}

double fit_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("fit_slope: need >= 2 paired points");
  const double m = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / m;
  const double my = sy / m;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace spherelab
