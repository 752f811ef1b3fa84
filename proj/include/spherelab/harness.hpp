#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "spherelab/constants.hpp"
#include "spherelab/regions.hpp"
#include "spherelab/stats.hpp"

namespace spherelab {

/// Monte Carlo budget and execution knobs shared by all experiments.
/// `workers` changes wall-clock time only, never results.
struct ExperimentOptions {
  std::uint64_t samples = 100000;
  std::uint64_t subsphere_samples = 10000;
  std::uint64_t seed = 1;
  int workers = 1;
  double confidence = 0.95;
  SamplerKind sampler = SamplerKind::reduced;
};

inline constexpr std::uint64_t kMinSamples = 1000;
inline constexpr std::uint64_t kMinSubsphereSamples = 100;

/// A theoretical reference value, recomputable from (id, params) alone.
struct BoundEntry {
  std::string id;
  std::string formula;
  nlohmann::json params;
  double value = 0.0;
};

/// Assertable criteria are constant-free statements; the rest are trend or
/// reference comparisons and never fail a run.
struct Criterion {
  std::string id;
  bool assertable = false;
  bool passed = true;
  std::string detail;
};

struct ExperimentReport {
  std::string experiment;
  nlohmann::json inputs;
  ProportionEstimate estimate;
  std::vector<BoundEntry> bounds;
  std::vector<Criterion> criteria;
  nlohmann::json details = nlohmann::json::object();
  double runtime_seconds = 0.0;  ///< kept out of the report JSON

  bool assertable_failure() const;
  const BoundEntry* bound(const std::string& id) const;
  const Criterion* criterion(const std::string& id) const;
};

/// Evaluates a registered bound formula. Known ids:
///   pair_density_main_term      (sigma_a sigma_b)^{1/(1-|r|)}
///   orthogonal_pair_0.9         0.9 sigma_a sigma_b
///   good_set_threshold          1/2 sigma^{(1+|r|)/(1-|r|)}
///   good_set_mass_main_term     1/2 sigma^{2/(1-|r|)}
///   inductive_sigma_pow_C       sigma^{C_R} (C_R recomputed from r_values)
///   orthogonal_simplex_sigma_pow_k  sigma^k
///   reverse_hc_norm_product     ||1_f||_p ||1_g||_p with p = 1 - |r|
double evaluate_bound(const std::string& id, const nlohmann::json& params);
BoundEntry make_bound(const std::string& id, nlohmann::json params);

/// Pr(x in A, y in B) for x uniform and y uniform on {y : x.y = r}.
ExperimentReport pairwise_density(const Region& a, const Region& b, double r, int n, const ExperimentOptions& options);

/// Nested estimate of sigma(A_good): x in A is good when the link measure
/// sigma_{x,r}(A) is at least 1/2 sigma(A)^{(1+|r|)/(1-|r|)}.
ExperimentReport good_set_mass(const Region& a, double r, int n, const ExperimentOptions& options);

/// Fraction of x with |sigma_{x,0}(A) / sigma(A) - 1| > 0.1.
ExperimentReport orthogonal_concentration(const Region& a, int n, const ExperimentOptions& options);

/// Probability that a rotation-invariant random tuple of the inductive
/// configuration lies entirely in A. Refuses configurations that violate the
/// diameter condition.
ExperimentReport tuple_containment(const Region& a, const InductiveConfiguration& config, int n,
                                   const ExperimentOptions& options);

/// E_{x.y=r}[1_f(x) 1_g(y)] against ||1_f||_p ||1_g||_p at p = 1 - |r|.
ExperimentReport reverse_hc_check(const Region& f, const Region& g, double r, int n, const ExperimentOptions& options);

/// Per-color monochromatic frequencies of configuration tuples for a
/// measurable coloring given as a partition of the sphere.
ExperimentReport ramsey_coloring_demo(const std::vector<Region>& colors, const InductiveConfiguration& config, int n,
                                      const ExperimentOptions& options);

/// Tuples of the k-simplex with inner product r, with the last k - b points
/// negated: Pr(x_1..x_b in A, -x_{b+1}..-x_k in A). Reported without bounds.
ExperimentReport mixed_sign_containment(const Region& a, double r, int k, int b, int n,
                                        const ExperimentOptions& options);

/// Probability that x_i lies in regions[i] for all i, for tuples with Gram matrix `gram`.
ProportionEstimate tuple_membership(const std::vector<Region>& regions, const GramSpec& gram, int n,
                                    const ExperimentOptions& options);

/// Reports for an n-grid together with a monotonicity verdict.
struct TrendReport {
  std::vector<int> dimensions;
  std::vector<ExperimentReport> reports;
  bool nonincreasing_within_ci = false;
};

using RegionFamily = std::function<Region(int n)>;

/// Exceptional fraction across n; verdict: each fraction's lower CI end is at
/// most the previous fraction's upper CI end.
TrendReport orthogonal_concentration_trend(const RegionFamily& a, const std::vector<int>& dimensions,
                                           const ExperimentOptions& options);

/// Negative part of the reverse-hypercontractivity margin across n.
TrendReport reverse_hc_trend(const RegionFamily& f, const RegionFamily& g, double r, const std::vector<int>& dimensions,
                             const ExperimentOptions& options);

/// Cap {x.e_1 >= t0} with sigma = measure on S^{n-1}.
Region cap_with_measure(int n, double measure);

/// Parsed experiment request. `dimensions` holds one or more n values; region
/// documents stay unresolved because caps given by measure depend on n.
struct ExperimentSpec {
  std::string experiment;
  std::vector<int> dimensions;
  double r = 0.0;
  nlohmann::json region;
  nlohmann::json region_b;
  nlohmann::json colors;
  std::optional<InductiveConfiguration> config;
  int k = 0;
  int b = 0;
  ExperimentOptions options;
};

/// Accepts the region schema plus two shorthands for caps and bands: the
/// axis may be omitted (e_1) or given as a coordinate index, and a cap may
/// give "measure" instead of "t0".
Region resolve_region(const nlohmann::json& doc, int n);

ExperimentSpec parse_experiment_spec(const nlohmann::json& doc);
nlohmann::json experiment_spec_to_json(const ExperimentSpec& spec);

struct ExperimentRun {
  std::vector<ExperimentReport> reports;
  std::optional<bool> nonincreasing_within_ci;  ///< set for trend experiments on an n-grid
};

ExperimentRun run_experiment(const ExperimentSpec& spec);
nlohmann::json run_to_json(const ExperimentSpec& spec, const ExperimentRun& run);

nlohmann::json report_to_json(const ExperimentReport& report);
std::string report_csv_header();
std::string report_csv_row(const ExperimentReport& report);

}  // namespace spherelab
