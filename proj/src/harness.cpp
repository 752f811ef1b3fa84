#include "spherelab/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <sstream>

#include "spherelab/error.hpp"
#include "spherelab/parallel.hpp"
#include "spherelab/projected.hpp"
#include "spherelab/random.hpp"
#include "spherelab/spectral.hpp"

namespace spherelab {
namespace {

constexpr int kLargeDimension = 100;
constexpr double kConcentrationTolerance = 0.1;
constexpr std::uint64_t kNestedChunk = 64;
constexpr std::uint64_t kPartitionProbes = 100000;

enum StreamTag : std::uint64_t { kMainStream = 0, kMeasureStream = 1, kProbeStream = 2 };

void validate(const ExperimentOptions& o, bool nested) {
  if (o.samples < kMinSamples) throw InvalidArgument("samples must be >= " + std::to_string(kMinSamples));
  if (nested && o.subsphere_samples < kMinSubsphereSamples) {
    throw InvalidArgument("subsphere_samples must be >= " + std::to_string(kMinSubsphereSamples) +
                          " for nested estimates");
  }
  if (o.workers < 1) throw InvalidArgument("workers must be >= 1");
  if (!(o.confidence > 0.0 && o.confidence < 1.0)) throw InvalidArgument("confidence must lie in (0,1)");
}

void validate_n(int n) {
  if (n < 3) throw InvalidArgument("n must be >= 3");
}

void validate_r(double r) {
  if (!(std::abs(r) < 1.0)) throw InvalidArgument("|r| must be < 1");
}

RandomStream stream(const ExperimentOptions& o, StreamTag tag) { return RandomStream(o.seed, tag); }

double region_measure(const Region& region, int n, const ExperimentOptions& o, nlohmann::json& out) {
  MonteCarloOptions mc;
  mc.samples = o.samples;
  mc.seed = RandomStream(o.seed, kMeasureStream).substream(0).engine()();
  mc.workers = o.workers;
  mc.sampler = o.sampler;
  const MeasureResult m = measure_auto(region, n, mc);
  out = {{"value", m.value}, {"method", to_string(m.method)}, {"std_error", m.std_error}, {"samples", m.samples}};
  return m.value;
}

nlohmann::json base_inputs(const std::string& experiment, int n, const ExperimentOptions& o) {
  return {{"experiment", experiment},
          {"n", n},
          {"samples", o.samples},
          {"seed", o.seed},
          {"confidence", o.confidence},
          {"sampler", to_string(o.sampler)}};
}

std::span<const double> row_span(const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>& m,
                                 Eigen::Index i) {
  return {m.data() + i * m.cols(), static_cast<std::size_t>(m.cols())};
}

double pow_or_zero(double base, double exponent) { return base <= 0.0 ? 0.0 : std::pow(base, exponent); }

enum class CiEnd { low, high };

// Passes when the chosen CI end is at least the bound.
Criterion at_least(const std::string& id, bool assertable, const ProportionEstimate& e, double bound,
                   CiEnd end = CiEnd::high) {
  const double v = end == CiEnd::low ? e.ci.low : e.ci.high;
  Criterion c;
  c.id = id;
  c.assertable = assertable;
  c.passed = v >= bound;
  std::ostringstream os;
  os.precision(6);
  os << (end == CiEnd::low ? "ci_low=" : "ci_high=") << v << (c.passed ? " >= " : " < ") << "bound=" << bound;
  c.detail = os.str();
  return c;
}

bool is_orthogonal_simplex(const InductiveConfiguration& config) {
  return std::all_of(config.r_values.begin(), config.r_values.end(), [](double v) { return v == 0.0; });
}

}  // namespace

bool ExperimentReport::assertable_failure() const {
  return std::any_of(criteria.begin(), criteria.end(), [](const Criterion& c) { return c.assertable && !c.passed; });
}

const BoundEntry* ExperimentReport::bound(const std::string& id) const {
  for (const auto& b : bounds)
    if (b.id == id) return &b;
  return nullptr;
}

const Criterion* ExperimentReport::criterion(const std::string& id) const {
  for (const auto& c : criteria)
    if (c.id == id) return &c;
  return nullptr;
}

double evaluate_bound(const std::string& id, const nlohmann::json& p) {
  try {
    if (id == "pair_density_main_term") {
      const double r = p.at("r").get<double>();
      validate_r(r);
      return pow_or_zero(p.at("sigma_a").get<double>() * p.at("sigma_b").get<double>(), 1.0 / (1.0 - std::abs(r)));
    }
    if (id == "orthogonal_pair_0.9") return 0.9 * p.at("sigma_a").get<double>() * p.at("sigma_b").get<double>();
    if (id == "good_set_threshold") {
      const double r = std::abs(p.at("r").get<double>());
      validate_r(r);
      return 0.5 * pow_or_zero(p.at("sigma").get<double>(), (1.0 + r) / (1.0 - r));
    }
    if (id == "good_set_mass_main_term") {
      const double r = std::abs(p.at("r").get<double>());
      validate_r(r);
      return 0.5 * pow_or_zero(p.at("sigma").get<double>(), 2.0 / (1.0 - r));
    }
    if (id == "inductive_sigma_pow_C") {
      InductiveConfiguration config{p.at("r_values").get<std::vector<double>>()};
      return pow_or_zero(p.at("sigma").get<double>(), exponent_C(config));
    }
    if (id == "orthogonal_simplex_sigma_pow_k") return pow_or_zero(p.at("sigma").get<double>(), p.at("k").get<double>());
    if (id == "reverse_hc_norm_product") {
      const double r = p.at("r").get<double>();
      validate_r(r);
      const double q = 1.0 - std::abs(r);
      return indicator_quasi_norm(p.at("sigma_f").get<double>(), q) * indicator_quasi_norm(p.at("sigma_g").get<double>(), q);
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument("bound '" + id + "': bad parameters: " + e.what());
  }
  throw InvalidArgument("unknown bound id '" + id + "'");
}

BoundEntry make_bound(const std::string& id, nlohmann::json params) {
  static const std::vector<std::pair<std::string, std::string>> formulas = {
      {"pair_density_main_term", "(sigma_a*sigma_b)^(1/(1-|r|))"},
      {"orthogonal_pair_0.9", "0.9*sigma_a*sigma_b"},
      {"good_set_threshold", "0.5*sigma^((1+|r|)/(1-|r|))"},
      {"good_set_mass_main_term", "0.5*sigma^(2/(1-|r|))"},
      {"inductive_sigma_pow_C", "sigma^C_R"},
      {"orthogonal_simplex_sigma_pow_k", "sigma^k"},
      {"reverse_hc_norm_product", "(sigma_f*sigma_g)^(1/(1-|r|))"},
  };
  BoundEntry b;
  b.id = id;
  for (const auto& [key, text] : formulas)
    if (key == id) b.formula = text;
  b.value = evaluate_bound(id, params);
  b.params = std::move(params);
  return b;
}

Region cap_with_measure(int n, double measure) {
  return Region::cap(UnitVector::basis(n, 0), find_threshold_for_measure(n, measure));
}

ProportionEstimate tuple_membership(const std::vector<Region>& regions, const GramSpec& gram, int n,
                                    const ExperimentOptions& o) {
  validate_n(n);
  validate(o, false);
  if (static_cast<int>(regions.size()) != gram.k()) throw InvalidArgument("one region per tuple point is required");
  AxisFrame frame(n);
  std::vector<CompiledRegion> compiled;
  compiled.reserve(regions.size());
  for (const Region& r : regions) compiled.emplace_back(r, frame);
  const ProjectedTupleSampler sampler(frame, gram, o.sampler);
  const HitCounter counts = run_chunked<HitCounter>(
      o.samples, ParallelPlan{o.workers}, stream(o, kMainStream), [&](std::uint64_t count, RandomStream& rng) {
        HitCounter c;
        Eigen::MatrixXd dots;
        Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rows;
        for (std::uint64_t s = 0; s < count; ++s) {
          sampler.draw(rng, dots);
          rows = dots;
          bool all = true;
          for (std::size_t i = 0; i < compiled.size() && all; ++i)
            all = compiled[i].contains(row_span(rows, static_cast<Eigen::Index>(i)));
          if (all) ++c.hits;
          ++c.trials;
        }
        return c;
      });
  return estimate_proportion(counts.hits, counts.trials, o.confidence);
}

ExperimentReport pairwise_density(const Region& a, const Region& b, double r, int n, const ExperimentOptions& o) {
  const auto start = std::chrono::steady_clock::now();
  validate_n(n);
  validate_r(r);
  validate(o, false);
  ExperimentReport rep;
  rep.experiment = "pairwise_density";
  rep.inputs = base_inputs(rep.experiment, n, o);
  rep.inputs["r"] = r;
  rep.inputs["region_a"] = region_to_json(a);
  rep.inputs["region_b"] = region_to_json(b);

  Eigen::Matrix2d g;
  g << 1.0, r, r, 1.0;
  rep.estimate = tuple_membership({a, b}, GramSpec(g), n, o);

  nlohmann::json ma, mb;
  const double sa = region_measure(a, n, o, ma);
  const double sb = region_measure(b, n, o, mb);
  rep.details["sigma_a"] = ma;
  rep.details["sigma_b"] = mb;

  rep.bounds.push_back(make_bound("pair_density_main_term", {{"sigma_a", sa}, {"sigma_b", sb}, {"r", r}}));
  const double main_term = rep.bounds.back().value;
  rep.details["main_term_ratio"] = main_term > 0.0 ? rep.estimate.value / main_term : 0.0;
  rep.criteria.push_back(at_least("pair_density_main_term", r != 0.0 && n >= kLargeDimension, rep.estimate, main_term));
  if (r == 0.0) {
    rep.bounds.push_back(make_bound("orthogonal_pair_0.9", {{"sigma_a", sa}, {"sigma_b", sb}}));
    const bool same = region_to_json(a) == region_to_json(b);
    rep.criteria.push_back(at_least("orthogonal_pair_0.9", same, rep.estimate, rep.bounds.back().value, CiEnd::low));
  }
  rep.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

ExperimentReport good_set_mass(const Region& a, double r, int n, const ExperimentOptions& o) {
  const auto start = std::chrono::steady_clock::now();
  validate_n(n);
  validate_r(r);
  validate(o, true);
  ExperimentReport rep;
  rep.experiment = "good_set_mass";
  rep.inputs = base_inputs(rep.experiment, n, o);
  rep.inputs["r"] = r;
  rep.inputs["subsphere_samples"] = o.subsphere_samples;
  rep.inputs["region"] = region_to_json(a);

  nlohmann::json ma;
  const double sigma = region_measure(a, n, o, ma);
  rep.details["sigma"] = ma;
  const BoundEntry threshold = make_bound("good_set_threshold", {{"sigma", sigma}, {"r", r}});
  rep.details["threshold"] = threshold.value;

  AxisFrame frame(n);
  const CompiledRegion compiled(a, frame);
  const ProjectedLinkSampler sampler(frame, r, o.sampler);
  struct Counts {
    std::uint64_t trials = 0, in_a = 0, good = 0;
    void merge(const Counts& c) {
      trials += c.trials;
      in_a += c.in_a;
      good += c.good;
    }
  };
  const std::size_t m = static_cast<std::size_t>(frame.size());
  const Counts counts = run_chunked<Counts>(
      o.samples, ParallelPlan{o.workers, kNestedChunk}, stream(o, kMainStream),
      [&](std::uint64_t count, RandomStream& rng) {
        Counts c;
        std::vector<double> dots(m);
        for (std::uint64_t s = 0; s < count; ++s) {
          ++c.trials;
          const LinkCenter center = sampler.draw_center(rng);
          if (!compiled.contains(std::span<const double>(center.dots.data(), m))) continue;
          ++c.in_a;
          std::uint64_t hits = 0;
          for (std::uint64_t j = 0; j < o.subsphere_samples; ++j) {
            sampler.draw_link(center, rng, dots);
            if (compiled.contains(dots)) ++hits;
          }
          if (static_cast<double>(hits) / static_cast<double>(o.subsphere_samples) >= threshold.value) ++c.good;
        }
        return c;
      });

  rep.estimate = estimate_proportion(counts.good, counts.trials, o.confidence);
  if (counts.in_a > 0) {
    const ProportionEstimate within = estimate_proportion(counts.good, counts.in_a, o.confidence);
    rep.details["good_fraction_of_a"] = {{"value", within.value},
                                         {"ci_low", within.ci.low},
                                         {"ci_high", within.ci.high},
                                         {"hits", within.hits},
                                         {"trials", within.trials}};
  }
  rep.bounds.push_back(threshold);
  rep.bounds.push_back(make_bound("good_set_mass_main_term", {{"sigma", sigma}, {"r", r}}));
  rep.criteria.push_back(at_least("good_set_mass_main_term", false, rep.estimate, rep.bounds.back().value));
  rep.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

ExperimentReport orthogonal_concentration(const Region& a, int n, const ExperimentOptions& o) {
  const auto start = std::chrono::steady_clock::now();
  validate_n(n);
  validate(o, true);
  ExperimentReport rep;
  rep.experiment = "orthogonal_concentration";
  rep.inputs = base_inputs(rep.experiment, n, o);
  rep.inputs["subsphere_samples"] = o.subsphere_samples;
  rep.inputs["region"] = region_to_json(a);

  nlohmann::json ma;
  const double sigma = region_measure(a, n, o, ma);
  if (!(sigma > 0.0)) throw InvalidArgument("orthogonal_concentration needs sigma(A) > 0");
  rep.details["sigma"] = ma;
  rep.details["tolerance"] = kConcentrationTolerance;

  AxisFrame frame(n);
  const CompiledRegion compiled(a, frame);
  const ProjectedLinkSampler sampler(frame, 0.0, o.sampler);
  const std::size_t m = static_cast<std::size_t>(frame.size());
  struct Acc {
    HitCounter exceptional;
    MeanAccumulator ratio;
    void merge(const Acc& other) {
      exceptional.merge(other.exceptional);
      ratio.merge(other.ratio);
    }
  };
  const Acc acc = run_chunked<Acc>(
      o.samples, ParallelPlan{o.workers, kNestedChunk}, stream(o, kMainStream),
      [&](std::uint64_t count, RandomStream& rng) {
        Acc c;
        std::vector<double> dots(m);
        for (std::uint64_t s = 0; s < count; ++s) {
          const LinkCenter center = sampler.draw_center(rng);
          std::uint64_t hits = 0;
          for (std::uint64_t j = 0; j < o.subsphere_samples; ++j) {
            sampler.draw_link(center, rng, dots);
            if (compiled.contains(dots)) ++hits;
          }
          const double ratio = static_cast<double>(hits) / static_cast<double>(o.subsphere_samples) / sigma;
          c.ratio.add(ratio);
          if (std::abs(ratio - 1.0) > kConcentrationTolerance) ++c.exceptional.hits;
          ++c.exceptional.trials;
        }
        return c;
      });
  rep.estimate = estimate_proportion(acc.exceptional.hits, acc.exceptional.trials, o.confidence);
  rep.details["mean_ratio"] = acc.ratio.mean;
  rep.details["ratio_std_dev"] = std::sqrt(acc.ratio.variance());
  rep.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

ExperimentReport tuple_containment(const Region& a, const InductiveConfiguration& config, int n,
                                   const ExperimentOptions& o) {
  const auto start = std::chrono::steady_clock::now();
  validate_n(n);
  validate(o, false);
  const DiameterCheck check = check_diameter_condition(config);
  if (!check.ok) throw InvalidConfiguration(check.reason);
  ExperimentReport rep;
  rep.experiment = "tuple_containment";
  rep.inputs = base_inputs(rep.experiment, n, o);
  rep.inputs["config"] = configuration_to_json(config);
  rep.inputs["region"] = region_to_json(a);

  const GramSpec gram = gram_from_inductive(config);
  rep.estimate = tuple_membership(std::vector<Region>(static_cast<std::size_t>(config.k()), a), gram, n, o);

  nlohmann::json ma;
  const double sigma = region_measure(a, n, o, ma);
  rep.details["sigma"] = ma;
  rep.details["constants"] = constants_to_json(derive_constants(config));

  rep.bounds.push_back(make_bound("inductive_sigma_pow_C", {{"sigma", sigma}, {"r_values", config.r_values}}));
  const double ref = rep.bounds.back().value;
  rep.details["ratio_to_sigma_pow_C"] = ref > 0.0 ? rep.estimate.value / ref : 0.0;
  rep.criteria.push_back(at_least("inductive_sigma_pow_C", false, rep.estimate, ref));
  if (is_orthogonal_simplex(config)) {
    rep.bounds.push_back(make_bound("orthogonal_simplex_sigma_pow_k", {{"sigma", sigma}, {"k", config.k()}}));
    const double pk = rep.bounds.back().value;
    rep.details["ratio_to_sigma_pow_k"] = pk > 0.0 ? rep.estimate.value / pk : 0.0;
    rep.criteria.push_back(at_least("orthogonal_simplex_sigma_pow_k", false, rep.estimate, pk));
  }
  rep.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

ExperimentReport reverse_hc_check(const Region& f, const Region& g, double r, int n, const ExperimentOptions& o) {
  const auto start = std::chrono::steady_clock::now();
  validate_n(n);
  validate_r(r);
  validate(o, false);
  ExperimentReport rep;
  rep.experiment = "reverse_hc";
  rep.inputs = base_inputs(rep.experiment, n, o);
  rep.inputs["r"] = r;
  rep.inputs["region_f"] = region_to_json(f);
  rep.inputs["region_g"] = region_to_json(g);

  Eigen::Matrix2d gm;
  gm << 1.0, r, r, 1.0;
  rep.estimate = tuple_membership({f, g}, GramSpec(gm), n, o);

  nlohmann::json mf, mg;
  const double sf = region_measure(f, n, o, mf);
  const double sg = region_measure(g, n, o, mg);
  rep.details["sigma_f"] = mf;
  rep.details["sigma_g"] = mg;
  rep.details["p"] = 1.0 - std::abs(r);

  rep.bounds.push_back(make_bound("reverse_hc_norm_product", {{"sigma_f", sf}, {"sigma_g", sg}, {"r", r}}));
  const double bound = rep.bounds.back().value;
  const double margin = rep.estimate.value - bound;
  rep.details["margin"] = margin;
  rep.details["margin_std_error"] = rep.estimate.std_error;
  rep.details["negative_margin"] = std::max(0.0, -margin);
  rep.details["negative_margin_ci"] = {std::max(0.0, bound - rep.estimate.ci.high),
                                       std::max(0.0, bound - rep.estimate.ci.low)};
  rep.details["slack_unit"] = std::sqrt(sf * sg) / n;
  rep.criteria.push_back(at_least("reverse_hc_norm_product", false, rep.estimate, bound));
  rep.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

ExperimentReport ramsey_coloring_demo(const std::vector<Region>& colors, const InductiveConfiguration& config, int n,
                                      const ExperimentOptions& o) {
  const auto start = std::chrono::steady_clock::now();
  validate_n(n);
  validate(o, false);
  if (colors.empty()) throw InvalidArgument("ramsey_coloring_demo needs at least one color");
  const DiameterCheck check = check_diameter_condition(config);
  if (!check.ok) throw InvalidConfiguration(check.reason);

  ExperimentReport rep;
  rep.experiment = "ramsey_coloring";
  rep.inputs = base_inputs(rep.experiment, n, o);
  rep.inputs["config"] = configuration_to_json(config);
  nlohmann::json cj = nlohmann::json::array();
  for (const Region& c : colors) cj.push_back(region_to_json(c));
  rep.inputs["colors"] = cj;

  AxisFrame frame(n);
  std::vector<CompiledRegion> compiled;
  compiled.reserve(colors.size());
  for (const Region& c : colors) compiled.emplace_back(c, frame);

  struct Partition {
    std::uint64_t trials = 0, uncovered = 0, overlapping = 0;
    void merge(const Partition& p) {
      trials += p.trials;
      uncovered += p.uncovered;
      overlapping += p.overlapping;
    }
  };
  const ProjectedTupleSampler probe(frame, GramSpec(Eigen::MatrixXd::Identity(1, 1)), o.sampler);
  const Partition part = run_chunked<Partition>(
      std::min(o.samples, kPartitionProbes), ParallelPlan{o.workers}, stream(o, kProbeStream),
      [&](std::uint64_t count, RandomStream& rng) {
        Partition p;
        Eigen::MatrixXd dots;
        for (std::uint64_t s = 0; s < count; ++s) {
          probe.draw(rng, dots);
          int owners = 0;
          for (const auto& c : compiled)
            owners += c.contains(std::span<const double>(dots.data(), static_cast<std::size_t>(dots.size()))) ? 1 : 0;
          ++p.trials;
          if (owners == 0) ++p.uncovered;
          if (owners > 1) ++p.overlapping;
        }
        return p;
      });
  if (part.uncovered > 0 || part.overlapping > 0) {
    throw InvalidArgument("coloring is not a partition: " + std::to_string(part.uncovered) + " uncovered and " +
                          std::to_string(part.overlapping) + " multiply covered probes out of " +
                          std::to_string(part.trials));
  }
  rep.details["partition_probes"] = part.trials;
  rep.details["uncovered_upper"] = clopper_pearson_upper(0, part.trials, o.confidence);
  rep.details["overlap_upper"] = clopper_pearson_upper(0, part.trials, o.confidence);

  const GramSpec gram = gram_from_inductive(config);
  const ProjectedTupleSampler sampler(frame, gram, o.sampler);
  const std::size_t nc = colors.size();
  struct PerColor {
    std::vector<std::uint64_t> hits;
    std::uint64_t trials = 0;
    void merge(const PerColor& p) {
      if (hits.size() < p.hits.size()) hits.resize(p.hits.size(), 0);
      for (std::size_t i = 0; i < p.hits.size(); ++i) hits[i] += p.hits[i];
      trials += p.trials;
    }
  };
  const PerColor mono = run_chunked<PerColor>(
      o.samples, ParallelPlan{o.workers}, stream(o, kMainStream), [&](std::uint64_t count, RandomStream& rng) {
        PerColor p;
        p.hits.assign(nc, 0);
        Eigen::MatrixXd dots;
        Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rows;
        for (std::uint64_t s = 0; s < count; ++s) {
          sampler.draw(rng, dots);
          rows = dots;
          for (std::size_t c = 0; c < nc; ++c) {
            bool all = true;
            for (Eigen::Index i = 0; i < rows.rows() && all; ++i) all = compiled[c].contains(row_span(rows, i));
            if (all) ++p.hits[c];
          }
          ++p.trials;
        }
        return p;
      });

  nlohmann::json per = nlohmann::json::array();
  std::uint64_t any = 0;
  double max_sigma = 0.0;
  for (std::size_t c = 0; c < nc; ++c) {
    nlohmann::json mc;
    const double s = region_measure(colors[c], n, o, mc);
    max_sigma = std::max(max_sigma, s);
    const ProportionEstimate e = estimate_proportion(mono.hits[c], mono.trials, o.confidence);
    per.push_back({{"sigma", mc}, {"value", e.value}, {"ci_low", e.ci.low}, {"ci_high", e.ci.high}, {"hits", e.hits}});
    any += mono.hits[c];
  }
  rep.details["per_color"] = per;
  rep.estimate = estimate_proportion(any, mono.trials, o.confidence);

  Criterion c;
  c.id = "monochromatic_tuple_observed";
  c.assertable = max_sigma >= 1.0 / static_cast<double>(nc);
  c.passed = any > 0;
  c.detail = std::to_string(any) + " monochromatic tuples out of " + std::to_string(mono.trials);
  rep.criteria.push_back(c);
  rep.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

ExperimentReport mixed_sign_containment(const Region& a, double r, int k, int b, int n, const ExperimentOptions& o) {
  const auto start = std::chrono::steady_clock::now();
  validate_n(n);
  validate_r(r);
  validate(o, false);
  if (k < 2) throw InvalidArgument("mixed_sign: k must be >= 2");
  if (b < 0 || b > k) throw InvalidArgument("mixed_sign: b must lie in [0, k]");
  ExperimentReport rep;
  rep.experiment = "mixed_sign";
  rep.inputs = base_inputs(rep.experiment, n, o);
  rep.inputs["r"] = r;
  rep.inputs["k"] = k;
  rep.inputs["b"] = b;
  rep.inputs["region"] = region_to_json(a);

  const GramSpec gram = gram_from_inductive(InductiveConfiguration::simplex(k, r));
  std::vector<Region> regions(static_cast<std::size_t>(b), a);
  regions.resize(static_cast<std::size_t>(k), Region::antipode(a));
  rep.estimate = tuple_membership(regions, gram, n, o);
  nlohmann::json ma;
  region_measure(a, n, o, ma);
  rep.details["sigma"] = ma;
  rep.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

namespace {

bool nonincreasing(const std::vector<Interval>& cis) {
  for (std::size_t i = 1; i < cis.size(); ++i)
    if (cis[i].low > cis[i - 1].high) return false;
  return true;
}

}  // namespace

TrendReport orthogonal_concentration_trend(const RegionFamily& a, const std::vector<int>& dimensions,
                                           const ExperimentOptions& o) {
  TrendReport t;
  std::vector<Interval> cis;
  for (int n : dimensions) {
    t.dimensions.push_back(n);
    t.reports.push_back(orthogonal_concentration(a(n), n, o));
    cis.push_back(t.reports.back().estimate.ci);
  }
  t.nonincreasing_within_ci = nonincreasing(cis);
  return t;
}

TrendReport reverse_hc_trend(const RegionFamily& f, const RegionFamily& g, double r, const std::vector<int>& dimensions,
                             const ExperimentOptions& o) {
  TrendReport t;
  std::vector<Interval> cis;
  for (int n : dimensions) {
    t.dimensions.push_back(n);
    t.reports.push_back(reverse_hc_check(f(n), g(n), r, n, o));
    const auto& ci = t.reports.back().details["negative_margin_ci"];
    cis.push_back({ci[0].get<double>(), ci[1].get<double>()});
  }
  t.nonincreasing_within_ci = nonincreasing(cis);
  return t;
}

nlohmann::json report_to_json(const ExperimentReport& rep) {
  nlohmann::json j;
  j["schema"] = 1;
  j["experiment"] = rep.experiment;
  j["inputs"] = rep.inputs;
  const ProportionEstimate& e = rep.estimate;
  j["estimate"] = {{"value", e.value},
                   {"hits", e.hits},
                   {"trials", e.trials},
                   {"std_error", e.std_error},
                   {"ci_low", e.ci.low},
                   {"ci_high", e.ci.high},
                   {"interval", e.interval_method}};
  nlohmann::json bounds = nlohmann::json::array();
  for (const auto& b : rep.bounds)
    bounds.push_back({{"id", b.id}, {"formula", b.formula}, {"params", b.params}, {"value", b.value}});
  j["bounds"] = bounds;
  nlohmann::json crit = nlohmann::json::array();
  for (const auto& c : rep.criteria)
    crit.push_back({{"id", c.id}, {"assertable", c.assertable}, {"passed", c.passed}, {"detail", c.detail}});
  j["criteria"] = crit;
  j["details"] = rep.details;
  j["assertable_failure"] = rep.assertable_failure();
  return j;
}

namespace {

std::string num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string report_csv_header() {
  return "# schema=1\n"
         "experiment,n,r,samples,seed,estimate,std_error,ci_low,ci_high,interval,bound_id,bound,assertable_failure\n";
}

std::string report_csv_row(const ExperimentReport& rep) {
  std::ostringstream os;
  os << rep.experiment << ',' << rep.inputs.value("n", 0) << ',';
  if (rep.inputs.contains("r")) os << num(rep.inputs["r"].get<double>());
  os << ',' << rep.inputs.value("samples", std::uint64_t{0}) << ',' << rep.inputs.value("seed", std::uint64_t{0})
     << ',' << num(rep.estimate.value) << ',' << num(rep.estimate.std_error) << ',' << num(rep.estimate.ci.low) << ','
     << num(rep.estimate.ci.high) << ',' << rep.estimate.interval_method << ',';
  if (!rep.bounds.empty()) os << rep.bounds.front().id << ',' << num(rep.bounds.front().value);
  else os << ',';
  os << ',' << (rep.assertable_failure() ? "true" : "false") << '\n';
  return os.str();
}

}  // namespace spherelab

namespace spherelab {
namespace {

const std::vector<std::string> kExperiments = {"pairwise_density", "good_set_mass",   "orthogonal_concentration",
                                               "tuple_containment", "reverse_hc",     "ramsey_coloring",
                                               "mixed_sign"};

nlohmann::json resolve_axis(const nlohmann::json& node, int n) {
  if (!node.contains("axis")) return UnitVector::basis(n, 0).coords();
  const auto& axis = node.at("axis");
  if (axis.is_number_integer()) {
    const int i = axis.get<int>();
    if (i < 0 || i >= n) throw InvalidArgument("axis index out of range");
    return UnitVector::basis(n, i).coords();
  }
  return axis;
}

nlohmann::json resolve_region_doc(const nlohmann::json& doc, int n) {
  if (!doc.is_object() || !doc.contains("type")) throw InvalidArgument("region: expected an object with a type");
  const std::string type = doc.at("type").get<std::string>();
  nlohmann::json out = doc;
  if (type == "cap" || type == "band") {
    out["axis"] = resolve_axis(doc, n);
    if (type == "cap" && doc.contains("measure")) {
      if (doc.contains("t0")) throw InvalidArgument("region: give either t0 or measure, not both");
      out["t0"] = find_threshold_for_measure(n, doc.at("measure").get<double>());
      out.erase("measure");
    }
  } else if (type == "union" || type == "intersection") {
    nlohmann::json kids = nlohmann::json::array();
    for (const auto& c : doc.value("children", nlohmann::json::array())) kids.push_back(resolve_region_doc(c, n));
    out["children"] = kids;
  } else if (type == "complement" || type == "antipode") {
    out["child"] = resolve_region_doc(doc.at("child"), n);
  }
  return out;
}

}  // namespace

Region resolve_region(const nlohmann::json& doc, int n) {
  try {
    Region region = region_from_json(resolve_region_doc(doc, n));
    if (region.dimension() && *region.dimension() != n) {
      throw InvalidArgument("region dimension " + std::to_string(*region.dimension()) + " differs from n = " +
                            std::to_string(n));
    }
    return region;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("region: malformed JSON: ") + e.what());
  }
}

ExperimentSpec parse_experiment_spec(const nlohmann::json& doc) {
  if (!doc.is_object()) throw InvalidArgument("experiment spec must be a JSON object");
  ExperimentSpec s;
  try {
    s.experiment = doc.at("experiment").get<std::string>();
    if (std::find(kExperiments.begin(), kExperiments.end(), s.experiment) == kExperiments.end()) {
      throw InvalidArgument("unknown experiment '" + s.experiment + "'");
    }
    const auto& n = doc.at("n");
    if (n.is_array()) s.dimensions = n.get<std::vector<int>>();
    else s.dimensions = {n.get<int>()};
    if (s.dimensions.empty()) throw InvalidArgument("n grid is empty");
    for (int d : s.dimensions) validate_n(d);
    s.r = doc.value("r", 0.0);
    s.region = doc.value("region", nlohmann::json());
    s.region_b = doc.value("region_b", s.region);
    s.colors = doc.value("colors", nlohmann::json());
    if (doc.contains("config")) s.config = configuration_from_json(doc.at("config"));
    s.k = doc.value("k", 0);
    s.b = doc.value("b", 0);
    ExperimentOptions& o = s.options;
    o.samples = doc.value("samples", o.samples);
    o.subsphere_samples = doc.value("subsphere_samples", o.subsphere_samples);
    o.seed = doc.value("seed", o.seed);
    o.confidence = doc.value("confidence", o.confidence);
    o.sampler = sampler_kind_from_string(doc.value("sampler", std::string("reduced")));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("experiment spec: ") + e.what());
  }
  const bool needs_region = s.experiment != "ramsey_coloring";
  if (needs_region && s.region.is_null()) throw InvalidArgument("experiment spec: missing region");
  if ((s.experiment == "tuple_containment" || s.experiment == "ramsey_coloring") && !s.config) {
    throw InvalidArgument("experiment spec: missing config");
  }
  if (s.experiment == "ramsey_coloring" && !s.colors.is_array()) {
    throw InvalidArgument("experiment spec: colors must be an array of regions");
  }
  validate(s.options, s.experiment == "good_set_mass" || s.experiment == "orthogonal_concentration");
  // Resolve once per n so malformed regions are reported before any sampling.
  for (int n : s.dimensions) {
    if (!s.region.is_null()) resolve_region(s.region, n);
    if (!s.region_b.is_null()) resolve_region(s.region_b, n);
    if (s.colors.is_array())
      for (const auto& c : s.colors) resolve_region(c, n);
  }
  return s;
}

nlohmann::json experiment_spec_to_json(const ExperimentSpec& s) {
  nlohmann::json j;
  j["experiment"] = s.experiment;
  if (s.dimensions.size() == 1) j["n"] = s.dimensions.front();
  else j["n"] = s.dimensions;
  j["r"] = s.r;
  if (!s.region.is_null()) j["region"] = s.region;
  if (!s.region_b.is_null()) j["region_b"] = s.region_b;
  if (!s.colors.is_null()) j["colors"] = s.colors;
  if (s.config) j["config"] = configuration_to_json(*s.config);
  if (s.experiment == "mixed_sign") {
    j["k"] = s.k;
    j["b"] = s.b;
  }
  j["samples"] = s.options.samples;
  j["subsphere_samples"] = s.options.subsphere_samples;
  j["seed"] = s.options.seed;
  j["confidence"] = s.options.confidence;
  j["sampler"] = to_string(s.options.sampler);
  return j;
}

ExperimentRun run_experiment(const ExperimentSpec& s) {
  ExperimentRun run;
  std::vector<Interval> trend;
  for (int n : s.dimensions) {
    const ExperimentOptions& o = s.options;
    ExperimentReport rep;
    if (s.experiment == "pairwise_density") {
      rep = pairwise_density(resolve_region(s.region, n), resolve_region(s.region_b, n), s.r, n, o);
    } else if (s.experiment == "good_set_mass") {
      rep = good_set_mass(resolve_region(s.region, n), s.r, n, o);
    } else if (s.experiment == "orthogonal_concentration") {
      rep = orthogonal_concentration(resolve_region(s.region, n), n, o);
      trend.push_back(rep.estimate.ci);
    } else if (s.experiment == "tuple_containment") {
      rep = tuple_containment(resolve_region(s.region, n), *s.config, n, o);
    } else if (s.experiment == "reverse_hc") {
      rep = reverse_hc_check(resolve_region(s.region, n), resolve_region(s.region_b, n), s.r, n, o);
      const auto& ci = rep.details["negative_margin_ci"];
      trend.push_back({ci[0].get<double>(), ci[1].get<double>()});
    } else if (s.experiment == "ramsey_coloring") {
      std::vector<Region> colors;
      for (const auto& c : s.colors) colors.push_back(resolve_region(c, n));
      rep = ramsey_coloring_demo(colors, *s.config, n, o);
    } else {
      rep = mixed_sign_containment(resolve_region(s.region, n), s.r, s.k, s.b, n, o);
    }
    run.reports.push_back(std::move(rep));
  }
  if (!trend.empty() && s.dimensions.size() > 1) run.nonincreasing_within_ci = nonincreasing(trend);
  return run;
}

nlohmann::json run_to_json(const ExperimentSpec& s, const ExperimentRun& run) {
  nlohmann::json j;
  j["schema"] = 1;
  j["spec"] = experiment_spec_to_json(s);
  nlohmann::json reports = nlohmann::json::array();
  bool failure = false;
  for (const auto& r : run.reports) {
    reports.push_back(report_to_json(r));
    failure = failure || r.assertable_failure();
  }
  j["reports"] = reports;
  if (run.nonincreasing_within_ci) j["trend"] = {{"nonincreasing_within_ci", *run.nonincreasing_within_ci}};
  j["assertable_failure"] = failure;
  return j;
}

}  // namespace spherelab
