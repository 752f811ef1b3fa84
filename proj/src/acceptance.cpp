#include "spherelab/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "spherelab/cli.hpp"
#include "spherelab/constants.hpp"
#include "spherelab/error.hpp"
#include "spherelab/harness.hpp"
#include "spherelab/random.hpp"
#include "spherelab/spectral.hpp"
#include "spherelab/sphere.hpp"
#include "spherelab/stats.hpp"

namespace spherelab {
namespace {

struct Outcome {
  bool ok = false;
  std::string detail;
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

Outcome gegenbauer_oracle(const AcceptanceOptions& o) {
  const GegenbauerEvaluator eval = o.gegenbauer ? o.gegenbauer : GegenbauerEvaluator(gegenbauer_eval);
  double worst = 0.0;
  for (int n : {5, 50, 500})
    for (double t : {-0.9, -0.3, 0.0, 0.3, 0.9})
      for (int k = 0; k <= 40; ++k) worst = std::max(worst, std::abs(eval(k, n, t) - gegenbauer_moment_oracle(k, n, t)));
  return {worst <= 1e-8, "max |G - oracle| = " + fmt(worst) + " (tol 1e-08)"};
}

Outcome eigenfunction_identity(const AcceptanceOptions&) {
  constexpr int n = 30;
  constexpr double kFloor = 1e-12;
  const UnitVector v = UnitVector::basis(n, 0);
  // off-axis probe with x.v = 0.6, where f_k is not constant on the link
  Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
  p(0) = 0.6;
  p(1) = 0.8;
  const UnitVector probe(p);
  double worst = 0.0;
  std::uint64_t stream = 0;
  for (double r : {0.3, 0.7}) {
    for (int k = 1; k <= 5; ++k) {
      const PointFunction fk = [&](const UnitVector& y) { return gegenbauer_eval(k, n, y.dot(v)); };
      const double mu = gegenbauer_eval(k, n, r);
      for (const UnitVector* x : {&v, &probe}) {
        RandomStream rng(20240201, stream++);
        const McEstimate e = apply_ar_mc(fk, *x, r, 1000000, rng);
        const double expected = mu * gegenbauer_eval(k, n, x->dot(v));
        worst = std::max(worst, std::abs(e.value - expected) / (e.std_error + kFloor));
      }
    }
  }
  return {worst <= 4.0, "max |A_r f_k(x) - mu_k f_k(x)| / SE = " + fmt(worst) + " (tol 4)"};
}

Outcome eigenvalue_rate(const AcceptanceOptions&) {
  const std::vector<int> dims = {100, 200, 400, 800, 1600};
  const std::vector<double> dev = eigenvalue_deviation_table(dims, 0.5, 50);
  std::vector<double> x, y;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    x.push_back(std::log(static_cast<double>(dims[i])));
    y.push_back(std::log(dev[i]));
  }
  const double slope = fit_slope(x, y);
  return {std::abs(slope + 1.0) <= 0.3, "slope = " + fmt(slope) + " (target -1 +- 0.3)"};
}

Outcome orthogonal_pair(const AcceptanceOptions& o) {
  constexpr int n = 300;
  const Region a = cap_with_measure(n, 0.3);
  ExperimentOptions opts;
  opts.samples = 10000000;
  opts.seed = 4;
  opts.workers = o.workers;
  const ExperimentReport rep = pairwise_density(a, a, 0.0, n, opts);
  return {rep.estimate.ci.low >= 0.081,
          "estimate = " + fmt(rep.estimate.value) + ", ci_low = " + fmt(rep.estimate.ci.low) + " (need >= 0.081)"};
}

Outcome projection_identity(const AcceptanceOptions&) {
  constexpr int n = 50;
  const GramSpec gram = gram_from_inductive(InductiveConfiguration::simplex(3, 0.5));
  RandomStream rng(5);
  const ConfigurationSampler sampler(n, gram);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const auto pts = sampler(rng);
    const UnitVector y2 = project_to_link(pts[0], pts[1], 0.5);
    const UnitVector y3 = project_to_link(pts[0], pts[2], 0.5);
    worst = std::max(worst, std::abs(y2.dot(y3) - 1.0 / 3.0));
  }
  return {worst <= 1e-10, "max |<y2,y3> - 1/3| = " + fmt(worst) + " (tol 1e-10)"};
}

Outcome constants_closed_form(const AcceptanceOptions&) {
  double worst = 0.0;
  for (int k = 2; k <= 10; ++k) {
    for (double r : {-0.3, -0.1, 0.0, 0.2, 0.5, 0.9}) {
      if (!(r > -1.0 / (k - 1))) continue;
      const std::vector<double> c = c_sequence(InductiveConfiguration::simplex(k, r));
      for (std::size_t i = 0; i < c.size(); ++i)
        worst = std::max(worst, std::abs(c[i] - simplex_c(static_cast<int>(i) + 1, r)));
    }
  }
  const auto cfg = InductiveConfiguration::simplex(3, 0.5);
  const double cr = exponent_C(cfg), eps = exponent_eps(cfg);
  const bool ok = worst <= 1e-12 && std::abs(cr - 13.0) <= 1e-12 && std::abs(eps - 1.0 / 6.0) <= 1e-12;
  return {ok, "max closed-form error = " + fmt(worst) + ", C_R = " + fmt(cr) + ", eps_R = " + fmt(eps)};
}

Outcome log_sobolev(const AcceptanceOptions&) {
  const ZonalFunction f = ZonalFunction::linear_perturbation(UnitVector::basis(10, 0), 0.01);
  const double ratio = entropy_of_square(f) / dirichlet_form(f, f);
  return {ratio >= 1.96 && ratio <= 2.0, "Ent(f^2)/E(f,f) = " + fmt(ratio) + " (range [1.96, 2])"};
}

Outcome reverse_hc(const AcceptanceOptions& o) {
  ExperimentOptions opts;
  opts.samples = 1000000;
  opts.seed = 8;
  opts.workers = o.workers;
  const RegionFamily cap = [](int n) { return cap_with_measure(n, 0.2); };
  const TrendReport t = reverse_hc_trend(cap, cap, 0.3, {100, 200, 400}, opts);
  const ExperimentReport& last = t.reports.back();
  const double margin = last.details.at("margin").get<double>();
  const double se = last.estimate.std_error;
  const bool ok = margin >= -5.0 * se && t.nonincreasing_within_ci;
  std::string negs;
  for (const auto& r : t.reports) negs += (negs.empty() ? "" : ", ") + fmt(r.details.at("negative_margin").get<double>());
  return {ok, "margin(n=400) = " + fmt(margin) + " (SE " + fmt(se) + "), negative parts [" + negs + "]" +
                  (t.nonincreasing_within_ci ? " nonincreasing" : " increasing")};
}

Outcome identities(const AcceptanceOptions&) {
  std::ostringstream detail;
  bool ok = true;

  // Semigroup property on coefficients.
  const UnitVector v = UnitVector::basis(12, 0);
  const ZonalFunction f(v, {1.0, 0.5, -0.25, 0.125, 2.0});
  const ZonalFunction lhs = apply_poisson(apply_poisson(f, SemigroupTime(0.3)), SemigroupTime(0.45));
  const ZonalFunction rhs = apply_poisson(f, SemigroupTime(0.75));
  double semigroup = 0.0;
  for (std::size_t k = 0; k < f.coefficients().size(); ++k)
    semigroup = std::max(semigroup, std::abs(lhs.coefficients()[k] - rhs.coefficients()[k]));
  ok = ok && semigroup <= 1e-15;
  detail << "semigroup " << fmt(semigroup);

  // Self-adjointness of A_r by Monte Carlo with independent draws.
  constexpr int n = 10;
  constexpr double r = 0.4;
  Eigen::VectorXd w(n);
  w.setZero();
  w(0) = 0.6;
  w(1) = 0.8;
  const ZonalFunction p(UnitVector::basis(n, 0), {1.0, 0.7, 0.3});
  const ZonalFunction q(UnitVector(w), {0.5, -0.4, 0.0, 0.6});
  MeanAccumulator fg, gf;
  RandomStream rng_a(91, 0), rng_b(91, 1);
  for (int i = 0; i < 400000; ++i) {
    const UnitVector x = sample_uniform(n, rng_a);
    fg.add(p(x) * q(sample_subsphere(x, r, rng_a)));
    const UnitVector x2 = sample_uniform(n, rng_b);
    gf.add(q(x2) * p(sample_subsphere(x2, r, rng_b)));
  }
  const double z = std::abs(fg.mean - gf.mean) / std::hypot(fg.std_error(), gf.std_error());
  ok = ok && z <= 4.0;
  detail << ", self-adjoint z " << fmt(z);

  // Measure of a region and its complement.
  constexpr int m = 40;
  const std::vector<Region> regions = {
      Region::cap(UnitVector::basis(m, 0), 0.1), Region::band(UnitVector::basis(m, 0), -0.2, 0.05),
      Region::union_of({Region::cap(UnitVector::basis(m, 0), 0.3), Region::antipode(Region::cap(UnitVector::basis(m, 0), 0.2))})};
  double complement = 0.0;
  for (const Region& a : regions) {
    const double s = measure(a, m, MeasureMethod::analytic).value + measure(Region::complement(a), m, MeasureMethod::analytic).value;
    complement = std::max(complement, std::abs(s - 1.0));
  }
  ok = ok && complement <= 1e-12;
  detail << ", complement " << fmt(complement);

  // Gram reproduction by the configuration sampler.
  const GramSpec gram = gram_from_inductive(InductiveConfiguration{{0.2, 0.6, -0.1}});
  const ConfigurationSampler sampler(20, gram);
  RandomStream rng_g(93);
  double gram_err = 0.0;
  for (int i = 0; i < 10000; ++i)
    gram_err = std::max(gram_err, (gram_of(sampler(rng_g)) - gram.entries()).cwiseAbs().maxCoeff());
  ok = ok && gram_err <= 1e-10;
  detail << ", gram " << fmt(gram_err);
  return {ok, detail.str()};
}

Outcome reproducibility(const AcceptanceOptions&) {
  const nlohmann::json pair = {{"experiment", "pairwise_density"},
                               {"n", 300},
                               {"r", 0.2},
                               {"region", {{"type", "cap"}, {"measure", 0.3}}},
                               {"samples", 300000},
                               {"seed", 10}};
  const nlohmann::json nested = {{"experiment", "good_set_mass"},
                                 {"n", 200},
                                 {"r", 0.3},
                                 {"region", {{"type", "cap"}, {"measure", 0.3}}},
                                 {"samples", 2000},
                                 {"subsphere_samples", 500},
                                 {"seed", 11}};
  bool ok = true;
  std::string detail;
  for (const auto& spec : {pair, nested}) {
    cli::EstimateRequest one;
    one.spec = spec;
    cli::EstimateRequest eight = one;
    eight.workers = 8;
    const auto a = cli::cmd_estimate(one);
    const auto b = cli::cmd_estimate(eight);
    const bool same = a.exit_code == cli::kOk && b.exit_code == cli::kOk && cli::dump_json(a.report) == cli::dump_json(b.report) &&
                      a.csv == b.csv;
    ok = ok && same;
    detail += (detail.empty() ? "" : ", ") + spec.at("experiment").get<std::string>() + (same ? " identical" : " DIFFERS");
  }
  return {ok, detail + " at workers 1 and 8"};
}

struct Entry {
  const char* name;
  double budget;
  Outcome (*run)(const AcceptanceOptions&);
};

const Entry kEntries[kAcceptanceCriteria] = {
    {"gegenbauer_oracle_equivalence", 1.0, gegenbauer_oracle},
    {"eigenfunction_identity", 60.0, eigenfunction_identity},
    {"eigenvalue_decay_rate", 10.0, eigenvalue_rate},
    {"orthogonal_pair_bound", 300.0, orthogonal_pair},
    {"projection_identity", 5.0, projection_identity},
    {"constants_closed_form", 1.0, constants_closed_form},
    {"log_sobolev_tightness", 1.0, log_sobolev},
    {"reverse_hc_margin_trend", 600.0, reverse_hc},
    {"semigroup_adjoint_measure_identities", 60.0, identities},
    {"reproducibility", 60.0, reproducibility},
};

}  // namespace

AcceptanceResult run_criterion(int id, const AcceptanceOptions& options) {
  if (id < 1 || id > kAcceptanceCriteria) throw InvalidArgument("criterion id out of range");
  const Entry& e = kEntries[id - 1];
  AcceptanceResult res;
  res.id = id;
  res.name = e.name;
  res.budget_seconds = e.budget;
  const auto start = std::chrono::steady_clock::now();
  try {
    const Outcome o = e.run(options);
    res.condition = o.ok;
    res.detail = o.detail;
  } catch (const std::exception& ex) {
    res.condition = false;
    res.detail = std::string("error: ") + ex.what();
  }
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  res.within_budget = res.seconds <= res.budget_seconds;
  return res;
}

std::vector<AcceptanceResult> run_acceptance(const AcceptanceOptions& options) {
  std::vector<AcceptanceResult> out;
  for (int id = 1; id <= kAcceptanceCriteria; ++id) out.push_back(run_criterion(id, options));
  return out;
}

std::string format_acceptance_line(const AcceptanceResult& r, bool with_timing) {
  std::ostringstream os;
  os << "criterion " << (r.id < 10 ? " " : "") << r.id << " " << (r.passed() ? "PASS" : "FAIL") << "  " << r.name
     << ": " << r.detail;
  if (!r.within_budget) os << " [over budget " << fmt(r.budget_seconds) << " s]";
  if (with_timing) os << " (" << fmt(r.seconds) << " s / " << fmt(r.budget_seconds) << " s)";
  return os.str();
}

}  // namespace spherelab
