#include <doctest.h>

#include <cmath>

#include "spherelab/error.hpp"
#include "spherelab/harness.hpp"

using namespace spherelab;

namespace {

ExperimentOptions opts(std::uint64_t samples, std::uint64_t seed, std::uint64_t inner = 1000) {
  ExperimentOptions o;
  o.samples = samples;
  o.seed = seed;
  o.subsphere_samples = inner;
  return o;
}

void check_bounds_recompute(const ExperimentReport& rep) {
  for (const auto& b : rep.bounds) {
    CHECK(!b.formula.empty());
    CHECK(evaluate_bound(b.id, nlohmann::json::parse(nlohmann::json(b.params).dump())) == b.value);
  }
}

double z_between(const ProportionEstimate& a, const ProportionEstimate& b) {
  return std::abs(a.value - b.value) / std::hypot(a.std_error, b.std_error);
}

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("pairwise density trivial regions") {
    const ExperimentReport full = pairwise_density(Region::full(), Region::full(), 0.3, 50, opts(2000, 1));
    CHECK(full.estimate.value == 1.0);
    CHECK(full.bound("pair_density_main_term")->value == 1.0);
    CHECK_FALSE(full.assertable_failure());
    const ExperimentReport empty = pairwise_density(Region::empty(), Region::full(), 0.3, 50, opts(2000, 1));
    CHECK(empty.estimate.value == 0.0);
    CHECK(empty.bound("pair_density_main_term")->value == 0.0);
    CHECK(empty.estimate.interval_method == "clopper_pearson_upper");
    check_bounds_recompute(full);
  }

  TEST_CASE("orthogonal pairs in a cap of measure 0.3") {
    const Region a = cap_with_measure(300, 0.3);
    const ExperimentReport rep = pairwise_density(a, a, 0.0, 300, opts(1000000, 2));
    const Criterion* c = rep.criterion("orthogonal_pair_0.9");
    REQUIRE(c != nullptr);
    CHECK(c->assertable);
    CHECK(c->passed);
    CHECK(rep.estimate.ci.low >= 0.081);
    CHECK(std::abs(rep.bound("orthogonal_pair_0.9")->value - 0.081) < 1e-15);
    CHECK_FALSE(rep.criterion("pair_density_main_term")->assertable);
    check_bounds_recompute(rep);
  }

  TEST_CASE("main term is asserted at large n for r != 0") {
    const Region a = cap_with_measure(200, 0.3);
    const ExperimentReport rep = pairwise_density(a, a, 0.4, 200, opts(200000, 3));
    CHECK(rep.criterion("pair_density_main_term")->assertable);
    CHECK(rep.criterion("pair_density_main_term")->passed);
    CHECK(rep.estimate.value > rep.bound("pair_density_main_term")->value);
  }

  TEST_CASE("pairwise and two-point containment agree") {
    const int n = 120;
    const Region a = cap_with_measure(n, 0.35);
    const ExperimentReport pair = pairwise_density(a, a, 0.0, n, opts(300000, 4));
    const ExperimentReport tuple = tuple_containment(a, InductiveConfiguration{{0.0}}, n, opts(300000, 5));
    CHECK(z_between(pair.estimate, tuple.estimate) < 4.0);
  }

  TEST_CASE("good set mass") {
    const ExperimentReport full = good_set_mass(Region::full(), 0.3, 40, opts(1000, 6, 100));
    CHECK(full.estimate.value == 1.0);

    const ExperimentReport thr = good_set_mass(cap_with_measure(60, 0.3), 0.3, 60, opts(1000, 7, 100));
    CHECK(std::abs(thr.details["threshold"].get<double>() - 0.5 * std::pow(0.3, 1.3 / 0.7)) < 1e-12);
    CHECK_FALSE(thr.criterion("good_set_mass_main_term")->assertable);
    check_bounds_recompute(thr);

    const ExperimentReport conc = good_set_mass(cap_with_measure(500, 0.3), 0.0, 500, opts(2000, 8, 2000));
    CHECK(conc.details["good_fraction_of_a"]["value"].get<double>() >= 1.0 - 1e-3);

    CHECK_THROWS_AS(good_set_mass(Region::full(), 0.3, 40, opts(1000, 6, 10)), InvalidArgument);
    CHECK_THROWS_AS(good_set_mass(Region::full(), 0.3, 40, opts(10, 6, 100)), InvalidArgument);
    CHECK_THROWS_AS(good_set_mass(Region::full(), 1.0, 40, opts(1000, 6, 100)), InvalidArgument);
  }

  TEST_CASE("orthogonal concentration") {
    const ExperimentReport full = orthogonal_concentration(Region::full(), 30, opts(1000, 9, 100));
    CHECK(full.estimate.value == 0.0);
    CHECK(full.details["mean_ratio"].get<double>() == 1.0);

    const ExperimentReport hemi =
        orthogonal_concentration(Region::cap(UnitVector::basis(500, 0), 0.0), 500, opts(2000, 10, 5000));
    CHECK(hemi.estimate.value < 0.01);

    const TrendReport trend = orthogonal_concentration_trend([](int n) { return cap_with_measure(n, 0.3); },
                                                             {100, 200, 400, 800}, opts(1000, 11, 10000));
    CHECK(trend.reports.size() == 4);
    CHECK(trend.nonincreasing_within_ci);
    CHECK_THROWS_AS(orthogonal_concentration(Region::empty(), 30, opts(1000, 9, 100)), InvalidArgument);
  }

  TEST_CASE("tuple containment") {
    const ExperimentReport full =
        tuple_containment(Region::full(), InductiveConfiguration::simplex(4, 0.2), 30, opts(1000, 12));
    CHECK(full.estimate.value == 1.0);
    CHECK_THROWS_AS(tuple_containment(Region::full(), InductiveConfiguration::simplex(3, -0.5), 30, opts(1000, 12)),
                    InvalidConfiguration);
    try {
      tuple_containment(Region::full(), InductiveConfiguration::simplex(3, -0.5), 30, opts(1000, 12));
    } catch (const InvalidConfiguration& e) {
      CHECK(std::string(e.what()).find("diameter") != std::string::npos);
    }
  }

  TEST_CASE("orthogonal triples against the product heuristic") {
    const int n = 400;
    const Region a = cap_with_measure(n, 0.4);
    const ExperimentReport triple = tuple_containment(a, InductiveConfiguration::simplex(3, 0.0), n, opts(1000000, 13));
    const ExperimentReport pair = pairwise_density(a, a, 0.0, n, opts(1000000, 14));
    const double sigma = 0.4;
    const double calibration = pair.estimate.value / (sigma * sigma);
    const double heuristic = std::pow(sigma, 3) * std::pow(calibration, 3);
    const double ratio = triple.estimate.value / heuristic;
    CHECK(ratio >= 0.5);
    CHECK(ratio <= 1.5);
    CHECK(triple.bound("orthogonal_simplex_sigma_pow_k") != nullptr);
    CHECK(std::abs(triple.bound("inductive_sigma_pow_C")->value - std::pow(sigma, 4)) < 1e-12);
    check_bounds_recompute(triple);
  }

  TEST_CASE("reverse hypercontractivity") {
    const ExperimentReport full = reverse_hc_check(Region::full(), Region::full(), 0.3, 40, opts(1000, 15));
    CHECK(full.details["margin"].get<double>() == 0.0);

    const int n = 150;
    const Region f = cap_with_measure(n, 0.25);
    const Region g = Region::cap(UnitVector::basis(n, 1), find_threshold_for_measure(n, 0.4));
    const ExperimentReport neg = reverse_hc_check(f, g, -0.3, n, opts(300000, 16));
    const ExperimentReport pos = reverse_hc_check(f, Region::antipode(g), 0.3, n, opts(300000, 17));
    CHECK(z_between(neg.estimate, pos.estimate) < 4.0);
    CHECK(std::abs(neg.bounds.front().value - pos.bounds.front().value) < 1e-12);
    check_bounds_recompute(neg);

    const RegionFamily cap = [](int m) { return cap_with_measure(m, 0.2); };
    const TrendReport t = reverse_hc_trend(cap, cap, 0.3, {100, 200, 400}, opts(200000, 18));
    CHECK(t.nonincreasing_within_ci);
    for (const auto& r : t.reports) CHECK(r.details["margin"].get<double>() >= -5.0 * r.estimate.std_error);
  }

  TEST_CASE("Ramsey coloring") {
    const InductiveConfiguration pairs{{0.0}};
    const ExperimentReport one = ramsey_coloring_demo({Region::full()}, pairs, 20, opts(1000, 19));
    CHECK(one.details["per_color"][0]["value"].get<double>() == 1.0);

    const int n = 200;
    const UnitVector v = UnitVector::basis(n, 0);
    const Region north = Region::cap(v, 0.0);
    const Region south = Region::complement(north);
    const ExperimentReport two = ramsey_coloring_demo({north, south}, pairs, n, opts(200000, 20));
    const ExperimentReport ref = pairwise_density(north, north, 0.0, n, opts(200000, 21));
    const auto& c0 = two.details["per_color"][0];
    const double se0 = std::sqrt(c0["value"].get<double>() * (1 - c0["value"].get<double>()) / 200000.0);
    CHECK(std::abs(c0["value"].get<double>() - ref.estimate.value) < 4.0 * std::hypot(se0, ref.estimate.std_error));

    const int m = 300;
    const UnitVector w = UnitVector::basis(m, 0);
    const Region top = Region::cap(w, 0.05);
    const Region upper = Region::intersection_of({Region::cap(w, 0.0), Region::complement(top)});
    const Region lower = Region::intersection_of({Region::cap(w, -0.05), Region::complement(Region::cap(w, 0.0))});
    const Region bottom = Region::complement(Region::cap(w, -0.05));
    ExperimentOptions big = opts(1000000, 22);
    const ExperimentReport bands =
        ramsey_coloring_demo({top, upper, lower, bottom}, InductiveConfiguration::simplex(3, 0.1), m, big);
    const Criterion* c = bands.criterion("monochromatic_tuple_observed");
    CHECK(c->assertable);
    CHECK(c->passed);

    CHECK_THROWS_AS(ramsey_coloring_demo({north, north}, pairs, n, opts(1000, 23)), InvalidArgument);
    CHECK_THROWS_AS(ramsey_coloring_demo({north}, pairs, n, opts(1000, 23)), InvalidArgument);
  }

  TEST_CASE("mixed sign tuples") {
    const int n = 100;
    const Region a = cap_with_measure(n, 0.3);
    const ExperimentReport same = mixed_sign_containment(a, 0.2, 3, 3, n, opts(200000, 24));
    const ExperimentReport tuple = tuple_containment(a, InductiveConfiguration::simplex(3, 0.2), n, opts(200000, 25));
    CHECK(z_between(same.estimate, tuple.estimate) < 4.0);
    const ExperimentReport mixed = mixed_sign_containment(a, 0.2, 3, 1, n, opts(200000, 26));
    CHECK(mixed.bounds.empty());
    CHECK(mixed.criteria.empty());
    CHECK(mixed.estimate.value < same.estimate.value);
    CHECK_THROWS_AS(mixed_sign_containment(a, 0.2, 3, 4, n, opts(1000, 1)), InvalidArgument);
  }

  TEST_CASE("bound registry") {
    CHECK(evaluate_bound("pair_density_main_term", {{"sigma_a", 0.5}, {"sigma_b", 0.5}, {"r", -0.5}}) == 0.0625);
    CHECK(evaluate_bound("inductive_sigma_pow_C", {{"sigma", 0.5}, {"r_values", {0.5, 0.5}}}) == std::pow(0.5, 13.0));
    CHECK_THROWS_AS(evaluate_bound("nope", {}), InvalidArgument);
    CHECK_THROWS_AS(evaluate_bound("orthogonal_pair_0.9", {{"sigma_a", 0.5}}), InvalidArgument);
  }

  TEST_CASE("reports reproduce at a fixed seed") {
    const Region a = cap_with_measure(80, 0.3);
    const auto x = report_to_json(pairwise_density(a, a, 0.2, 80, opts(50000, 27)));
    const auto y = report_to_json(pairwise_density(a, a, 0.2, 80, opts(50000, 27)));
    CHECK(x.dump() == y.dump());
    ExperimentOptions many = opts(50000, 27);
    many.workers = 3;
    CHECK(report_to_json(pairwise_density(a, a, 0.2, 80, many)).dump() == x.dump());
    const auto z = report_to_json(pairwise_density(a, a, 0.2, 80, opts(50000, 28)));
    CHECK(z.dump() != x.dump());
  }

  TEST_CASE("spec parsing and CSV rows") {
    const nlohmann::json doc = nlohmann::json::parse(R"({
      "experiment": "reverse_hc", "n": [60, 120], "r": 0.3,
      "region": {"type": "cap", "measure": 0.2},
      "region_b": {"type": "antipode", "child": {"type": "cap", "axis": 2, "measure": 0.4}},
      "samples": 5000, "seed": 9})");
    const ExperimentSpec spec = parse_experiment_spec(doc);
    CHECK(spec.dimensions == std::vector<int>{60, 120});
    const Region g = resolve_region(spec.region_b, 60);
    CHECK(g.kind() == Region::Kind::antipode);
    CHECK(g.children()[0].axis()[2] == 1.0);
    CHECK(std::abs(cap_measure(60, g.children()[0].lower()) - 0.4) < 1e-10);
    const ExperimentRun run = run_experiment(spec);
    CHECK(run.reports.size() == 2);
    CHECK(run.nonincreasing_within_ci.has_value());
    const nlohmann::json out = run_to_json(spec, run);
    CHECK(out["reports"].size() == 2);
    CHECK(parse_experiment_spec(out["spec"]).dimensions == spec.dimensions);
    const std::string header = report_csv_header();
    CHECK(header.rfind("# schema=1\n", 0) == 0);
    const std::string row = report_csv_row(run.reports[0]);
    CHECK(std::count(row.begin(), row.end(), ',') == std::count(header.begin(), header.end(), ','));

    auto bad = [&](const char* text) { return parse_experiment_spec(nlohmann::json::parse(text)); };
    CHECK_THROWS_AS(bad(R"({"experiment":"nope","n":10})"), InvalidArgument);
    CHECK_THROWS_AS(bad(R"({"experiment":"pairwise_density","n":10})"), InvalidArgument);
    CHECK_THROWS_AS(bad(R"({"experiment":"pairwise_density","n":10,"region":{"type":"cap","t0":0},"samples":10})"),
                    InvalidArgument);
    CHECK_THROWS_AS(bad(R"({"experiment":"pairwise_density","n":2,"region":{"type":"cap","t0":0}})"), InvalidArgument);
    CHECK_THROWS_AS(bad(R"({"experiment":"pairwise_density","n":10,"region":{"type":"cap","axis":[1,0,0],"t0":0}})"),
                    InvalidArgument);
    CHECK_THROWS_AS(bad(R"({"experiment":"tuple_containment","n":10,"region":{"type":"cap","t0":0}})"),
                    InvalidArgument);
  }
}
