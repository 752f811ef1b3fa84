#include <doctest.h>

#include <cmath>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "spherelab/error.hpp"
#include "spherelab/projected.hpp"
#include "spherelab/regions.hpp"
#include "spherelab/stats.hpp"

using namespace spherelab;

namespace {

UnitVector e(int n, int i) { return UnitVector::basis(n, i); }

double latitude_measure_oracle(int n, double t0) {
  boost::math::quadrature::tanh_sinh<double> q;
  auto density = [n](double s) { return std::pow(1.0 - s * s, 0.5 * (n - 3)); };
  return q.integrate(density, t0, 1.0) / q.integrate(density, -1.0, 1.0);
}

double analytic(const Region& a, int n) { return measure(a, n, MeasureMethod::analytic).value; }

}  // namespace

TEST_SUITE("regions") {
  TEST_CASE("membership") {
    const int n = 5;
    const UnitVector v = e(n, 0);
    CHECK(Region::full().contains(v));
    CHECK_FALSE(Region::empty().contains(v));
    const Region cap = Region::cap(v, 0.0);
    CHECK(cap.contains(v));
    CHECK_FALSE(cap.contains(-v));
    CHECK(cap.contains(e(n, 1)));  // boundary kept
    RandomStream rng(50);
    const Region c2 = Region::cap(v, 0.3);
    for (int i = 0; i < 200; ++i) {
      const UnitVector x = sample_uniform(n, rng);
      CHECK(Region::antipode(c2).contains(x) == c2.contains(-x));
      CHECK(Region::antipode(Region::antipode(c2)).contains(x) == c2.contains(x));
      CHECK(Region::complement(c2).contains(x) != c2.contains(x));
    }
    CHECK_THROWS_AS(cap.contains(e(6, 0)), InvalidArgument);
    CHECK_THROWS_AS(Region::band(v, 0.5, 0.2), InvalidArgument);
    CHECK_THROWS_AS(Region::union_of({Region::cap(e(4, 0), 0.1), Region::cap(e(5, 0), 0.1)}), InvalidArgument);
  }

  TEST_CASE("cap measure") {
    CHECK(std::abs(cap_measure(9, 0.0) - 0.5) < 1e-15);
    CHECK(cap_measure(9, 1.0) == 0.0);
    CHECK(cap_measure(9, -1.0) == 1.0);
    CHECK(std::abs(cap_measure(3, 0.5) - 0.25) < 1e-15);
    // high-precision latitude integrals
    CHECK(std::abs(cap_measure(50, 0.1) - 0.24252871563771340292) < 1e-12);
    CHECK(std::abs(cap_measure(10, -0.3) - 0.81495843885896606594) < 1e-12);
    CHECK(std::abs(cap_measure(300, 0.03) - 0.30207856842084002728) < 1e-12);
    double prev = 1.0;
    for (double t = -0.6; t <= 0.6; t += 0.01) {
      const double m = cap_measure(40, t);
      CHECK(m < prev);
      prev = m;
    }
    CHECK_THROWS_AS(cap_measure(2, 0.0), InvalidArgument);
    CHECK_THROWS_AS(cap_measure(5, 1.2), InvalidArgument);
  }

  TEST_CASE("cap measure agrees with latitude quadrature") {
    for (int n : {4, 17, 120})
      for (double t : {-0.6, 0.05, 0.4}) {
        const double q = latitude_measure_oracle(n, t);
        CHECK(std::abs(cap_measure(n, t) - q) < 1e-10);
      }
  }

  TEST_CASE("threshold inversion") {
    CHECK(std::abs(find_threshold_for_measure(20, 0.5)) < 1e-10);
    CHECK(std::abs(find_threshold_for_measure(3, 0.25) - 0.5) < 1e-10);
    for (int n : {10, 300, 5000}) CHECK(std::abs(cap_measure(n, find_threshold_for_measure(n, 0.3)) - 0.3) < 1e-10);
    CHECK_THROWS_AS(find_threshold_for_measure(10, 1.5), InvalidArgument);
  }

  TEST_CASE("analytic measures of latitude sets") {
    const int n = 12;
    const UnitVector v = e(n, 0);
    const Region cap = Region::cap(v, 0.2);
    CHECK(std::abs(analytic(Region::union_of({cap, Region::antipode(cap)}), n) - 2.0 * cap_measure(n, 0.2)) < 1e-12);
    CHECK(std::abs(measure(Region::band(e(3, 0), -0.4, 0.4), 3, MeasureMethod::analytic).value - 0.4) < 1e-12);
    CHECK(std::abs(analytic(Region::antipode(cap), n) - analytic(cap, n)) < 1e-12);
    CHECK(analytic(Region::full(), n) == 1.0);
    CHECK(analytic(Region::empty(), n) == 0.0);
    const Region mixed = Region::intersection_of({Region::complement(Region::cap(v, 0.5)), Region::cap(-v, -0.1)});
    CHECK(std::abs(analytic(mixed, n) + analytic(Region::complement(mixed), n) - 1.0) < 1e-12);
    // same axis with opposite sign is still a single-axis region
    const Region opposite = Region::cap(-v, 0.3);
    CHECK(std::abs(analytic(opposite, n) - cap_measure(n, 0.3)) < 1e-12);
    const Region two_axes = Region::intersection_of({cap, Region::cap(e(n, 1), 0.0)});
    CHECK_FALSE(is_single_axis(two_axes));
    CHECK_THROWS_AS(measure(two_axes, n, MeasureMethod::analytic), InvalidArgument);
    CHECK(measure_auto(two_axes, n, {20000, 1}).method == MeasureMethod::monte_carlo);
  }

  TEST_CASE("Monte Carlo measure agrees with the analytic value") {
    const int n = 50;
    const Region cap = Region::cap(e(n, 0), 0.1);
    for (SamplerKind kind : {SamplerKind::reduced, SamplerKind::direct}) {
      MonteCarloOptions o;
      o.samples = kind == SamplerKind::reduced ? 1000000 : 100000;
      o.seed = 51;
      o.sampler = kind;
      const MeasureResult m = measure(cap, n, MeasureMethod::monte_carlo, o);
      const double se = std::sqrt(m.value * (1 - m.value) / static_cast<double>(m.samples));
      CHECK(std::abs(m.value - cap_measure(n, 0.1)) < 4.0 * se);
      CHECK(m.std_error > 0.0);
    }
  }

  TEST_CASE("Monte Carlo on a randomized region suite") {
    RandomStream rng(52);
    const int n = 20;
    for (int trial = 0; trial < 6; ++trial) {
      const UnitVector v = sample_uniform(n, rng);
      const double a = 2.0 * rng.uniform() - 1.0, b = 2.0 * rng.uniform() - 1.0;
      const Region r = Region::union_of(
          {Region::band(v, std::min(a, b), std::max(a, b)), Region::antipode(Region::cap(v, 0.6 * rng.uniform()))});
      MonteCarloOptions o{200000, static_cast<std::uint64_t>(100 + trial)};
      const MeasureResult m = measure(r, n, MeasureMethod::monte_carlo, o);
      const double exact = analytic(r, n);
      const double se = std::sqrt(std::max(exact * (1 - exact), 1e-12) / 200000.0);
      CHECK(std::abs(m.value - exact) < 4.0 * se + 1e-12);
    }
    // complement sums to one within the Monte Carlo intervals
    const Region two = Region::intersection_of({Region::cap(e(n, 0), 0.0), Region::cap(e(n, 1), 0.1)});
    const MeasureResult m1 = measure(two, n, MeasureMethod::monte_carlo, {200000, 7});
    const MeasureResult m2 = measure(Region::complement(two), n, MeasureMethod::monte_carlo, {200000, 8});
    CHECK(std::abs(m1.value + m2.value - 1.0) < m1.std_error + m2.std_error);
  }

  TEST_CASE("JSON round trip is bit exact") {
    const int n = 6;
    RandomStream rng(53);
    const UnitVector v = sample_uniform(n, rng);
    const Region r = Region::union_of({Region::cap(v, 0.123456789012345678),
                                       Region::intersection_of({Region::band(e(n, 2), -0.3, 0.7),
                                                                Region::complement(Region::antipode(Region::cap(v, 0.1)))})});
    const nlohmann::json doc = region_to_json(r);
    const Region back = region_from_json(nlohmann::json::parse(doc.dump()));
    CHECK(region_to_json(back) == doc);
    CHECK(back.children()[0].axis().coords() == v.coords());
    CHECK(back.children()[0].lower() == 0.123456789012345678);
    CHECK_THROWS_AS(region_from_json(nlohmann::json{{"type", "blob"}}), InvalidArgument);
    CHECK_THROWS_AS(region_from_json(nlohmann::json{{"type", "cap"}, {"axis", {1.0, 1.0, 0.0}}, {"t0", 0.1}}),
                    InvalidArgument);
  }
}

TEST_SUITE("projected") {
  TEST_CASE("reduced and direct tuple samplers agree in distribution") {
    const int n = 15;
    AxisFrame frame(n);
    RandomStream axes(60);
    const UnitVector u = sample_uniform(n, axes), w = sample_uniform(n, axes);
    frame.add(u);
    frame.add(w);
    Eigen::Matrix3d g;
    g << 1, 0.3, -0.2, 0.3, 1, 0.5, -0.2, 0.5, 1;
    const ProjectedTupleSampler reduced(frame, GramSpec(g), SamplerKind::reduced);
    const ProjectedTupleSampler direct(frame, GramSpec(g), SamplerKind::direct);
    RandomStream ra(61), rb(62);
    std::vector<double> a01, b01, a21, b21;
    Eigen::MatrixXd d;
    for (int i = 0; i < 20000; ++i) {
      reduced.draw(ra, d);
      a01.push_back(d(0, 1));
      a21.push_back(d(2, 0) + d(1, 1));
      direct.draw(rb, d);
      b01.push_back(d(0, 1));
      b21.push_back(d(2, 0) + d(1, 1));
    }
    CHECK(ks_two_sample_accepts(a01, b01));
    CHECK(ks_two_sample_accepts(a21, b21));
  }

  TEST_CASE("reduced link sampler matches the direct link sampler") {
    const int n = 12;
    AxisFrame frame(n);
    frame.add(e(n, 0));
    frame.add(UnitVector::normalized(Eigen::VectorXd::Ones(n)));
    const ProjectedLinkSampler reduced(frame, 0.4, SamplerKind::reduced);
    const ProjectedLinkSampler direct(frame, 0.4, SamplerKind::direct);
    RandomStream ra(63), rb(64);
    std::vector<double> a, b, ca, cb;
    double dots[2];
    for (int i = 0; i < 5000; ++i) {
      const LinkCenter x = reduced.draw_center(ra);
      const LinkCenter y = direct.draw_center(rb);
      ca.push_back(x.dots(1));
      cb.push_back(y.dots(1));
      for (int j = 0; j < 4; ++j) {
        reduced.draw_link(x, ra, dots);
        a.push_back(dots[0] - 0.5 * dots[1]);
        direct.draw_link(y, rb, dots);
        b.push_back(dots[0] - 0.5 * dots[1]);
      }
    }
    CHECK(ks_two_sample_accepts(ca, cb));
    CHECK(ks_two_sample_accepts(a, b));
  }

  TEST_CASE("reduced sampler dimension guard") {
    AxisFrame frame(4);
    for (int i = 0; i < 3; ++i) frame.add(e(4, i));
    CHECK_THROWS_AS(ProjectedTupleSampler(frame, GramSpec(Eigen::MatrixXd::Identity(2, 2)), SamplerKind::reduced),
                    InvalidArgument);
    CHECK_NOTHROW(ProjectedTupleSampler(frame, GramSpec(Eigen::MatrixXd::Identity(2, 2)), SamplerKind::direct));
  }
}
