#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "spherelab/error.hpp"
#include "spherelab/sphere.hpp"
#include "spherelab/stats.hpp"

using namespace spherelab;

namespace {

Eigen::MatrixXd matrix(std::initializer_list<std::initializer_list<double>> rows) {
  Eigen::MatrixXd m(rows.size(), rows.begin()->size());
  int i = 0;
  for (const auto& row : rows) {
    int j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

}  // namespace

TEST_SUITE("sphere_core") {
  TEST_CASE("unit vectors validate norm and dimension") {
    CHECK_THROWS_AS(UnitVector(Eigen::Vector2d(1.0, 0.0)), InvalidArgument);
    CHECK_THROWS_AS(UnitVector(Eigen::Vector3d(1.0, 1.0, 0.0)), InvalidArgument);
    CHECK_NOTHROW(UnitVector(Eigen::Vector3d(0.6, 0.8, 0.0)));
    CHECK_THROWS_AS(UnitVector::normalized(Eigen::Vector3d::Zero()), InvalidArgument);
    const UnitVector v = UnitVector::normalized(Eigen::Vector3d(3.0, 0.0, 4.0));
    CHECK(std::abs(v[2] - 0.8) < 1e-15);
    CHECK((-v)[0] == -v[0]);
  }

  TEST_CASE("uniform sampling is deterministic per stream") {
    RandomStream a(11), b(11);
    const UnitVector x = sample_uniform(3, a), y = sample_uniform(3, b);
    CHECK(x.coords() == y.coords());
    CHECK_THROWS_AS(sample_uniform(2, a), InvalidArgument);
  }

  TEST_CASE("uniform sampling moments at n = 10") {
    RandomStream rng(12);
    MeanAccumulator first, second;
    double worst_norm = 0.0;
    for (int i = 0; i < 1000000; ++i) {
      const UnitVector x = sample_uniform(10, rng);
      first.add(x[0]);
      second.add(x[0] * x[0]);
      worst_norm = std::max(worst_norm, std::abs(x.coords().norm() - 1.0));
    }
    CHECK(std::abs(first.mean) < 4.0 * first.std_error());
    CHECK(std::abs(second.mean - 0.1) < 4.0 * second.std_error());
    CHECK(worst_norm < 1e-12);
  }

  TEST_CASE("subsphere samples have the prescribed inner product") {
    RandomStream rng(13);
    for (int n : {3, 10, 200}) {
      const UnitVector x = sample_uniform(n, rng);
      for (double r : {0.0, 0.5, -0.9}) {
        const UnitVector y = sample_subsphere(x, r, rng);
        CHECK(std::abs(x.dot(y) - r) < 1e-12);
        CHECK(std::abs(y.coords().norm() - 1.0) < 1e-12);
      }
    }
    const UnitVector x = UnitVector::basis(5, 0);
    CHECK_THROWS_AS(sample_subsphere(x, 1.0, rng), InvalidArgument);
    CHECK_THROWS_AS(sample_subsphere(x, -1.5, rng), InvalidArgument);
  }

  TEST_CASE("subsphere coordinate law matches a lower-dimensional sphere") {
    constexpr int n = 8;
    constexpr double r = 0.4;
    RandomStream rng(14), ref(15);
    const UnitVector x = UnitVector::basis(n, 0);
    const UnitVector w = UnitVector::basis(n, 3);
    std::vector<double> a, b;
    for (int i = 0; i < 20000; ++i) {
      a.push_back(sample_subsphere(x, r, rng).dot(w));
      b.push_back(std::sqrt(1.0 - r * r) * sample_uniform(n - 1, ref)[0]);
    }
    CHECK(ks_two_sample_accepts(a, b, 0.01));
    // a wrong scale is detected
    std::vector<double> c;
    for (double v : b) c.push_back(v / std::sqrt(1.0 - r * r));
    CHECK_FALSE(ks_two_sample_accepts(a, c, 0.01));
  }

  TEST_CASE("Gram spec validation") {
    CHECK_NOTHROW(GramSpec(matrix({{1, 0.5}, {0.5, 1}})));
    CHECK_THROWS_AS(GramSpec(matrix({{1, 0.5}, {0.4, 1}})), InvalidArgument);
    CHECK_THROWS_AS(GramSpec(matrix({{1, 0.5}, {0.5, 0.9}})), InvalidArgument);
    CHECK_THROWS_AS(GramSpec(matrix({{1, 1.0}, {1.0, 1}})), InvalidArgument);
    CHECK_THROWS_AS(GramSpec(matrix({{1, 0.5, 0.5}, {0.5, 1, 0.5}})), InvalidArgument);
    CHECK_THROWS_AS(GramSpec(matrix({{1, 0.9, -0.9}, {0.9, 1, 0.9}, {-0.9, 0.9, 1}})), InvalidConfiguration);
  }

  TEST_CASE("Haar frames are orthonormal") {
    RandomStream rng(16);
    const Eigen::MatrixXd q = haar_frame(12, 4, rng);
    CHECK((q.transpose() * q - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK_THROWS_AS(haar_frame(3, 4, rng), InvalidArgument);
  }

  TEST_CASE("Haar frame columns are uniform") {
    constexpr int n = 6;
    RandomStream rng(17), ref(18);
    std::vector<double> a, b;
    for (int i = 0; i < 20000; ++i) {
      a.push_back(haar_frame(n, 3, rng)(0, 2));
      b.push_back(sample_uniform(n, ref)[0]);
    }
    CHECK(ks_two_sample_accepts(a, b, 0.01));
  }

  TEST_CASE("configuration sampling reproduces the Gram matrix") {
    RandomStream rng(19);
    const GramSpec identity(Eigen::MatrixXd::Identity(4, 4));
    const GramSpec simplex(matrix({{1, 0.5, 0.5}, {0.5, 1, 0.5}, {0.5, 0.5, 1}}));
    const GramSpec band(matrix({{1, .2, .2}, {.2, 1, .6}, {.2, .6, 1}}));
    const GramSpec degenerate(matrix({{1, -0.5, -0.5}, {-0.5, 1, -0.5}, {-0.5, -0.5, 1}}));
    double worst = 0.0;
    for (const GramSpec* g : {&identity, &simplex, &band, &degenerate}) {
      const ConfigurationSampler sampler(20, *g);
      for (int i = 0; i < 2000; ++i) {
        const auto pts = sampler(rng);
        worst = std::max(worst, (gram_of(pts) - g->entries()).cwiseAbs().maxCoeff());
        for (const auto& p : pts) CHECK(std::abs(p.coords().norm() - 1.0) < 1e-12);
      }
    }
    CHECK(worst <= 1e-10);
    CHECK_THROWS_AS(ConfigurationSampler(3, identity), InvalidArgument);
  }

  TEST_CASE("Gram matrix is invariant under rotations and index permutations") {
    RandomStream rng(20);
    const GramSpec simplex(matrix({{1, 0.3, 0.3}, {0.3, 1, 0.3}, {0.3, 0.3, 1}}));
    const auto pts = sample_configuration(9, simplex, rng);
    const Eigen::MatrixXd rot = haar_frame(9, 9, rng);
    std::vector<UnitVector> rotated;
    for (const auto& p : pts) rotated.push_back(UnitVector::normalized(rot * p.coords()));
    CHECK((gram_of(rotated) - gram_of(pts)).cwiseAbs().maxCoeff() < 1e-14);
    const std::vector<UnitVector> permuted = {pts[2], pts[0], pts[1]};
    const Eigen::MatrixXd g = gram_of(pts), gp = gram_of(permuted);
    const int perm[3] = {2, 0, 1};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) CHECK(gp(i, j) == g(perm[i], perm[j]));
  }

  TEST_CASE("projection to the link") {
    // c = 0: an orthogonal vector projects to itself
    const UnitVector x1 = UnitVector::basis(4, 0);
    const UnitVector xi = UnitVector::basis(4, 1);
    CHECK((project_to_link(x1, xi, 0.0).coords() - xi.coords()).norm() < 1e-15);

    RandomStream rng(21);
    for (auto [c, r] : {std::pair{0.3, 0.5}, {-0.4, 0.1}, {0.5, 0.5}, {0.7, 0.1}}) {
      const GramSpec g(matrix({{1, c, c}, {c, 1, r}, {c, r, 1}}));
      const auto pts = sample_configuration(30, g, rng);
      const UnitVector y2 = project_to_link(pts[0], pts[1], c);
      const UnitVector y3 = project_to_link(pts[0], pts[2], c);
      CHECK(std::abs(y2.dot(pts[0])) < 1e-10);
      CHECK(std::abs(y2.dot(y3) - (r - c * c) / (1 - c * c)) < 1e-10);
    }
    CHECK_THROWS_AS(project_to_link(x1, xi, 1.0), InvalidArgument);
    CHECK_THROWS_AS(project_to_link(x1, xi, 0.5), InvalidArgument);
    CHECK_THROWS_AS(project_to_link(x1, UnitVector::basis(5, 1), 0.0), InvalidArgument);
  }
}
