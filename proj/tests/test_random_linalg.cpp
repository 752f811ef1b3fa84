#include <doctest.h>

#include <cmath>

#include "spherelab/error.hpp"
#include "spherelab/linalg.hpp"
#include "spherelab/random.hpp"

using namespace spherelab;

TEST_SUITE("random") {
  TEST_CASE("same seed and stream reproduce the sequence") {
    RandomStream a(42, 3), b(42, 3);
    for (int i = 0; i < 100; ++i) CHECK(a.normal() == b.normal());
    CHECK(a.chi_squared(5.0) == b.chi_squared(5.0));
  }

  TEST_CASE("distinct streams and substreams differ") {
    RandomStream a(42, 0), b(42, 1);
    CHECK(a.uniform() != b.uniform());
    const RandomStream p(7);
    RandomStream c0 = p.substream(0), c1 = p.substream(1), c0b = p.substream(0);
    const double x = c0.normal();
    CHECK(x == c0b.normal());
    CHECK(x != c1.normal());
  }

  TEST_CASE("chi-squared mean matches degrees of freedom") {
    RandomStream rng(5);
    double sum = 0.0;
    const int m = 200000;
    for (int i = 0; i < m; ++i) sum += rng.chi_squared(7.0);
    // sd of the mean is sqrt(14/m)
    CHECK(std::abs(sum / m - 7.0) < 4.0 * std::sqrt(14.0 / m));
  }
}

TEST_SUITE("linalg") {
  TEST_CASE("pivoted Cholesky reproduces a full-rank matrix") {
    Eigen::Matrix3d m;
    m << 1, 0.2, 0.2, 0.2, 1, 0.6, 0.2, 0.6, 1;
    const PivotedFactor f = pivoted_cholesky(m);
    CHECK(f.rank == 3);
    CHECK((f.factor * f.factor.transpose() - m).cwiseAbs().maxCoeff() < 1e-14);
  }

  TEST_CASE("rank detection on a singular matrix") {
    // simplex with r = -1/2 in three points lies in a plane
    Eigen::Matrix3d m;
    m << 1, -0.5, -0.5, -0.5, 1, -0.5, -0.5, -0.5, 1;
    const PivotedFactor f = pivoted_cholesky(m);
    CHECK(f.rank == 2);
    CHECK(f.residual < 1e-12);
  }

  TEST_CASE("indefinite matrices are rejected") {
    Eigen::Matrix2d m;
    m << 1, 2, 2, 1;
    CHECK_THROWS_AS(pivoted_cholesky(m), NumericalError);
  }

  TEST_CASE("minimum eigenvalue") {
    Eigen::Matrix2d m;
    m << 2, 1, 1, 2;
    CHECK(std::abs(min_eigenvalue(m) - 1.0) < 1e-14);
  }
}
