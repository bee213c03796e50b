#include <random>

#include "doctest.h"
#include "wishart/errors.hpp"
#include "wishart/linalg.hpp"

using namespace wishart;
using namespace wishart::linalg;

TEST_CASE("determinant of small matrices") {
  Matrix<double> a(2, 2);
  a(0, 0) = 1.0; a(0, 1) = 2.0;
  a(1, 0) = 3.0; a(1, 1) = 4.0;
  CHECK(determinant(a).value() == doctest::Approx(-2.0));

  Matrix<double> sing(2, 2);
  sing(0, 0) = 1.0; sing(0, 1) = 2.0;
  sing(1, 0) = 2.0; sing(1, 1) = 4.0;
  CHECK(determinant(sing).value() == 0.0);
  CHECK_THROWS_AS(determinant(Matrix<double>(2, 3)), InvalidArgument);
}

TEST_CASE("scaled determinant survives extreme pivots") {
  Matrix<double> a(40, 40);
  for (std::size_t i = 0; i < 40; ++i) a(i, i) = 1e20;
  auto d = determinant(a);
  CHECK(std::isfinite(d.mantissa));
  const double log2 = std::log2(std::abs(d.mantissa)) + static_cast<double>(d.exponent);
  CHECK(log2 == doctest::Approx(800.0 * std::log2(10.0)).epsilon(1e-12));
}

TEST_CASE("jacobi diagonal and known spectrum") {
  Matrix<double> a(3, 3);
  a(0, 0) = 2.0; a(1, 1) = 2.0; a(2, 2) = 3.0;
  a(0, 1) = a(1, 0) = 1.0;
  auto ev = jacobi_eigenvalues(a);
  CHECK(ev[0] == doctest::Approx(1.0));
  CHECK(ev[1] == doctest::Approx(3.0));
  CHECK(ev[2] == doctest::Approx(3.0));
}

TEST_CASE("jacobi preserves trace and determinant") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (std::size_t n : {2u, 5u, 9u}) {
    Matrix<double> a(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j <= i; ++j) a(i, j) = a(j, i) = g(rng);
    auto ev = jacobi_eigenvalues(a);
    double tr = 0.0, sum = 0.0, prod = 1.0;
    for (std::size_t i = 0; i < n; ++i) tr += a(i, i);
    for (double e : ev) {
      sum += e;
      prod *= e;
    }
    CHECK(sum == doctest::Approx(tr).epsilon(1e-12));
    CHECK(prod == doctest::Approx(determinant(a).value()).epsilon(1e-10));
    CHECK(std::is_sorted(ev.begin(), ev.end()));
  }
}

TEST_CASE("jacobi sweep limit") {
  Matrix<double> a(3, 3);
  a(0, 1) = a(1, 0) = 1.0;
  a(1, 2) = a(2, 1) = 0.5;
  CHECK_THROWS_AS(jacobi_eigenvalues(a, 0), JacobiNonConvergence);
}
