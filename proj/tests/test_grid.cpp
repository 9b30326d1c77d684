#include "doctest.h"
#include "icb/grid.hpp"
#include "test_util.hpp"

using namespace icb;

TEST_CASE("axpy identity and trivial combinations") {
  Image y = testutil::random_image(4, 3, 7);
  Image x = testutil::random_image(4, 3, 8);
  Image r = axpy(0.0, x, y);
  for (std::size_t i = 0; i < y.size(); ++i) CHECK(r.values[i] == y.values[i]);

  Image ones(2, 2, 1.0);
  Image two = axpy(1.0, ones, ones);
  for (double v : two.values) CHECK(v == doctest::Approx(2.0));

  Image zero = axpy(-1.0, x, x);
  for (double v : zero.values) CHECK(v == 0.0);
}

TEST_CASE("axpy rejects shape mismatch") {
  Image a(3, 3), b(4, 3);
  CHECK_THROWS_AS(axpy(1.0, a, b), std::invalid_argument);
  VectorField va(3, 3), vb(3, 4);
  CHECK_THROWS_AS(axpy(1.0, va, vb), std::invalid_argument);
}

TEST_CASE("inner product basics") {
  Image a(5, 4), b(5, 4);
  a.at(2, 1) = 1.0;
  b.at(2, 1) = 1.0;
  CHECK(inner_product(a, b) == 1.0);

  // Disjoint supports.
  b.at(2, 1) = 0.0;
  b.at(0, 0) = 3.0;
  CHECK(inner_product(a, b) == 0.0);
}

TEST_CASE("inner product matches direct double-loop summation and is symmetric") {
  const Image a = testutil::random_image(9, 7, 1);
  const Image b = testutil::random_image(9, 7, 2);
  double direct = 0.0;
  for (int y = 0; y < a.height; ++y)
    for (int x = 0; x < a.width; ++x) direct += a.at(x, y) * b.at(x, y);
  CHECK(inner_product(a, b) == doctest::Approx(direct).epsilon(1e-14));
  CHECK(std::abs(inner_product(a, b) - inner_product(b, a)) <= 1e-12);
}

TEST_CASE("inner product is bilinear") {
  const Image x = testutil::random_image(6, 6, 3);
  const Image y = testutil::random_image(6, 6, 4);
  const Image z = testutil::random_image(6, 6, 5);
  const double a = 1.7, b = -0.3;
  const double lhs = inner_product(axpy(a, x, axpy(b, y, Image(6, 6))), z);
  const double rhs = a * inner_product(x, z) + b * inner_product(y, z);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
}

TEST_CASE("complex inner product is the real part of the Hermitian pairing") {
  ComplexGrid a(3, 2), b(3, 2);
  a.re[1] = 2.0;
  a.im[1] = -1.0;
  b.re[1] = 0.5;
  b.im[1] = 3.0;
  // Re(conj(2 - i) * (0.5 + 3i)) = Re((2+i)(0.5+3i)) = 1 - 3 = -2.
  CHECK(inner_product(a, b) == doctest::Approx(-2.0));
}

TEST_CASE("pointwise magnitude") {
  VectorField v(4, 4);
  CHECK(inner_product(pointwise_magnitude(v), Image(4, 4, 1.0)) == 0.0);

  std::fill(v.x.begin(), v.x.end(), 3.0);
  std::fill(v.y.begin(), v.y.end(), 4.0);
  for (double m : pointwise_magnitude(v).values) CHECK(m == doctest::Approx(5.0));

  std::fill(v.x.begin(), v.x.end(), 1.0);
  std::fill(v.y.begin(), v.y.end(), 1.0);
  for (double m : pointwise_magnitude(v).values)
    CHECK(m == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("pointwise magnitude is zero exactly where both components vanish") {
  VectorField v = testutil::random_field(8, 8, 11, 1.0);
  v.x[5] = 0.0;
  v.y[5] = 0.0;
  const Image m = pointwise_magnitude(v);
  for (std::size_t i = 0; i < v.size(); ++i) {
    CHECK(m.values[i] >= 0.0);
    if (v.x[i] == 0.0 && v.y[i] == 0.0)
      CHECK(m.values[i] == 0.0);
    else
      CHECK(m.values[i] > 0.0);
  }
}
