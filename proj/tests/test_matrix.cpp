#include "ursp/corpus.hpp"
#include "ursp/integer_matrix.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace ursp;

namespace {

IntegerMatrix m2(long a, long b, long c, long d) {
  IntegerMatrix m(2);
  m.at(0, 0) = a;
  m.at(0, 1) = b;
  m.at(1, 0) = c;
  m.at(1, 1) = d;
  return m;
}

// cofactor expansion, used as the independent determinant oracle
Int det_expansion(const IntegerMatrix& m) {
  std::size_t n = m.dim();
  if (n == 1) return m.at(0, 0);
  Int acc = 0;
  for (std::size_t c = 0; c < n; ++c) {
    if (m.at(0, c) == 0) continue;
    IntegerMatrix minor(n - 1);
    for (std::size_t i = 1; i < n; ++i) {
      std::size_t jj = 0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == c) continue;
        minor.at(i - 1, jj++) = m.at(i, j);
      }
    }
    Int term = m.at(0, c) * det_expansion(minor);
    acc += (c % 2 == 0) ? term : -term;
  }
  return acc;
}

}  // namespace

TEST_CASE("identity multiplication") {
  Rng rng(7);
  IntegerMatrix m = random_unimodular(4, rng);
  CHECK(IntegerMatrix::identity(4) * m == m);
  CHECK(m * IntegerMatrix::identity(4) == m);
}

TEST_CASE("swap conjugation of a sign flip") {
  IntegerMatrix swap = m2(0, 1, 1, 0);
  IntegerMatrix f2 = m2(1, 0, 0, -1);
  CHECK(swap * f2 * swap == m2(-1, 0, 0, 1));
}

TEST_CASE("shear conjugation of a sign flip gives the squared shear") {
  IntegerMatrix e = m2(1, 1, 0, 1);
  IntegerMatrix f1 = m2(-1, 0, 0, 1);
  IntegerMatrix einv = m2(1, -1, 0, 1);
  CHECK(e * f1 * einv * f1 == m2(1, 2, 0, 1));
}

TEST_CASE("dimension mismatch is rejected") {
  IntegerMatrix a(2), b(3);
  CHECK_THROWS_AS(a * b, std::invalid_argument);
}

TEST_CASE("unimodular inverse on simple inputs") {
  CHECK(unimodular_inverse(IntegerMatrix::identity(3)) == IntegerMatrix::identity(3));

  IntegerMatrix e12 = IntegerMatrix::identity(3);
  e12.at(0, 1) = 1;
  IntegerMatrix expect = IntegerMatrix::identity(3);
  expect.at(0, 1) = -1;
  CHECK(unimodular_inverse(e12) == expect);

  // the index swap is its own transpose and inverse
  IntegerMatrix a12 = IntegerMatrix::identity(3);
  a12.at(0, 0) = 0;
  a12.at(1, 1) = 0;
  a12.at(0, 1) = 1;
  a12.at(1, 0) = 1;
  CHECK(unimodular_inverse(a12) == a12);
  CHECK(a12.transpose() == a12);
}

TEST_CASE("non-unimodular input is rejected") {
  CHECK_THROWS_AS(unimodular_inverse(m2(2, 0, 0, 1)), std::invalid_argument);
  CHECK_THROWS_AS(unimodular_inverse(m2(2, 1, 2, 1)), std::invalid_argument);
}

TEST_CASE("inverse is exact on random unimodular products") {
  Rng rng(20240411);
  for (int t = 0; t < 1000; ++t) {
    std::size_t g = 2 + t % 4;
    IntegerMatrix m = random_unimodular(g, rng, 14);
    CHECK(m * unimodular_inverse(m) == IntegerMatrix::identity(g));
  }
}

TEST_CASE("Bareiss determinant matches cofactor expansion") {
  Rng rng(99);
  for (int t = 0; t < 200; ++t) {
    std::size_t n = 1 + t % 5;
    IntegerMatrix m(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) m.at(i, j) = rng.range(-6, 6);
    CHECK(determinant(m) == det_expansion(m));
  }
}

TEST_CASE("determinant of unimodular products is a unit") {
  Rng rng(5);
  for (int t = 0; t < 50; ++t) {
    Int d = determinant(random_unimodular(3, rng));
    CHECK((d == 1 || d == -1));
  }
}

TEST_CASE("matrix text round trip") {
  Rng rng(17);
  IntegerMatrix m = random_unimodular(3, rng, 20);
  CHECK(parse_matrix(m.to_text()) == m);
}

TEST_CASE("matrix parse diagnostics") {
  CHECK(parse_matrix("2\n1 0\n0 1") == IntegerMatrix::identity(2));
  CHECK(parse_matrix("2\n1 2\n0 1") == m2(1, 2, 0, 1));

  CHECK_THROWS_AS(parse_matrix("2\n1 0"), MatrixParseError);
  CHECK_THROWS_AS(parse_matrix("2\n1 x\n0 1"), MatrixParseError);
  CHECK_THROWS_AS(parse_matrix("2\n1 0 3\n0 1"), MatrixParseError);
  CHECK_THROWS_AS(parse_matrix("x\n1"), MatrixParseError);

  try {
    parse_matrix("2\n1 q\n0 1");
    FAIL("expected a parse error");
  } catch (const MatrixParseError& e) {
    CHECK(e.line == 2);
    CHECK(e.column == 3);
  }
}

TEST_CASE("power and symmetric remainder helpers") {
  IntegerMatrix e = m2(1, 1, 0, 1);
  CHECK(pow(e, 5) == m2(1, 5, 0, 1));
  CHECK(pow(e, -3) == m2(1, -3, 0, 1));
  CHECK(pow(e, 0) == IntegerMatrix::identity(2));

  CHECK(symmetric_remainder(Int(7), Int(4)) == -1);
  CHECK(symmetric_remainder(Int(-7), Int(4)) == 1);
  CHECK(symmetric_remainder(Int(2), Int(4)) == 2);
  for (long a = -30; a <= 30; ++a)
    for (long b : {2L, 3L, 5L, 7L}) {
      Int r = symmetric_remainder(Int(a), Int(b));
      CHECK(2 * abs(r) <= Int(b));
      CHECK((Int(a) - r) % Int(b) == 0);
      CHECK(symmetric_quotient(Int(a), Int(b)) * Int(b) + r == Int(a));
    }

  auto eg = extended_gcd(Int(240), Int(-46));
  CHECK(eg.g == 2);
  CHECK(eg.x * 240 + eg.y * -46 == 2);
}
