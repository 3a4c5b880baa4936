#include <cmath>

#include "doctest.h"
#include "karst/quadrature.hpp"

using namespace karst;

namespace {

double integrate(const QuadratureRule& rule, int px, int py) {
  double acc = 0.0;
  for (const auto& q : rule.points)
    acc += q.w * std::pow(q.xy.x(), px) * std::pow(q.xy.y(), py);
  return acc;
}

// Exact monomial integrals: square 1/((a+1)(b+1)); triangle a! b! / (a+b+2)!.
double square_exact(int a, int b) { return 1.0 / ((a + 1.0) * (b + 1.0)); }

double tri_exact(int a, int b) {
  auto fact = [](int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
  };
  return fact(a) * fact(b) / fact(a + b + 2);
}

}  // namespace

TEST_CASE("constants and areas") {
  CHECK(integrate(reference_rule(CellShape::Rectangle, 0), 0, 0) == doctest::Approx(1.0));
  CHECK(integrate(reference_rule(CellShape::Triangle, 0), 0, 0) == doctest::Approx(0.5));
}

TEST_CASE("x^2 y^2 on the square with a degree-2 rule") {
  CHECK(integrate(reference_rule(CellShape::Rectangle, 2), 2, 2) ==
        doctest::Approx(1.0 / 9.0).epsilon(1e-14));
}

TEST_CASE("rules are exact for their stated degree") {
  for (int deg = 1; deg <= 9; ++deg) {
    const QuadratureRule sq = reference_rule(CellShape::Rectangle, deg);
    for (int a = 0; a <= deg; ++a)
      for (int b = 0; b <= deg; ++b)
        CHECK(integrate(sq, a, b) == doctest::Approx(square_exact(a, b)).epsilon(1e-13));

    const QuadratureRule tr = reference_rule(CellShape::Triangle, deg);
    for (int a = 0; a <= deg; ++a)
      for (int b = 0; a + b <= deg; ++b)
        CHECK(integrate(tr, a, b) == doctest::Approx(tri_exact(a, b)).epsilon(1e-13));
  }
}

TEST_CASE("1d rules") {
  for (int deg = 0; deg <= 11; ++deg) {
    const auto rule = edge_rule(deg);
    for (int a = 0; a <= deg; ++a) {
      double acc = 0.0;
      for (const auto& q : rule) acc += q.w * std::pow(q.x, a);
      CHECK(acc == doctest::Approx(1.0 / (a + 1.0)).epsilon(1e-14));
    }
  }
}

TEST_CASE("unsupported degree is rejected") {
  CHECK_THROWS_AS(reference_rule(CellShape::Rectangle, 20), std::invalid_argument);
  CHECK_THROWS_AS(edge_rule(-1), std::invalid_argument);
}
