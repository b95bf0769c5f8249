#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "evadesos/poly.hpp"
#include "oracles.hpp"

using namespace evadesos;

namespace {
Polynomial x(int n, int i) { return Polynomial::variable(n, i); }
Polynomial c(int n, double v) { return Polynomial::constant(n, v); }
}  // namespace

TEST_CASE("add cancels and keeps identity") {
  const Polynomial p = x(1, 0) * x(1, 0) + c(1, 1);
  CHECK(add(p, -(x(1, 0) * x(1, 0))) == c(1, 1));
  CHECK(add(p, Polynomial(1)) == p);
  CHECK((p - p).is_zero());
}

TEST_CASE("mul") {
  const Polynomial a = x(1, 0) + c(1, 1), b = x(1, 0) - c(1, 1);
  CHECK(mul(a, b) == x(1, 0) * x(1, 0) - c(1, 1));
  CHECK(mul(a, c(1, 1)) == a);
}

TEST_CASE("coefficients below the drop tolerance vanish") {
  Polynomial p = x(2, 0) + c(2, 1e-15);
  CHECK(p.size() == 1);
  p.add_term(Monomial::variable(2, 0), -1.0);
  CHECK(p.is_zero());
  CHECK(p.degree() == 0);
}

TEST_CASE("dimension mismatch throws") {
  CHECK_THROWS_AS(x(2, 0) + x(3, 0), DimensionError);
  CHECK_THROWS_AS(x(2, 0) * x(3, 0), DimensionError);
  CHECK_THROWS_AS(differentiate(x(2, 0), 2), DimensionError);
  const std::vector<double> pt{1.0};
  CHECK_THROWS_AS(x(2, 0).evaluate(pt), DimensionError);
}

TEST_CASE("differentiate") {
  const Polynomial p = x(2, 0) * x(2, 0) * x(2, 1);
  CHECK(differentiate(p, 0) == 2.0 * x(2, 0) * x(2, 1));
  CHECK(differentiate(x(2, 0) * x(2, 0), 1).is_zero());
}

TEST_CASE("gradient of V splits evader and pursuer blocks") {
  const int n = 4;
  const Polynomial V = (x(n, 0) - c(n, 1)) * (x(n, 0) - c(n, 1)) + x(n, 1) * x(n, 1);
  const std::vector<int> ev{0, 1}, pv{2, 3};
  const PolyVec ge = gradient(V, ev);
  CHECK(ge[0] == 2.0 * (x(n, 0) - c(n, 1)));
  CHECK(ge[1] == 2.0 * x(n, 1));
  const PolyVec gp = gradient(V, pv);
  CHECK(gp[0].is_zero());
  CHECK(gp[1].is_zero());
}

TEST_CASE("divergence") {
  const std::vector<int> v{0, 1};
  CHECK(divergence(PolyVec({x(2, 0), x(2, 1)}), v) == c(2, 2));
  CHECK(divergence(PolyVec({x(2, 1), -x(2, 0)}), v).is_zero());
  CHECK_THROWS_AS(divergence(PolyVec({x(2, 1)}), v), DimensionError);
}

TEST_CASE("evaluate") {
  const std::vector<double> pt{2.0, 3.0};
  CHECK(evaluate(x(2, 0) * x(2, 0) + x(2, 1), pt) == doctest::Approx(7.0));
  CHECK(c(2, 5).evaluate(pt) == 5.0);
}

TEST_CASE("monomial basis is grlex and sized by binomials") {
  const auto b = monomial_basis(1, 2);
  REQUIRE(b.size() == 3);
  CHECK(b[0].degree() == 0);
  CHECK(b[1] == Monomial(std::vector<int>{1}));
  CHECK(b[2] == Monomial(std::vector<int>{2}));
  CHECK(monomial_basis(4, 5).size() == 126);
  CHECK(monomial_basis(2, 0).size() == 1);
  // x1 most significant within a degree.
  const auto b2 = monomial_basis(2, 2);
  CHECK(b2[1] == Monomial({1, 0}));
  CHECK(b2[2] == Monomial({0, 1}));
  CHECK(b2[3] == Monomial({2, 0}));
  CHECK(b2[5] == Monomial({0, 2}));
  for (int n = 1; n <= 6; ++n) {
    for (int d = 0; d <= 10; ++d) {
      double binom = 1.0;
      for (int i = 1; i <= n; ++i) binom = binom * (d + i) / i;
      const auto basis = monomial_basis(n, d);
      CHECK(basis.size() == static_cast<std::size_t>(binom + 0.5));
      CHECK(monomial_count(n, d) == basis.size());
      for (std::size_t k = 1; k < basis.size(); ++k) CHECK(GrlexLess{}(basis[k - 1], basis[k]));
    }
  }
}

TEST_CASE("rescale_arguments") {
  const Polynomial p = x(2, 0) * x(2, 0) + 3.0 * x(2, 1) + c(2, 1);
  const Polynomial q = rescale_arguments(p, 2.0);
  const std::vector<double> pt{0.3, -0.7}, pt2{0.6, -1.4};
  CHECK(q.evaluate(pt) == doctest::Approx(p.evaluate(pt2)));
}

TEST_CASE("randomized calculus oracle") {
  const oracle::Tally t = oracle::poly_calculus(500, 2024);
  for (const auto& n : t.notes) MESSAGE(n);
  CHECK(t.checks == 500);
  CHECK(t.failures == 0);
  CHECK(t.seconds < 10.0);
}
