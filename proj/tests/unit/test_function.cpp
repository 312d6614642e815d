#include "exactdiff/function.hpp"

#include <doctest.h>

#include <random>

using namespace exactdiff;

namespace {

Vector pt(Rational a, Rational b) { return make_vector({a, b}); }

// Sampled modulus contract: ||x - y|| <= 2^-h(i) => |f(x) - f(y)| <= 2^-i.
bool modulus_holds(const ComputableFunction& f, unsigned i, unsigned samples) {
  std::mt19937_64 rng(42);
  const auto h = static_cast<long>(f.modulus(i));
  const long n = static_cast<long>(f.dimension());
  for (unsigned s = 0; s < samples; ++s) {
    Vector x(n), y(n);
    for (long k = 0; k < n; ++k) {
      x(k) = Rational(static_cast<long>(rng() % 1024), 1024);
      const Rational step = Rational(static_cast<long>(rng() % 2001) - 1000, 1000) * Rational::pow2(-h) / Rational(n);
      y(k) = min(Rational(1), max(Rational(0), x(k) + step));
    }
    if (squared_norm(x - y) > Rational::pow2(-2 * h)) continue;
    if (abs(f(x) - f(y)) > Rational::pow2(-static_cast<long>(i))) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("basic families evaluate exactly") {
  const auto lin = linear_form(make_vector({Rational(2), Rational(3)}), Rational(1, 2));
  CHECK(lin(pt(Rational(1, 3), Rational(1, 5))) == Rational(2, 3) + Rational(3, 5) + Rational(1, 2));
  const auto xy = monomial({1, 1});
  CHECK(xy(pt(Rational(2, 3), Rational(3, 4))) == Rational(1, 2));
  const auto a = abs_function(linear_form(make_vector({Rational(1), Rational(-1)})));
  CHECK(a(pt(Rational(1, 4), Rational(3, 4))) == Rational(1, 2));
  const auto s = sum({xy, scaled(Rational(-2), a), constant_function(2, Rational(7))});
  CHECK(s(pt(Rational(1, 2), Rational(1, 2))) == Rational(1, 4) + Rational(7));
  CHECK(s.exact());
  CHECK_THROWS_AS(sum({xy, monomial({1})}), std::invalid_argument);
}

TEST_CASE("piecewise linear and clamp") {
  const auto f = piecewise_linear(1, 0, {{Rational(0), Rational(0)}, {Rational(1, 2), Rational(1, 4)},
                                        {Rational(1), Rational(1)}});
  CHECK(f(make_vector({Rational(1, 4)})) == Rational(1, 8));
  CHECK(f(make_vector({Rational(3, 4)})) == Rational(5, 8));
  CHECK(f(make_vector({Rational(2)})) == Rational(1));
  CHECK_THROWS(piecewise_linear(1, 0, {{Rational(1), Rational(0)}, {Rational(1), Rational(1)}}));
  const auto c = clamp_p1(2);
  CHECK(c[1](pt(Rational(1, 3), Rational(5, 2))) == Rational(1));
  CHECK(clamp_point(pt(Rational(3), Rational(1, 2)))(0) == Rational(1));
}

TEST_CASE("moduli satisfy their contract on samples") {
  CHECK(modulus_holds(linear_form(make_vector({Rational(2), Rational(3)})), 6, 300));
  CHECK(modulus_holds(monomial({2, 1}), 5, 300));
  CHECK(modulus_holds(abs_function(linear_form(make_vector({Rational(1), Rational(-1)}))), 7, 300));
  CHECK(modulus_holds(sum({monomial({1, 1}), linear_form(make_vector({Rational(-5), Rational(1)}))}), 4, 300));
  CHECK(modulus_holds(scaled(Rational(9), monomial({1, 1})), 3, 300));
}

TEST_CASE("Lipschitz lower bound and K_n decomposition") {
  const auto f = linear_form(make_vector({Rational(-3), Rational(1)}));
  CHECK(lipschitz_lower_bound(f, 3) == Rational(3));
  const auto d = kn_decompose(f, Rational(3));
  CHECK(d.m(0) == Rational(3));
  // g = f + 3x + 3y = 4y, nondecreasing along both axes.
  CHECK(d.g(pt(Rational(1, 2), Rational(1, 4))) == Rational(1));
  CHECK_THROWS(kn_decompose(f, Rational(-1)));
}

TEST_CASE("descriptors round trip") {
  const std::vector<ComputableFunction> fs{
      constant_function(2, Rational(1, 3)),
      linear_form(make_vector({Rational(2), Rational(3)}), Rational(-1)),
      monomial({2, 1}),
      abs_function(linear_form(make_vector({Rational(1), Rational(-1)}))),
      sum({monomial({1, 0}), scaled(Rational(1, 2), monomial({0, 1}))}),
      piecewise_linear(2, 1, {{Rational(0), Rational(0)}, {Rational(1), Rational(2)}}),
      clamp_p1(2)[0],
  };
  const Vector x = pt(Rational(2, 7), Rational(5, 9));
  for (const auto& f : fs) {
    const auto g = function_from_json(f.descriptor());
    CHECK(g.descriptor() == f.descriptor());
    CHECK(g(x) == f(x));
    CHECK(g.modulus(5) == f.modulus(5));
  }
  CHECK_THROWS_AS(function_from_json(json{{"kind", "nope"}}), std::invalid_argument);
  CHECK_THROWS(function_from_json(json{{"value", "1"}}));
}
