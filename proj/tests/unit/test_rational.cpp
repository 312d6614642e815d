#include "exactdiff/rational.hpp"

#include <doctest.h>

using namespace exactdiff;

TEST_CASE("parse and print canonical fractions") {
  CHECK(Rational::parse("6/4").str() == "3/2");
  CHECK(Rational::parse("-0.375") == Rational(-3, 8));
  CHECK(Rational::parse("7").str() == "7/1");
  CHECK(Rational(BigInt(4), BigInt(-6)).str() == "-2/3");
  CHECK_THROWS(Rational::parse("1/0"));
  CHECK_THROWS(Rational::parse("abc"));
}

TEST_CASE("floor, ceil and logarithms") {
  CHECK(Rational(-7, 2).floor() == -4);
  CHECK(Rational(-7, 2).ceil() == -3);
  CHECK(floor_log2(Rational(3, 16)) == -3);
  CHECK(floor_log2(Rational(1024)) == 10);
  CHECK(ceil_log2(Rational(5)) == 3);
  CHECK(ceil_log2(Rational(4)) == 2);
  CHECK(ceil_log2(Rational(1, 3)) == 0);
  // 1 + sqrt(13) = 4.6..., so c = 3; 1 + sqrt(9) = 4 exactly, c = 2.
  CHECK(ceil_log2_one_plus_sqrt(Rational(13)) == 3);
  CHECK(ceil_log2_one_plus_sqrt(Rational(9)) == 2);
}

TEST_CASE("square roots") {
  Rational r;
  CHECK(exact_sqrt(Rational(9, 25), r));
  CHECK(r == Rational(3, 5));
  CHECK_FALSE(exact_sqrt(Rational(2), r));
  const Rational s = sqrt_approx(Rational(2), 40);
  // |s - sqrt 2| <= 2^-40  <=>  (s -+ 2^-40)^2 brackets 2.
  const Rational e = Rational::pow2(-40);
  CHECK((s - e) * (s - e) <= Rational(2));
  CHECK((s + e) * (s + e) >= Rational(2));
}

TEST_CASE("dyadic rationals with huge exponents") {
  const DyadicRational tiny(BigInt(1), BigInt("-100000000000000000000"));
  CHECK_FALSE(tiny.materializable());
  CHECK_THROWS_AS(tiny.to_rational(), std::overflow_error);
  CHECK(compare(Rational(0), tiny) == std::strong_ordering::less);
  CHECK(compare(Rational(1, 1000000), tiny) == std::strong_ordering::greater);
  CHECK(DyadicRational(BigInt(12), BigInt(0)) == DyadicRational(BigInt(3), BigInt(2)));
  CHECK(DyadicRational::from_rational(Rational(3, 8)).to_rational() == Rational(3, 8));
  CHECK_THROWS(DyadicRational::from_rational(Rational(1, 3)));
  CHECK(compare(Rational(3, 8), DyadicRational(BigInt(3), BigInt(-3))) == std::strong_ordering::equal);
}

TEST_CASE("dyadic sums decide sign without expansion") {
  const BigInt huge("1000000000000000000000");
  DyadicSum s;
  s.add(DyadicRational(BigInt(1), BigInt(-10)));
  s.add(DyadicRational(BigInt(-1), -huge));
  CHECK(s.sign() == 1);
  DyadicSum t(DyadicRational(BigInt(1), BigInt(-10)));
  CHECK(compare(s, t) == std::strong_ordering::less);
  s.subtract(t);
  CHECK(s.sign() == -1);

  DyadicSum small;
  small.add(DyadicRational(BigInt(1), BigInt(-2)));
  small.add(DyadicRational(BigInt(1), BigInt(-3)));
  CHECK(small.materializable());
  CHECK(small.to_rational() == Rational(3, 8));
  CHECK(small.upper_bound(20) == Rational(3, 8));
  DyadicSum cancel;
  cancel.add(DyadicRational(BigInt(1), BigInt(-5)));
  cancel.add(DyadicRational(BigInt(-2), BigInt(-6)));
  CHECK(cancel.sign() == 0);
}

TEST_CASE("vectors") {
  const Vector v = parse_vector({"1/2", "-3"});
  CHECK(format_vector(v) == std::vector<std::string>{"1/2", "-3/1"});
  CHECK(squared_norm(v) == Rational(37, 4));
  CHECK(unit_vector(3, 1)(1) == Rational(1));
  CHECK(in_unit_cube(make_vector({Rational(0), Rational(1)})));
  CHECK_FALSE(in_unit_cube(v));
}
