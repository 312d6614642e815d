#include "exactdiff/bits.hpp"

#include <doctest.h>

using namespace exactdiff;

TEST_CASE("bit strings name dyadic intervals") {
  const auto s = BitString::parse("101");
  CHECK(s.left() == Rational(5, 8));
  CHECK(s.right() == Rational(3, 4));
  CHECK(BitString().right() == Rational(1));
  CHECK(s.append(0).str() == "1010");
  CHECK(s.prefix(2).str() == "10");
  CHECK(s.prefix(2).is_prefix_of(s));
  CHECK_FALSE(s.is_prefix_of(s.prefix(2)));
  CHECK(BitString::all_of_length(3).size() == 8);
  CHECK(BitString::all_of_length(2).back().str() == "11");
  CHECK_THROWS(BitString::parse("102"));
}

TEST_CASE("binary expansions by long division") {
  // 1/3 = 0.010101..., 5/7 = 0.101101...
  CHECK(BitSource::expansion(Rational(1, 3)).prefix(8).str() == "01010101");
  CHECK(BitSource::expansion(Rational(5, 7)).prefix(9).str() == "101101101");
  CHECK_THROWS(BitSource::expansion(Rational(1, 2)));
  const auto z = BitSource::expansion(Rational(2, 3));
  const Rational v = bits_value(z, 20);
  CHECK(v <= Rational(2, 3));
  CHECK(Rational(2, 3) - v < Rational::pow2(-20));
}

TEST_CASE("interleaving round trips") {
  const auto a = BitSource::periodic(BitString::parse("0"));
  const auto b = BitSource::constant(1);
  const auto c = BitSource::periodic(BitString::parse("10"));
  const auto z = interleave({a, b, c});
  CHECK(z.prefix(9).str() == "011010011");
  CHECK(deinterleave(z, 3, 2).prefix(4).str() == "1010");
  CHECK(deinterleave(z, 3, 1).prefix(4).str() == "1111");
}

TEST_CASE("point coordinates become bit sources") {
  const auto bits = point_to_bits(make_vector({Rational(1, 3), Rational(5, 7)}));
  REQUIRE(bits.size() == 2);
  CHECK(bits[0].prefix(4).str() == "0101");
  CHECK(bits[1].prefix(4).str() == "1011");
  CHECK_THROWS(point_to_bits(make_vector({Rational(1, 2)})));
}

TEST_CASE("Cauchy names") {
  CHECK(validate_cauchy(CauchyName::constant(make_vector({Rational(1, 3)})), 12).pass);
  // q_k = 1/(k+1) moves by more than 2^-n eventually.
  const CauchyName slow([](unsigned k) { return make_vector({Rational(1, static_cast<long>(k) + 1)}); });
  const auto check = validate_cauchy(slow, 8);
  CHECK_FALSE(check.pass);
  REQUIRE(check.witness);
  CHECK(check.witness->second >= check.witness->first);
  const CauchyName good([](unsigned k) { return make_vector({Rational(1, 3) + Rational::pow2(-static_cast<long>(k) - 1)}); });
  CHECK(validate_cauchy(good, 10).pass);
}
