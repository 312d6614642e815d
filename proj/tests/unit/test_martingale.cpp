#include "exactdiff/martingale.hpp"

#include <doctest.h>

using namespace exactdiff;

TEST_CASE("built-in martingales are fair") {
  CHECK(check_fairness(Martingale::constant(Rational(3, 2)), 10).pass);
  CHECK(check_fairness(Martingale::all_on_one(), 10).pass);
  CHECK(Martingale::all_on_one()(BitString::parse("111")) == Rational(8));
  CHECK(Martingale::all_on_one()(BitString::parse("101")) == Rational(0));
  CHECK_THROWS(Martingale::constant(Rational(-1)));
}

TEST_CASE("tables: fair, unfair and incomplete") {
  const auto fair = Martingale::table({{"", Rational(1)}, {"0", Rational(1, 2)}, {"1", Rational(3, 2)}});
  CHECK(check_fairness(fair, 1).pass);
  const auto bad = Martingale::table({{"", Rational(1)}, {"0", Rational(1)}, {"1", Rational(2)}});
  const auto c = check_fairness(bad, 1);
  CHECK_FALSE(c.pass);
  CHECK(c.witness->str() == "");
  CHECK_THROWS_AS(check_fairness(fair, 2), std::out_of_range);
}

TEST_CASE("slope martingale of x^2 matches closed form") {
  const auto m = slope_martingale(monomial({2}));
  // [sigma] = [a, a + 2^-k]: slope = 2a + 2^-k.
  for (const auto& s : BitString::all_of_length(5)) {
    CHECK(m(s) == Rational(2) * s.left() + Rational::pow2(-5));
  }
  CHECK(check_fairness(m, 10).pass);
  CHECK_THROWS_AS(slope_martingale(linear_form(make_vector({Rational(-1)}), Rational(1))), std::domain_error);
  CHECK_THROWS_AS(slope_functional(monomial({1, 1})), std::invalid_argument);
}

TEST_CASE("betting runs") {
  const auto m = slope_martingale(monomial({2}));
  const auto run = run_bet(m, BitSource::expansion(Rational(1, 3)), 8, {Rational(2, 3)});
  REQUIRE(run.trajectory.size() == 9);
  // Slopes of x^2 over the shrinking intervals around 1/3 tend to 2/3.
  CHECK(run.trajectory[0] == Rational(1));
  CHECK(run.trajectory[1] == Rational(1, 2));
  CHECK(run.trajectory[2] == Rational(3, 4));
  CHECK(run.max_capital == Rational(1));
  REQUIRE(run.crossings.size() == 1);
  CHECK(run.crossings[0].second == std::optional<std::size_t>(0));
  CHECK(run.to_csv().rfind("length,capital\n0,1/1\n1,1/2\n", 0) == 0);
  CHECK_THROWS(run_bet(m, BitSource::constant(1), 0, {}));
}

TEST_CASE("uniform martingale over an oracle section") {
  const auto f = sum({monomial({1, 0}), monomial({0, 1})});
  const auto g = oracle_section(f, 0);
  const auto y = BitSource::expansion(Rational(1, 3));
  const auto bound = uniform_slope_martingale(g, y, 4, 24);
  CHECK(check_fairness(bound, 6, 24).pass);
  // Slope in the free coordinate is exactly 1 regardless of the oracle.
  const auto v = bound.value(BitString::parse("0110"), 24);
  CHECK(abs(v.value - Rational(1)) <= v.error);
  const auto id = UniformMartingale(identity_section());
  CHECK(id.value(BitString(), BitString::parse("01"), 8).value == Rational(1));
}

TEST_CASE("axis sections") {
  const auto f = monomial({1, 1});
  const auto s = section_along_axis(f, make_vector({Rational(1, 3), Rational(1, 5)}), 0);
  CHECK(s.section(make_vector({Rational(1, 2)})) == Rational(1, 10));
  CHECK(s.encoding.prefix(4).str() == "0011");
  CHECK_THROWS_AS(section_along_axis(f, make_vector({Rational(2), Rational(0)}), 0), std::domain_error);
}

TEST_CASE("descriptors") {
  const auto m = martingale_from_json(json::parse(R"({"kind":"slope","function":{"kind":"monomial","powers":[1]}})"));
  CHECK(m(BitString::parse("0101")) == Rational(1));
  const auto z = bit_source_from_json(json::parse(
      R"({"kind":"interleave","sources":[{"kind":"constant","bit":1},{"kind":"periodic","pattern":"0"}]})"));
  CHECK(z.prefix(4).str() == "1010");
  CHECK_THROWS(martingale_from_json(json{{"kind", "unknown"}}));
}
