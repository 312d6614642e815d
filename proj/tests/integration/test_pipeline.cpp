// Cross-module flows: functions feed martingales, probes and the tent system.
#include "exactdiff/counterexample.hpp"
#include "exactdiff/derivatives.hpp"
#include "exactdiff/martingale.hpp"

#include <doctest.h>

using namespace exactdiff;

TEST_CASE("K_n-increasing section gives a fair slope martingale") {
  const auto f = sum({monomial({1, 1}), linear_form(make_vector({Rational(-2), Rational(1, 2)}))});
  const Rational lip = lipschitz_lower_bound(f, 4);
  const auto d = kn_decompose(f, Rational(4));
  CHECK(lip <= Rational(4));
  const auto s = section_along_axis(d.g, make_vector({Rational(1, 3), Rational(2, 5)}), 0);
  const auto m = slope_martingale(s.section, 8);
  CHECK(check_fairness(m, 10).pass);
  // g adds 4x, so the x-slope along y = 2/5 is 2/5 - 2 + 4.
  CHECK(m(BitString::parse("0110")) == Rational(2, 5) + Rational(2));
}

TEST_CASE("directional reduction feeds a martingale along e1") {
  const auto f = linear_form(make_vector({Rational(2), Rational(3)}));
  const auto r = dir_derivative_via_basis(f, make_vector({Rational(1, 2), Rational(1, 2)}),
                                          make_vector({Rational(3, 5), Rational(4, 5)}));
  REQUIRE(r.identity_ok);
  CHECK(function_from_json(r.g.descriptor())(r.z) == r.g(r.z));
}

TEST_CASE("truncated tent sum is probed like any exact function") {
  const auto sys = build_tent_system(toy_test(3), 64, 3, 0);
  const auto f = sys.truncated_function();
  CHECK(f.exact());
  CHECK(f.modulus(1) == sys.modulus(3));
  CHECK_THROWS_AS(f.modulus(2), std::out_of_range);
  // Outside the stage-1 region every tent vanishes.
  const Vector far = make_vector({Rational(3, 4), Rational(3, 4)});
  CHECK(f(far) == Rational(0));
  const auto probe = partial_probe(f, make_vector({Rational(1, 3), Rational(1, 3)}), 0, default_schedule(10),
                                   Rational(1, 2));
  CHECK(probe.violated());
  CHECK(replay_witness(f, probe));
}

TEST_CASE("evaluation agrees with the truncated sum where all cells count") {
  const auto sys = build_tent_system(toy_test(4), 64, 4, 0);
  const Vector q = make_vector({Rational(3, 8), Rational(5, 16)});
  for (std::size_t m = 1; m <= 4; ++m) {
    const auto e = sys.evaluate(q, m);
    CHECK(e.lower <= sys.truncated(q));
    CHECK(sys.truncated(q) <= e.upper);
  }
}
