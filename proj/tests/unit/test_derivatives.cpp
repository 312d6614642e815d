#include "exactdiff/derivatives.hpp"

#include <doctest.h>

using namespace exactdiff;

namespace {

Vector pt(Rational a, Rational b) { return make_vector({a, b}); }
ComputableFunction kink_1d() { return abs_function(linear_form(make_vector({Rational(1)}), Rational(-1, 2))); }

}  // namespace

TEST_CASE("difference quotients") {
  const auto f = monomial({2});
  const auto s = slope_axis(f, make_vector({Rational(1, 3)}), 0, Rational(1, 6));
  // ((1/2)^2 - (1/3)^2) / (1/6) = 5/6.
  CHECK(s.value == Rational(5, 6));
  CHECK(s.error == Rational(0));
  CHECK_THROWS_AS(slope_axis(f, make_vector({Rational(1, 3)}), 0, Rational(0)), std::invalid_argument);
  CHECK_THROWS_AS(slope_axis(f, make_vector({Rational(1, 3)}), 0, Rational(1)), std::domain_error);
  const auto row = slope_row(monomial({1, 1}), pt(Rational(1, 2), Rational(1, 4)), Rational(1, 4));
  CHECK(row.values(0) == Rational(1, 4));
  CHECK(row.values(1) == Rational(1, 2));
  const auto d = slope_dir(linear_form(make_vector({Rational(2), Rational(3)})), pt(Rational(1, 5), Rational(1, 5)),
                           make_vector({Rational(3, 5), Rational(4, 5)}), Rational(1, 10));
  CHECK(d.value == Rational(18, 5));
}

TEST_CASE("partial probe separates a kink from a smooth point") {
  const auto f = kink_1d();
  const auto v = partial_probe(f, make_vector({Rational(1, 2)}), 0, default_schedule(8), Rational(1, 2));
  CHECK(v.violated());
  CHECK(v.witness.at("low").at("slope") == "-1/1");
  CHECK(v.witness.at("high").at("slope") == "1/1");
  CHECK(replay_witness(f, v));
  const auto ok = partial_probe(f, make_vector({Rational(1, 5)}), 0, default_schedule(8), Rational(1, 2));
  CHECK_FALSE(ok.violated());
  REQUIRE(ok.bracket);
  CHECK(ok.bracket->low == Rational(-1));
  CHECK(ok.bracket->high == Rational(-1));
}

TEST_CASE("directional reduction through an exact basis") {
  const auto f = linear_form(make_vector({Rational(2), Rational(3)}));
  const auto r = dir_derivative_via_basis(f, pt(Rational(1, 2), Rational(1, 2)),
                                          make_vector({Rational(3, 5), Rational(4, 5)}));
  CHECK(r.found);
  CHECK(r.identity_ok);
  CHECK(r.panel.size() == 50);
  CHECK(r.transform.exact);
  const Rational t = r.panel.front();
  CHECK((r.g(r.z + t * unit_vector(2, 0)) - r.g(r.z)) / t == Rational(18, 5));
}

TEST_CASE("linearity defect") {
  const auto f = abs_function(linear_form(make_vector({Rational(1), Rational(-1)})));
  std::vector<Rational> grid;
  for (int k = 1; k <= 6; ++k) grid.push_back(Rational::pow2(-k));
  const auto d = linearity_defect(f, pt(Rational(1, 2), Rational(1, 2)), unit_vector(2, 0), unit_vector(2, 1),
                                  Rational(1, 4), grid, Rational(1));
  CHECK(d.value == Rational(2));
  CHECK(d.violated());
  CHECK(replay_witness(f, d));
  const auto smooth = linearity_defect(monomial({1, 1}), pt(Rational(1, 3), Rational(1, 3)), unit_vector(2, 0),
                                       unit_vector(2, 1), Rational(1, 4), grid);
  CHECK(smooth.value <= Rational(1, 16));
  CHECK_THROWS_AS(linearity_defect(f, pt(Rational(1), Rational(1)), unit_vector(2, 0), unit_vector(2, 1),
                                   Rational(1, 4), grid),
                  std::domain_error);
}

TEST_CASE("class A and class B agree on simple cases") {
  const auto xy = monomial({1, 1});
  const auto x = pt(Rational(1, 3), Rational(2, 5));
  const auto a = diff_class_a(xy, x, 5);
  const auto b = diff_class_b(xy, x, 5);
  CHECK_FALSE(a.violated());
  CHECK_FALSE(b.violated());
  REQUIRE(a.bracket);
  // d/dx (xy) = y = 2/5 lies in the axis-0 bracket.
  CHECK(a.bracket->low <= Rational(2, 5));
  CHECK(a.bracket->high >= Rational(2, 5));

  const auto f = kink_1d();
  const auto ka = diff_class_a(f, make_vector({Rational(1, 2)}), 5);
  const auto kb = diff_class_b(f, make_vector({Rational(1, 2)}), 5);
  CHECK(ka.violated());
  CHECK(kb.violated());
  CHECK(replay_witness(f, ka));
  CHECK(replay_witness(f, kb));
  CHECK(ka.to_json().at("status") == "violated_at");
}
