#include "exactdiff/nullsets.hpp"

#include <doctest.h>

using namespace exactdiff;

TEST_CASE("cube streams track measure") {
  auto s = CubeStream::from_cubes({DyadicCube(1, {BigInt(0), BigInt(0)}), DyadicCube(2, {BigInt(0), BigInt(0)}),
                                   DyadicCube(1, {BigInt(1), BigInt(1)})});
  CHECK(s.take(2).size() == 2);
  CHECK(s.enumerated().empty());
  while (s.next()) {
  }
  CHECK(s.enumerated().size() == 3);
  CHECK(s.measure() == Rational(1, 2));
  CHECK_FALSE(CubeStream::empty().take(5).size());
}

TEST_CASE("nested tests from config") {
  const auto t = concentric_test(make_vector({Rational(1, 3), Rational(1, 3)}), 2, 4);
  CHECK(t.dimension == 2);
  CHECK(t.stage(0).take(1).front() == DyadicCube::unit(2));
  CHECK(t.stage(2).take(1).front() == DyadicCube(4, {BigInt(5), BigInt(5)}));
  CHECK_THROWS(t.stage(5));
  for (std::size_t m = 0; m < 4; ++m) CHECK(audit_nesting(t, m, 8).pass);

  const auto nb = nested_test_from_json(json::parse(R"({
    "dimension": 2, "depth": 2, "stages": [{"rule": "unit"}],
    "generator": {"rule": "neighborhood", "point": ["1/3", "1/3"], "scale_per_stage": 2, "radius": 1}})"));
  CHECK(nb.stage(1).take(100).size() == 9);

  const auto bad = nested_test_from_json(json::parse(R"({
    "dimension": 2, "stages": [{"rule": "unit"},
      {"rule": "explicit", "cubes": [{"dim": 2, "scale": 1, "corner": ["0", "0"]}]},
      {"rule": "explicit", "cubes": [{"dim": 2, "scale": 1, "corner": ["1", "1"]}]}]})"));
  const auto audit = audit_nesting(bad, 1, 8);
  CHECK_FALSE(audit.pass);
  CHECK(*audit.witness == DyadicCube(1, {BigInt(1), BigInt(1)}));
  CHECK_THROWS(nested_test_from_json(json::parse(R"({"dimension": 2})")));
  CHECK_THROWS(nested_test_from_json(json::parse(R"({"dimension": 2, "stages": [{"rule": "bogus"}]})")));
}

TEST_CASE("cube json") {
  const DyadicCube c(3, {BigInt(5), BigInt(2)});
  CHECK(cube_from_json(cube_to_json(c)) == c);
}

TEST_CASE("Dore-Maleva parameters and measures") {
  const auto p = default_dore_maleva_params(12);
  CHECK(p.N == std::vector<long>{3, 3, 3, 5, 5, 5, 5, 5, 7, 7, 7, 7});
  CHECK(p.p[0] == Rational(2));
  CHECK(p.p[3] == Rational(4));
  CHECK(p.p_raw[0] == Rational(4));
  CHECK(p.d(2) == Rational(1, 9));
  CHECK(dore_maleva_measure(p, 0) == Rational(1));
  CHECK(dore_maleva_measure(p, 1) == Rational(5, 9));
  CHECK(dore_maleva_measure(p, 2) == Rational(25, 81));
  CHECK(dore_maleva_stage_below(p, Rational(1, 2)) == std::optional<std::size_t>(2));
  for (std::size_t k = 0; k <= 3; ++k) CHECK(dore_maleva_grid_measure(p, k) == dore_maleva_measure(p, k));
  const auto s = dore_maleva_stage(p, 2);
  CHECK(s.pitch == Rational(1, 3));
  CHECK(s.half_side == Rational(1, 9));
  CHECK(s.centres_per_axis == 3);
  CHECK(s.disjoint);
  CHECK(dore_maleva_geometry(p, 2)[1].at("squares").size() == 9);
  CHECK_THROWS(make_dore_maleva_params({4}, {Rational(1)}));
  CHECK_THROWS(make_dore_maleva_params({3, 1}, {Rational(1), Rational(1)}));
  CHECK_THROWS(make_dore_maleva_params({3}, {Rational(4)}));
  CHECK(make_dore_maleva_params({3}, {Rational(3)}).N.size() == 1);
  CHECK(dore_maleva_stage(make_dore_maleva_params({3}, {Rational(3)}), 1).degenerate);
}
