#include "exactdiff/counterexample.hpp"

#include <doctest.h>

#include <algorithm>

using namespace exactdiff;

namespace {

Vector pt(Rational a, Rational b) { return make_vector({a, b}); }

NestedTest two_cube_test() {
  return nested_test_from_json(json::parse(R"({
    "dimension": 2,
    "stages": [{"rule": "unit"},
               {"rule": "explicit", "cubes": [{"dim": 2, "scale": 1, "corner": ["0", "0"]},
                                               {"dim": 2, "scale": 2, "corner": ["2", "2"]}]}]})"));
}

}  // namespace

TEST_CASE("toy partition shape") {
  const auto p = build_partition(toy_test(4), 64, 4);
  const long expected[] = {0, 5, 11, 20, 32};
  for (std::size_t m = 0; m <= 4; ++m) {
    REQUIRE(p.stages[m].size() == 1);
    CHECK(p.stages[m][0].cell_scale == expected[m]);
    CHECK(p.stages[m][0].first_index == 1);
  }
  // Stage 1: [1/4, 1/2)^2 cut into 8 x 8 cells of side 1/32.
  CHECK(p.cell_count(1) == 64);
  CHECK(p.cell(1, BigInt(1)) == DyadicCube(5, {BigInt(8), BigInt(8)}));
  CHECK(p.cell(1, BigInt(2)) == DyadicCube(5, {BigInt(8), BigInt(9)}));
  CHECK(p.cell(1, BigInt(9)) == DyadicCube(5, {BigInt(9), BigInt(8)}));
  CHECK_THROWS_AS(p.cell(1, BigInt(65)), std::out_of_range);
  // 1/3 lies in cell (10, 10) of side 1/32: index 2 * 8 + 2 + 1 = 19.
  const auto loc = p.locate(1, pt(Rational(1, 3), Rational(1, 3)));
  REQUIRE(loc);
  CHECK(loc->index == 19);
  CHECK_FALSE(p.locate(1, pt(Rational(5, 16), Rational(1, 3))));  // on a cell face
  CHECK_FALSE(p.locate(1, pt(Rational(3, 4), Rational(1, 3))));
  CHECK(verify_partition(p).pass());
}

TEST_CASE("cell cap follows the previous cell of the stage") {
  const auto p = build_partition(two_cube_test(), 8, 1);
  REQUIRE(p.stages[1].size() == 2);
  CHECK(p.stages[1][0].cell_scale == 4);
  CHECK(p.stages[1][1].cell_scale == 5);
  CHECK(p.stages[1][1].first_index == p.stages[1][0].last_index() + 1);
  CHECK(verify_partition(p).pass());
}

TEST_CASE("verification rejects a reordered partition") {
  auto p = build_partition(two_cube_test(), 8, 1);
  auto& blocks = p.stages[1];
  std::swap(blocks[0], blocks[1]);
  blocks[0].first_index = 1;
  blocks[1].first_index = blocks[0].last_index() + 1;
  const auto check = verify_partition(p);
  CHECK_FALSE(check.pass());
  CHECK_FALSE(check.disjoint_order_ok);
  CHECK(check.union_ok);
}

TEST_CASE("verification rejects a coarse cell") {
  auto p = build_partition(toy_test(2), 8, 2);
  p.stages[2][0].cell_scale = 6;
  const auto check = verify_partition(p);
  CHECK_FALSE(check.parent_ok);
  CHECK_FALSE(check.side_ok);
}

TEST_CASE("uncovered stage cube blocks the build") {
  const auto t = nested_test_from_json(json::parse(R"({
    "dimension": 2,
    "stages": [{"rule": "explicit", "cubes": [{"dim": 2, "scale": 1, "corner": ["0", "0"]}]},
               {"rule": "explicit", "cubes": [{"dim": 2, "scale": 2, "corner": ["3", "3"]}]}]})"));
  CHECK_THROWS_WITH_AS(build_partition(t, 8, 1), doctest::Contains("stage 1"), std::runtime_error);
}

TEST_CASE("tent values") {
  const DyadicCube c(2, {BigInt(1), BigInt(1)});  // [1/4, 1/2]^2
  const BigInt j(3);
  // eps = 2^-(1+3+1) * 1/4 = 2^-7.
  CHECK(tent_epsilon(1, j, 2).to_rational() == Rational::pow2(-7));
  CHECK(tent_value(c, 1, j, pt(Rational(3, 8), Rational(3, 8))) == Rational(1, 8));
  CHECK(tent_value(c, 1, j, pt(Rational(5, 16), Rational(3, 8))) == Rational(1, 16));
  // On the ramp in the second coordinate: t = 2^-8 gives factor 1/2.
  CHECK(tent_value(c, 1, j, pt(Rational(3, 8), Rational(1, 4) + Rational::pow2(-8))) == Rational(1, 16));
  CHECK(tent_value(c, 1, j, pt(Rational(1, 4), Rational(3, 8))) == Rational(0));
  CHECK(tent_value(c, 1, j, pt(Rational(3, 4), Rational(3, 8))) == Rational(0));
  const auto t = tent_for(c, 0, BigInt(0));
  CHECK(t.degenerate);
  CHECK_FALSE(tent_for(c, 1, j).degenerate);
  CHECK(function_from_json(tent_for(c, 1, j).function.descriptor())(pt(Rational(5, 16), Rational(3, 8))) ==
        Rational(1, 16));
}

TEST_CASE("tent system queries") {
  const auto sys = build_tent_system(toy_test(4), 64, 4, 0);
  const Vector z = pt(Rational(1, 3), Rational(1, 3));
  CHECK(sys.modulus(1) == 6);
  CHECK(sys.modulus(3) == 21);
  CHECK(sys.stage_value(0, z) == Rational(1, 3));
  // Stage-1 cell [5/16, 11/32]^2: distance 1/96 to the right face, times 4.
  CHECK(sys.stage_value(1, z) == Rational(1, 24));
  CHECK(sys.truncated(pt(Rational(3, 4), Rational(3, 4))) == Rational(0));
  const auto e = sys.evaluate(z, 2);
  CHECK(e.upper - e.lower == Rational(1, 4));
  CHECK_THROWS_AS(sys.evaluate(z, 5), std::out_of_range);
  CHECK_THROWS_AS(sys.oscillation(pt(Rational(3, 4), Rational(3, 4)), 2), std::domain_error);
  const auto osc = sys.oscillation(z, 3);
  CHECK(osc.pass());
  CHECK(abs(osc.per_stage[2]) == Rational(64));
  CHECK(sys.exclusion(2, 1).pass);
  CHECK_THROWS(sys.exclusion(2, 0));
  CHECK(sys.audit_modulus(2, 50, 3).pass);
}

TEST_CASE("bundles round trip") {
  const auto sys = build_tent_system(toy_test(3), 64, 3, 0);
  const auto back = TentSystem::from_bundle(sys.to_bundle());
  CHECK(same_partition(sys.partition(), back.partition()));
  CHECK(back.cutoff() == 0);
  CHECK(back.to_bundle() == sys.to_bundle());
  auto tampered = sys.to_bundle();
  tampered["blocks"][2][0]["first_index"] = "2";
  CHECK_FALSE(same_partition(sys.partition(), TentSystem::from_bundle(tampered).partition()));
  CHECK_FALSE(verify_partition(TentSystem::from_bundle(tampered).partition()).pass());
  CHECK_THROWS(TentSystem::from_bundle(json{{"format", "other"}}));
}
