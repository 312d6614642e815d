#include "exactdiff/cube.hpp"

#include <doctest.h>

#include <set>

using namespace exactdiff;

namespace {

DyadicCube cube(long scale, std::vector<long> corner) {
  std::vector<BigInt> c;
  for (long v : corner) c.emplace_back(v);
  return DyadicCube(scale, c);
}

// Oracle: count grid cells at a fine scale covered by some cube.
Rational grid_measure(const std::vector<DyadicCube>& cubes, long fine) {
  std::set<std::pair<long, long>> cells;
  for (const auto& c : cubes) {
    const long k = 1L << (fine - c.scale());
    const long x0 = c.corner()[0].get_si() * k, y0 = c.corner()[1].get_si() * k;
    for (long a = 0; a < k; ++a)
      for (long b = 0; b < k; ++b) cells.insert({x0 + a, y0 + b});
  }
  return Rational(static_cast<long>(cells.size())) * Rational::pow2(-2 * fine);
}

}  // namespace

TEST_CASE("geometry of a dyadic cube") {
  const auto c = cube(2, {1, 3});
  CHECK(c.side() == Rational(1, 4));
  CHECK(c.volume() == Rational(1, 16));
  CHECK(c.lower(1) == Rational(3, 4));
  CHECK(c.upper(1) == Rational(1));
  CHECK(c.ancestor(1) == cube(1, {0, 1}));
  CHECK(c.children().size() == 4);
  CHECK(c.children().front() == cube(3, {2, 6}));
  CHECK(c.children().back() == cube(3, {3, 7}));
  CHECK_THROWS(cube(1, {2, 0}));
}

TEST_CASE("containment and points") {
  const auto big = cube(1, {0, 0});
  const auto small = cube(3, {2, 3});
  CHECK(big.contains(small));
  CHECK(big.interior_intersects(small));
  CHECK_FALSE(small.contains(big));
  CHECK_FALSE(cube(1, {1, 0}).interior_intersects(big));
  const Vector edge = make_vector({Rational(1, 2), Rational(1, 4)});
  CHECK(big.contains_point_closed(edge));
  CHECK_FALSE(big.contains_point_open(edge));
  CHECK(DyadicCube::containing(make_vector({Rational(1, 3), Rational(1, 3)}), 2) == cube(2, {1, 1}));
  CHECK(DyadicCube::containing(edge, 1) == cube(1, {1, 0}));
}

TEST_CASE("union measure matches a grid count") {
  const std::vector<DyadicCube> cubes{cube(1, {0, 0}), cube(2, {1, 1}), cube(2, {2, 0}), cube(3, {5, 1}),
                                      cube(3, {7, 7})};
  CHECK(cube_measure(cubes) == grid_measure(cubes, 3));
  CHECK(cube_measure({}) == Rational(0));
}

TEST_CASE("cover and subtraction") {
  const auto unit = DyadicCube::unit(2);
  CHECK(covered_by(cube(2, {3, 1}), {cube(1, {1, 0})}));
  CHECK(covered_by(cube(1, {0, 0}), cube(1, {0, 0}).children()));
  CHECK_FALSE(covered_by(unit, {cube(1, {0, 0})}));
  const auto rest = subtract(unit, {cube(2, {1, 1})});
  Rational total = 0;
  for (const auto& r : rest) {
    CHECK_FALSE(r.interior_intersects(cube(2, {1, 1})));
    total += r.volume();
  }
  CHECK(total == Rational(15, 16));
  CHECK(subtract(cube(2, {0, 0}), {cube(1, {0, 0})}).empty());
}
