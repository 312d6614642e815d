// Basic dyadic n-cubes prod_i (c_i 2^-s, (c_i + 1) 2^-s) and exact measure of
// finite unions.
#pragma once

#include "exactdiff/rational.hpp"

#include <optional>
#include <string>
#include <vector>

namespace exactdiff {

class DyadicCube {
 public:
  DyadicCube() = default;
  /// Throws unless 0 <= c_i < 2^scale for every coordinate.
  DyadicCube(long scale, std::vector<BigInt> corner);

  static DyadicCube unit(std::size_t dimension) {
    return DyadicCube(0, std::vector<BigInt>(dimension, BigInt(0)));
  }
  /// The scale-s cube whose closure contains x, choosing the cube above x on
  /// grid lines; x must lie in [0, 1)^n.
  static DyadicCube containing(const Vector& x, long scale);

  std::size_t dimension() const { return corner_.size(); }
  long scale() const { return scale_; }
  const std::vector<BigInt>& corner() const { return corner_; }

  Rational side() const { return Rational::pow2(-scale_); }
  Rational volume() const { return Rational::pow2(-scale_ * static_cast<long>(dimension())); }
  Rational lower(std::size_t axis) const;
  Rational upper(std::size_t axis) const;

  /// Closed containment of cubes (dyadic cubes are nested or have disjoint interiors).
  bool contains(const DyadicCube& other) const;
  bool interior_intersects(const DyadicCube& other) const;
  /// Open cube membership.
  bool contains_point_open(const Vector& x) const;
  bool contains_point_closed(const Vector& x) const;

  /// Ancestor at a coarser scale.
  DyadicCube ancestor(long coarser_scale) const;
  std::vector<DyadicCube> children() const;

  std::string str() const;
  friend bool operator==(const DyadicCube&, const DyadicCube&) = default;
  friend bool operator<(const DyadicCube& a, const DyadicCube& b);

 private:
  long scale_ = 0;
  std::vector<BigInt> corner_;
};

/// Exact Lebesgue measure of the union; overlaps are counted once.
Rational cube_measure(const std::vector<DyadicCube>& cubes);

/// Closure of `cube` is contained in the closure of the union of `regions`.
bool covered_by(const DyadicCube& cube, const std::vector<DyadicCube>& regions);
/// Interior of `cube` minus the union of `regions`, as maximal dyadic cubes in
/// depth-first child order.
std::vector<DyadicCube> subtract(const DyadicCube& cube, const std::vector<DyadicCube>& regions);

}  // namespace exactdiff
