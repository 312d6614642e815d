#include "exactdiff/cube.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace exactdiff {

DyadicCube::DyadicCube(long scale, std::vector<BigInt> corner)
    : scale_(scale), corner_(std::move(corner)) {
  if (scale_ < 0) throw std::invalid_argument("DyadicCube: negative scale");
  if (corner_.empty()) throw std::invalid_argument("DyadicCube: dimension must be positive");
  BigInt limit = 1;
  mpz_mul_2exp(limit.get_mpz_t(), limit.get_mpz_t(), static_cast<unsigned long>(scale_));
  for (const auto& c : corner_) {
    if (c < 0 || c >= limit) throw std::invalid_argument("DyadicCube: corner outside the unit cube");
  }
}

DyadicCube DyadicCube::containing(const Vector& x, long scale) {
  std::vector<BigInt> corner;
  const Rational width = Rational::pow2(scale);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x(i) < Rational(0) || x(i) >= Rational(1)) {
      throw std::domain_error("DyadicCube::containing: point outside [0,1)^n");
    }
    corner.push_back((x(i) * width).floor());
  }
  return DyadicCube(scale, std::move(corner));
}

Rational DyadicCube::lower(std::size_t axis) const {
  return Rational(corner_.at(axis)) * side();
}

Rational DyadicCube::upper(std::size_t axis) const {
  return Rational(BigInt(corner_.at(axis) + 1)) * side();
}

bool DyadicCube::contains(const DyadicCube& other) const {
  if (other.dimension() != dimension()) throw std::invalid_argument("DyadicCube: dimension mismatch");
  if (other.scale_ < scale_) return false;
  return other.ancestor(scale_) == *this;
}

bool DyadicCube::interior_intersects(const DyadicCube& other) const {
  return contains(other) || other.contains(*this);
}

bool DyadicCube::contains_point_open(const Vector& x) const {
  if (static_cast<std::size_t>(x.size()) != dimension()) return false;
  for (std::size_t i = 0; i < dimension(); ++i) {
    const auto& xi = x(static_cast<Eigen::Index>(i));
    if (xi <= lower(i) || xi >= upper(i)) return false;
  }
  return true;
}

bool DyadicCube::contains_point_closed(const Vector& x) const {
  if (static_cast<std::size_t>(x.size()) != dimension()) return false;
  for (std::size_t i = 0; i < dimension(); ++i) {
    const auto& xi = x(static_cast<Eigen::Index>(i));
    if (xi < lower(i) || xi > upper(i)) return false;
  }
  return true;
}

DyadicCube DyadicCube::ancestor(long coarser_scale) const {
  if (coarser_scale > scale_ || coarser_scale < 0) throw std::invalid_argument("DyadicCube::ancestor: bad scale");
  std::vector<BigInt> corner(corner_.size());
  const auto shift = static_cast<unsigned long>(scale_ - coarser_scale);
  for (std::size_t i = 0; i < corner_.size(); ++i) {
    mpz_fdiv_q_2exp(corner[i].get_mpz_t(), corner_[i].get_mpz_t(), shift);
  }
  return DyadicCube(coarser_scale, std::move(corner));
}

std::vector<DyadicCube> DyadicCube::children() const {
  const std::size_t n = dimension();
  std::vector<DyadicCube> out;
  out.reserve(std::size_t{1} << n);
  for (std::size_t code = 0; code < (std::size_t{1} << n); ++code) {
    std::vector<BigInt> corner(n);
    for (std::size_t i = 0; i < n; ++i) {
      corner[i] = 2 * corner_[i] + static_cast<unsigned long>((code >> (n - 1 - i)) & 1U);
    }
    out.emplace_back(scale_ + 1, std::move(corner));
  }
  return out;
}

std::string DyadicCube::str() const {
  std::string s = "{scale " + std::to_string(scale_) + ", corner [";
  for (std::size_t i = 0; i < corner_.size(); ++i) {
    if (i) s += ", ";
    s += corner_[i].get_str();
  }
  return s + "]}";
}

bool operator<(const DyadicCube& a, const DyadicCube& b) {
  if (a.scale_ != b.scale_) return a.scale_ < b.scale_;
  return a.corner_ < b.corner_;
}

Rational cube_measure(const std::vector<DyadicCube>& cubes) {
  if (cubes.empty()) return Rational(0);
  const std::size_t n = cubes.front().dimension();
  for (const auto& c : cubes) {
    if (c.dimension() != n) throw std::invalid_argument("cube_measure: mixed dimensions");
  }
  std::vector<DyadicCube> sorted = cubes;
  std::sort(sorted.begin(), sorted.end());
  std::set<DyadicCube> kept;
  std::set<long> kept_scales;
  Rational total = 0;
  for (const auto& c : sorted) {
    bool nested = false;
    for (long s : kept_scales) {
      if (s > c.scale()) break;
      if (kept.count(c.ancestor(s))) {
        nested = true;
        break;
      }
    }
    if (nested) continue;
    kept.insert(c);
    kept_scales.insert(c.scale());
    total += c.volume();
  }
  return total;
}

bool covered_by(const DyadicCube& cube, const std::vector<DyadicCube>& regions) {
  bool partial = false;
  for (const auto& r : regions) {
    if (r.contains(cube)) return true;
    if (cube.contains(r)) partial = true;
  }
  if (!partial) return false;
  for (const auto& child : cube.children()) {
    if (!covered_by(child, regions)) return false;
  }
  return true;
}

std::vector<DyadicCube> subtract(const DyadicCube& cube, const std::vector<DyadicCube>& regions) {
  bool partial = false;
  for (const auto& r : regions) {
    if (r.contains(cube)) return {};
    if (cube.contains(r)) partial = true;
  }
  if (!partial) return {cube};
  std::vector<DyadicCube> out;
  for (const auto& child : cube.children()) {
    auto rest = subtract(child, regions);
    out.insert(out.end(), rest.begin(), rest.end());
  }
  return out;
}

}  // namespace exactdiff
