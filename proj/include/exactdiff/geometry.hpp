// Orthonormal bases, affine isometries x -> Theta x + w, composition with the
// clamp P_1, and the mod-1 coordinate shift.
#pragma once

#include "exactdiff/function.hpp"

#include <optional>
#include <string>
#include <vector>

namespace exactdiff {

/// Classical Gram-Schmidt without normalization over any field scalar.
/// Columns that become zero are dropped.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> orthogonalize(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& columns) {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  std::vector<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>> kept;
  for (Eigen::Index c = 0; c < columns.cols(); ++c) {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> v = columns.col(c);
    for (const auto& q : kept) v -= (q.dot(v) / q.dot(q)) * q;
    if (v != Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(v.size())) kept.push_back(v);
  }
  Mat out(columns.rows(), static_cast<Eigen::Index>(kept.size()));
  for (std::size_t c = 0; c < kept.size(); ++c) out.col(static_cast<Eigen::Index>(c)) = kept[c];
  return out;
}

/// Largest |(B^T B - I)_{ij}|, zero exactly when B is orthogonal.
Rational orthogonality_defect(const Matrix& basis);
Rational determinant(const Matrix& a);
/// Gauss-Jordan inverse; throws std::domain_error when singular.
Matrix exact_inverse(const Matrix& a);

struct OrthonormalBasis {
  Matrix columns;        // first column is the input direction
  bool exact = true;     // orthonormal with no rounding
  Rational defect = 0;   // orthogonality_defect(columns)
  std::string method;    // "gram_schmidt", "householder" or "approximate"
};

/// Orthonormal basis with u first and positive orientation.
/// When ||u||^2 = 1 exactly the basis is exact: Gram-Schmidt when every
/// normalization is a rational square root, otherwise the Householder
/// reflection mapping e_1 to u. A unit vector within `tolerance` (on ||u||^2)
/// goes through a rounded path with the defect recorded.
OrthonormalBasis gram_schmidt_basis(const Vector& u, const Rational& tolerance = Rational::pow2(-20));

struct AffineIsometry {
  Matrix theta;
  Vector offset;
  Matrix inverse;
  bool exact = true;
  Rational defect = 0;

  static AffineIsometry identity(std::size_t n);
  Vector apply(const Vector& x) const { return theta * x + offset; }
  Vector apply_inverse(const Vector& y) const { return inverse * (y - offset); }
  AffineIsometry with_offset(const Vector& w) const;
  std::size_t dimension() const { return static_cast<std::size_t>(theta.rows()); }
};

/// Theta = B_v B_u^T maps B_u onto B_v, so Theta u = v. Offset zero.
AffineIsometry isometry_between(const Vector& u, const Vector& v,
                                const Rational& tolerance = Rational::pow2(-20));
/// Affine map from an arbitrary square matrix and offset; exactness is
/// decided from the matrix.
AffineIsometry make_isometry(const Matrix& theta, const Vector& offset);

/// g(z) = f(P_1(Theta z + w)).
ComputableFunction compose_affine(const ComputableFunction& f, const AffineIsometry& t);

struct ShiftOutcome {
  Vector point;
  /// Shifted coordinate is dyadic (e.g. wrapped onto 0).
  bool dyadic = false;
};

/// x_i -> x_i + offset mod 1 on one coordinate.
class ShiftMod1 {
 public:
  ShiftMod1(std::size_t coordinate, Rational offset);
  ShiftOutcome operator()(const Vector& x) const;
  ShiftMod1 inverse() const;
  std::size_t coordinate() const { return coordinate_; }
  const Rational& offset() const { return offset_; }

 private:
  std::size_t coordinate_;
  Rational offset_;
};

json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const json& j);

}  // namespace exactdiff
