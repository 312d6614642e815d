#include "exactdiff/geometry.hpp"

#include <stdexcept>

namespace exactdiff {

namespace {

constexpr unsigned kRoundingBits = 96;

Matrix candidate_columns(const Vector& u) {
  const Eigen::Index n = u.size();
  Matrix cols(n, n + 1);
  cols.col(0) = u;
  for (Eigen::Index i = 0; i < n; ++i) cols.col(i + 1) = unit_vector(n, i);
  return cols;
}

// Normalizes exactly; returns false if some squared norm is not a rational square.
bool normalize_exact(Matrix& m) {
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    Rational root;
    if (!exact_sqrt(squared_norm(m.col(c)), root)) return false;
    m.col(c) /= root;
  }
  return true;
}

void normalize_rounded(Matrix& m) {
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    m.col(c) /= sqrt_approx(squared_norm(m.col(c)), kRoundingBits);
  }
}

Matrix householder_to(const Vector& u) {
  const Eigen::Index n = u.size();
  const Vector e1 = unit_vector(n, 0);
  if (u == e1) return Matrix::Identity(n, n);
  const Vector w = e1 - u;
  return Matrix::Identity(n, n) - (Rational(2) / squared_norm(w)) * (w * w.transpose());
}

void orient(Matrix& b) {
  if (b.cols() >= 2 && determinant(b) < Rational(0)) b.col(b.cols() - 1) *= Rational(-1);
}

}  // namespace

Rational orthogonality_defect(const Matrix& basis) {
  const Matrix g = basis.transpose() * basis;
  Rational worst = 0;
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    for (Eigen::Index j = 0; j < g.cols(); ++j) {
      worst = max(worst, abs(g(i, j) - Rational(i == j ? 1 : 0)));
    }
  }
  return worst;
}

Rational determinant(const Matrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("determinant: matrix not square");
  Matrix m = a;
  const Eigen::Index n = m.rows();
  Rational det = 1;
  for (Eigen::Index c = 0; c < n; ++c) {
    Eigen::Index pivot = c;
    while (pivot < n && m(pivot, c).is_zero()) ++pivot;
    if (pivot == n) return Rational(0);
    if (pivot != c) {
      m.row(pivot).swap(m.row(c));
      det = -det;
    }
    det *= m(c, c);
    for (Eigen::Index r = c + 1; r < n; ++r) {
      if (m(r, c).is_zero()) continue;
      const Rational factor = m(r, c) / m(c, c);
      m.row(r) -= factor * m.row(c);
    }
  }
  return det;
}

Matrix exact_inverse(const Matrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("exact_inverse: matrix not square");
  const Eigen::Index n = a.rows();
  Matrix m = a;
  Matrix inv = Matrix::Identity(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    Eigen::Index pivot = c;
    while (pivot < n && m(pivot, c).is_zero()) ++pivot;
    if (pivot == n) throw std::domain_error("exact_inverse: singular matrix");
    m.row(pivot).swap(m.row(c));
    inv.row(pivot).swap(inv.row(c));
    const Rational scale = Rational(1) / m(c, c);
    m.row(c) *= scale;
    inv.row(c) *= scale;
    for (Eigen::Index r = 0; r < n; ++r) {
      if (r == c || m(r, c).is_zero()) continue;
      const Rational factor = m(r, c);
      m.row(r) -= factor * m.row(c);
      inv.row(r) -= factor * inv.row(c);
    }
  }
  return inv;
}

OrthonormalBasis gram_schmidt_basis(const Vector& u, const Rational& tolerance) {
  if (u.size() == 0) throw std::invalid_argument("gram_schmidt_basis: empty vector");
  const Rational s = squared_norm(u);
  if (s.is_zero()) throw std::invalid_argument("gram_schmidt_basis: zero vector");

  OrthonormalBasis out;
  if (s == Rational(1)) {
    Matrix b = orthogonalize(candidate_columns(u));
    if (normalize_exact(b)) {
      out.method = "gram_schmidt";
    } else {
      b = householder_to(u);
      out.method = "householder";
    }
    orient(b);
    out.columns = b;
    out.exact = true;
    out.defect = orthogonality_defect(b);
    return out;
  }
  if (abs(s - Rational(1)) > tolerance) {
    throw std::domain_error("gram_schmidt_basis: |u|^2 = " + s.str() + " is not within tolerance of 1");
  }
  Vector unit = u / sqrt_approx(s, kRoundingBits);
  Matrix b = orthogonalize(candidate_columns(unit));
  normalize_rounded(b);
  orient(b);
  out.columns = b;
  out.exact = false;
  out.defect = orthogonality_defect(b);
  out.method = "approximate";
  return out;
}

AffineIsometry AffineIsometry::identity(std::size_t n) {
  const auto k = static_cast<Eigen::Index>(n);
  return AffineIsometry{Matrix::Identity(k, k), Vector::Zero(k), Matrix::Identity(k, k), true, 0};
}

AffineIsometry AffineIsometry::with_offset(const Vector& w) const {
  if (w.size() != theta.rows()) throw std::invalid_argument("AffineIsometry: offset dimension mismatch");
  AffineIsometry out = *this;
  out.offset = w;
  return out;
}

AffineIsometry isometry_between(const Vector& u, const Vector& v, const Rational& tolerance) {
  if (u.size() != v.size()) throw std::invalid_argument("isometry_between: dimension mismatch");
  const auto bu = gram_schmidt_basis(u, tolerance);
  const auto bv = gram_schmidt_basis(v, tolerance);
  AffineIsometry t;
  t.theta = bv.columns * bu.columns.transpose();
  t.offset = Vector::Zero(u.size());
  t.defect = orthogonality_defect(t.theta);
  t.exact = bu.exact && bv.exact && t.defect.is_zero();
  t.inverse = t.exact ? Matrix(t.theta.transpose()) : exact_inverse(t.theta);
  return t;
}

AffineIsometry make_isometry(const Matrix& theta, const Vector& offset) {
  if (theta.rows() != theta.cols() || theta.rows() != offset.size()) {
    throw std::invalid_argument("make_isometry: shape mismatch");
  }
  AffineIsometry t;
  t.theta = theta;
  t.offset = offset;
  t.defect = orthogonality_defect(theta);
  t.exact = t.defect.is_zero();
  t.inverse = t.exact ? Matrix(theta.transpose()) : exact_inverse(theta);
  return t;
}

ComputableFunction compose_affine(const ComputableFunction& f, const AffineIsometry& t) {
  if (t.dimension() != f.dimension()) throw std::invalid_argument("compose_affine: dimension mismatch");
  // A rounded Theta stretches lengths by at most 1 + n * defect; one extra
  // bit covers it while that factor stays below 2.
  std::uint64_t stretch = 0;
  if (!t.exact) {
    const Rational factor = Rational(1) + Rational(static_cast<unsigned long>(t.dimension())) * t.defect;
    stretch = ceil_log2(factor);
  }
  return ComputableFunction(
      f.dimension(), [f, t](const Vector& z, unsigned k) { return f.eval(clamp_point(t.apply(z)), k); },
      [f, stretch](std::uint64_t i) { return f.modulus(i) + stretch; },
      json{{"kind", "affine_compose"},
           {"inner", f.descriptor()},
           {"matrix", matrix_to_json(t.theta)},
           {"offset", format_vector(t.offset)}},
      f.exact());
}

ShiftMod1::ShiftMod1(std::size_t coordinate, Rational offset)
    : coordinate_(coordinate), offset_(std::move(offset)) {
  if (offset_ < Rational(0) || offset_ >= Rational(1)) {
    throw std::invalid_argument("ShiftMod1: offset must lie in [0, 1)");
  }
}

ShiftOutcome ShiftMod1::operator()(const Vector& x) const {
  if (coordinate_ >= static_cast<std::size_t>(x.size())) {
    throw std::out_of_range("ShiftMod1: coordinate " + std::to_string(coordinate_) + " out of range");
  }
  ShiftOutcome out{x, false};
  auto& c = out.point(static_cast<Eigen::Index>(coordinate_));
  c += offset_;
  c -= Rational(c.floor());
  out.dyadic = c.is_dyadic();
  return out;
}

ShiftMod1 ShiftMod1::inverse() const {
  return ShiftMod1(coordinate_, offset_.is_zero() ? Rational(0) : Rational(1) - offset_);
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c).str());
    rows.push_back(row);
  }
  return rows;
}

Matrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw std::invalid_argument("matrix_from_json: expected nonempty array");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j.front().size());
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (static_cast<Eigen::Index>(j[r].size()) != cols) throw std::invalid_argument("matrix_from_json: ragged rows");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = Rational::parse(j[r][c].get<std::string>());
  }
  return m;
}

}  // namespace exactdiff
