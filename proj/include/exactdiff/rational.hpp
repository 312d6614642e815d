// Exact number types: arbitrary precision integers and rationals, dyadic
// rationals with unbounded exponents, and the Eigen glue that lets dense
// vectors and matrices carry exact entries.
#pragma once

#include <gmpxx.h>

#include <Eigen/Core>

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace exactdiff {

using BigInt = mpz_class;

/// Canonical fraction p/q with q > 0 and gcd(p, q) = 1.
class Rational {
 public:
  Rational() = default;
  Rational(int v) : value_(v) {}
  Rational(long v) : value_(v) {}
  Rational(long long v) : value_(static_cast<long>(v)) {}
  Rational(unsigned v) : value_(v) {}
  Rational(unsigned long v) : value_(v) {}
  explicit Rational(const BigInt& n) : value_(n) {}
  Rational(const BigInt& num, const BigInt& den);
  explicit Rational(const mpq_class& q) : value_(q) { value_.canonicalize(); }

  /// Accepts "p/q", "p", or a finite decimal such as "-0.375".
  static Rational parse(std::string_view text);
  /// 2^k for any integer k.
  static Rational pow2(long k);

  /// Always "p/q", including integers ("3/1").
  std::string str() const;
  double to_double() const { return value_.get_d(); }

  BigInt numerator() const { return value_.get_num(); }
  BigInt denominator() const { return value_.get_den(); }
  const mpq_class& gmp() const { return value_; }

  int sign() const { return sgn(value_); }
  bool is_zero() const { return sign() == 0; }
  bool is_integer() const { return value_.get_den() == 1; }
  /// Denominator is a power of two.
  bool is_dyadic() const;

  BigInt floor() const;
  BigInt ceil() const;

  Rational& operator+=(const Rational& o) { value_ += o.value_; return *this; }
  Rational& operator-=(const Rational& o) { value_ -= o.value_; return *this; }
  Rational& operator*=(const Rational& o) { value_ *= o.value_; return *this; }
  Rational& operator/=(const Rational& o);

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  friend Rational operator-(const Rational& a) { return Rational(mpq_class(-a.value_)); }

  friend bool operator==(const Rational& a, const Rational& b) { return cmp(a.value_, b.value_) == 0; }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    const int c = cmp(a.value_, b.value_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

 private:
  mpq_class value_;
};

Rational abs(const Rational& x);
Rational min(const Rational& a, const Rational& b);
Rational max(const Rational& a, const Rational& b);
/// Integer power with a nonnegative exponent.
Rational pow(const Rational& base, unsigned long exponent);
std::ostream& operator<<(std::ostream& os, const Rational& x);

/// floor(log2 |x|) for x != 0.
long floor_log2(const Rational& x);
/// Smallest c >= 0 with 2^c >= x; x > 0.
unsigned long ceil_log2(const Rational& x);
/// Smallest c >= 0 with 2^c >= 1 + sqrt(s), where s >= 0 is a squared norm.
unsigned long ceil_log2_one_plus_sqrt(const Rational& s);
/// Exact square root when x is the square of a rational.
bool exact_sqrt(const Rational& x, Rational& root);
/// Rational r with |r - sqrt(x)| <= 2^-bits, x >= 0.
Rational sqrt_approx(const Rational& x, unsigned bits);

/// m * 2^e with an arbitrary precision exponent. Canonical form keeps the
/// mantissa odd (or zero with exponent zero).
class DyadicRational {
 public:
  DyadicRational() = default;
  DyadicRational(BigInt mantissa, BigInt exponent);
  static DyadicRational from_rational(const Rational& r);  // throws unless dyadic

  const BigInt& mantissa() const { return mantissa_; }
  const BigInt& exponent() const { return exponent_; }
  int sign() const { return sgn(mantissa_); }

  /// Exponent small enough that the value can be held as a Rational.
  bool materializable() const;
  Rational to_rational() const;  // throws std::overflow_error when not materializable
  /// Position of the leading bit: |x| < 2^top() and |x| >= 2^(top()-1).
  BigInt top() const;
  std::string str() const;  // "m*2^e"

  friend DyadicRational operator*(const DyadicRational& a, const DyadicRational& b);
  friend DyadicRational operator-(const DyadicRational& a) {
    return DyadicRational(-a.mantissa_, a.exponent_);
  }
  friend bool operator==(const DyadicRational& a, const DyadicRational& b) {
    return a.mantissa_ == b.mantissa_ && a.exponent_ == b.exponent_;
  }

 private:
  BigInt mantissa_ = 0;
  BigInt exponent_ = 0;
};

/// Exact three-way comparison between a rational and a dyadic of any size.
std::strong_ordering compare(const Rational& r, const DyadicRational& d);

/// Finite sum of dyadic terms kept symbolically so terms with astronomically
/// small exponents never need to be expanded. The sign is decided exactly.
class DyadicSum {
 public:
  DyadicSum() = default;
  explicit DyadicSum(DyadicRational term) { add(std::move(term)); }

  void add(DyadicRational term);
  void add(const DyadicSum& other);
  void subtract(const DyadicSum& other);
  const std::vector<DyadicRational>& terms() const { return terms_; }

  int sign() const;
  bool materializable() const;
  Rational to_rational() const;
  /// Rational upper bound within 2^-bits of the true value.
  Rational upper_bound(unsigned bits) const;
  std::string str() const;

 private:
  std::vector<DyadicRational> terms_;
};

std::strong_ordering compare(const DyadicSum& a, const DyadicSum& b);

}  // namespace exactdiff

namespace Eigen {

template <>
struct NumTraits<exactdiff::Rational> : GenericNumTraits<exactdiff::Rational> {
  using Real = exactdiff::Rational;
  using NonInteger = exactdiff::Rational;
  using Nested = exactdiff::Rational;
  using Literal = exactdiff::Rational;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 4,
    AddCost = 16,
    MulCost = 32
  };
  static inline Real epsilon() { return Real(0); }
  static inline Real dummy_precision() { return Real(0); }
  static inline int digits10() { return 0; }
};

}  // namespace Eigen

namespace exactdiff {

using Vector = Eigen::Matrix<Rational, Eigen::Dynamic, 1>;
using Matrix = Eigen::Matrix<Rational, Eigen::Dynamic, Eigen::Dynamic>;

Vector make_vector(std::initializer_list<Rational> entries);
Vector unit_vector(Eigen::Index n, Eigen::Index i);
Vector parse_vector(const std::vector<std::string>& entries);
std::vector<std::string> format_vector(const Vector& v);
std::string to_string(const Vector& v);

/// Euclidean norm squared; the norm itself is generally irrational.
template <typename Derived>
Rational squared_norm(const Eigen::MatrixBase<Derived>& v) {
  Rational acc = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) acc += v(i) * v(i);
  return acc;
}

template <typename DerivedA, typename DerivedB>
Rational dot(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  Rational acc = 0;
  for (Eigen::Index i = 0; i < a.size(); ++i) acc += a(i) * b(i);
  return acc;
}

template <typename Derived>
Rational max_norm(const Eigen::MatrixBase<Derived>& v) {
  Rational acc = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) acc = max(acc, abs(v(i)));
  return acc;
}

/// Every coordinate in [0, 1].
bool in_unit_cube(const Vector& x);

}  // namespace exactdiff
