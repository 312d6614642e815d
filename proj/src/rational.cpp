#include "exactdiff/rational.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace exactdiff {

namespace {

// Exponents beyond this many bits are never expanded into a Rational.
constexpr long kMaterializeLimit = 1L << 16;

unsigned long bit_length(const BigInt& v) {
  if (v == 0) return 0;
  return mpz_sizeinbase(v.get_mpz_t(), 2);
}

BigInt shift_left(const BigInt& v, unsigned long k) {
  BigInt out;
  mpz_mul_2exp(out.get_mpz_t(), v.get_mpz_t(), k);
  return out;
}

Rational scaled_pow2(const BigInt& mantissa, long exponent) {
  Rational m(mantissa);
  return m * Rational::pow2(exponent);
}

}  // namespace

Rational::Rational(const BigInt& num, const BigInt& den) {
  if (den == 0) throw std::domain_error("Rational: zero denominator");
  value_ = mpq_class(num, den);
  value_.canonicalize();
}

Rational& Rational::operator/=(const Rational& o) {
  if (o.is_zero()) throw std::domain_error("Rational: division by zero");
  value_ /= o.value_;
  return *this;
}

Rational Rational::parse(std::string_view text) {
  std::string s(text);
  auto trim = [](std::string& t) {
    const auto b = t.find_first_not_of(" \t");
    const auto e = t.find_last_not_of(" \t");
    t = (b == std::string::npos) ? std::string() : t.substr(b, e - b + 1);
  };
  trim(s);
  if (s.empty()) throw std::invalid_argument("Rational::parse: empty literal");
  auto parse_int = [&](const std::string& t) {
    BigInt v;
    if (t.empty() || v.set_str(t, 10) != 0) {
      throw std::invalid_argument("Rational::parse: malformed literal '" + std::string(text) + "'");
    }
    return v;
  };
  if (const auto slash = s.find('/'); slash != std::string::npos) {
    return Rational(parse_int(s.substr(0, slash)), parse_int(s.substr(slash + 1)));
  }
  if (const auto dot = s.find('.'); dot != std::string::npos) {
    std::string whole = s.substr(0, dot);
    const std::string frac = s.substr(dot + 1);
    bool negative = !whole.empty() && whole[0] == '-';
    if (negative || (!whole.empty() && whole[0] == '+')) whole = whole.substr(1);
    if (whole.empty()) whole = "0";
    BigInt den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    Rational r(parse_int(whole + frac), den);
    return negative ? -r : r;
  }
  return Rational(parse_int(s));
}

Rational Rational::pow2(long k) {
  BigInt p = 1;
  if (k >= 0) {
    mpz_mul_2exp(p.get_mpz_t(), p.get_mpz_t(), static_cast<unsigned long>(k));
    return Rational(p);
  }
  mpz_mul_2exp(p.get_mpz_t(), p.get_mpz_t(), static_cast<unsigned long>(-k));
  return Rational(BigInt(1), p);
}

std::string Rational::str() const {
  return value_.get_num().get_str() + "/" + value_.get_den().get_str();
}

bool Rational::is_dyadic() const {
  return mpz_popcount(value_.get_den_mpz_t()) == 1;
}

BigInt Rational::floor() const {
  BigInt q;
  mpz_fdiv_q(q.get_mpz_t(), value_.get_num_mpz_t(), value_.get_den_mpz_t());
  return q;
}

BigInt Rational::ceil() const {
  BigInt q;
  mpz_cdiv_q(q.get_mpz_t(), value_.get_num_mpz_t(), value_.get_den_mpz_t());
  return q;
}

Rational abs(const Rational& x) { return x.sign() < 0 ? -x : x; }
Rational min(const Rational& a, const Rational& b) { return b < a ? b : a; }
Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }

Rational pow(const Rational& base, unsigned long exponent) {
  BigInt num, den;
  mpz_pow_ui(num.get_mpz_t(), base.gmp().get_num_mpz_t(), exponent);
  mpz_pow_ui(den.get_mpz_t(), base.gmp().get_den_mpz_t(), exponent);
  return Rational(num, den);
}

std::ostream& operator<<(std::ostream& os, const Rational& x) { return os << x.str(); }

long floor_log2(const Rational& x) {
  if (x.is_zero()) throw std::domain_error("floor_log2 of zero");
  BigInt a = abs(x).numerator();
  const BigInt b = x.denominator();
  long t = static_cast<long>(bit_length(a)) - static_cast<long>(bit_length(b));
  // a/b lies in [2^(t-1), 2^(t+1)).
  const Rational ax = abs(x);
  return ax >= Rational::pow2(t) ? t : t - 1;
}

unsigned long ceil_log2(const Rational& x) {
  if (x.sign() <= 0) throw std::domain_error("ceil_log2 of nonpositive value");
  if (x <= Rational(1)) return 0;
  const long fl = floor_log2(x);
  return x == Rational::pow2(fl) ? static_cast<unsigned long>(fl)
                                 : static_cast<unsigned long>(fl + 1);
}

unsigned long ceil_log2_one_plus_sqrt(const Rational& s) {
  if (s.sign() < 0) throw std::domain_error("ceil_log2_one_plus_sqrt of negative value");
  unsigned long c = 0;
  // Start near the answer: 2^c - 1 >= sqrt(s) needs roughly c >= log2(s)/2.
  if (s > Rational(4)) c = ceil_log2(s) / 2;
  while (true) {
    Rational lhs = Rational::pow2(static_cast<long>(c)) - Rational(1);
    if (lhs * lhs >= s) return c;
    ++c;
  }
}

bool exact_sqrt(const Rational& x, Rational& root) {
  if (x.sign() < 0) return false;
  const BigInt n = x.numerator();
  const BigInt d = x.denominator();
  if (!mpz_perfect_square_p(n.get_mpz_t()) || !mpz_perfect_square_p(d.get_mpz_t())) return false;
  BigInt rn, rd;
  mpz_sqrt(rn.get_mpz_t(), n.get_mpz_t());
  mpz_sqrt(rd.get_mpz_t(), d.get_mpz_t());
  root = Rational(rn, rd);
  return true;
}

Rational sqrt_approx(const Rational& x, unsigned bits) {
  if (x.sign() < 0) throw std::domain_error("sqrt_approx of negative value");
  Rational root;
  if (exact_sqrt(x, root)) return root;
  const long b = static_cast<long>(bits) + 1;
  const BigInt scaled = (x * Rational::pow2(2 * b)).floor();
  BigInt r;
  mpz_sqrt(r.get_mpz_t(), scaled.get_mpz_t());
  return Rational(r) * Rational::pow2(-b);
}

// ---------------------------------------------------------------------------

DyadicRational::DyadicRational(BigInt mantissa, BigInt exponent)
    : mantissa_(std::move(mantissa)), exponent_(std::move(exponent)) {
  if (mantissa_ == 0) {
    exponent_ = 0;
    return;
  }
  const unsigned long tz = mpz_scan1(mantissa_.get_mpz_t(), 0);
  if (tz > 0) {
    mpz_tdiv_q_2exp(mantissa_.get_mpz_t(), mantissa_.get_mpz_t(), tz);
    exponent_ += tz;
  }
}

DyadicRational DyadicRational::from_rational(const Rational& r) {
  if (!r.is_dyadic()) throw std::invalid_argument("DyadicRational: " + r.str() + " is not dyadic");
  const long k = static_cast<long>(bit_length(r.denominator())) - 1;
  return DyadicRational(r.numerator(), BigInt(-k));
}

bool DyadicRational::materializable() const {
  return exponent_ <= kMaterializeLimit && exponent_ >= -kMaterializeLimit;
}

Rational DyadicRational::to_rational() const {
  if (!materializable()) {
    throw std::overflow_error("DyadicRational: exponent " + exponent_.get_str() +
                              " too large to expand");
  }
  return scaled_pow2(mantissa_, exponent_.get_si());
}

BigInt DyadicRational::top() const {
  return exponent_ + BigInt(static_cast<unsigned long>(bit_length(abs(mantissa_))));
}

std::string DyadicRational::str() const {
  return mantissa_.get_str() + "*2^" + exponent_.get_str();
}

DyadicRational operator*(const DyadicRational& a, const DyadicRational& b) {
  return DyadicRational(a.mantissa_ * b.mantissa_, a.exponent_ + b.exponent_);
}

namespace {

std::strong_ordering from_int(int c) {
  return c < 0 ? std::strong_ordering::less
               : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
}

// Forced expansion, used only when the two magnitudes are comparable, which
// means the mantissa is itself about as long as the exponent.
Rational expand(const DyadicRational& d) {
  if (d.exponent() >= 0) return Rational(shift_left(d.mantissa(), d.exponent().get_ui()));
  BigInt den = 1;
  BigInt neg = -d.exponent();
  mpz_mul_2exp(den.get_mpz_t(), den.get_mpz_t(), neg.get_ui());
  return Rational(d.mantissa(), den);
}

}  // namespace

std::strong_ordering compare(const Rational& r, const DyadicRational& d) {
  if (d.materializable()) return r <=> d.to_rational();
  const int sr = r.sign();
  const int sd = d.sign();
  if (sr != sd) return from_int(sr < sd ? -1 : 1);
  // Same nonzero sign; compare magnitudes through leading-bit positions.
  const BigInt fl(floor_log2(r));
  const BigInt top = d.top();
  int mag;  // sign of |r| - |d|
  if (top <= fl) {
    mag = 1;
  } else if (top - 1 >= fl + 1) {
    mag = -1;
  } else {
    const int c = cmp(abs(r).gmp(), abs(expand(d)).gmp());
    mag = c;
  }
  return from_int(sr > 0 ? mag : -mag);
}

// ---------------------------------------------------------------------------

void DyadicSum::add(DyadicRational term) {
  if (term.sign() != 0) terms_.push_back(std::move(term));
}

void DyadicSum::add(const DyadicSum& other) {
  for (const auto& t : other.terms_) add(t);
}

void DyadicSum::subtract(const DyadicSum& other) {
  for (const auto& t : other.terms_) add(-t);
}

int DyadicSum::sign() const {
  std::vector<DyadicRational> work = terms_;
  while (true) {
    if (work.empty()) return 0;
    std::sort(work.begin(), work.end(),
              [](const DyadicRational& a, const DyadicRational& b) { return a.top() > b.top(); });
    if (work.size() == 1) return work.front().sign();
    const DyadicRational& lead = work[0];
    const DyadicRational& next = work[1];
    const unsigned long rest = work.size() - 1;
    const BigInt rest_bound = next.top() + BigInt(ceil_log2(Rational(rest)));
    if (rest_bound < lead.top() - 1) return lead.sign();
    // Leading terms overlap in magnitude: add them exactly. The shift is
    // bounded by the mantissa lengths because the tops are close.
    const BigInt e = lead.exponent() < next.exponent() ? lead.exponent() : next.exponent();
    const BigInt s1 = lead.exponent() - e;
    const BigInt s2 = next.exponent() - e;
    DyadicRational merged(shift_left(lead.mantissa(), s1.get_ui()) +
                              shift_left(next.mantissa(), s2.get_ui()),
                          e);
    work.erase(work.begin(), work.begin() + 2);
    if (merged.sign() != 0) work.push_back(std::move(merged));
  }
}

bool DyadicSum::materializable() const {
  return std::all_of(terms_.begin(), terms_.end(),
                     [](const DyadicRational& t) { return t.materializable(); });
}

Rational DyadicSum::to_rational() const {
  Rational acc = 0;
  for (const auto& t : terms_) acc += t.to_rational();
  return acc;
}

Rational DyadicSum::upper_bound(unsigned bits) const {
  if (terms_.empty()) return Rational(0);
  const long slack = static_cast<long>(ceil_log2(Rational(static_cast<unsigned long>(terms_.size()))));
  const BigInt cutoff(-static_cast<long>(bits) - slack);
  Rational acc = 0;
  bool dropped = false;
  for (const auto& t : terms_) {
    if (t.top() > cutoff) {
      acc += t.to_rational();
    } else {
      dropped = true;
    }
  }
  if (dropped) acc += Rational::pow2(-static_cast<long>(bits));
  return acc;
}

std::string DyadicSum::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (i) os << " + ";
    os << terms_[i].str();
  }
  return os.str();
}

std::strong_ordering compare(const DyadicSum& a, const DyadicSum& b) {
  DyadicSum diff = a;
  diff.subtract(b);
  return from_int(diff.sign());
}

// ---------------------------------------------------------------------------

Vector make_vector(std::initializer_list<Rational> entries) {
  Vector v(static_cast<Eigen::Index>(entries.size()));
  Eigen::Index i = 0;
  for (const auto& e : entries) v(i++) = e;
  return v;
}

Vector unit_vector(Eigen::Index n, Eigen::Index i) {
  Vector v = Vector::Constant(n, Rational(0));
  v(i) = Rational(1);
  return v;
}

Vector parse_vector(const std::vector<std::string>& entries) {
  Vector v(static_cast<Eigen::Index>(entries.size()));
  for (std::size_t i = 0; i < entries.size(); ++i) v(static_cast<Eigen::Index>(i)) = Rational::parse(entries[i]);
  return v;
}

std::vector<std::string> format_vector(const Vector& v) {
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i).str());
  return out;
}

std::string to_string(const Vector& v) {
  std::string s = "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += v(i).str();
  }
  return s + ")";
}

bool in_unit_cube(const Vector& x) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x(i) < Rational(0) || x(i) > Rational(1)) return false;
  }
  return true;
}

}  // namespace exactdiff
