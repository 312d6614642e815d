#include "exactdiff/bits.hpp"

#include <algorithm>
#include <stdexcept>

namespace exactdiff {

BitString::BitString(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  for (auto b : bits_) {
    if (b > 1) throw std::invalid_argument("BitString: bits must be 0 or 1");
  }
}

BitString BitString::parse(std::string_view text) {
  std::vector<std::uint8_t> bits;
  bits.reserve(text.size());
  for (char c : text) {
    if (c != '0' && c != '1') throw std::invalid_argument("BitString::parse: bad character");
    bits.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  return BitString(std::move(bits));
}

BitString BitString::append(int bit) const {
  std::vector<std::uint8_t> out = bits_;
  out.push_back(static_cast<std::uint8_t>(bit != 0));
  return BitString(std::move(out));
}

BitString BitString::prefix(std::size_t length) const {
  if (length > bits_.size()) throw std::out_of_range("BitString::prefix: too long");
  return BitString(std::vector<std::uint8_t>(bits_.begin(), bits_.begin() + static_cast<long>(length)));
}

bool BitString::is_prefix_of(const BitString& other) const {
  return size() <= other.size() && std::equal(bits_.begin(), bits_.end(), other.bits_.begin());
}

Rational BitString::left() const { return bits_value(*this); }

Rational BitString::right() const {
  return left() + Rational::pow2(-static_cast<long>(size()));
}

std::string BitString::str() const {
  std::string s;
  s.reserve(bits_.size());
  for (auto b : bits_) s.push_back(static_cast<char>('0' + b));
  return s;
}

std::vector<BitString> BitString::all_of_length(std::size_t length) {
  std::vector<BitString> out;
  out.reserve(std::size_t{1} << length);
  for (std::uint64_t code = 0; code < (std::uint64_t{1} << length); ++code) {
    std::vector<std::uint8_t> bits(length);
    for (std::size_t i = 0; i < length; ++i) bits[i] = (code >> (length - 1 - i)) & 1U;
    out.emplace_back(std::move(bits));
  }
  return out;
}

// ---------------------------------------------------------------------------

BitSource::BitSource(Rule rule, std::string description)
    : rule_(std::make_shared<const Rule>(std::move(rule))), description_(std::move(description)) {}

BitString BitSource::prefix(std::size_t length) const {
  std::vector<std::uint8_t> bits(length);
  for (std::size_t i = 0; i < length; ++i) bits[i] = static_cast<std::uint8_t>((*this)(i));
  return BitString(std::move(bits));
}

BitSource BitSource::constant(int bit) {
  const int b = bit != 0;
  return BitSource([b](std::uint64_t) { return b; }, b ? "constant:1" : "constant:0");
}

BitSource BitSource::periodic(const BitString& pattern) {
  if (pattern.empty()) throw std::invalid_argument("BitSource::periodic: empty pattern");
  return BitSource([pattern](std::uint64_t i) { return pattern[i % pattern.size()]; },
                   "periodic:" + pattern.str());
}

BitSource BitSource::expansion(const Rational& x) {
  if (x <= Rational(0) || x >= Rational(1)) {
    throw std::domain_error("BitSource::expansion: " + x.str() + " outside (0, 1)");
  }
  if (x.is_dyadic()) {
    throw std::domain_error("BitSource::expansion: dyadic coordinate " + x.str() +
                            " has two binary expansions");
  }
  // For non-dyadic x = p/q the bits are periodic after the 2-adic part of q;
  // direct evaluation floor(x 2^{k+1}) mod 2 is exact and stateless.
  const BigInt p = x.numerator();
  const BigInt q = x.denominator();
  return BitSource(
      [p, q](std::uint64_t k) {
        BigInt t;
        mpz_mul_2exp(t.get_mpz_t(), p.get_mpz_t(), k + 1);
        mpz_fdiv_q(t.get_mpz_t(), t.get_mpz_t(), q.get_mpz_t());
        return static_cast<int>(mpz_tstbit(t.get_mpz_t(), 0));
      },
      "expansion:" + x.str());
}

BitSource interleave(const std::vector<BitSource>& sources) {
  if (sources.empty()) throw std::invalid_argument("interleave: empty source list");
  if (sources.size() == 1) return sources.front();
  std::string desc = "interleave(";
  for (std::size_t j = 0; j < sources.size(); ++j) {
    if (j) desc += ",";
    desc += sources[j].description();
  }
  desc += ")";
  return BitSource(
      [sources](std::uint64_t i) {
        const std::uint64_t n = sources.size();
        return sources[i % n](i / n);
      },
      desc);
}

BitSource deinterleave(const BitSource& source, std::size_t n, std::size_t j) {
  if (n == 0 || j >= n) throw std::invalid_argument("deinterleave: bad component");
  return BitSource([source, n, j](std::uint64_t k) { return source(n * k + j); },
                   "component(" + std::to_string(j) + "/" + std::to_string(n) + ")");
}

std::vector<BitSource> point_to_bits(const Vector& z) {
  std::vector<BitSource> out;
  out.reserve(static_cast<std::size_t>(z.size()));
  for (Eigen::Index i = 0; i < z.size(); ++i) out.push_back(BitSource::expansion(z(i)));
  return out;
}

Rational bits_value(const BitSource& source, std::size_t length) {
  return bits_value(source.prefix(length));
}

Rational bits_value(const BitString& bits) {
  BigInt acc = 0;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    acc *= 2;
    acc += bits[i];
  }
  return Rational(acc) * Rational::pow2(-static_cast<long>(bits.size()));
}

// ---------------------------------------------------------------------------

CauchyName CauchyName::constant(Vector value) {
  return CauchyName([value](unsigned) { return value; });
}

CauchyCheck validate_cauchy(const CauchyName& name, unsigned depth) {
  if (depth < 1) throw std::invalid_argument("validate_cauchy: depth must be >= 1");
  std::vector<Vector> q;
  q.reserve(depth + 1);
  for (unsigned k = 0; k <= depth; ++k) q.push_back(name(k));
  for (unsigned n = 0; n <= depth; ++n) {
    const Rational bound = Rational::pow2(-2 * static_cast<long>(n));
    for (unsigned k = n; k <= depth; ++k) {
      if (q[k].size() != q[n].size()) throw std::invalid_argument("validate_cauchy: dimension changes");
      if (squared_norm(q[k] - q[n]) > bound) return {false, std::make_pair(n, k)};
    }
  }
  return {};
}

}  // namespace exactdiff
