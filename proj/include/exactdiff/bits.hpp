// Finite bit strings, infinite bit sources, binary expansions of points and
// Cauchy names.
#pragma once

#include "exactdiff/rational.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace exactdiff {

/// Element of 2^{<omega}. [sigma] is the dyadic interval of reals whose
/// binary expansion extends sigma.
class BitString {
 public:
  BitString() = default;
  explicit BitString(std::vector<std::uint8_t> bits);
  static BitString parse(std::string_view text);  // "0101"

  std::size_t size() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }
  int operator[](std::size_t i) const { return bits_[i]; }

  BitString append(int bit) const;
  BitString prefix(std::size_t length) const;
  bool is_prefix_of(const BitString& other) const;

  /// Left endpoint of [sigma].
  Rational left() const;
  /// Right endpoint of [sigma].
  Rational right() const;

  std::string str() const;
  friend bool operator==(const BitString&, const BitString&) = default;
  friend auto operator<=>(const BitString&, const BitString&) = default;

  /// All strings of the given length in lexicographic order.
  static std::vector<BitString> all_of_length(std::size_t length);

 private:
  std::vector<std::uint8_t> bits_;
};

/// Deterministic element of 2^omega queried bit by bit. Copies share the
/// underlying rule, which must be safe for concurrent reads.
class BitSource {
 public:
  using Rule = std::function<int(std::uint64_t)>;
  BitSource(Rule rule, std::string description);

  int operator()(std::uint64_t index) const { return (*rule_)(index); }
  BitString prefix(std::size_t length) const;
  const std::string& description() const { return description_; }

  static BitSource constant(int bit);
  /// Periodic repetition of a nonempty pattern.
  static BitSource periodic(const BitString& pattern);
  /// Binary expansion of x in (0, 1); x must not be dyadic.
  static BitSource expansion(const Rational& x);

 private:
  std::shared_ptr<const Rule> rule_;
  std::string description_;
};

/// Z_1 (+) ... (+) Z_n: output bit n*k + j is bit k of source j.
BitSource interleave(const std::vector<BitSource>& sources);
/// Inverse of interleave for one coordinate: bits j, j + n, j + 2n, ...
BitSource deinterleave(const BitSource& source, std::size_t n, std::size_t j);

/// Coordinate-wise binary expansions. Dyadic coordinates (including 0 and 1)
/// have two expansions and are rejected.
std::vector<BitSource> point_to_bits(const Vector& z);

/// sum_{k < length} bit(k) 2^{-k-1}.
Rational bits_value(const BitSource& source, std::size_t length);
Rational bits_value(const BitString& bits);

/// Sequence of rational vectors; a Cauchy name when successive
/// approximations satisfy ||q_k - q_n|| <= 2^-n for k >= n.
class CauchyName {
 public:
  using Rule = std::function<Vector(unsigned)>;
  explicit CauchyName(Rule rule) : rule_(std::move(rule)) {}
  Vector operator()(unsigned k) const { return rule_(k); }

  static CauchyName constant(Vector value);

 private:
  Rule rule_;
};

struct CauchyCheck {
  bool pass = true;
  /// First (n, k) with k >= n and ||q_k - q_n|| > 2^-n.
  std::optional<std::pair<unsigned, unsigned>> witness;
};

/// Checks the Cauchy inequality exactly for all n <= k <= depth.
CauchyCheck validate_cauchy(const CauchyName& name, unsigned depth);

}  // namespace exactdiff
