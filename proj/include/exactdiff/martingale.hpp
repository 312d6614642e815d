// Exact martingales on binary strings, slope martingales of monotone
// functions, oracle-parameterized (uniform) slope martingales and betting runs.
#pragma once

#include "exactdiff/bits.hpp"
#include "exactdiff/function.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace exactdiff {

/// sigma -> B(sigma) with exact rational values.
class Martingale {
 public:
  using Rule = std::function<Rational(const BitString&)>;
  Martingale(Rule rule, json descriptor);

  Rational operator()(const BitString& sigma) const { return (*rule_)(sigma); }
  const json& descriptor() const { return descriptor_; }

  static Martingale constant(const Rational& value);
  /// 2^|sigma| on 11...1, zero once a 0 appears.
  static Martingale all_on_one();
  /// Explicit values keyed by bit string ("" is the root); throws
  /// std::out_of_range for strings missing from the table.
  static Martingale table(std::map<std::string, Rational> values);

 private:
  std::shared_ptr<const Rule> rule_;
  json descriptor_;
};

struct FairnessCheck {
  bool pass = true;
  std::optional<BitString> witness;  // first sigma breaking the law
};

/// 2 B(sigma) = B(sigma 0) + B(sigma 1) for every |sigma| < depth, exactly.
FairnessCheck check_fairness(const Martingale& m, unsigned depth);

/// S_f([sigma]) = (f(right) - f(left)) 2^|sigma|, for any exact f of one
/// variable. Fair for every f; nonnegative only when f is nondecreasing.
Martingale slope_functional(const ComputableFunction& f);

struct MonotonicityAudit {
  bool pass = true;
  std::optional<BitString> witness;  // interval with negative slope
};
/// Slopes over every dyadic interval of length 2^-depth are >= 0.
MonotonicityAudit audit_monotone(const ComputableFunction& f, unsigned depth);

/// Slope functional of an exact monotone f; throws std::domain_error when
/// the audit at `audit_depth` finds a decreasing interval.
Martingale slope_martingale(const ComputableFunction& f, unsigned audit_depth = 12);

/// g(Y, h): a one-variable function parameterized by an oracle Y, evaluated
/// from a finite prefix of Y. `use(precision)` is the number of oracle bits
/// read at that precision; a longer prefix must not move the result beyond
/// its error bound.
struct OracleFunction {
  std::function<Approximation(const BitString& prefix, const Rational& h, unsigned precision)> eval;
  std::function<std::size_t(unsigned precision)> use;
  json descriptor;
};

/// g(Y, h) = h, ignoring the oracle.
OracleFunction identity_section();
/// g(Y, h) = f^(0.Y + h e_axis), f^ = f o P_1, where Y interleaves the binary
/// expansions of the other n - 1 coordinates. Reading b = h_f(k + 1) +
/// ceil(log2 n) bits per coordinate gives error <= 2^-k.
OracleFunction oracle_section(const ComputableFunction& f, std::size_t axis);

/// M(Y, sigma) = S_{g(Y, .)}([sigma]) with certified error.
class UniformMartingale {
 public:
  explicit UniformMartingale(OracleFunction g) : g_(std::move(g)) {}

  /// Oracle bits needed for value(sigma) at the given precision.
  std::size_t use_bound(const BitString& sigma, unsigned precision) const;
  /// Throws std::invalid_argument when the prefix is shorter than the use bound.
  Approximation value(const BitString& oracle_prefix, const BitString& sigma, unsigned precision) const;
  Approximation value(const BitSource& oracle, const BitString& sigma, unsigned precision) const;
  const OracleFunction& section() const { return g_; }

 private:
  OracleFunction g_;
};

/// A uniform martingale with its oracle fixed.
class BoundMartingale {
 public:
  BoundMartingale(UniformMartingale m, BitSource oracle) : m_(std::move(m)), oracle_(std::move(oracle)) {}
  Approximation value(const BitString& sigma, unsigned precision) const {
    return m_.value(oracle_, sigma, precision);
  }
  const BitSource& oracle() const { return oracle_; }

 private:
  UniformMartingale m_;
  BitSource oracle_;
};

/// Audits that the oracle section is nondecreasing on the dyadic grid of
/// the given depth (certified), then fixes the oracle. Throws
/// std::domain_error on a certified decrease.
BoundMartingale uniform_slope_martingale(const OracleFunction& g, const BitSource& oracle,
                                         unsigned audit_depth = 8, unsigned precision = 32);

/// |2 M(sigma) - M(sigma 0) - M(sigma 1)| <= sum of the three error bounds
/// for all |sigma| < depth.
FairnessCheck check_fairness(const BoundMartingale& m, unsigned depth, unsigned precision);

struct BetRun {
  std::vector<Rational> trajectory;  // B(Z|0), ..., B(Z|depth)
  Rational max_capital;
  Rational min_tail_capital;         // min over lengths >= depth / 2
  /// First length at which capital >= threshold, per threshold.
  std::vector<std::pair<Rational, std::optional<std::size_t>>> crossings;

  std::string to_csv() const;
  json summary() const;
};

BetRun run_bet(const Martingale& m, const BitSource& z, std::size_t depth,
               const std::vector<Rational>& thresholds = {});

struct AxisSection {
  ComputableFunction section;  // h -> f^(y + h e_axis), one variable
  BitSource encoding;          // interleaved expansions of y's other coordinates
  Vector y;                    // z with coordinate `axis` set to 0
};

/// Throws std::domain_error when a coordinate of y other than `axis` is dyadic.
AxisSection section_along_axis(const ComputableFunction& f, const Vector& z, std::size_t axis);

Martingale martingale_from_json(const json& descriptor);
BitSource bit_source_from_json(const json& descriptor);

}  // namespace exactdiff
