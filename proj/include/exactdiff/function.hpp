// Computable functions on the unit n-cube as (evaluator, modulus) pairs, and
// the concrete families built from them.
#pragma once

#include "exactdiff/rational.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace exactdiff {

using json = nlohmann::json;

/// A value together with a certified bound: |value - true value| <= error.
struct Approximation {
  Rational value;
  Rational error;
};

/// f: [0,1]^n -> R given by a rational-point evaluator with certified error
/// and a modulus h with ||x - y|| <= 2^-h(i) => |f(x) - f(y)| <= 2^-i.
///
/// Evaluators accept any rational point; the modulus contract is only
/// promised on the unit cube. Instances are immutable and cheap to copy.
class ComputableFunction {
 public:
  using Evaluator = std::function<Approximation(const Vector&, unsigned precision)>;
  using Modulus = std::function<std::uint64_t(std::uint64_t)>;

  ComputableFunction(std::size_t dimension, Evaluator eval, Modulus modulus, json descriptor,
                     bool exact);

  std::size_t dimension() const { return node_->dimension; }
  /// True when every evaluation has error zero.
  bool exact() const { return node_->exact; }

  /// |result.value - f(q)| <= result.error <= 2^-precision.
  Approximation eval(const Vector& q, unsigned precision) const;
  /// Exact value; throws std::logic_error for inexact functions.
  Rational operator()(const Vector& q) const;
  std::uint64_t modulus(std::uint64_t i) const { return node_->modulus(i); }
  const json& descriptor() const { return node_->descriptor; }

 private:
  struct Node {
    std::size_t dimension;
    Evaluator eval;
    Modulus modulus;
    json descriptor;
    bool exact;
  };
  std::shared_ptr<const Node> node_;
};

/// Vector-valued functions are tuples of scalar ones.
using VectorFunction = std::vector<ComputableFunction>;

ComputableFunction constant_function(std::size_t dimension, const Rational& value);
/// x -> <m, x> + offset, exact, modulus i + ceil(log2(1 + ||m||)).
ComputableFunction linear_form(const Vector& m, const Rational& offset = Rational(0));
/// x -> prod_i x_i^{p_i}; Lipschitz bound ||p|| on the unit cube.
ComputableFunction monomial(const std::vector<unsigned>& powers);
ComputableFunction abs_function(const ComputableFunction& f);
ComputableFunction sum(const std::vector<ComputableFunction>& terms);
ComputableFunction scaled(const Rational& factor, const ComputableFunction& f);
/// Piecewise-linear function of coordinate `axis`, interpolating the knots
/// (sorted by abscissa) and constant beyond the ends.
ComputableFunction piecewise_linear(std::size_t dimension, std::size_t axis,
                                    std::vector<std::pair<Rational, Rational>> knots);

/// Componentwise min(1, x_i), the identity on the unit cube.
VectorFunction clamp_p1(std::size_t dimension);
/// Applies the clamp to a point directly.
Vector clamp_point(const Vector& x);

/// g = f + <m, .> with m = (L, ..., L); g is K_n-increasing when L >= Lip(f).
struct KnDecomposition {
  ComputableFunction g;
  Vector m;
};
KnDecomposition kn_decompose(const ComputableFunction& f, const Rational& lipschitz_bound);

/// Certified lower bound on Lip(f): max over axis-adjacent grid pairs at the
/// given scale of |f(x) - f(y)| / ||x - y||, less evaluation error.
Rational lipschitz_lower_bound(const ComputableFunction& f, unsigned scale,
                               unsigned precision = 64);

/// Rebuilds a function from its JSON descriptor.
ComputableFunction function_from_json(const json& descriptor);

}  // namespace exactdiff
