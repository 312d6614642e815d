#include "exactdiff/function.hpp"

#include <algorithm>
#include <stdexcept>

namespace exactdiff {

namespace {

json rational_array(const Vector& v) {
  json out = json::array();
  for (const auto& s : format_vector(v)) out.push_back(s);
  return out;
}

void require_dimension(const Vector& q, std::size_t n, const char* who) {
  if (static_cast<std::size_t>(q.size()) != n) {
    throw std::invalid_argument(std::string(who) + ": expected a point of dimension " +
                                std::to_string(n) + ", got " + std::to_string(q.size()));
  }
}

// Extra bits needed so that a factor |c| does not amplify error past 2^-i.
unsigned long guard_bits(const Rational& c) {
  const Rational a = abs(c);
  return a <= Rational(1) ? 0 : ceil_log2(a);
}

}  // namespace

ComputableFunction::ComputableFunction(std::size_t dimension, Evaluator eval, Modulus modulus,
                                       json descriptor, bool exact) {
  if (dimension == 0) throw std::invalid_argument("ComputableFunction: dimension must be positive");
  node_ = std::make_shared<const Node>(
      Node{dimension, std::move(eval), std::move(modulus), std::move(descriptor), exact});
}

Approximation ComputableFunction::eval(const Vector& q, unsigned precision) const {
  require_dimension(q, dimension(), "ComputableFunction::eval");
  return node_->eval(q, precision);
}

Rational ComputableFunction::operator()(const Vector& q) const {
  if (!exact()) throw std::logic_error("ComputableFunction: exact value requested from inexact function");
  return eval(q, 0).value;
}

ComputableFunction constant_function(std::size_t dimension, const Rational& value) {
  return ComputableFunction(
      dimension, [value](const Vector&, unsigned) { return Approximation{value, 0}; },
      [](std::uint64_t) { return std::uint64_t{0}; },
      json{{"kind", "constant"}, {"dimension", dimension}, {"value", value.str()}}, true);
}

ComputableFunction linear_form(const Vector& m, const Rational& offset) {
  if (m.size() == 0) throw std::invalid_argument("linear_form: dimension must be positive");
  const std::uint64_t extra = ceil_log2_one_plus_sqrt(squared_norm(m));
  return ComputableFunction(
      static_cast<std::size_t>(m.size()),
      [m, offset](const Vector& x, unsigned) { return Approximation{dot(m, x) + offset, 0}; },
      [extra](std::uint64_t i) { return i + extra; },
      json{{"kind", "linear"}, {"coefficients", rational_array(m)}, {"offset", offset.str()}}, true);
}

ComputableFunction monomial(const std::vector<unsigned>& powers) {
  if (powers.empty()) throw std::invalid_argument("monomial: dimension must be positive");
  Rational norm2 = 0;
  for (unsigned p : powers) norm2 += Rational(p) * Rational(p);
  const std::uint64_t extra = ceil_log2_one_plus_sqrt(norm2);
  return ComputableFunction(
      powers.size(),
      [powers](const Vector& x, unsigned) {
        Rational v = 1;
        for (std::size_t i = 0; i < powers.size(); ++i) v *= pow(x(static_cast<Eigen::Index>(i)), powers[i]);
        return Approximation{v, 0};
      },
      [extra](std::uint64_t i) { return i + extra; },
      json{{"kind", "monomial"}, {"powers", powers}}, true);
}

ComputableFunction abs_function(const ComputableFunction& f) {
  return ComputableFunction(
      f.dimension(),
      [f](const Vector& x, unsigned k) {
        auto a = f.eval(x, k);
        return Approximation{abs(a.value), a.error};
      },
      [f](std::uint64_t i) { return f.modulus(i); }, json{{"kind", "abs"}, {"inner", f.descriptor()}},
      f.exact());
}

ComputableFunction sum(const std::vector<ComputableFunction>& terms) {
  if (terms.empty()) throw std::invalid_argument("sum: no terms");
  const std::size_t n = terms.front().dimension();
  bool exact = true;
  json parts = json::array();
  for (const auto& t : terms) {
    if (t.dimension() != n) throw std::invalid_argument("sum: dimension mismatch");
    exact = exact && t.exact();
    parts.push_back(t.descriptor());
  }
  const unsigned long spread = ceil_log2(Rational(static_cast<unsigned long>(terms.size())));
  return ComputableFunction(
      n,
      [terms, spread](const Vector& x, unsigned k) {
        Approximation acc{0, 0};
        for (const auto& t : terms) {
          auto a = t.eval(x, k + static_cast<unsigned>(spread));
          acc.value += a.value;
          acc.error += a.error;
        }
        return acc;
      },
      [terms, spread](std::uint64_t i) {
        std::uint64_t h = 0;
        for (const auto& t : terms) h = std::max(h, t.modulus(i + spread));
        return h;
      },
      json{{"kind", "sum"}, {"terms", parts}}, exact);
}

ComputableFunction scaled(const Rational& factor, const ComputableFunction& f) {
  const unsigned long guard = guard_bits(factor);
  return ComputableFunction(
      f.dimension(),
      [factor, f, guard](const Vector& x, unsigned k) {
        auto a = f.eval(x, k + static_cast<unsigned>(guard));
        return Approximation{factor * a.value, abs(factor) * a.error};
      },
      [f, guard](std::uint64_t i) { return f.modulus(i + guard); },
      json{{"kind", "scale"}, {"factor", factor.str()}, {"inner", f.descriptor()}}, f.exact());
}

ComputableFunction piecewise_linear(std::size_t dimension, std::size_t axis,
                                    std::vector<std::pair<Rational, Rational>> knots) {
  if (axis >= dimension) throw std::invalid_argument("piecewise_linear: axis out of range");
  if (knots.empty()) throw std::invalid_argument("piecewise_linear: no knots");
  Rational lip = 0;
  for (std::size_t k = 1; k < knots.size(); ++k) {
    if (knots[k].first <= knots[k - 1].first) {
      throw std::invalid_argument("piecewise_linear: abscissae must be strictly increasing");
    }
    lip = max(lip, abs((knots[k].second - knots[k - 1].second) / (knots[k].first - knots[k - 1].first)));
  }
  const std::uint64_t extra = ceil_log2(Rational(1) + lip);
  json jk = json::array();
  for (const auto& [x, y] : knots) jk.push_back({x.str(), y.str()});
  const auto idx = static_cast<Eigen::Index>(axis);
  return ComputableFunction(
      dimension,
      [knots, idx](const Vector& p, unsigned) {
        const Rational& t = p(idx);
        if (t <= knots.front().first) return Approximation{knots.front().second, 0};
        if (t >= knots.back().first) return Approximation{knots.back().second, 0};
        auto hi = std::upper_bound(knots.begin(), knots.end(), t,
                                   [](const Rational& v, const auto& kn) { return v < kn.first; });
        auto lo = hi - 1;
        const Rational slope = (hi->second - lo->second) / (hi->first - lo->first);
        return Approximation{lo->second + slope * (t - lo->first), 0};
      },
      [extra](std::uint64_t i) { return i + extra; },
      json{{"kind", "piecewise_linear"}, {"dimension", dimension}, {"axis", axis}, {"knots", jk}}, true);
}

VectorFunction clamp_p1(std::size_t dimension) {
  if (dimension == 0) throw std::invalid_argument("clamp_p1: dimension must be positive");
  VectorFunction out;
  for (std::size_t i = 0; i < dimension; ++i) {
    const auto idx = static_cast<Eigen::Index>(i);
    out.emplace_back(
        dimension, [idx](const Vector& x, unsigned) { return Approximation{min(Rational(1), x(idx)), 0}; },
        [](std::uint64_t k) { return k; },
        json{{"kind", "clamp"}, {"dimension", dimension}, {"axis", i}}, true);
  }
  return out;
}

Vector clamp_point(const Vector& x) {
  Vector out = x;
  for (Eigen::Index i = 0; i < out.size(); ++i) out(i) = min(Rational(1), out(i));
  return out;
}

KnDecomposition kn_decompose(const ComputableFunction& f, const Rational& lipschitz_bound) {
  if (lipschitz_bound <= Rational(0)) throw std::invalid_argument("kn_decompose: bound must be positive");
  Vector m = Vector::Constant(static_cast<Eigen::Index>(f.dimension()), lipschitz_bound);
  return {sum({f, linear_form(m)}), m};
}

Rational lipschitz_lower_bound(const ComputableFunction& f, unsigned scale, unsigned precision) {
  if (scale < 1) throw std::invalid_argument("lipschitz_lower_bound: scale must be >= 1");
  const std::size_t n = f.dimension();
  const unsigned long points = (1UL << scale) + 1;
  const Rational step = Rational::pow2(-static_cast<long>(scale));
  const Rational inv = Rational::pow2(static_cast<long>(scale));
  std::vector<unsigned long> idx(n, 0);
  Rational best = 0;
  while (true) {
    Vector x(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) x(static_cast<Eigen::Index>(i)) = Rational(idx[i]) * step;
    const auto fx = f.eval(x, precision);
    for (std::size_t i = 0; i < n; ++i) {
      if (idx[i] + 1 >= points) continue;
      Vector y = x;
      y(static_cast<Eigen::Index>(i)) += step;
      const auto fy = f.eval(y, precision);
      const Rational lower = (abs(fy.value - fx.value) - fx.error - fy.error) * inv;
      best = max(best, lower);
    }
    std::size_t d = 0;
    while (d < n && ++idx[d] == points) idx[d++] = 0;
    if (d == n) break;
  }
  return best;
}

}  // namespace exactdiff
