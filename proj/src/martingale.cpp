#include "exactdiff/martingale.hpp"

#include <sstream>
#include <stdexcept>

namespace exactdiff {

Martingale::Martingale(Rule rule, json descriptor)
    : rule_(std::make_shared<const Rule>(std::move(rule))), descriptor_(std::move(descriptor)) {}

Martingale Martingale::constant(const Rational& value) {
  if (value < Rational(0)) throw std::invalid_argument("Martingale::constant: negative capital");
  return Martingale([value](const BitString&) { return value; },
                    json{{"kind", "constant"}, {"value", value.str()}});
}

Martingale Martingale::all_on_one() {
  return Martingale(
      [](const BitString& s) {
        for (std::size_t i = 0; i < s.size(); ++i) {
          if (s[i] == 0) return Rational(0);
        }
        return Rational::pow2(static_cast<long>(s.size()));
      },
      json{{"kind", "all_on_one"}});
}

Martingale Martingale::table(std::map<std::string, Rational> values) {
  json jv = json::object();
  for (const auto& [k, v] : values) {
    if (v < Rational(0)) throw std::invalid_argument("Martingale::table: negative capital at '" + k + "'");
    jv[k] = v.str();
  }
  auto shared = std::make_shared<const std::map<std::string, Rational>>(std::move(values));
  return Martingale(
      [shared](const BitString& s) {
        auto it = shared->find(s.str());
        if (it == shared->end()) throw std::out_of_range("Martingale::table: no value for '" + s.str() + "'");
        return it->second;
      },
      json{{"kind", "table"}, {"values", jv}});
}

FairnessCheck check_fairness(const Martingale& m, unsigned depth) {
  for (unsigned len = 0; len < depth; ++len) {
    for (const auto& s : BitString::all_of_length(len)) {
      if (Rational(2) * m(s) != m(s.append(0)) + m(s.append(1))) return {false, s};
    }
  }
  return {};
}

Martingale slope_functional(const ComputableFunction& f) {
  if (f.dimension() != 1) throw std::invalid_argument("slope_functional: f must have one variable");
  if (!f.exact()) throw std::invalid_argument("slope_functional: f must be exact; use UniformMartingale");
  return Martingale(
      [f](const BitString& s) {
        const Rational scale = Rational::pow2(static_cast<long>(s.size()));
        return (f(make_vector({s.right()})) - f(make_vector({s.left()}))) * scale;
      },
      json{{"kind", "slope"}, {"function", f.descriptor()}});
}

MonotonicityAudit audit_monotone(const ComputableFunction& f, unsigned depth) {
  if (f.dimension() != 1) throw std::invalid_argument("audit_monotone: f must have one variable");
  const Rational step = Rational::pow2(-static_cast<long>(depth));
  auto prev = f.eval(make_vector({Rational(0)}), 64);
  for (unsigned long k = 0; k < (1UL << depth); ++k) {
    auto next = f.eval(make_vector({Rational(k + 1) * step}), 64);
    if (next.value - prev.value + next.error + prev.error < Rational(0)) {
      std::vector<std::uint8_t> bits(depth);
      for (unsigned i = 0; i < depth; ++i) bits[i] = (k >> (depth - 1 - i)) & 1U;
      return {false, BitString(std::move(bits))};
    }
    prev = next;
  }
  return {};
}

Martingale slope_martingale(const ComputableFunction& f, unsigned audit_depth) {
  const auto audit = audit_monotone(f, audit_depth);
  if (!audit.pass) {
    throw std::domain_error("slope_martingale: f decreases on [" + audit.witness->str() + "]");
  }
  return slope_functional(f);
}

OracleFunction identity_section() {
  return OracleFunction{
      [](const BitString&, const Rational& h, unsigned) { return Approximation{h, 0}; },
      [](unsigned) { return std::size_t{0}; }, json{{"kind", "identity_section"}}};
}

OracleFunction oracle_section(const ComputableFunction& f, std::size_t axis) {
  const std::size_t n = f.dimension();
  if (axis >= n) throw std::out_of_range("oracle_section: axis out of range");
  const std::size_t others = n - 1;
  const unsigned long spread = ceil_log2(Rational(static_cast<unsigned long>(n)));
  auto bits_per_coordinate = [f, spread](unsigned k) {
    return static_cast<std::size_t>(f.modulus(k + 1) + spread);
  };
  return OracleFunction{
      [f, axis, others, bits_per_coordinate](const BitString& prefix, const Rational& h, unsigned k) {
        const std::size_t b = bits_per_coordinate(k);
        if (prefix.size() < b * others) {
          throw std::invalid_argument("oracle_section: prefix of " + std::to_string(prefix.size()) +
                                      " bits is shorter than the use bound " + std::to_string(b * others));
        }
        Vector x(static_cast<Eigen::Index>(others + 1));
        std::size_t r = 0;
        for (std::size_t j = 0; j <= others; ++j) {
          if (j == axis) {
            x(static_cast<Eigen::Index>(j)) = h;
            continue;
          }
          std::vector<std::uint8_t> coord(b);
          for (std::size_t t = 0; t < b; ++t) coord[t] = static_cast<std::uint8_t>(prefix[t * others + r]);
          x(static_cast<Eigen::Index>(j)) = bits_value(BitString(std::move(coord)));
          ++r;
        }
        auto a = f.eval(clamp_point(x), k + 1);
        return Approximation{a.value, a.error + (others ? Rational::pow2(-static_cast<long>(k) - 1) : Rational(0))};
      },
      [others, bits_per_coordinate](unsigned k) { return others ? bits_per_coordinate(k) * others : 0; },
      json{{"kind", "oracle_section"}, {"function", f.descriptor()}, {"axis", axis}}};
}

std::size_t UniformMartingale::use_bound(const BitString& sigma, unsigned precision) const {
  return g_.use(precision + static_cast<unsigned>(sigma.size()) + 1);
}

Approximation UniformMartingale::value(const BitString& oracle_prefix, const BitString& sigma,
                                       unsigned precision) const {
  const std::size_t need = use_bound(sigma, precision);
  if (oracle_prefix.size() < need) {
    throw std::invalid_argument("UniformMartingale: oracle prefix shorter than use bound " + std::to_string(need));
  }
  const unsigned k = precision + static_cast<unsigned>(sigma.size()) + 1;
  const auto hi = g_.eval(oracle_prefix, sigma.right(), k);
  const auto lo = g_.eval(oracle_prefix, sigma.left(), k);
  const Rational scale = Rational::pow2(static_cast<long>(sigma.size()));
  return {(hi.value - lo.value) * scale, (hi.error + lo.error) * scale};
}

Approximation UniformMartingale::value(const BitSource& oracle, const BitString& sigma, unsigned precision) const {
  return value(oracle.prefix(use_bound(sigma, precision)), sigma, precision);
}

BoundMartingale uniform_slope_martingale(const OracleFunction& g, const BitSource& oracle, unsigned audit_depth,
                                         unsigned precision) {
  UniformMartingale m(g);
  for (const auto& s : BitString::all_of_length(audit_depth)) {
    const auto v = m.value(oracle, s, precision);
    if (v.value + v.error < Rational(0)) {
      throw std::domain_error("uniform_slope_martingale: section decreases on [" + s.str() + "]");
    }
  }
  return BoundMartingale(std::move(m), oracle);
}

FairnessCheck check_fairness(const BoundMartingale& m, unsigned depth, unsigned precision) {
  for (unsigned len = 0; len < depth; ++len) {
    for (const auto& s : BitString::all_of_length(len)) {
      const auto a = m.value(s, precision);
      const auto b = m.value(s.append(0), precision);
      const auto c = m.value(s.append(1), precision);
      if (abs(Rational(2) * a.value - b.value - c.value) > Rational(2) * a.error + b.error + c.error) {
        return {false, s};
      }
    }
  }
  return {};
}

std::string BetRun::to_csv() const {
  std::ostringstream os;
  os << "length,capital\n";
  for (std::size_t k = 0; k < trajectory.size(); ++k) os << k << ',' << trajectory[k].str() << '\n';
  return os.str();
}

json BetRun::summary() const {
  json cross = json::array();
  for (const auto& [t, at] : crossings) {
    cross.push_back({{"threshold", t.str()}, {"first_length", at ? json(*at) : json(nullptr)}});
  }
  return json{{"depth", trajectory.empty() ? 0 : trajectory.size() - 1},
              {"max_capital", max_capital.str()},
              {"min_tail_capital", min_tail_capital.str()},
              {"crossings", cross}};
}

BetRun run_bet(const Martingale& m, const BitSource& z, std::size_t depth, const std::vector<Rational>& thresholds) {
  if (depth < 1) throw std::invalid_argument("run_bet: depth must be >= 1");
  BetRun run;
  const BitString prefix = z.prefix(depth);
  for (std::size_t k = 0; k <= depth; ++k) run.trajectory.push_back(m(prefix.prefix(k)));
  run.max_capital = run.trajectory.front();
  run.min_tail_capital = run.trajectory.back();
  for (std::size_t k = 0; k <= depth; ++k) {
    run.max_capital = max(run.max_capital, run.trajectory[k]);
    if (k >= depth / 2) run.min_tail_capital = min(run.min_tail_capital, run.trajectory[k]);
  }
  for (const auto& t : thresholds) {
    std::optional<std::size_t> first;
    for (std::size_t k = 0; k <= depth && !first; ++k) {
      if (run.trajectory[k] >= t) first = k;
    }
    run.crossings.emplace_back(t, first);
  }
  return run;
}

AxisSection section_along_axis(const ComputableFunction& f, const Vector& z, std::size_t axis) {
  const std::size_t n = f.dimension();
  if (static_cast<std::size_t>(z.size()) != n) throw std::invalid_argument("section_along_axis: dimension mismatch");
  if (axis >= n) throw std::out_of_range("section_along_axis: axis out of range");
  if (!in_unit_cube(z)) throw std::domain_error("section_along_axis: z outside [0,1]^n");
  Vector y = z;
  const auto ia = static_cast<Eigen::Index>(axis);
  y(ia) = 0;
  std::vector<BitSource> parts;
  for (Eigen::Index j = 0; j < y.size(); ++j) {
    if (j != ia) parts.push_back(BitSource::expansion(y(j)));
  }
  BitSource encoding = parts.empty() ? BitSource::constant(0) : interleave(parts);
  ComputableFunction section(
      1,
      [f, y, ia](const Vector& h, unsigned k) {
        Vector x = y;
        x(ia) += h(0);
        return f.eval(clamp_point(x), k);
      },
      [f](std::uint64_t i) { return f.modulus(i); },
      json{{"kind", "section"}, {"inner", f.descriptor()}, {"axis", axis}, {"base", format_vector(y)}}, f.exact());
  return AxisSection{section, encoding, y};
}

Martingale martingale_from_json(const json& d) {
  const std::string kind = d.at("kind").get<std::string>();
  if (kind == "constant") return Martingale::constant(Rational::parse(d.at("value").get<std::string>()));
  if (kind == "all_on_one") return Martingale::all_on_one();
  if (kind == "table") {
    std::map<std::string, Rational> values;
    for (const auto& [k, v] : d.at("values").items()) values.emplace(k, Rational::parse(v.get<std::string>()));
    return Martingale::table(std::move(values));
  }
  if (kind == "slope") return slope_martingale(function_from_json(d.at("function")), d.value("audit_depth", 12U));
  throw std::invalid_argument("martingale_from_json: unknown kind '" + kind + "'");
}

BitSource bit_source_from_json(const json& d) {
  const std::string kind = d.at("kind").get<std::string>();
  if (kind == "expansion") return BitSource::expansion(Rational::parse(d.at("value").get<std::string>()));
  if (kind == "constant") return BitSource::constant(d.at("bit").get<int>());
  if (kind == "periodic") return BitSource::periodic(BitString::parse(d.at("pattern").get<std::string>()));
  if (kind == "interleave") {
    std::vector<BitSource> parts;
    for (const auto& s : d.at("sources")) parts.push_back(bit_source_from_json(s));
    return interleave(parts);
  }
  throw std::invalid_argument("bit_source_from_json: unknown kind '" + kind + "'");
}

}  // namespace exactdiff
