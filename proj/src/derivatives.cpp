#include "exactdiff/derivatives.hpp"

#include <algorithm>
#include <stdexcept>

namespace exactdiff {

namespace {

constexpr unsigned kPrecision = 64;

json vec_json(const Vector& v) { return format_vector(v); }

Vector vec_from(const json& j) { return parse_vector(j.get<std::vector<std::string>>()); }

Rational rat_from(const json& j) { return Rational::parse(j.get<std::string>()); }

void require_in_cube(const Vector& x, const char* who) {
  if (!in_unit_cube(x)) throw std::domain_error(std::string(who) + ": point " + to_string(x) + " outside [0,1]^n");
}

bool feasible(const Vector& x, const Vector& v, const Rational& h) { return in_unit_cube(x + h * v); }

struct Quotient {
  Rational value;
  Rational error;
};

Quotient quotient(const ComputableFunction& f, const Vector& x, const Vector& v, const Rational& h,
                  unsigned precision) {
  const auto a = f.eval(x + h * v, precision);
  const auto b = f.eval(x, precision);
  const Rational ah = abs(h);
  return {(a.value - b.value) / h, (a.error + b.error) / ah};
}

std::vector<Rational> signed_dyadics(unsigned max_k) {
  std::vector<Rational> out;
  for (unsigned k = 1; k <= max_k; ++k) {
    out.push_back(Rational::pow2(-static_cast<long>(k)));
    out.push_back(-Rational::pow2(-static_cast<long>(k)));
  }
  return out;
}

}  // namespace

json SlopeReport::to_json() const {
  return json{{"point", vec_json(point)}, {"direction", vec_json(direction)}, {"label", label},
              {"step", step.str()},       {"value", value.str()},            {"error", error.str()}};
}

json SlopeRow::to_json() const {
  return json{{"point", vec_json(point)}, {"step", step.str()}, {"values", vec_json(values)},
              {"error", error.str()}};
}

json ProbeVerdict::to_json() const {
  json j{{"status", violated() ? "violated_at" : "consistent_to_depth"},
         {"depth", depth},
         {"value", value.str()},
         {"witness", witness},
         {"details", details}};
  if (bracket) j["bracket"] = {bracket->low.str(), bracket->high.str()};
  return j;
}

SlopeReport slope_axis(const ComputableFunction& f, const Vector& x, std::size_t axis, const Rational& h,
                       unsigned precision) {
  if (axis >= static_cast<std::size_t>(x.size())) throw std::out_of_range("slope_axis: axis out of range");
  const Vector e = unit_vector(x.size(), static_cast<Eigen::Index>(axis));
  auto r = slope_dir(f, x, e, h, precision);
  r.label = "axis:" + std::to_string(axis);
  return r;
}

SlopeReport slope_dir(const ComputableFunction& f, const Vector& x, const Vector& v, const Rational& h,
                      unsigned precision) {
  if (h.is_zero()) throw std::invalid_argument("slope: zero step");
  if (v.size() != x.size()) throw std::invalid_argument("slope: direction dimension mismatch");
  require_in_cube(x, "slope");
  if (!feasible(x, v, h)) throw std::domain_error("slope: step " + h.str() + " leaves the cube");
  const auto q = quotient(f, x, v, h, precision);
  return SlopeReport{x, v, "vector", h, q.value, q.error};
}

SlopeRow slope_row(const ComputableFunction& f, const Vector& x, const Rational& b, unsigned precision) {
  SlopeRow row{x, b, Vector(x.size()), 0};
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const auto r = slope_axis(f, x, static_cast<std::size_t>(i), b, precision);
    row.values(i) = r.value;
    row.error = max(row.error, r.error);
  }
  return row;
}

std::vector<Rational> default_schedule(unsigned depth) {
  std::vector<Rational> out;
  for (unsigned k = 2; k <= depth; ++k) out.push_back(Rational::pow2(-static_cast<long>(k)));
  return out;
}

ProbeVerdict partial_probe(const ComputableFunction& f, const Vector& x, std::size_t axis,
                           const std::vector<Rational>& schedule, const Rational& q, std::size_t tail_from) {
  if (schedule.empty()) throw std::invalid_argument("partial_probe: empty schedule");
  if (axis >= static_cast<std::size_t>(x.size())) throw std::out_of_range("partial_probe: axis out of range");
  require_in_cube(x, "partial_probe");
  const Vector e = unit_vector(x.size(), static_cast<Eigen::Index>(axis));

  struct Obs {
    Rational h;
    Quotient s;
  };
  std::vector<Obs> tail;
  std::size_t feasible_count = 0;
  for (std::size_t idx = 0; idx < schedule.size(); ++idx) {
    for (const Rational& h : {schedule[idx], -schedule[idx]}) {
      if (h.is_zero() || !feasible(x, e, h)) continue;
      ++feasible_count;
      if (idx >= tail_from) tail.push_back({h, quotient(f, x, e, h, kPrecision)});
    }
  }
  if (feasible_count == 0) throw std::domain_error("partial_probe: every step leaves the cube");
  if (tail.empty()) throw std::invalid_argument("partial_probe: tail start beyond the schedule");

  auto lo = tail.begin(), hi = tail.begin();
  std::optional<Bracket> right, left;
  for (auto it = tail.begin(); it != tail.end(); ++it) {
    if (it->s.value < lo->s.value) lo = it;
    if (it->s.value > hi->s.value) hi = it;
    auto& side = it->h > Rational(0) ? right : left;
    if (!side) side = Bracket{it->s.value, it->s.value};
    side->low = min(side->low, it->s.value);
    side->high = max(side->high, it->s.value);
  }

  ProbeVerdict v;
  v.depth = static_cast<unsigned>(schedule.size());
  v.value = hi->s.value - lo->s.value;
  v.bracket = Bracket{lo->s.value, hi->s.value};
  const Rational certified = (hi->s.value - hi->s.error) - (lo->s.value + lo->s.error);
  auto bracket_json = [](const std::optional<Bracket>& b) {
    return b ? json{b->low.str(), b->high.str()} : json(nullptr);
  };
  v.details = {{"axis", axis}, {"right", bracket_json(right)}, {"left", bracket_json(left)},
               {"observations", tail.size()}};
  if (certified >= q) {
    v.status = ProbeStatus::ViolatedAt;
    v.witness = {{"kind", "partial"},
                 {"point", vec_json(x)},
                 {"axis", axis},
                 {"q", q.str()},
                 {"low", {{"h", lo->h.str()}, {"slope", lo->s.value.str()}}},
                 {"high", {{"h", hi->h.str()}, {"slope", hi->s.value.str()}}}};
  }
  return v;
}

std::vector<Rational> default_t_panel(std::size_t count) {
  std::vector<Rational> out;
  for (std::size_t k = 0; k < count; ++k) out.emplace_back(BigInt(1), BigInt(static_cast<unsigned long>(k + 2)));
  return out;
}

DirectionalReduction dir_derivative_via_basis(const ComputableFunction& f, const Vector& x, const Vector& u,
                                              std::optional<Vector> w_hint, std::vector<Rational> panel) {
  const Eigen::Index n = x.size();
  if (u.size() != n || static_cast<std::size_t>(n) != f.dimension()) {
    throw std::invalid_argument("dir_derivative_via_basis: dimension mismatch");
  }
  const AffineIsometry base = isometry_between(unit_vector(n, 0), u);

  std::vector<Vector> candidates;
  if (w_hint) candidates.push_back(*w_hint);
  candidates.push_back(Vector::Zero(n));
  candidates.push_back(x - base.theta * Vector::Constant(n, Rational(1, 2)));

  DirectionalReduction out{compose_affine(f, base), x, Vector::Zero(n), base, false, false, {}, std::nullopt};
  for (const auto& w : candidates) {
    const AffineIsometry t = base.with_offset(w);
    const Vector z = t.apply_inverse(x);
    if (in_unit_cube(z)) {
      out = DirectionalReduction{compose_affine(f, t), z, w, t, true, false, {}, std::nullopt};
      break;
    }
  }

  const Vector e1 = unit_vector(n, 0);
  auto fhat = [&](const Vector& y) { return f.eval(clamp_point(y), kPrecision); };
  const auto gz = out.g.eval(out.z, kPrecision);
  const auto fx = fhat(x);
  out.identity_ok = true;
  out.panel = std::move(panel);
  for (const auto& t : out.panel) {
    if (t.is_zero()) throw std::invalid_argument("dir_derivative_via_basis: zero t in panel");
    const auto gt = out.g.eval(out.z + t * e1, kPrecision);
    const auto ft = fhat(x + t * u);
    const Rational lhs = (gt.value - gz.value) / t;
    const Rational rhs = (ft.value - fx.value) / t;
    const Rational slack = (gt.error + gz.error + ft.error + fx.error) / abs(t);
    if (abs(lhs - rhs) > slack) {
      out.identity_ok = false;
      out.failing_t = t;
      break;
    }
  }
  return out;
}

ProbeVerdict linearity_defect(const ComputableFunction& f, const Vector& x, const Vector& u, const Vector& v,
                              const Rational& p, const std::vector<Rational>& grid, std::optional<Rational> q) {
  require_in_cube(x, "linearity_defect");
  const Vector uv = u + v;
  struct Entry {
    Rational h;
    Rational defect;
    Rational error;
  };
  std::vector<Entry> entries;
  for (const auto& h : grid) {
    if (h <= Rational(0) || h > p) continue;
    if (!feasible(x, u, h) || !feasible(x, v, h) || !feasible(x, uv, h)) continue;
    const auto du = quotient(f, x, u, h, kPrecision);
    const auto dv = quotient(f, x, v, h, kPrecision);
    const auto duv = quotient(f, x, uv, h, kPrecision);
    entries.push_back({h, abs(du.value + dv.value - duv.value), du.error + dv.error + duv.error});
  }
  if (entries.empty()) throw std::domain_error("linearity_defect: no feasible step");

  ProbeVerdict out;
  out.depth = static_cast<unsigned>(entries.size());
  const auto best = std::min_element(entries.begin(), entries.end(),
                                     [](const Entry& a, const Entry& b) { return a.defect < b.defect; });
  out.value = best->defect;
  out.bracket = Bracket{best->defect, std::max_element(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
                                        return a.defect < b.defect;
                                      })->defect};
  json per_step = json::array();
  json steps = json::array();
  Rational certified_min = entries.front().defect - entries.front().error;
  for (const auto& e : entries) {
    per_step.push_back({{"h", e.h.str()}, {"defect", e.defect.str()}});
    steps.push_back(e.h.str());
    certified_min = min(certified_min, e.defect - e.error);
  }
  out.details = {{"min_step", best->h.str()}, {"steps", per_step}};
  if (q && certified_min >= *q) {
    out.status = ProbeStatus::ViolatedAt;
    out.witness = {{"kind", "linearity"}, {"point", vec_json(x)}, {"u", vec_json(u)}, {"v", vec_json(v)},
                   {"q", q->str()},       {"steps", steps}};
  }
  return out;
}

ProbeVerdict diff_class_b(const ComputableFunction& f, const Vector& x, unsigned depth) {
  if (depth < 1) throw std::invalid_argument("diff_class_b: depth must be >= 1");
  require_in_cube(x, "diff_class_b");
  const Eigen::Index n = x.size();

  // h grid: every coordinate in {0, +-2^-k}, k <= 2 depth, h != 0, x + h in the cube.
  std::vector<Rational> coord{Rational(0)};
  for (const auto& s : signed_dyadics(2 * depth)) coord.push_back(s);
  struct HStep {
    Vector h;
    Rational norm2;
    Approximation value;
  };
  std::vector<HStep> hs;
  std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
  while (true) {
    Vector h(n);
    for (Eigen::Index i = 0; i < n; ++i) h(i) = coord[idx[static_cast<std::size_t>(i)]];
    const Rational nh = squared_norm(h);
    if (!nh.is_zero() && in_unit_cube(x + h)) hs.push_back({h, nh, f.eval(x + h, kPrecision)});
    std::size_t d = 0;
    while (d < idx.size() && ++idx[d] == coord.size()) idx[d++] = 0;
    if (d == idx.size()) break;
  }

  struct BRow {
    Rational b;
    SlopeRow row;
  };
  std::vector<BRow> rows;
  for (const auto& b : signed_dyadics(2 * depth)) {
    bool ok = true;
    for (Eigen::Index i = 0; i < n && ok; ++i) ok = feasible(x, unit_vector(n, i), b);
    if (ok) rows.push_back({b, slope_row(f, x, b, kPrecision)});
  }
  if (hs.empty() || rows.empty()) throw std::domain_error("diff_class_b: no feasible steps");

  const auto fx = f.eval(x, kPrecision);
  struct Pair {
    std::size_t h;
    std::size_t b;
    Rational ratio2;  // certified lower bound on (|R| / ||h||)^2
  };
  std::vector<Pair> pairs;
  pairs.reserve(hs.size() * rows.size());
  Rational max_remainder = 0;
  for (std::size_t hi = 0; hi < hs.size(); ++hi) {
    for (std::size_t bi = 0; bi < rows.size(); ++bi) {
      const auto& hstep = hs[hi];
      const auto& row = rows[bi].row;
      const Rational r = hstep.value.value - fx.value - dot(row.values, hstep.h);
      Rational err = hstep.value.error + fx.error;
      for (Eigen::Index i = 0; i < n; ++i) err += abs(hstep.h(i)) * row.error;
      max_remainder = max(max_remainder, abs(r));
      const Rational low = max(Rational(0), abs(r) - err);
      pairs.push_back({hi, bi, low * low / hstep.norm2});
    }
  }

  // Worst pair admissible for each delta = 2^-j.
  std::vector<std::optional<std::size_t>> worst(depth + 1);
  for (unsigned j = 1; j <= depth; ++j) {
    const Rational delta = Rational::pow2(-static_cast<long>(j));
    const Rational delta2 = delta * delta;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const auto& pr = pairs[k];
      if (hs[pr.h].norm2 >= delta2 || abs(rows[pr.b].b) >= delta) continue;
      if (!worst[j] || pr.ratio2 > pairs[*worst[j]].ratio2) worst[j] = k;
    }
  }

  ProbeVerdict out;
  out.depth = depth;
  out.value = max_remainder;
  json per_delta = json::array();
  for (unsigned j = 1; j <= depth; ++j) {
    per_delta.push_back(worst[j] ? json(pairs[*worst[j]].ratio2.str()) : json(nullptr));
  }
  out.details = {{"max_ratio_sq_by_delta", per_delta}, {"h_steps", hs.size()}, {"b_steps", rows.size()}};
  for (unsigned k = 1; k <= depth; ++k) {
    const Rational eps = Rational::pow2(-static_cast<long>(k));
    const Rational eps2 = eps * eps;
    bool some_delta = false;
    for (unsigned j = 1; j <= depth && !some_delta; ++j) {
      some_delta = !worst[j] || pairs[*worst[j]].ratio2 <= eps2;
    }
    if (some_delta) continue;
    out.status = ProbeStatus::ViolatedAt;
    json failures = json::array();
    for (unsigned j = 1; j <= depth; ++j) {
      const auto& pr = pairs[*worst[j]];
      failures.push_back({{"delta", Rational::pow2(-static_cast<long>(j)).str()},
                          {"h", vec_json(hs[pr.h].h)},
                          {"b", rows[pr.b].b.str()},
                          {"row", vec_json(rows[pr.b].row.values)},
                          {"ratio_sq", pr.ratio2.str()}});
    }
    out.witness = {{"kind", "class_b"}, {"point", vec_json(x)}, {"epsilon", eps.str()}, {"failures", failures}};
    break;
  }
  return out;
}

ProbeVerdict diff_class_a(const ComputableFunction& f, const Vector& x, unsigned depth,
                          std::optional<Rational> slack) {
  if (depth < 1) throw std::invalid_argument("diff_class_a: depth must be >= 1");
  require_in_cube(x, "diff_class_a");
  const Rational tol = slack.value_or(Rational::pow2(-static_cast<long>(depth)));
  const Eigen::Index n = x.size();

  ProbeVerdict out;
  out.depth = depth;
  out.details = json::array();
  std::optional<Rational> worst_gap;
  for (Eigen::Index axis = 0; axis < n; ++axis) {
    const Vector e = unit_vector(n, axis);
    std::optional<Rational> q, p, all_lo, all_hi;
    std::optional<Bracket> right, left;
    json levels = json::array();
    for (unsigned k = depth; k <= 2 * depth; ++k) {
      const Rational h = Rational::pow2(-static_cast<long>(k));
      std::optional<std::pair<Rational, Quotient>> lo, hi;
      for (const Rational& s : {h, -h}) {
        if (!feasible(x, e, s)) continue;
        const auto qt = quotient(f, x, e, s, kPrecision);
        if (!lo || qt.value + qt.error < lo->second.value + lo->second.error) lo = {{s, qt}};
        if (!hi || qt.value - qt.error > hi->second.value - hi->second.error) hi = {{s, qt}};
        auto& side = s > Rational(0) ? right : left;
        if (!side) side = Bracket{qt.value, qt.value};
        side->low = min(side->low, qt.value);
        side->high = max(side->high, qt.value);
        all_lo = all_lo ? min(*all_lo, qt.value) : qt.value;
        all_hi = all_hi ? max(*all_hi, qt.value) : qt.value;
      }
      if (!lo) continue;
      const Rational lo_bound = lo->second.value + lo->second.error;
      const Rational hi_bound = hi->second.value - hi->second.error;
      q = q ? max(*q, lo_bound) : lo_bound;
      p = p ? min(*p, hi_bound) : hi_bound;
      levels.push_back({{"low_h", lo->first.str()}, {"high_h", hi->first.str()}});
    }
    if (!q) throw std::domain_error("diff_class_a: no feasible step on axis " + std::to_string(axis));
    const Rational gap = *p - *q;
    auto bj = [](const std::optional<Bracket>& b) { return b ? json{b->low.str(), b->high.str()} : json(nullptr); };
    out.details.push_back({{"axis", axis},
                           {"lower_bracket", {all_lo->str(), q->str()}},
                           {"upper_bracket", {p->str(), all_hi->str()}},
                           {"right", bj(right)},
                           {"left", bj(left)}});
    if (axis == 0) out.bracket = Bracket{*all_lo, *all_hi};
    worst_gap = worst_gap ? max(*worst_gap, gap) : gap;
    if (!out.violated() && gap > tol) {
      out.status = ProbeStatus::ViolatedAt;
      out.bracket = Bracket{*all_lo, *all_hi};
      out.witness = {{"kind", "class_a"}, {"point", vec_json(x)}, {"axis", axis}, {"q", q->str()},
                     {"p", p->str()},     {"slack", tol.str()},   {"levels", levels}};
    }
  }
  out.value = *worst_gap;
  return out;
}

bool replay_witness(const ComputableFunction& f, const ProbeVerdict& verdict) {
  if (!verdict.violated()) return false;
  const json& w = verdict.witness;
  const std::string kind = w.at("kind").get<std::string>();
  const Vector x = vec_from(w.at("point"));
  const Eigen::Index n = x.size();
  if (kind == "partial") {
    const auto axis = w.at("axis").get<std::size_t>();
    const auto lo = slope_axis(f, x, axis, rat_from(w.at("low").at("h")));
    const auto hi = slope_axis(f, x, axis, rat_from(w.at("high").at("h")));
    return (hi.value - hi.error) - (lo.value + lo.error) >= rat_from(w.at("q"));
  }
  if (kind == "linearity") {
    const Vector u = vec_from(w.at("u"));
    const Vector v = vec_from(w.at("v"));
    const Rational q = rat_from(w.at("q"));
    for (const auto& hj : w.at("steps")) {
      const Rational h = rat_from(hj);
      const auto du = slope_dir(f, x, u, h);
      const auto dv = slope_dir(f, x, v, h);
      const auto duv = slope_dir(f, x, u + v, h);
      if (abs(du.value + dv.value - duv.value) - du.error - dv.error - duv.error < q) return false;
    }
    return true;
  }
  if (kind == "class_b") {
    const Rational eps = rat_from(w.at("epsilon"));
    const auto fx = f.eval(x, kPrecision);
    for (const auto& fail : w.at("failures")) {
      const Vector h = vec_from(fail.at("h"));
      const Rational b = rat_from(fail.at("b"));
      const Rational delta = rat_from(fail.at("delta"));
      if (squared_norm(h) >= delta * delta || abs(b) >= delta) return false;
      const auto row = slope_row(f, x, b);
      const auto fh = f.eval(x + h, kPrecision);
      Rational err = fh.error + fx.error;
      for (Eigen::Index i = 0; i < n; ++i) err += abs(h(i)) * row.error;
      const Rational low = max(Rational(0), abs(fh.value - fx.value - dot(row.values, h)) - err);
      if (low * low <= eps * eps * squared_norm(h)) return false;
    }
    return true;
  }
  if (kind == "class_a") {
    const auto axis = w.at("axis").get<std::size_t>();
    const Rational q = rat_from(w.at("q"));
    const Rational p = rat_from(w.at("p"));
    if (p - q <= rat_from(w.at("slack"))) return false;
    for (const auto& level : w.at("levels")) {
      const auto lo = slope_axis(f, x, axis, rat_from(level.at("low_h")));
      const auto hi = slope_axis(f, x, axis, rat_from(level.at("high_h")));
      if (lo.value + lo.error > q || hi.value - hi.error < p) return false;
    }
    return true;
  }
  throw std::invalid_argument("replay_witness: unknown witness kind " + kind);
}

}  // namespace exactdiff
