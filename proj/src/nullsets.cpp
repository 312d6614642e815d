#include "exactdiff/nullsets.hpp"

#include <stdexcept>

namespace exactdiff {

CubeStream::CubeStream(Generator generator, json descriptor)
    : generator_(std::make_shared<const Generator>(std::move(generator))), descriptor_(std::move(descriptor)) {}

CubeStream CubeStream::from_cubes(std::vector<DyadicCube> cubes) {
  json d = json::array();
  for (const auto& c : cubes) d.push_back(cube_to_json(c));
  auto shared = std::make_shared<const std::vector<DyadicCube>>(std::move(cubes));
  return CubeStream(
      [shared](std::size_t i) -> std::optional<DyadicCube> {
        if (i >= shared->size()) return std::nullopt;
        return (*shared)[i];
      },
      json{{"rule", "explicit"}, {"cubes", d}});
}

CubeStream CubeStream::empty() { return from_cubes({}); }

std::optional<DyadicCube> CubeStream::next() {
  if (done_) return std::nullopt;
  auto c = (*generator_)(seen_.size());
  if (!c) {
    done_ = true;
    return std::nullopt;
  }
  if (!seen_.empty() && c->dimension() != seen_.front().dimension()) {
    throw std::invalid_argument("CubeStream: cube dimension changed");
  }
  seen_.push_back(*c);
  measure_ = cube_measure(seen_);
  return c;
}

std::vector<DyadicCube> CubeStream::take(std::size_t budget) const {
  std::vector<DyadicCube> out;
  for (std::size_t i = 0; i < budget; ++i) {
    auto c = (*generator_)(i);
    if (!c) break;
    out.push_back(*c);
  }
  return out;
}

json cube_to_json(const DyadicCube& c) {
  json corner = json::array();
  for (const auto& v : c.corner()) corner.push_back(v.get_str());
  return json{{"dim", c.dimension()}, {"scale", c.scale()}, {"corner", corner}};
}

DyadicCube cube_from_json(const json& j) {
  std::vector<BigInt> corner;
  for (const auto& v : j.at("corner")) {
    corner.emplace_back(v.is_string() ? v.get<std::string>() : std::to_string(v.get<long long>()));
  }
  if (j.contains("dim") && j.at("dim").get<std::size_t>() != corner.size()) {
    throw std::invalid_argument("cube_from_json: dim does not match corner length");
  }
  return DyadicCube(j.at("scale").get<long>(), std::move(corner));
}

namespace {

Vector point_from(const json& j) { return parse_vector(j.get<std::vector<std::string>>()); }

std::vector<DyadicCube> neighborhood(const Vector& point, long scale, long radius) {
  const DyadicCube centre = DyadicCube::containing(point, scale);
  const std::size_t n = centre.dimension();
  BigInt limit = 1;
  mpz_mul_2exp(limit.get_mpz_t(), limit.get_mpz_t(), static_cast<unsigned long>(scale));
  std::vector<DyadicCube> out;
  std::vector<long> offs(n, -radius);
  while (true) {
    std::vector<BigInt> corner(n);
    bool inside = true;
    for (std::size_t i = 0; i < n; ++i) {
      corner[i] = centre.corner()[i] + offs[i];
      inside = inside && corner[i] >= 0 && corner[i] < limit;
    }
    if (inside) out.emplace_back(scale, std::move(corner));
    std::size_t d = 0;
    while (d < n && ++offs[d] > radius) offs[d++] = -radius;
    if (d == n) return out;
  }
}

std::vector<DyadicCube> apply_rule(const json& rule, std::size_t dimension, std::size_t m, bool generated) {
  const std::string kind = rule.at("rule").get<std::string>();
  auto scale_of = [&]() -> long {
    if (generated) return rule.at("scale_per_stage").get<long>() * static_cast<long>(m);
    return rule.at("scale").get<long>();
  };
  std::vector<DyadicCube> cubes;
  if (kind == "unit") {
    cubes.push_back(DyadicCube::unit(dimension));
  } else if (kind == "explicit") {
    for (const auto& c : rule.at("cubes")) cubes.push_back(cube_from_json(c));
  } else if (kind == "around_point") {
    cubes.push_back(DyadicCube::containing(point_from(rule.at("point")), scale_of()));
  } else if (kind == "neighborhood") {
    cubes = neighborhood(point_from(rule.at("point")), scale_of(), rule.value("radius", 1L));
  } else {
    throw std::invalid_argument("nested test: unknown rule '" + kind + "'");
  }
  for (const auto& c : cubes) {
    if (c.dimension() != dimension) throw std::invalid_argument("nested test: cube dimension mismatch");
  }
  return cubes;
}

}  // namespace

NestedTest nested_test_from_json(const json& config) {
  NestedTest t;
  t.dimension = config.at("dimension").get<std::size_t>();
  if (t.dimension == 0) throw std::invalid_argument("nested test: dimension must be positive");
  const json stages = config.value("stages", json::array());
  const bool has_generator = config.contains("generator");
  if (stages.empty() && !has_generator) throw std::invalid_argument("nested test: no stages and no generator");
  t.depth = config.value("depth", has_generator ? std::size_t{8} : stages.size() - 1);
  if (!has_generator && t.depth >= stages.size()) {
    throw std::invalid_argument("nested test: depth exceeds the listed stages");
  }
  t.descriptor = config;
  // Validate every stage eagerly so malformed configs fail at load time.
  std::vector<std::vector<DyadicCube>> cache;
  for (std::size_t m = 0; m <= t.depth; ++m) {
    if (m < stages.size()) {
      cache.push_back(apply_rule(stages[m], t.dimension, m, false));
    } else {
      cache.push_back(apply_rule(config.at("generator"), t.dimension, m, true));
    }
  }
  auto shared = std::make_shared<const std::vector<std::vector<DyadicCube>>>(std::move(cache));
  t.stage = [shared](std::size_t m) {
    if (m >= shared->size()) throw std::out_of_range("nested test: stage " + std::to_string(m) + " beyond depth");
    return CubeStream::from_cubes((*shared)[m]);
  };
  return t;
}

NestedTest concentric_test(const Vector& point, long scale_per_stage, std::size_t depth) {
  return nested_test_from_json(json{{"dimension", point.size()},
                                    {"depth", depth},
                                    {"stages", json::array({json{{"rule", "unit"}}})},
                                    {"generator",
                                     {{"rule", "around_point"},
                                      {"point", format_vector(point)},
                                      {"scale_per_stage", scale_per_stage}}}});
}

NestingAudit audit_nesting(const NestedTest& test, std::size_t stage, std::size_t budget) {
  if (stage + 1 > test.depth) return {};
  const auto outer = test.stage(stage).take(budget);
  for (const auto& c : test.stage(stage + 1).take(budget)) {
    if (!covered_by(c, outer)) return {false, c};
  }
  return {};
}

Rational DoreMalevaParams::d(std::size_t i) const {
  if (i > N.size()) throw std::out_of_range("DoreMalevaParams::d: stage beyond parameters");
  Rational out = 1;
  for (std::size_t k = 0; k < i; ++k) out /= Rational(N[k]);
  return out;
}

DoreMalevaParams make_dore_maleva_params(std::vector<long> N, std::vector<Rational> p, std::vector<Rational> p_raw) {
  if (N.size() != p.size()) throw std::invalid_argument("Dore-Maleva: N and p lengths differ");
  if (!p_raw.empty() && p_raw.size() != p.size()) throw std::invalid_argument("Dore-Maleva: raw p length differs");
  for (std::size_t i = 0; i < N.size(); ++i) {
    if (N[i] % 2 == 0 || N[i] < 1) throw std::invalid_argument("Dore-Maleva: N_i must be odd and positive");
    if (i == 0 && N[i] <= 1) throw std::invalid_argument("Dore-Maleva: N_1 must exceed 1");
    if (i > 0 && N[i] < N[i - 1]) throw std::invalid_argument("Dore-Maleva: N must be nondecreasing");
    if (p[i] < Rational(0) || p[i] > Rational(N[i])) {
      throw std::invalid_argument("Dore-Maleva: p_" + std::to_string(i + 1) + " outside [0, N_i]");
    }
  }
  if (p_raw.empty()) p_raw = p;
  return DoreMalevaParams{std::move(N), std::move(p), std::move(p_raw)};
}

DoreMalevaParams default_dore_maleva_params(std::size_t stages) {
  std::vector<long> N;
  std::vector<Rational> p, raw;
  long value = 3;
  long repeat = 0;
  while (N.size() < stages) {
    N.push_back(value);
    p.emplace_back(std::min(4L, value - 1));
    raw.emplace_back(4);
    if (++repeat == value) {
      value += 2;
      repeat = 0;
    }
  }
  return make_dore_maleva_params(std::move(N), std::move(p), std::move(raw));
}

DoreMalevaStage dore_maleva_stage(const DoreMalevaParams& params, std::size_t i) {
  if (i < 1 || i > params.stages()) throw std::out_of_range("dore_maleva_stage: stage out of range");
  DoreMalevaStage s;
  s.index = i;
  s.pitch = params.d(i - 1);
  s.d = params.d(i);
  const Rational& p = params.p[i - 1];
  const Rational N(params.N[i - 1]);
  s.half_side = p * s.d / Rational(2);
  s.removed_fraction = (p / N) * (p / N);
  s.centres_per_axis = (Rational(1) / s.pitch).floor();
  s.degenerate = p == N;
  s.below_one = p < Rational(1);
  s.disjoint = p * s.d < s.pitch;
  return s;
}

Rational dore_maleva_measure(const DoreMalevaParams& params, std::size_t k) {
  if (k > params.stages()) throw std::out_of_range("dore_maleva_measure: stage beyond parameters");
  Rational out = 1;
  for (std::size_t i = 1; i <= k; ++i) out *= Rational(1) - dore_maleva_stage(params, i).removed_fraction;
  return out;
}

Rational dore_maleva_grid_measure(const DoreMalevaParams& params, std::size_t k) {
  if (k > params.stages()) throw std::out_of_range("dore_maleva_grid_measure: stage beyond parameters");
  if (k == 0) return Rational(1);
  std::vector<DoreMalevaStage> stages;
  for (std::size_t i = 1; i <= k; ++i) {
    if (!params.p[i - 1].is_integer()) throw std::invalid_argument("dore_maleva_grid_measure: p_i must be integers");
    stages.push_back(dore_maleva_stage(params, i));
  }
  // Square edges sit at d_i (2 j N_i + N_i +- p_i) / 2, all on the d_k / 2 grid,
  // so each grid cell is either inside or outside every square.
  const Rational cell = params.d(k) / Rational(2);
  const unsigned long count = (Rational(1) / cell).floor().get_ui();
  std::vector<Rational> centre(count);
  for (unsigned long a = 0; a < count; ++a) centre[a] = (Rational(a) + Rational(1, 2)) * cell;
  auto offset = [](const Rational& x, const DoreMalevaStage& s) {
    const Rational c = (Rational((x / s.pitch).floor()) + Rational(1, 2)) * s.pitch;
    return abs(x - c);
  };
  unsigned long kept = 0;
  for (unsigned long a = 0; a < count; ++a) {
    for (unsigned long b = 0; b < count; ++b) {
      bool removed = false;
      for (const auto& s : stages) {
        if (offset(centre[a], s) < s.half_side && offset(centre[b], s) < s.half_side) {
          removed = true;
          break;
        }
      }
      if (!removed) ++kept;
    }
  }
  return Rational(BigInt(kept), BigInt(count) * BigInt(count));
}

std::optional<std::size_t> dore_maleva_stage_below(const DoreMalevaParams& params, const Rational& level) {
  Rational m = 1;
  for (std::size_t k = 1; k <= params.stages(); ++k) {
    m *= Rational(1) - dore_maleva_stage(params, k).removed_fraction;
    if (m < level) return k;
  }
  return std::nullopt;
}

json dore_maleva_geometry(const DoreMalevaParams& params, std::size_t k) {
  json out = json::array();
  for (std::size_t i = 1; i <= k; ++i) {
    const auto s = dore_maleva_stage(params, i);
    json squares = json::array();
    const unsigned long per_axis = s.centres_per_axis.get_ui();
    for (unsigned long a = 0; a < per_axis; ++a) {
      const Rational cx = (Rational(a) + Rational(1, 2)) * s.pitch;
      for (unsigned long b = 0; b < per_axis; ++b) {
        const Rational cy = (Rational(b) + Rational(1, 2)) * s.pitch;
        squares.push_back({(cx - s.half_side).str(), (cy - s.half_side).str(), (cx + s.half_side).str(),
                           (cy + s.half_side).str()});
      }
    }
    out.push_back({{"stage", i},
                   {"pitch", s.pitch.str()},
                   {"half_side", s.half_side.str()},
                   {"removed_fraction", s.removed_fraction.str()},
                   {"squares", squares}});
  }
  return out;
}

}  // namespace exactdiff
