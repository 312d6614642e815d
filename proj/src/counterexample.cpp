#include "exactdiff/counterexample.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace exactdiff {

namespace {

BigInt pow2_int(unsigned long k) {
  BigInt out = 1;
  mpz_mul_2exp(out.get_mpz_t(), out.get_mpz_t(), k);
  return out;
}

BigInt ipow(const BigInt& base, std::size_t e) {
  BigInt out;
  mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), e);
  return out;
}

Rational four_pow(std::size_t k) { return Rational::pow2(2 * static_cast<long>(k)); }

std::vector<DyadicCube> regions_of(const std::vector<CellBlock>& blocks) {
  std::vector<DyadicCube> out;
  out.reserve(blocks.size());
  for (const auto& b : blocks) out.push_back(b.region);
  return out;
}

std::string stage_tag(std::size_t m) { return "stage " + std::to_string(m) + ": "; }

}  // namespace

BigInt CellBlock::per_axis() const { return pow2_int(static_cast<unsigned long>(cell_scale - region.scale())); }

BigInt CellBlock::count() const { return ipow(per_axis(), region.dimension()); }

DyadicCube CellBlock::cell(const BigInt& index) const {
  if (index < first_index || index > last_index()) throw std::out_of_range("CellBlock::cell: index outside block");
  const BigInt k = per_axis();
  BigInt offset = index - first_index;
  const std::size_t n = region.dimension();
  std::vector<BigInt> corner(n);
  for (std::size_t t = n; t-- > 0;) {
    BigInt digit;
    mpz_fdiv_qr(offset.get_mpz_t(), digit.get_mpz_t(), offset.get_mpz_t(), k.get_mpz_t());
    corner[t] = region.corner()[t] * k + digit;
  }
  return DyadicCube(cell_scale, std::move(corner));
}

std::optional<BigInt> CellBlock::locate(const Vector& x) const {
  if (!region.contains_point_open(x)) return std::nullopt;
  const BigInt k = per_axis();
  const Rational inv = Rational::pow2(cell_scale);
  BigInt offset = 0;
  for (std::size_t t = 0; t < region.dimension(); ++t) {
    const Rational u = (x(static_cast<Eigen::Index>(t)) - region.lower(t)) * inv;
    if (u.is_integer()) return std::nullopt;  // on a cell face
    offset = offset * k + u.floor();
  }
  return first_index + offset;
}

BigInt Partition::cell_count(std::size_t m) const {
  BigInt total = 0;
  for (const auto& b : stages.at(m)) total += b.count();
  return total;
}

const CellBlock& Partition::block_of(std::size_t m, const BigInt& i) const {
  for (const auto& b : stages.at(m)) {
    if (i >= b.first_index && i <= b.last_index()) return b;
  }
  throw std::out_of_range("Partition: no cell " + i.get_str() + " at " + stage_tag(m));
}

std::optional<Partition::Location> Partition::locate(std::size_t m, const Vector& x) const {
  for (const auto& b : stages.at(m)) {
    if (auto idx = b.locate(x)) return Location{&b, *idx};
  }
  return std::nullopt;
}

Partition build_partition(const NestedTest& test, std::size_t budget, std::size_t depth) {
  if (depth > test.depth) {
    throw std::out_of_range("build_partition: depth " + std::to_string(depth) + " exceeds test depth " +
                            std::to_string(test.depth));
  }
  Partition p;
  p.dimension = test.dimension;
  p.depth = depth;
  for (std::size_t m = 0; m <= depth; ++m) {
    p.sources.push_back(test.stage(m).take(budget));
    std::vector<CellBlock> blocks;
    std::vector<DyadicCube> handled;
    std::optional<long> previous_scale;
    BigInt next_index = 1;
    const std::vector<CellBlock>* parents = m > 0 ? &p.stages[m - 1] : nullptr;
    const std::vector<DyadicCube> parent_regions = parents ? regions_of(*parents) : std::vector<DyadicCube>{};
    const long mult = 3 * static_cast<long>(m);
    for (std::size_t l = 0; l < p.sources[m].size(); ++l) {
      const DyadicCube& d = p.sources[m][l];
      long delta_scale = d.scale();
      if (parents) {
        if (!covered_by(d, parent_regions)) {
          throw std::runtime_error(stage_tag(m) + "cube " + d.str() +
                                   " is not covered by the visible stage " + std::to_string(m - 1) +
                                   " cells within budget " + std::to_string(budget));
        }
        for (const auto& b : *parents) {
          if (b.region.interior_intersects(d)) delta_scale = std::max(delta_scale, b.cell_scale);
        }
      }
      long eps_scale = delta_scale + mult;
      if (previous_scale) eps_scale = std::max(eps_scale, *previous_scale);
      const auto pieces = subtract(d, handled);
      handled.push_back(d);
      if (pieces.empty()) continue;
      long cell_scale = eps_scale;
      for (const auto& piece : pieces) cell_scale = std::max(cell_scale, piece.scale());
      for (const auto& piece : pieces) {
        CellBlock b;
        b.stage = m;
        b.region = piece;
        b.cell_scale = cell_scale;
        b.first_index = next_index;
        b.source = l;
        if (parents) {
          for (std::size_t r = 0; r < parents->size(); ++r) {
            if ((*parents)[r].region.interior_intersects(piece)) b.parents.push_back(r);
          }
        }
        next_index += b.count();
        blocks.push_back(std::move(b));
      }
      previous_scale = cell_scale;
    }
    p.stages.push_back(std::move(blocks));
  }
  const auto check = verify_partition(p);
  if (!check.pass()) throw std::logic_error("build_partition: built partition fails " + check.failures.front());
  return p;
}

json PartitionCheck::to_json() const {
  return json{{"i_union", union_ok},         {"ii_disjoint_nonincreasing", disjoint_order_ok},
              {"iii_parent_ratio", parent_ok}, {"iv_side", side_ok},
              {"iv_literal_volume", literal_iv_ok}, {"failures", failures},
              {"diagnostics", diagnostics},  {"pass", pass()}};
}

PartitionCheck verify_partition(const Partition& p) {
  PartitionCheck c;
  const long n = static_cast<long>(p.dimension);
  if (p.stages.size() != p.depth + 1 || p.sources.size() != p.depth + 1) {
    c.union_ok = false;
    c.failures.push_back("stage count does not match depth");
    return c;
  }
  for (std::size_t m = 0; m <= p.depth; ++m) {
    const auto& blocks = p.stages[m];
    const auto& sources = p.sources[m];
    const auto regions = regions_of(blocks);
    const long mult = 3 * static_cast<long>(m);
    const std::string tag = stage_tag(m);

    for (const auto& d : sources) {
      if (!covered_by(d, regions)) {
        c.union_ok = false;
        c.failures.push_back(tag + "source " + d.str() + " not covered by cells");
      }
    }
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      const auto& blk = blocks[b];
      if (blk.source >= sources.size() || !sources[blk.source].contains(blk.region)) {
        c.union_ok = false;
        c.failures.push_back(tag + "block " + std::to_string(b) + " lies outside its source");
      }
      if (blk.cell_scale < blk.region.scale()) {
        c.disjoint_order_ok = false;
        c.failures.push_back(tag + "block " + std::to_string(b) + " has cells larger than its region");
        continue;
      }
      for (std::size_t o = 0; o < b; ++o) {
        if (blocks[o].region.interior_intersects(blk.region)) {
          c.disjoint_order_ok = false;
          c.failures.push_back(tag + "blocks " + std::to_string(o) + " and " + std::to_string(b) + " overlap");
        }
      }
      const BigInt expected_first = b == 0 ? BigInt(1) : BigInt(blocks[b - 1].last_index() + 1);
      if (blk.first_index != expected_first) {
        c.disjoint_order_ok = false;
        c.failures.push_back(tag + "block " + std::to_string(b) + " indices are not contiguous");
      }
      if (b > 0 && blk.cell_scale < blocks[b - 1].cell_scale) {
        c.disjoint_order_ok = false;
        c.failures.push_back(tag + "cell volume increases at block " + std::to_string(b));
      }

      if (m > 0) {
        const auto& parents = p.stages[m - 1];
        if (!covered_by(blk.region, regions_of(parents))) {
          c.parent_ok = false;
          c.failures.push_back(tag + "block " + std::to_string(b) + " not inside stage " + std::to_string(m - 1) +
                               " cells");
        }
        for (const auto& a : parents) {
          if (!a.region.interior_intersects(blk.region)) continue;
          // lambda(B) / lambda(A) = 2^{-n (c_B - c_A)} <= 8^-m.
          if (blk.cell_scale < a.cell_scale || n * (blk.cell_scale - a.cell_scale) < mult) {
            c.parent_ok = false;
            c.failures.push_back(tag + "block " + std::to_string(b) + " breaks lambda(B) <= 8^-m lambda(A)");
          }
        }
      }

      if (blk.source < sources.size()) {
        const long ds = sources[blk.source].scale();
        if (blk.cell_scale < ds + mult) {
          c.side_ok = false;
          c.failures.push_back(tag + "block " + std::to_string(b) + " breaks d <= 8^-m side(D)");
        }
        if (blk.cell_scale < n * ds + mult) {
          c.literal_iv_ok = false;
          c.diagnostics.push_back(tag + "block " + std::to_string(b) + ": d = 2^-" + std::to_string(blk.cell_scale) +
                                  " exceeds 8^-m lambda(D) = 2^-" + std::to_string(n * ds + mult) +
                                  " (literal side-versus-volume reading)");
        }
      }
      for (std::size_t l = 0; l < sources.size(); ++l) {
        if (l == blk.source || !sources[l].interior_intersects(blk.region)) continue;
        if (blk.cell_scale < sources[l].scale() + mult) {
          c.diagnostics.push_back(tag + "block " + std::to_string(b) + " also lies in source " + std::to_string(l) +
                                  " whose side bound it exceeds");
        }
      }
    }
  }
  return c;
}

bool same_partition(const Partition& a, const Partition& b) {
  if (a.dimension != b.dimension || a.depth != b.depth || a.sources != b.sources) return false;
  if (a.stages.size() != b.stages.size()) return false;
  for (std::size_t m = 0; m < a.stages.size(); ++m) {
    if (a.stages[m].size() != b.stages[m].size()) return false;
    for (std::size_t k = 0; k < a.stages[m].size(); ++k) {
      const auto& x = a.stages[m][k];
      const auto& y = b.stages[m][k];
      if (x.stage != y.stage || !(x.region == y.region) || x.cell_scale != y.cell_scale ||
          x.first_index != y.first_index || x.source != y.source || x.parents != y.parents) {
        return false;
      }
    }
  }
  return true;
}

DyadicRational tent_epsilon(std::size_t m, const BigInt& j, long cell_scale) {
  return DyadicRational(BigInt(1), -(BigInt(static_cast<unsigned long>(m)) + j + 1 + cell_scale));
}

Rational tent_value(const DyadicCube& cell, std::size_t m, const BigInt& j, const Vector& x) {
  if (static_cast<std::size_t>(x.size()) != cell.dimension()) throw std::invalid_argument("tent_value: dimension mismatch");
  if (!cell.contains_point_open(x)) return Rational(0);
  const DyadicRational eps = tent_epsilon(m, j, cell.scale());
  Rational value = min(x(0) - cell.lower(0), cell.upper(0) - x(0));
  for (std::size_t i = 1; i < cell.dimension(); ++i) {
    const auto idx = static_cast<Eigen::Index>(i);
    const Rational t = min(x(idx) - cell.lower(i), cell.upper(i) - x(idx));
    if (compare(t, eps) != std::strong_ordering::less) continue;
    // t < eps = 2^-E forces E below the bit length of t, so E fits a long.
    const BigInt e = -eps.exponent();
    if (!e.fits_slong_p()) throw std::overflow_error("tent_value: ramp exponent out of range");
    value *= t * Rational::pow2(e.get_si());
  }
  return value;
}

TentFunction tent_for(const DyadicCube& cell, std::size_t m, const BigInt& j) {
  if (j < 0) throw std::invalid_argument("tent_for: negative index");
  // Lipschitz bound 1 + (n - 1) 2^{m+j}: the ramps rise by d/2 over eps.
  std::uint64_t extra = UINT64_MAX;
  const BigInt mj = BigInt(static_cast<unsigned long>(m)) + j;
  if (mj < 1000) {
    extra = mj.get_ui() + 1 + ceil_log2(Rational(static_cast<unsigned long>(cell.dimension())));
  }
  json corner = json::array();
  for (const auto& v : cell.corner()) corner.push_back(v.get_str());
  ComputableFunction fn(
      cell.dimension(),
      [cell, m, j](const Vector& x, unsigned) { return Approximation{tent_value(cell, m, j, x), 0}; },
      [extra](std::uint64_t i) { return extra == UINT64_MAX || i > UINT64_MAX - extra ? UINT64_MAX : i + extra; },
      json{{"kind", "tent"},
           {"cell", {{"dim", cell.dimension()}, {"scale", cell.scale()}, {"corner", corner}}},
           {"m", m},
           {"j", j.get_str()}},
      true);
  return TentFunction{cell, m, j, tent_epsilon(m, j, cell.scale()), m == 0 && j == 0, std::move(fn)};
}

json EvaluationResult::to_json() const {
  return json{{"value", value.str()}, {"lower", lower.str()}, {"upper", upper.str()}, {"i_star", i_star.get_str()}};
}

json OscillationReport::to_json() const {
  json stages = json::array();
  for (const auto& s : per_stage) stages.push_back(s.str());
  return json{{"m", m},
              {"d_m", d_m.str()},
              {"step", step.str()},
              {"slope", slope.str()},
              {"tail_bound", tail_bound.str()},
              {"lower_bound", lower_bound.str()},
              {"claimed_bound", claimed_bound.str()},
              {"per_stage", stages},
              {"stage_slope_exact", stage_slope_exact},
              {"tail_ok", tail_ok},
              {"vacuous", vacuous},
              {"pass", pass()}};
}

json ExclusionReport::to_json() const {
  return json{{"m", m},
              {"axis", axis},
              {"upper_terms", upper.str()},
              {"upper_ceiling", upper.upper_bound(128).str()},
              {"exact", exact ? json(exact->str()) : json(nullptr)},
              {"bound", bound.str()},
              {"pass", pass}};
}

json ModulusAudit::to_json() const {
  return json{{"m", m}, {"h", h}, {"pairs", pairs}, {"worst", worst.str()}, {"bound", bound.str()}, {"pass", pass}};
}

TentSystem::TentSystem(Partition partition, std::size_t cutoff, json test_descriptor)
    : partition_(std::move(partition)), cutoff_(cutoff), test_(std::move(test_descriptor)) {}

Rational TentSystem::stage_value(std::size_t k, const Vector& x) const {
  const auto loc = partition_.locate(k, x);
  if (!loc) return Rational(0);
  return four_pow(k) * tent_value(loc->block->cell(loc->index), k, loc->index, x);
}

Rational TentSystem::truncated(const Vector& x) const {
  Rational acc = 0;
  for (std::size_t k = cutoff_ + 1; k <= depth(); ++k) acc += stage_value(k, x);
  return acc;
}

ComputableFunction TentSystem::truncated_function() const {
  const TentSystem self = *this;
  return ComputableFunction(
      dimension(), [self](const Vector& x, unsigned) { return Approximation{self.truncated(x), 0}; },
      [self](std::uint64_t i) {
        if (i + 2 > self.depth()) throw std::out_of_range("truncated_function: modulus beyond build depth");
        return self.modulus(static_cast<std::size_t>(i + 2));
      },
      json{{"kind", "tent_sum"}, {"cutoff", cutoff_}, {"depth", depth()}}, true);
}

EvaluationResult TentSystem::evaluate(const Vector& q, std::size_t m) const {
  if (m < 1) throw std::invalid_argument("evaluate: target precision must be >= 1");
  if (m > depth()) {
    throw std::out_of_range("evaluate: precision " + std::to_string(m) + " needs a build of depth " +
                            std::to_string(m) + ", have " + std::to_string(depth()));
  }
  // i* = first index with d_{k,i} <= 8^-m / (m + 1) for every summed k <= m.
  const Rational bound = Rational::pow2(-3 * static_cast<long>(m)) / Rational(static_cast<unsigned long>(m + 1));
  BigInt i_star = 1;
  for (std::size_t k = cutoff_ + 1; k <= m; ++k) {
    BigInt first = partition_.cell_count(k) + 1;
    for (const auto& b : partition_.stages[k]) {
      if (b.cell_side() <= bound) {
        first = b.first_index;
        break;
      }
    }
    if (first > i_star) i_star = first;
  }
  EvaluationResult r;
  r.value = 0;
  for (std::size_t k = cutoff_ + 1; k <= m; ++k) {
    const auto loc = partition_.locate(k, q);
    if (!loc || loc->index >= i_star) continue;
    r.value += four_pow(k) * tent_value(loc->block->cell(loc->index), k, loc->index, q);
  }
  r.lower = r.value;
  r.upper = r.value + Rational::pow2(-static_cast<long>(m));
  r.i_star = i_star;
  return r;
}

std::uint64_t TentSystem::modulus(std::size_t m) const {
  if (m > depth() || partition_.stages[m].empty()) {
    throw std::out_of_range("modulus: stage " + std::to_string(m) + " has no cells");
  }
  // d_{m,1} = 2^-s gives floor(-log2 d) + 1 = s + 1.
  return static_cast<std::uint64_t>(partition_.stages[m].front().cell_scale) + 1;
}

ModulusAudit TentSystem::audit_modulus(std::size_t m, std::size_t pairs, std::uint64_t seed) const {
  ModulusAudit a;
  a.m = m;
  a.h = modulus(m);
  a.bound = Rational::pow2(2 - static_cast<long>(m));
  a.worst = 0;
  const Rational tail = Rational::pow2(-static_cast<long>(depth()));
  const long n = static_cast<long>(dimension());
  const long h = static_cast<long>(a.h);
  const unsigned long bits = static_cast<unsigned long>(h) + 24;
  std::mt19937_64 rng(seed);

  auto random_unit = [&](unsigned long b) {
    // Uniform dyadic in [0, 1) with b bits, drawn 32 bits at a time.
    BigInt v = 0;
    for (unsigned long done = 0; done < b; done += 32) {
      v = v * BigInt(4294967296UL) + BigInt(static_cast<unsigned long>(rng() & 0xffffffffUL));
    }
    const unsigned long total = (b + 31) / 32 * 32;
    return Rational(v) * Rational::pow2(-static_cast<long>(total));
  };

  const Rational radius = Rational::pow2(-h) / Rational(n);
  const Rational limit2 = Rational::pow2(-2 * h);
  while (a.pairs < pairs) {
    // Anchor inside a random visible source region, or anywhere in the cube.
    const std::size_t stage = static_cast<std::size_t>(rng() % (depth() + 1));
    const auto& srcs = partition_.sources[stage];
    Vector x(n);
    if (srcs.empty() || rng() % 4 == 0) {
      for (long i = 0; i < n; ++i) x(i) = random_unit(bits);
    } else {
      const auto& d = srcs[rng() % srcs.size()];
      for (long i = 0; i < n; ++i) {
        x(i) = d.lower(static_cast<std::size_t>(i)) + d.side() * random_unit(bits + static_cast<unsigned long>(d.scale()));
      }
      // Sometimes land on the ramp of the stage cell containing x.
      if (n > 1 && rng() % 3 == 0) {
        if (const auto loc = partition_.locate(stage, x)) {
          const DyadicRational eps = tent_epsilon(stage, loc->index, loc->block->cell_scale);
          if (eps.materializable()) {
            const DyadicCube c = loc->block->cell(loc->index);
            x(1) = c.lower(1) + Rational(2) * eps.to_rational() * random_unit(32);
          }
        }
      }
    }
    Vector y = x;
    for (long i = 0; i < n; ++i) {
      y(i) += (Rational(2) * random_unit(bits) - Rational(1)) * radius;
      y(i) = min(Rational(1), max(Rational(0), y(i)));
    }
    if (squared_norm(x - y) > limit2) continue;
    const Rational diff = abs(truncated(x) - truncated(y)) + tail;
    a.worst = max(a.worst, diff);
    if (diff > a.bound) a.pass = false;
    ++a.pairs;
  }
  return a;
}

ExclusionReport TentSystem::exclusion(std::size_t m, std::size_t axis) const {
  if (axis < 1 || axis >= dimension()) throw std::invalid_argument("exclusion: axis must be in [1, n)");
  ExclusionReport r;
  r.m = m;
  r.axis = axis;
  r.bound = Rational::pow2(-3 * static_cast<long>(m));
  const std::size_t n = dimension();
  BigInt rows = 0;
  bool enumerable = true;
  for (std::size_t i = m + 1; i <= depth(); ++i) {
    for (const auto& b : partition_.stages[i]) {
      // Rows of the block along the axis; within a row the widest E^k belongs
      // to the smallest index j0 = F + k P, contributing 2 eps = 2^-(i+c+j0).
      const BigInt K = b.per_axis();
      const BigInt P = ipow(K, n - 1 - axis);
      const BigInt e0 = BigInt(static_cast<unsigned long>(i)) + b.cell_scale + b.first_index;
      if (axis == n - 1) {
        // Geometric series over k < K: 2^{-e0+1} - 2^{-e0-K+1}.
        r.upper.add(DyadicRational(BigInt(1), -e0 + 1));
        r.upper.add(DyadicRational(BigInt(-1), -e0 - K + 1));
      } else {
        // sum_k 2^{-e0 - kP} <= 2^{-e0} (1 + 2^{-P+1}).
        r.upper.add(DyadicRational(BigInt(1), -e0));
        r.upper.add(DyadicRational(BigInt(1), -e0 - P + 1));
      }
      rows += K;
      enumerable = enumerable && rows <= 4096 && tent_epsilon(i, b.first_index + (K - 1) * P, b.cell_scale).materializable();
    }
  }
  r.pass = compare(r.upper, DyadicSum(DyadicRational(BigInt(1), BigInt(-3 * static_cast<long>(m))))) !=
           std::strong_ordering::greater;
  if (enumerable) {
    std::vector<std::pair<Rational, Rational>> intervals;
    for (std::size_t i = m + 1; i <= depth(); ++i) {
      for (const auto& b : partition_.stages[i]) {
        const BigInt K = b.per_axis();
        const BigInt P = ipow(K, n - 1 - axis);
        for (BigInt k = 0; k < K; ++k) {
          const BigInt j0 = b.first_index + k * P;
          const Rational eps = tent_epsilon(i, j0, b.cell_scale).to_rational();
          const Rational lo = b.region.lower(axis) + Rational(k) * b.cell_side();
          const Rational hi = lo + b.cell_side();
          intervals.emplace_back(lo, lo + eps);
          intervals.emplace_back(hi - eps, hi);
        }
      }
    }
    std::sort(intervals.begin(), intervals.end());
    Rational total = 0;
    std::optional<std::pair<Rational, Rational>> cur;
    for (const auto& iv : intervals) {
      if (cur && iv.first <= cur->second) {
        cur->second = max(cur->second, iv.second);
        continue;
      }
      if (cur) total += cur->second - cur->first;
      cur = iv;
    }
    if (cur) total += cur->second - cur->first;
    r.exact = total;
    if (total > r.bound) r.pass = false;
  }
  return r;
}

OscillationReport TentSystem::oscillation(const Vector& z, std::size_t m) const {
  if (m <= cutoff_) throw std::invalid_argument("oscillation: stage must exceed the cutoff");
  if (m > depth()) throw std::out_of_range("oscillation: stage beyond build depth");
  const auto loc = partition_.locate(m, z);
  if (!loc) throw std::domain_error("oscillation: z = " + to_string(z) + " is not in an open stage-" +
                                    std::to_string(m) + " cell");
  OscillationReport r;
  r.m = m;
  r.d_m = loc->block->cell_side();
  const Vector e1 = unit_vector(z.size(), 0);

  std::vector<Rational> base;
  for (std::size_t k = cutoff_ + 1; k <= depth(); ++k) base.push_back(stage_value(k, z));
  auto quotients = [&](const Rational& h) {
    std::vector<Rational> out;
    const Vector y = z + h * e1;
    for (std::size_t k = cutoff_ + 1; k <= depth(); ++k) out.push_back((stage_value(k, y) - base[k - cutoff_ - 1]) / h);
    return out;
  };
  const Rational target = four_pow(m);
  const std::size_t mi = m - cutoff_ - 1;
  r.step = r.d_m / Rational(4);
  r.per_stage = quotients(r.step);
  if (abs(r.per_stage[mi]) != target) {
    auto other = quotients(-r.step);
    if (abs(other[mi]) == target) {
      r.step = -r.step;
      r.per_stage = std::move(other);
    }
  }
  r.slope = 0;
  for (std::size_t k = cutoff_ + 1; k <= depth(); ++k) {
    const Rational& s = r.per_stage[k - cutoff_ - 1];
    r.slope += s;
    if (k <= m && abs(s) != four_pow(k)) r.stage_slope_exact = false;
    if (k > m && abs(s) > Rational::pow2(2 - static_cast<long>(k))) r.tail_ok = false;
  }
  r.tail_bound = Rational::pow2(2 - static_cast<long>(depth()));
  r.lower_bound = abs(r.slope) - r.tail_bound;
  r.claimed_bound = four_pow(m - 1) - Rational(4);
  r.vacuous = r.claimed_bound <= Rational(0);
  return r;
}

json TentSystem::to_bundle() const {
  json sources = json::array();
  json stages = json::array();
  for (std::size_t m = 0; m <= depth(); ++m) {
    json s = json::array();
    for (const auto& d : partition_.sources[m]) s.push_back(cube_to_json(d));
    sources.push_back(s);
    json blocks = json::array();
    for (const auto& b : partition_.stages[m]) {
      blocks.push_back({{"region", cube_to_json(b.region)},
                        {"cell_scale", b.cell_scale},
                        {"first_index", b.first_index.get_str()},
                        {"source", b.source},
                        {"parents", b.parents}});
    }
    stages.push_back(blocks);
  }
  return json{{"format", "exactdiff-tent-system"},
              {"version", 1},
              {"dimension", dimension()},
              {"depth", depth()},
              {"cutoff", cutoff_},
              {"test", test_},
              {"sources", sources},
              {"blocks", stages}};
}

TentSystem TentSystem::from_bundle(const json& bundle) {
  if (bundle.value("format", std::string()) != "exactdiff-tent-system") {
    throw std::invalid_argument("from_bundle: not a tent-system bundle");
  }
  Partition p;
  p.dimension = bundle.at("dimension").get<std::size_t>();
  p.depth = bundle.at("depth").get<std::size_t>();
  for (const auto& s : bundle.at("sources")) {
    std::vector<DyadicCube> cubes;
    for (const auto& c : s) cubes.push_back(cube_from_json(c));
    p.sources.push_back(std::move(cubes));
  }
  std::size_t m = 0;
  for (const auto& s : bundle.at("blocks")) {
    std::vector<CellBlock> blocks;
    for (const auto& jb : s) {
      CellBlock b;
      b.stage = m;
      b.region = cube_from_json(jb.at("region"));
      b.cell_scale = jb.at("cell_scale").get<long>();
      b.first_index = BigInt(jb.at("first_index").get<std::string>());
      b.source = jb.at("source").get<std::size_t>();
      b.parents = jb.at("parents").get<std::vector<std::size_t>>();
      blocks.push_back(std::move(b));
    }
    p.stages.push_back(std::move(blocks));
    ++m;
  }
  return TentSystem(std::move(p), bundle.at("cutoff").get<std::size_t>(), bundle.value("test", json(nullptr)));
}

TentSystem build_tent_system(const NestedTest& test, std::size_t budget, std::size_t depth, std::size_t cutoff) {
  return TentSystem(build_partition(test, budget, depth), cutoff, test.descriptor);
}

NestedTest toy_test(std::size_t depth) { return concentric_test(make_vector({Rational(1, 3), Rational(1, 3)}), 2, depth); }

}  // namespace exactdiff
