// The tent-function counterexample: refine a nested test into a staged
// partition C_{m,i}, put a tent on every cell and sum f = sum_{m > N} 4^m f_m.
//
// Cell counts grow doubly exponentially (about 2^74 cells at stage 5 of the
// concentric toy), so cells are stored as uniform blocks and located by
// index arithmetic. Tent ramps eps = 2^-(m+j+1) d need exponents far beyond
// machine range and are carried as DyadicRational values.
#pragma once

#include "exactdiff/cube.hpp"
#include "exactdiff/function.hpp"
#include "exactdiff/nullsets.hpp"

#include <optional>
#include <random>
#include <string>
#include <vector>

namespace exactdiff {

/// A dyadic cube `region` cut into equal cells of side 2^-cell_scale,
/// numbered from `first_index` in lexicographic order, last axis fastest.
struct CellBlock {
  std::size_t stage = 0;
  DyadicCube region;
  long cell_scale = 0;
  BigInt first_index = 1;
  std::size_t source = 0;            // l of the D_{m,l} being partitioned
  std::vector<std::size_t> parents;  // stage m-1 blocks meeting the region

  BigInt per_axis() const;  // cells along one axis
  BigInt count() const;
  BigInt last_index() const { return first_index + count() - 1; }
  Rational cell_side() const { return Rational::pow2(-cell_scale); }
  /// Cell with the given 1-based global index.
  DyadicCube cell(const BigInt& index) const;
  /// Index of the cell whose open interior contains x.
  std::optional<BigInt> locate(const Vector& x) const;
};

struct Partition {
  std::size_t dimension = 0;
  std::size_t depth = 0;                               // last stage built
  std::vector<std::vector<DyadicCube>> sources;        // visible D_{m,l}
  std::vector<std::vector<CellBlock>> stages;          // blocks per stage

  BigInt cell_count(std::size_t m) const;
  /// Block holding C_{m,i}; throws std::out_of_range when absent.
  const CellBlock& block_of(std::size_t m, const BigInt& i) const;
  DyadicCube cell(std::size_t m, const BigInt& i) const { return block_of(m, i).cell(i); }
  Rational side(std::size_t m, const BigInt& i) const { return block_of(m, i).cell_side(); }
  struct Location {
    const CellBlock* block;
    BigInt index;
  };
  std::optional<Location> locate(std::size_t m, const Vector& x) const;
};

/// Staged construction. For each visible D at stage m (first `budget` cubes
/// of G_m): waits for coverage by stage m-1 cells (throws std::runtime_error
/// naming the blocking cube if the visible G_{m-1} never covers it), takes
/// delta = min side of D and of the stage m-1 cells meeting it, eps =
/// 8^-m delta capped by the previous cell of the stage, and tiles the part
/// of D not yet partitioned with cells of the largest dyadic side <= eps.
/// All lengths are side lengths.
Partition build_partition(const NestedTest& test, std::size_t budget, std::size_t depth);

struct PartitionCheck {
  bool union_ok = true;        // i)
  bool disjoint_order_ok = true;  // ii)
  bool parent_ok = true;       // iii) lambda(B) <= 8^-m lambda(A)
  bool side_ok = true;         // iv) d <= 8^-m side(D)
  bool literal_iv_ok = true;   // iv) read as d <= 8^-m lambda(D); diagnostic only
  std::vector<std::string> failures;
  std::vector<std::string> diagnostics;

  bool pass() const { return union_ok && disjoint_order_ok && parent_ok && side_ok; }
  json to_json() const;
};

PartitionCheck verify_partition(const Partition& p);
/// Same sources and blocks, field by field.
bool same_partition(const Partition& a, const Partition& b);

/// eps_{m,j} = 2^-(m+j+1) d with d = 2^-cell_scale.
DyadicRational tent_epsilon(std::size_t m, const BigInt& j, long cell_scale);

/// f_{m,j}(x) = dist(x_1, complement of (a_1, b_1)) * prod_{i >= 2} b^i(x_i).
Rational tent_value(const DyadicCube& cell, std::size_t m, const BigInt& j, const Vector& x);

struct TentFunction {
  DyadicCube cell;
  std::size_t m = 0;
  BigInt j = 1;
  DyadicRational epsilon;
  bool degenerate = false;  // eps = d/2 (m = j = 0): empty plateau
  ComputableFunction function;
};

/// Throws std::invalid_argument when eps exceeds d/2.
TentFunction tent_for(const DyadicCube& cell, std::size_t m, const BigInt& j);

struct EvaluationResult {
  Rational value;   // truncated sum, a lower bound since every term is >= 0
  Rational lower;
  Rational upper;   // value + 2^-m
  BigInt i_star;
  json to_json() const;
};

struct OscillationReport {
  std::size_t m = 0;
  Rational d_m;
  Rational step;               // +-d_m/4, the sign chosen so |delta_{f_m}| = 4^m
  Rational slope;              // delta_f over stages N < k <= depth
  Rational tail_bound;         // sum_{k > depth} 2^{-k+2}
  Rational lower_bound;        // |slope| - tail_bound
  Rational claimed_bound;        // 4^{m-1} - 4
  std::vector<Rational> per_stage;  // delta_{f_k}, k = N+1..depth
  bool stage_slope_exact = true;    // |delta_{f_k}| = 4^k for N < k <= m
  bool tail_ok = true;              // |delta_{f_k}| <= 2^{-k+2} for k > m
  bool vacuous = false;             // claimed bound <= 0
  bool pass() const { return stage_slope_exact && tail_ok && lower_bound >= claimed_bound; }
  json to_json() const;
};

struct ExclusionReport {
  std::size_t m = 0;
  std::size_t axis = 0;          // 0-based, >= 1
  DyadicSum upper;               // subadditive bound on lambda(B_m^k)
  std::optional<Rational> exact; // union measure when small enough to enumerate
  Rational bound;                // 8^-m
  bool pass = true;
  json to_json() const;
};

struct ModulusAudit {
  std::size_t m = 0;
  std::uint64_t h = 0;
  std::size_t pairs = 0;
  Rational worst;   // largest |f_M(x) - f_M(y)| + 2^-M seen
  Rational bound;   // 2^{-m+2}
  bool pass = true;
  json to_json() const;
};

class TentSystem {
 public:
  TentSystem(Partition partition, std::size_t cutoff, json test_descriptor = nullptr);

  const Partition& partition() const { return partition_; }
  std::size_t cutoff() const { return cutoff_; }
  std::size_t depth() const { return partition_.depth; }
  std::size_t dimension() const { return partition_.dimension; }
  const json& test_descriptor() const { return test_; }

  /// 4^k f_{k,i}(x) for the cell containing x, zero elsewhere.
  Rational stage_value(std::size_t k, const Vector& x) const;
  /// sum_{N < k <= depth} f_k(x).
  Rational truncated(const Vector& x) const;
  /// Exact truncated sum as a function; modulus from modulus_of_f.
  ComputableFunction truncated_function() const;

  /// Certified f(q) in [value, value + 2^-m]. Throws std::out_of_range when
  /// the build is shallower than m.
  EvaluationResult evaluate(const Vector& q, std::size_t m) const;
  /// h(m) = floor(-log2 d_{m,1}) + 1; throws std::out_of_range on an empty stage.
  std::uint64_t modulus(std::size_t m) const;
  ModulusAudit audit_modulus(std::size_t m, std::size_t pairs, std::uint64_t seed) const;
  /// Upper bound on lambda(B_m^k) (k is a 0-based axis >= 1) compared with 8^-m.
  ExclusionReport exclusion(std::size_t m, std::size_t axis) const;
  /// Throws std::domain_error unless z lies in an open stage-m cell.
  OscillationReport oscillation(const Vector& z, std::size_t m) const;

  json to_bundle() const;
  static TentSystem from_bundle(const json& bundle);

 private:
  Partition partition_;
  std::size_t cutoff_;
  json test_;
};

TentSystem build_tent_system(const NestedTest& test, std::size_t budget, std::size_t depth, std::size_t cutoff);

/// The concentric toy: G_0 = [0,1]^2, G_m = scale-2m cube containing (1/3, 1/3).
NestedTest toy_test(std::size_t depth);

}  // namespace exactdiff
