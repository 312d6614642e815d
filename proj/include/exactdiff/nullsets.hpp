// Effective null sets as data: enumerated dyadic covers, nested tests built
// from config rules, and the Dore-Maleva square-removal construction.
#pragma once

#include "exactdiff/cube.hpp"
#include "exactdiff/function.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace exactdiff {

/// Deterministic enumeration of dyadic cubes, possibly finite. The cursor
/// tracks the enumerated prefix and its exact union measure.
class CubeStream {
 public:
  /// Returns the cube at the index, or nullopt once the stream has ended.
  using Generator = std::function<std::optional<DyadicCube>(std::size_t index)>;
  CubeStream(Generator generator, json descriptor);

  static CubeStream from_cubes(std::vector<DyadicCube> cubes);
  static CubeStream empty();

  std::optional<DyadicCube> next();
  const std::vector<DyadicCube>& enumerated() const { return seen_; }
  Rational measure() const { return measure_; }
  /// First `budget` cubes, without moving the cursor.
  std::vector<DyadicCube> take(std::size_t budget) const;
  const json& descriptor() const { return descriptor_; }

 private:
  std::shared_ptr<const Generator> generator_;
  json descriptor_;
  std::vector<DyadicCube> seen_;
  Rational measure_ = 0;
  bool done_ = false;
};

/// G_0, G_1, ... as cube streams. `depth` is the last stage the test
/// defines (stage(m) for m > depth throws).
struct NestedTest {
  std::size_t dimension = 0;
  std::size_t depth = 0;
  std::function<CubeStream(std::size_t m)> stage;
  json descriptor;
};

/// Config form: {dimension, depth, stages: [rule...], generator: rule}.
/// Listed stages come first; the generator fills later ones with its scale
/// multiplied by the stage number. Rules:
///   {rule: "unit"}
///   {rule: "explicit", cubes: [{dim, scale, corner}]}
///   {rule: "around_point", point, scale}            one cube containing point
///   {rule: "neighborhood", point, scale, radius}    (2r+1)^n block around it
/// In the generator, "scale_per_stage" replaces "scale".
NestedTest nested_test_from_json(const json& config);
/// G_m = the scale (scale_per_stage * m) cube containing `point`.
NestedTest concentric_test(const Vector& point, long scale_per_stage, std::size_t depth);

json cube_to_json(const DyadicCube& c);
DyadicCube cube_from_json(const json& j);

struct NestingAudit {
  bool pass = true;
  std::optional<DyadicCube> witness;  // cube of G_{m+1} not covered by G_m
};

/// Each of the first `budget` cubes of G_{m+1} is covered by the first
/// `budget` cubes of G_m.
NestingAudit audit_nesting(const NestedTest& test, std::size_t stage, std::size_t budget);

struct DoreMalevaParams {
  std::vector<long> N;       // odd, N_1 > 1, nondecreasing
  std::vector<Rational> p;   // effective p_i
  std::vector<Rational> p_raw;

  std::size_t stages() const { return N.size(); }
  /// d_i = prod_{k <= i} 1/N_k, d_0 = 1.
  Rational d(std::size_t i) const;
};

/// Throws std::invalid_argument when N is not odd and nondecreasing with
/// N_1 > 1, or p_i lies outside [0, N_i].
DoreMalevaParams make_dore_maleva_params(std::vector<long> N, std::vector<Rational> p,
                                         std::vector<Rational> p_raw = {});
/// N = 3,3,3,5 (x5),7 (x7),... with p_i = min(4, N_i - 1); raw p_i = 4.
DoreMalevaParams default_dore_maleva_params(std::size_t stages);

struct DoreMalevaStage {
  std::size_t index = 0;
  Rational pitch;             // d_{i-1}, lattice spacing and cell side
  Rational d;                 // d_i
  Rational half_side;         // L-infinity radius p_i d_i / 2
  Rational removed_fraction;  // (p_i / N_i)^2 per cell
  BigInt centres_per_axis;    // 1 / d_{i-1}
  bool degenerate = false;    // p_i = N_i: whole cell removed
  bool below_one = false;     // p_i < 1 breaks 1 <= p_i
  bool disjoint = true;       // balls strictly inside their cells
};

/// Centres (d_{i-1}/2, d_{i-1}/2) + d_{i-1} Z^2 inside [0,1]^2.
DoreMalevaStage dore_maleva_stage(const DoreMalevaParams& params, std::size_t i);
/// prod_{i <= k} (1 - (p_i/N_i)^2).
Rational dore_maleva_measure(const DoreMalevaParams& params, std::size_t k);
/// Independent count on the d_k / 2 grid; needs integer p_i.
Rational dore_maleva_grid_measure(const DoreMalevaParams& params, std::size_t k);
/// First k with remaining measure below `level`, searching up to the
/// number of configured stages.
std::optional<std::size_t> dore_maleva_stage_below(const DoreMalevaParams& params, const Rational& level);
/// Removed squares of stages 1..k as {stage, x0, y0, x1, y1} records.
json dore_maleva_geometry(const DoreMalevaParams& params, std::size_t k);

}  // namespace exactdiff
