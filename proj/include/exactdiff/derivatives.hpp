// Difference quotients and finite-depth differentiability probes.
//
// Differentiability at a point is not decidable, so every probe is one of two
// honest finite procedures: an exact refutation witness that can be replayed,
// or consistency up to a stated depth with a bracket of observed slopes.
#pragma once

#include "exactdiff/function.hpp"
#include "exactdiff/geometry.hpp"

#include <optional>
#include <string>
#include <vector>

namespace exactdiff {

/// One difference quotient (f(x + h v) - f(x)) / h.
struct SlopeReport {
  Vector point;
  Vector direction;
  std::string label;  // "axis:i" or "vector"
  Rational step;
  Rational value;
  Rational error;  // zero when f is exact
  json to_json() const;
};

/// Row of axis quotients with a shared step b.
struct SlopeRow {
  Vector point;
  Rational step;
  Vector values;
  Rational error;
  json to_json() const;
};

/// Axes are 0-based throughout. Throws std::invalid_argument on h = 0 and
/// std::domain_error when x or the stepped point leaves [0,1]^n.
SlopeReport slope_axis(const ComputableFunction& f, const Vector& x, std::size_t axis,
                       const Rational& h, unsigned precision = 64);
SlopeRow slope_row(const ComputableFunction& f, const Vector& x, const Rational& b,
                   unsigned precision = 64);
SlopeReport slope_dir(const ComputableFunction& f, const Vector& x, const Vector& v,
                      const Rational& h, unsigned precision = 64);

enum class ProbeStatus { ConsistentToDepth, ViolatedAt };

struct Bracket {
  Rational low;
  Rational high;
};

struct ProbeVerdict {
  ProbeStatus status = ProbeStatus::ConsistentToDepth;
  unsigned depth = 0;
  /// Measured quantity: oscillation, defect or worst remainder ratio.
  Rational value = 0;
  std::optional<Bracket> bracket;
  /// Full rational parameters for replay; "kind" selects the replay rule.
  json witness;
  /// Probe-specific extras (one-sided brackets, per-axis data).
  json details;

  bool violated() const { return status == ProbeStatus::ViolatedAt; }
  json to_json() const;
};

/// h = 2^-k for k = 2..depth.
std::vector<Rational> default_schedule(unsigned depth);

/// Two-sided slopes at +h and -h for each feasible step in the schedule.
/// Violated when the certified spread of slopes from index `tail_from` on
/// is at least q. Right (h > 0) and left (h < 0) brackets are reported
/// separately in details.
ProbeVerdict partial_probe(const ComputableFunction& f, const Vector& x, std::size_t axis,
                           const std::vector<Rational>& schedule, const Rational& q,
                           std::size_t tail_from = 0);

struct DirectionalReduction {
  ComputableFunction g;
  Vector z;
  Vector w;
  AffineIsometry transform;
  bool found = false;       // a w with z in the unit cube was found
  bool identity_ok = false;
  std::vector<Rational> panel;
  std::optional<Rational> failing_t;
};

/// t_k = 1/(k + 2) for k < count.
std::vector<Rational> default_t_panel(std::size_t count = 50);

/// g = f o P_1 o (Theta + w) with Theta e_1 = u and z = Theta^-1 (x - w);
/// checks (g(z + t e_1) - g(z)) / t == (f^(x + t u) - f^(x)) / t for every t
/// in the panel, where f^ = f o P_1. Tries w_hint, then 0, then the w that
/// puts z at the cube centre.
DirectionalReduction dir_derivative_via_basis(const ComputableFunction& f, const Vector& x,
                                              const Vector& u, std::optional<Vector> w_hint = {},
                                              std::vector<Rational> panel = default_t_panel());

/// min over feasible steps h <= p in the grid of |d^u + d^v - d^(u+v)|.
/// With q given, violated (x is in L_{u,v,q} to this depth) when the min is
/// at least q. Throws std::domain_error when no step is feasible.
ProbeVerdict linearity_defect(const ComputableFunction& f, const Vector& x, const Vector& u,
                              const Vector& v, const Rational& p, const std::vector<Rational>& grid,
                              std::optional<Rational> q = {});

/// Bounded form of: for all eps there is delta such that for all h, b with
/// ||h|| < delta, |b| < delta: |f(x+h) - f(x) - row(x,b).h| <= eps ||h||.
/// eps, delta range over 2^-1..2^-depth; h coordinates over {0, +-2^-k} and b
/// over {+-2^-k}, k <= 2 depth, restricted to steps inside the cube.
ProbeVerdict diff_class_b(const ComputableFunction& f, const Vector& x, unsigned depth);

/// Per axis, at every level k in [depth, 2 depth] the slopes at +-2^-k give
/// a per-level min and max. q = max of the mins, p = min of the maxes bracket
/// the lower and upper partials; violated when p - q > slack.
ProbeVerdict diff_class_a(const ComputableFunction& f, const Vector& x, unsigned depth,
                          std::optional<Rational> slack = {});

/// Re-evaluates a ViolatedAt witness exactly; true when the violation recurs.
bool replay_witness(const ComputableFunction& f, const ProbeVerdict& verdict);

}  // namespace exactdiff
