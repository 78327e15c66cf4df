#pragma once

// Distances on Carnot groups: the exact box quasi-norm, horizontal paths and
// certified brackets for the Carnot-Caratheodory distance, modulus-of-continuity
// probes and Lipschitz constants of morphisms.

#include "carnot/group_ops.hpp"

#include <optional>
#include <string>
#include <vector>

namespace carnot {

// ---- box quasi-norm ------------------------------------------------------------

/// The real number radicand^(1/index), radicand >= 0, index >= 1. Comparisons are exact.
struct RootValue {
  Rational radicand = 0;
  unsigned index = 1;

  static RootValue of(const Rational& q) { return {abs(q), 1}; }
  /// |lambda| * value.
  RootValue scaled(const Rational& lambda) const;
  Interval bounds(unsigned bits = 96) const { return root_bounds(radicand, index, bits); }
  double approx() const;
  /// Exact rational value when the root is rational.
  std::optional<Rational> rational() const;
  std::string to_string() const;
};

int compare(const RootValue& a, const RootValue& b);
inline bool operator<(const RootValue& a, const RootValue& b) { return compare(a, b) < 0; }
inline bool operator==(const RootValue& a, const RootValue& b) { return compare(a, b) == 0; }
inline bool operator<=(const RootValue& a, const RootValue& b) { return compare(a, b) <= 0; }
int compare(const RootValue& a, const Rational& b);

/// max over basis words w of |x_w|^(1/deg w).
RootValue quasi_norm(const GroupElement& x);
/// Left-invariant box distance ||x^-1 y||.
RootValue box_distance(const GroupElement& x, const GroupElement& y);
double quasi_norm_approx(const LieAlgebra& alg, const std::vector<double>& coords);

// ---- horizontal paths ------------------------------------------------------------

struct Segment {
  std::vector<Rational> direction;  // first-layer coordinates
  Rational duration;                // >= 0
};

struct HorizontalPath {
  AlgebraPtr algebra;
  std::vector<Segment> segments;

  static HorizontalPath empty(const AlgebraPtr& alg) { return {alg, {}}; }
  /// Segment along generator g for signed time t.
  static HorizontalPath axis(const AlgebraPtr& alg, int g, const Rational& t);

  GroupElement endpoint() const;
  /// Sum of duration * |direction|_2; a point interval when every direction norm is rational.
  Interval length() const;
  HorizontalPath then(const HorizontalPath& other) const;
  /// Same curve traversed backwards from the endpoint; its endpoint is the inverse.
  HorizontalPath reversed() const;
  /// Image under a morphism (directions mapped by the first-layer block).
  HorizontalPath mapped(const Morphism& phi) const;
  /// Drops zero-length pieces and merges consecutive segments with equal direction.
  HorizontalPath simplified() const;
};

/// Piecewise axis-aligned planar curve through `points`, starting at the first point,
/// lifted horizontally into a rank-2 algebra (first coordinate along X, second along Y).
struct LiftResult {
  GroupElement endpoint;
  Rational length;
  HorizontalPath path;
};
LiftResult lift_polygonal(const std::vector<std::pair<Rational, Rational>>& points, const AlgebraPtr& alg);

/// The square-loop curve (0,0) -> (-1,0) -> (-1,eps) -> (0,eps) of the degenerate example.
std::vector<std::pair<Rational, Rational>> gamma_curve(const Rational& eps);

// ---- Carnot-Caratheodory brackets --------------------------------------------------

struct SearchBudget {
  int segments = 8;
  int restarts = 3;
  int iterations = 80;
  unsigned long long seed = 1;
  std::size_t max_path_segments = 20000;
};

struct Certificate {
  std::string kind;
  std::string detail;
  Rational value;
};

struct DistanceBracket {
  Rational lower;
  Rational upper;
  HorizontalPath witness;
  std::vector<Certificate> certificates;
  std::string upper_source;
};

/// Exact path from e to x built degree by degree from generator segments and iterated
/// group commutators. Fails with NoCertifiedPath when x has components outside the
/// subgroup generated by the first layer or the path would exceed the segment cap.
HorizontalPath constructive_path(const GroupElement& x, std::size_t max_segments = 20000);

/// Best exact-endpoint path found by numeric search, high-precision polishing, rational
/// snapping and exact repair; `seeds` are candidate paths (any endpoint) tried first.
HorizontalPath cc_upper_bound(const GroupElement& x, const SearchBudget& budget,
                              const std::vector<HorizontalPath>& seeds = {}, std::string* source = nullptr);

/// Certified lower bound: abelianization norm and isoperimetric bounds through
/// 1-Lipschitz projections onto the Heisenberg group.
Rational cc_lower_bound(const GroupElement& x, std::vector<Certificate>* certificates = nullptr);

DistanceBracket cc_distance(const GroupElement& x, const SearchBudget& budget,
                            const std::vector<HorizontalPath>& seeds = {});

/// Lower bound for the Heisenberg distance from e to (a, b, c), with c on [X,Y].
Rational heisenberg_lower_bound(const Rational& a, const Rational& b, const Rational& c);

/// Morphisms onto free(2,2) whose first-layer block has operator norm <= 1.
std::vector<Morphism> heisenberg_projections(const AlgebraPtr& alg);
AlgebraPtr heisenberg();

// ---- maps and continuity probes ------------------------------------------------------

enum class MapKind { Identity, LeftTranslation, RightTranslation, Inverse, Dilation, Morphism };

struct MapDescriptor {
  MapKind kind = MapKind::Identity;
  std::optional<GroupElement> element;  // translations
  Rational lambda = 1;                  // dilation
  std::optional<carnot::Morphism> morphism;

  std::string id() const;
  GroupElement apply(const GroupElement& x) const;
  std::vector<double> apply_approx(const LieAlgebra& alg, const std::vector<double>& x) const;
};

struct ProbeBudget {
  int samples = 1000;
  unsigned long long seed = 1;
  double rho_min = 1e-9;
  double rho_max = 1e6;
  int bisection_steps = 48;
};

struct ModulusEstimate {
  std::string map_id;
  GroupElement base;
  double epsilon = 0;
  double omega = 0;
  bool unbounded = false;
  int samples = 0;
  std::string status = "upper-evidence";
  /// Largest sampled ratio d(f x, f x') / d(x, x') seen at the failing radii (1 for isometries).
  double max_ratio = 0;
};

/// Empirical omega_f(base; eps) for the box distance: directions on the unit box shell,
/// radii scanned geometrically and refined by bisection; the minimum failing radius.
ModulusEstimate modulus_probe(const MapDescriptor& map, const GroupElement& base, double eps,
                              const ProbeBudget& budget);

struct LipschitzEstimate {
  std::string backend;
  std::optional<RootValue> exact;  // box backend
  double estimate = 0;
  bool certified = false;
  /// CC backend: first-layer operator norm <= 1 proven exactly.
  bool at_most_one = false;
  std::string note;
};

/// backend "box": exact sup of ||phi x|| / ||x||. backend "cc": sampled ratio on first-layer
/// directions plus an exact check that the first-layer operator norm is at most one.
LipschitzEstimate lipschitz_estimate(const Morphism& phi, const std::string& backend, int samples = 256,
                                     unsigned long long seed = 1);

/// Exact test that the first-layer block of phi has l2 operator norm <= 1.
bool first_layer_contraction(const Morphism& phi);

/// Exact positive-semidefiniteness of a symmetric rational matrix.
bool is_positive_semidefinite(std::vector<std::vector<Rational>> m);

}  // namespace carnot
