#pragma once

// Lipschitz function expressions on Carnot groups, incremental ratios, Gateaux
// (Pansu) differential probes, equi-Lipschitz checks, and symbolic families of
// null sets on a direct-system colimit.

#include "carnot/limits.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace carnot {

enum class NodeKind { Const, Coord, Linear, QuasiNorm, Translate, Dilate, Add, Scale, Min, Max, Abs };

std::string to_string(NodeKind k);
NodeKind parse_node_kind(const std::string& s);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  NodeKind kind = NodeKind::Const;
  Rational value;                       // const value, scale factor, dilation parameter
  int index = 0;                        // coord
  std::vector<Rational> weights;        // linear functional on first-layer coordinates
  std::optional<GroupElement> element;  // translate: x -> child(element * x)
  std::vector<ExprPtr> children;
};

namespace fx {
ExprPtr constant(const Rational& c);
ExprPtr coord(int i);
ExprPtr linear(std::vector<Rational> w);
ExprPtr quasinorm();
ExprPtr translate(const GroupElement& g, ExprPtr f);
ExprPtr dilate(const Rational& lambda, ExprPtr f);
ExprPtr add(ExprPtr a, ExprPtr b);
ExprPtr scale(const Rational& c, ExprPtr f);
ExprPtr min(ExprPtr a, ExprPtr b);
ExprPtr max(ExprPtr a, ExprPtr b);
ExprPtr abs(ExprPtr f);
}  // namespace fx

/// Enclosure of a real value; `exact` means lo == hi is the value itself.
struct Value {
  Interval iv;
  bool exact = true;
  Rational width() const { return iv.hi - iv.lo; }
};

/// Fails with a validation error when an index or translation does not fit the algebra.
void validate(const Expr& f, const AlgebraPtr& alg);
bool contains_quasinorm(const Expr& f);
Value evaluate(const Expr& f, const GroupElement& x);

/// Fixed set of Lipschitz expressions on a group of rank >= 2 (translations drawn from a fixed seed).
std::vector<ExprPtr> lipschitz_examples(const AlgebraPtr& alg);

/// Upper estimate of the Lipschitz constant for the CC distance; nullopt means no finite
/// estimate (the quasi-norm node).
std::optional<Rational> lipschitz_bound(const Expr& f);

/// (f(p delta_lambda(g)) - f(p)) / lambda.
Value incremental_ratio(const Expr& f, const GroupElement& p, const GroupElement& g, const Rational& lambda);

struct RatioSample {
  Rational lambda;
  Value value;
};

struct DirectionVerdict {
  GroupElement direction;
  std::string verdict;  // converged | oscillating | undecided
  Value limit;          // converged: value at the smallest positive lambda
  double rate = 0;      // |IR(lambda_M) - IR(lambda_{M-1})| on the positive side
  double tail_diameter = 0;
  double gap = 0;       // two-sided disagreement at the smallest |lambda|
  std::optional<std::pair<RatioSample, RatioSample>> witness;
  std::vector<RatioSample> samples;
};

struct DifferentialReport {
  GroupElement base;
  double tolerance = 0;
  bool exact_function = false;
  std::vector<DirectionVerdict> directions;
  bool all_converged = false;
  bool flagged_nd = false;
  /// Candidate differential as weights on first-layer coordinates.
  std::optional<std::vector<Rational>> differential;
  bool differential_exact = false;
  std::string homomorphism = "skipped";  // passed | failed | skipped
  bool homomorphism_exact = false;
  int homomorphism_pairs = 0;
};

struct GateauxOptions {
  int schedule = 20;  // lambda = +-2^-m, m = 1..schedule
  std::optional<double> tolerance;  // default 1e-9 for exact functions, 1e-6 otherwise
};

DifferentialReport gateaux_probe(const Expr& f, const GroupElement& p, const std::vector<GroupElement>& directions,
                                 const GateauxOptions& opts = {});

struct LipschitzViolation {
  Rational lambda;
  GroupElement g;
  GroupElement h;
  Interval lhs;    // |IR(g) - IR(h)|
  Rational rhs;    // Lip * (upper bound of d(g, h))
};

struct EquiLipschitzReport {
  std::optional<Rational> lipschitz;
  int checks = 0;
  std::vector<LipschitzViolation> violations;
  std::string note;
  bool passed() const { return lipschitz.has_value() && violations.empty(); }
};

/// Checks |IR(g) - IR(h)| <= Lip * d(g, h) with d replaced by a certified upper bound.
EquiLipschitzReport equilipschitz_check(const Expr& f, const GroupElement& p, int samples,
                                        const std::vector<Rational>& lambdas, unsigned long long seed,
                                        std::optional<Rational> lipschitz_override = std::nullopt);

// ---- null families ----------------------------------------------------------------

struct BorelSet {
  enum class Kind { Point, Affine, Ball };
  Kind kind = Kind::Point;
  std::vector<Rational> center;  // coordinates at the level
  int codim = 0;                 // affine: codimension of the subspace through center
  Rational radius;               // ball
};

std::string to_string(BorelSet::Kind k);

/// Decides whether a Borel set at a level belongs to that level's null family.
using MembershipHook = std::function<bool(const DirectSystem&, int level, const BorelSet&)>;
/// Points, proper affine subspaces and radius-0 balls are null; balls of positive radius are not.
bool default_membership(const DirectSystem& sys, int level, const BorelSet& b);

struct NullDescriptor {
  enum class Kind { Empty, Cylinder, Union, Subset, Translate };
  Kind kind = Kind::Empty;
  int level = 0;                            // cylinder
  BorelSet borel;                           // cylinder
  std::optional<ColimitElement> translation;  // cylinder: the set t * phi_level(borel)
  std::vector<int> parts;                   // union: members; subset/translate: the source
  std::string constraint;                   // subset
  std::optional<ColimitElement> by;         // translate: left factor
  int rewritten = -1;                       // translate: id of the rewritten descriptor
};

/// phi_level^-1((q * shift) N) must be null at `level` for every q; N is the base cylinder.
struct Obligation {
  int level = 0;
  int base = 0;
  ColimitElement shift;
  std::string text;
};

struct AxiomReport {
  bool empty_member = false;
  bool union_closed = false;
  bool subset_closed = false;
  bool translation_stable = false;
  std::vector<std::string> failures;
  bool ok() const { return empty_member && union_closed && subset_closed && translation_stable; }
};

class NullFamily {
 public:
  explicit NullFamily(std::shared_ptr<const DirectSystem> sys, MembershipHook hook = default_membership);

  const DirectSystem& system() const { return *sys_; }
  static constexpr int empty_set = 0;

  /// t * phi_level(B); rejected when the level hook does not declare B null.
  int add_cylinder(int level, const BorelSet& b, const ColimitElement& t);
  int add_union(const std::vector<int>& ids);
  int add_subset(int parent, const std::string& constraint);
  /// Rewrites g * N: cylinders get translation g t, unions are translated part by part.
  int translate(const ColimitElement& g, int id);

  bool contains(int id) const;
  const std::vector<NullDescriptor>& descriptors() const { return items_; }
  const NullDescriptor& at(int id) const;
  std::vector<Obligation> obligations(int id) const;

  AxiomReport check_axioms() const;

 private:
  bool derivable(int id, std::vector<int>& memo) const;
  std::shared_ptr<const DirectSystem> sys_;
  MembershipHook hook_;
  std::vector<NullDescriptor> items_;
  std::vector<std::vector<Obligation>> obligations_;
};

/// N = union of the given per-level members together with every preimage obligation.
struct LimitFamilyDescriptor {
  int union_id = 0;
  std::vector<Obligation> obligations;
};

LimitFamilyDescriptor assemble_limit_family(NullFamily& family, const std::vector<int>& members);

}  // namespace carnot
