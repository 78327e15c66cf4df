#pragma once

// Direct systems of Carnot groups along countable chains, their colimit, the
// infimum-pseudodistance and non-degeneracy probes, plus inverse towers with the
// sup distance.

#include "carnot/metrics.hpp"

#include <optional>
#include <string>
#include <vector>

namespace carnot {

enum class Backend { Box, CC };
std::string to_string(Backend b);
Backend parse_backend(const std::string& s);

struct ConnectorSpec {
  int from = 1;  // 1-based levels
  int to = 2;
  std::vector<std::vector<Rational>> images;  // per source generator, target coordinates
};

struct SystemSpec {
  std::string name = "custom";
  std::vector<std::string> levels;  // algebra ids
  std::vector<ConnectorSpec> connectors;
  /// Optional per-level algebras overriding the ids (e.g. hand-built tables).
  std::vector<AlgebraPtr> algebras;
  Backend backend = Backend::CC;
};

class DirectSystem {
 public:
  /// Validates DS1/DS2 and the 1-Lipschitz property of each connector.
  static DirectSystem build(const SystemSpec& spec, const SizeCap& cap = {});

  const std::string& name() const { return name_; }
  int size() const { return static_cast<int>(groups_.size()); }
  const AlgebraPtr& group(int level) const;
  /// phi_ij for 1 <= i <= j <= size().
  Morphism connector(int i, int j) const;
  Backend backend() const { return backend_; }
  /// Every consecutive connector has a 1-Lipschitz left inverse, so distances are preserved.
  bool isometric() const { return isometric_; }
  const std::vector<std::string>& notes() const { return notes_; }

 private:
  std::string name_;
  std::vector<AlgebraPtr> groups_;
  std::vector<Morphism> step_;  // step_[i-1] = phi_{i,i+1}
  Backend backend_ = Backend::CC;
  bool isometric_ = false;
  std::vector<std::string> notes_;
};

/// "filtration" (free(r,3), r = 2..K+1, generator inclusions), "degenerate" (amalgams g_i),
/// "abelian-chain" (free(r,1)), "contracting" (free(2,2) with dilation by 1/2 as connector).
SystemSpec preset_spec(const std::string& name, int K);
DirectSystem preset_system(const std::string& name, int K);

struct ColimitElement {
  int level = 1;
  GroupElement rep;
};

ColimitElement push(const DirectSystem& sys, const ColimitElement& x, int level);
bool colimit_equal(const DirectSystem& sys, const ColimitElement& a, const ColimitElement& b);
/// Lowest level holding a preimage (connectors are injective on the presets; a preimage
/// is searched by exact linear solving).
ColimitElement canonical_form(const DirectSystem& sys, const ColimitElement& x);
ColimitElement colimit_mul(const DirectSystem& sys, const ColimitElement& a, const ColimitElement& b);
ColimitElement colimit_inverse(const ColimitElement& a);
ColimitElement colimit_dilate(const Rational& lambda, const ColimitElement& a);

struct LevelDistance {
  int level = 1;
  Rational lower;
  Rational upper;
  std::optional<RootValue> box;  // exact value under the box backend
  std::string label;             // exact | certified-bound
  std::optional<HorizontalPath> witness;
};

/// d_k(e, z) at one level, with the backend of the system.
LevelDistance level_distance(const DirectSystem& sys, int level, const GroupElement& z, const SearchBudget& budget,
                             const std::vector<HorizontalPath>& seeds = {});

struct PseudodistanceReport {
  int join = 1;
  int K = 1;
  std::vector<LevelDistance> levels;
  std::vector<Rational> running_inf_upper;
  std::string tail;  // constant | nonincreasing | irregular
  bool isometric = false;
};

PseudodistanceReport infimum_pseudodistance(const DirectSystem& sys, const ColimitElement& x, const ColimitElement& y,
                                            int K, const SearchBudget& budget);

struct ZeroSetCandidate {
  ColimitElement element;
  Rational first_upper;
  Rational last_upper;
};

struct ZeroSetReport {
  int K = 1;
  int samples = 0;
  int certified_nonzero = 0;
  std::vector<ZeroSetCandidate> candidates;
};

ZeroSetReport zero_set_probe(const DirectSystem& sys, int K, int samples, unsigned long long seed,
                             const Rational& tolerance = Rational(1, 100));

struct ProbeRow {
  std::string label;
  Rational parameter;     // eta, |s - t|, ...
  Rational input;         // displacement of the input
  Rational lower;         // certified lower bound of the inner quantity
  Rational upper;         // best upper bound of the inner quantity
};

struct NondegReport {
  std::string condition;
  std::string verdict;  // violation witnessed | ratio unbounded (evidence) | no violation found at budget | undecided
  std::vector<ProbeRow> rows;
  std::string note;
};

struct NondegBudget {
  int K = 3;
  int scales = 5;  // eta = 2^-1 .. 2^-scales
  int samples = 8;
  unsigned long long seed = 1;
  Rational threshold = 2;
  SearchBudget search{8, 0, 40, 1, 20000};
};

NondegReport nondeg_probe_c1(const DirectSystem& sys, const ColimitElement& x, const Rational& t, const NondegBudget& b);
NondegReport nondeg_probe_c2(const DirectSystem& sys, const ColimitElement& x, const NondegBudget& b);
NondegReport nondeg_probe_c3(const DirectSystem& sys, const std::vector<ColimitElement>& cloud, const NondegBudget& b);

struct FiltrationLevel {
  int level = 1;
  std::string algebra;
  int dimension = 0;
  int generated_dimension = 0;
  int step = 0;
  bool generates = false;
  bool first_layer_preserved = true;
};

struct FiltrationReport {
  std::vector<FiltrationLevel> levels;
  bool generation_ok = false;
  bool nilpotent_ok = false;  // iterated commutators longer than the step vanish
  int commutator_samples = 0;
  bool isometry_ok = false;   // d(delta_t x, delta_s x) = |t - s| d(e, x) on sampled first-layer x
  int isometry_samples = 0;
  bool ok() const { return generation_ok && nilpotent_ok && isometry_ok; }
};

FiltrationReport filtration_report(const DirectSystem& sys, int samples, unsigned long long seed);

/// Dimension of the subalgebra generated by the degree-1 words.
int generated_dimension(const LieAlgebra& alg);

/// Iterated commutator [[..[x1,x2],..],xn] of colimit elements, computed at the join level.
ColimitElement iterated_commutator(const DirectSystem& sys, const std::vector<ColimitElement>& xs);

// ---- inverse towers -----------------------------------------------------------------------

struct TowerSpec {
  std::vector<std::string> levels;
  std::vector<ConnectorSpec> projections;  // from = j (higher), to = i = j - 1
};

class InverseTower {
 public:
  static InverseTower build(const TowerSpec& spec, const SizeCap& cap = {});
  /// free(2,k), k = 1..K, with the canonical projections.
  static InverseTower free_tower(int K);

  int size() const { return static_cast<int>(groups_.size()); }
  const AlgebraPtr& group(int level) const;
  /// P_ij : G_j -> G_i for i <= j.
  Morphism projection(int i, int j) const;
  /// Throws a validation error naming (i, j) when x_i != P_ij(x_j).
  void check_compatible(const std::vector<GroupElement>& tuple) const;

 private:
  std::vector<AlgebraPtr> groups_;
  std::vector<Morphism> down_;  // down_[i-1] = P_{i,i+1}
};

struct SupDistanceReport {
  std::vector<LevelDistance> levels;
  Rational lower;  // max of per-level lower bounds
  Rational upper;  // max of per-level upper bounds
  bool finite = true;
};

SupDistanceReport sup_distance(const InverseTower& tower, const std::vector<GroupElement>& x,
                               const std::vector<GroupElement>& y, const SearchBudget& budget,
                               const std::vector<HorizontalPath>& top_seeds = {});

// ---- the degenerate example ----------------------------------------------------------------

struct DegenerateRow {
  int k = 1;
  Rational lower;
  Rational upper;
  Rational witness_length;
  std::string label;
  HorizontalPath witness;
};

/// Per-k brackets for d_k(x_k, delta_eps(y_k^k) x_k) in g_k, evaluated in the isometric
/// free(2,k) block. Lower bounds are propagated upward through the 1-Lipschitz projections.
std::vector<DegenerateRow> degenerate_table(const Rational& eps, int kmax, const SearchBudget& budget);

}  // namespace carnot
