#pragma once

// Stratified nilpotent Lie algebras stored as exact structure-constant tables
// over a graded basis: free nilpotent algebras (Hall basis), the block
// amalgams g_i, and abelian algebras with arbitrary weights.

#include "carnot/error.hpp"
#include "carnot/rational.hpp"

#include <cstddef>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace carnot {

struct BasisWord {
  int index = 0;
  int degree = 1;
  int left = -1;   // factors of a bracket word, -1 for generators
  int right = -1;
  std::string label;
  int block = 0;   // amalgams: which (X, Y^k) block the word belongs to; 0 for X
};

/// Sparse linear combination of basis words, sorted by index, no zero coefficients.
using Combination = std::vector<std::pair<int, Rational>>;

enum class AlgebraKind { Free, Amalgam, Abelian, Custom };

std::string to_string(AlgebraKind kind);

struct SizeCap {
  std::size_t max_dimension = 2000;
};

template <class T>
struct BracketTerm {
  int index;
  T coeff;
};

/// rows[i] lists every j with [e_i, e_j] != 0 together with the expansion of the bracket.
template <class T>
struct BracketRowEntry {
  int partner;
  std::vector<BracketTerm<T>> terms;
};

template <class T>
using BracketRows = std::vector<std::vector<BracketRowEntry<T>>>;

class LieAlgebra;
using AlgebraPtr = std::shared_ptr<const LieAlgebra>;

class LieAlgebra {
 public:
  struct Entry {
    int i;
    int j;
    Combination value;  // [e_i, e_j]
  };

  /// Builds an algebra from an explicit table. Only entries with i < j are read;
  /// the antisymmetric partner is filled in. No Jacobi check is performed here.
  LieAlgebra(std::string id, AlgebraKind kind, int rank, int step, std::vector<BasisWord> basis,
             const std::vector<Entry>& upper_entries);

  /// Same, but keeps the table exactly as given, including broken antisymmetry.
  /// Used to build deliberately corrupted tables.
  static AlgebraPtr raw(std::string id, AlgebraKind kind, int rank, int step, std::vector<BasisWord> basis,
                        const std::vector<Entry>& all_entries);

  LieAlgebra(const LieAlgebra&) = delete;
  LieAlgebra& operator=(const LieAlgebra&) = delete;

  const std::string& id() const { return id_; }
  AlgebraKind kind() const { return kind_; }
  int rank() const { return rank_; }
  int step() const { return step_; }
  int dim() const { return static_cast<int>(basis_.size()); }
  std::span<const BasisWord> basis() const { return basis_; }
  const BasisWord& word(int i) const { return basis_.at(static_cast<std::size_t>(i)); }
  int degree(int i) const { return basis_[static_cast<std::size_t>(i)].degree; }

  /// Index range [first, last) of the degree-d words (basis is sorted by degree).
  std::pair<int, int> degree_range(int d) const;
  std::vector<int> dims_per_degree() const;

  /// Indices of words without factors (the algebra generators; degree 1 for stratified kinds).
  std::vector<int> primitive_words() const;
  int first_layer_dim() const { return degree_range(1).second; }

  /// [e_i, e_j] exactly. Empty combination means zero.
  Combination structure(int i, int j) const;

  /// All stored nonzero entries (i, j, [e_i,e_j]) with i < j, in index order.
  std::vector<Entry> upper_entries() const;

  template <class T>
  const BracketRows<T>& rows() const;

  /// Position of the label in the basis, or -1.
  int find_label(const std::string& label) const;

 private:
  LieAlgebra() = default;
  void index_rows();

  std::string id_;
  AlgebraKind kind_ = AlgebraKind::Custom;
  int rank_ = 0;
  int step_ = 0;
  std::vector<BasisWord> basis_;
  std::vector<std::vector<BracketRowEntry<Rational>>> rows_q_;

  mutable std::once_flag double_once_;
  mutable BracketRows<double> rows_d_;
  mutable std::once_flag high_once_;
  mutable BracketRows<HighFloat> rows_h_;
};

template <>
const BracketRows<Rational>& LieAlgebra::rows<Rational>() const;
template <>
const BracketRows<double>& LieAlgebra::rows<double>() const;
template <>
const BracketRows<HighFloat>& LieAlgebra::rows<HighFloat>() const;

/// Element of the Lie algebra in the owning algebra's basis (dense coordinates).
struct AlgebraElement {
  AlgebraPtr algebra;
  std::vector<Rational> coords;

  static AlgebraElement zero(const AlgebraPtr& alg);
  static AlgebraElement basis_vector(const AlgebraPtr& alg, int i, const Rational& c = 1);
  bool is_zero() const;
  bool operator==(const AlgebraElement& other) const;
};

AlgebraElement operator+(const AlgebraElement& a, const AlgebraElement& b);
AlgebraElement operator-(const AlgebraElement& a, const AlgebraElement& b);
AlgebraElement operator*(const Rational& c, const AlgebraElement& a);

void require_same_algebra(const AlgebraPtr& a, const AlgebraPtr& b);

/// Bilinear bracket through the structure table; terms above the step vanish.
AlgebraElement bracket(const AlgebraElement& a, const AlgebraElement& b);

/// Generic dense bracket for any coefficient field; accumulates [a, b] into out.
/// Only contributions of `b` in degrees >= b_min_degree are read.
template <class T>
void accumulate_bracket(const LieAlgebra& alg, std::span<const T> a, std::span<const T> b, std::span<T> out,
                        int b_min_degree = 1) {
  const auto& rows = alg.template rows<T>();
  const int max_a_degree = alg.step() - b_min_degree;
  const int n = alg.dim();
  for (int i = 0; i < n; ++i) {
    if (alg.degree(i) > max_a_degree) break;
    const T& ai = a[static_cast<std::size_t>(i)];
    if (is_zero(ai)) continue;
    for (const auto& entry : rows[static_cast<std::size_t>(i)]) {
      const T& bj = b[static_cast<std::size_t>(entry.partner)];
      if (is_zero(bj)) continue;
      T coeff = ai * bj;
      for (const auto& term : entry.terms) out[static_cast<std::size_t>(term.index)] += coeff * term.coeff;
    }
  }
}

// ---- constructors -------------------------------------------------------

/// Hall basis words of the free nilpotent algebra, grouped by degree, deterministic order.
std::vector<BasisWord> hall_basis(int rank, int step, const SizeCap& cap = {});

/// Free nilpotent Lie algebra of the given rank and step over its Hall basis.
AlgebraPtr free_nilpotent(int rank, int step, const SizeCap& cap = {});

/// g_i: generators X, Y^1..Y^i; each pair (X, Y^k) spans a free step-k block,
/// brackets between distinct blocks vanish.
AlgebraPtr amalgam_algebra(int i, const SizeCap& cap = {});

/// Abelian algebra whose k-th basis word has weight degrees[k].
AlgebraPtr abelian_algebra(const std::vector<int>& degrees);

/// "free:r:s", "heisenberg", "amalgam:i", "abelian:d1,d2,...".
AlgebraPtr algebra_from_id(const std::string& id, const SizeCap& cap = {});

/// Number of degree-n words in the free Lie algebra of the given rank (necklace count).
long long witt_dimension(int rank, int n);

// ---- verification --------------------------------------------------------

struct JacobiViolation {
  int a, b, c;
  Combination value;  // nonzero Jacobi sum
};

struct StructureReport {
  std::vector<std::pair<int, int>> antisymmetry_violations;
  std::vector<std::pair<int, int>> grading_violations;
  std::vector<JacobiViolation> jacobi_violations;
  bool ok() const {
    return antisymmetry_violations.empty() && grading_violations.empty() && jacobi_violations.empty();
  }
};

/// Exhaustive check of antisymmetry, grading and the Jacobi identity on basis triples.
StructureReport verify_jacobi(const LieAlgebra& alg);

/// Human-readable bracket string of a basis word, e.g. "[X,[X,Y]]".
std::string word_string(const LieAlgebra& alg, int i);

}  // namespace carnot
