#pragma once

// Carnot group attached to a stratified algebra, in exponential coordinates of
// the first kind.

#include "carnot/bch.hpp"
#include "carnot/lie_core.hpp"

#include <string>
#include <vector>

namespace carnot {

struct GroupElement {
  AlgebraPtr algebra;
  std::vector<Rational> coords;

  static GroupElement identity(const AlgebraPtr& alg);
  /// exp(t e_i).
  static GroupElement exp_basis(const AlgebraPtr& alg, int i, const Rational& t = 1);
  static GroupElement from_coords(const AlgebraPtr& alg, std::vector<Rational> coords);

  bool is_identity() const;
  bool operator==(const GroupElement& other) const;
  bool operator!=(const GroupElement& other) const { return !(*this == other); }
};

GroupElement mul(const GroupElement& x, const GroupElement& y);
GroupElement operator*(const GroupElement& x, const GroupElement& y);
GroupElement inverse(const GroupElement& x);
GroupElement dilate(const Rational& lambda, const GroupElement& x);
/// x y x^-1 y^-1
GroupElement commutator(const GroupElement& x, const GroupElement& y);
/// Product of a list, left to right.
GroupElement product(const AlgebraPtr& alg, const std::vector<GroupElement>& factors);

/// Degree >= 2 coordinates vanish.
bool first_layer_membership(const GroupElement& x);

/// Checks on the given algebra that delta_{t+s}(x) = delta_t(x) delta_s(x) for all t, s
/// exactly when x has no coordinates of degree >= 2: x x = 2x always, so delta_2(x) = x x
/// forces the higher coordinates to vanish; conversely tX and sX commute.
/// Exercised on every basis vector plus `samples` seeded random elements.
bool verify_first_layer_criterion(const AlgebraPtr& alg, int samples = 16, unsigned long long seed = 1);

// ---- morphisms ---------------------------------------------------------------

class Morphism {
 public:
  const AlgebraPtr& source() const { return source_; }
  const AlgebraPtr& target() const { return target_; }
  /// Image of source basis word i in target coordinates.
  const std::vector<Rational>& column(int i) const { return columns_.at(static_cast<std::size_t>(i)); }
  int source_dim() const { return source_->dim(); }
  int target_dim() const { return target_->dim(); }
  /// Matrix entry (target word r, source word c).
  const Rational& entry(int r, int c) const {
    return columns_[static_cast<std::size_t>(c)][static_cast<std::size_t>(r)];
  }
  std::vector<std::vector<Rational>> generator_images() const;

  bool operator==(const Morphism& other) const;

 private:
  friend Morphism build_morphism(const AlgebraPtr&, const AlgebraPtr&, const std::vector<std::vector<Rational>>&);
  friend Morphism compose(const Morphism&, const Morphism&);
  AlgebraPtr source_;
  AlgebraPtr target_;
  std::vector<std::vector<Rational>> columns_;
};

/// generator_images[g] are target coordinates for the g-th primitive word of the source.
/// Fails with a validation error when an image leaves the matching target layer or when
/// bracket preservation fails on some basis pair.
Morphism build_morphism(const AlgebraPtr& source, const AlgebraPtr& target,
                        const std::vector<std::vector<Rational>>& generator_images);
Morphism identity_morphism(const AlgebraPtr& alg);
/// second after first.
Morphism compose(const Morphism& second, const Morphism& first);
GroupElement apply(const Morphism& phi, const GroupElement& x);

/// Generator map by label: each source generator label maps to the target generator with
/// the label given in `images` (or to 0 when the image label is empty).
Morphism morphism_from_labels(const AlgebraPtr& source, const AlgebraPtr& target,
                              const std::vector<std::string>& image_labels);

struct BanachReport {
  bool first_layer_is_everything = false;
  bool step_one = false;
  bool additive_law = false;
  bool equivalent() const { return first_layer_is_everything == step_one && step_one == additive_law; }
};

/// V1 = G, step one, and additive group law, each decided at the coordinate level.
BanachReport check_abelian_banach_equivalence(const AlgebraPtr& alg, int samples = 32, unsigned long long seed = 1);

}  // namespace carnot
