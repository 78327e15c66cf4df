#include "carnot/group_ops.hpp"

#include "carnot/random.hpp"

#include <algorithm>
#include <sstream>

namespace carnot {

GroupElement GroupElement::identity(const AlgebraPtr& alg) {
  return {alg, std::vector<Rational>(static_cast<std::size_t>(alg->dim()))};
}

GroupElement GroupElement::exp_basis(const AlgebraPtr& alg, int i, const Rational& t) {
  GroupElement g = identity(alg);
  g.coords.at(static_cast<std::size_t>(i)) = t;
  return g;
}

GroupElement GroupElement::from_coords(const AlgebraPtr& alg, std::vector<Rational> coords) {
  if (static_cast<int>(coords.size()) != alg->dim())
    fail(ErrorKind::Validation, "expected " + std::to_string(alg->dim()) + " coordinates for " + alg->id() + ", got " +
                                    std::to_string(coords.size()));
  return {alg, std::move(coords)};
}

bool GroupElement::is_identity() const {
  return std::all_of(coords.begin(), coords.end(), [](const Rational& q) { return is_zero(q); });
}

bool GroupElement::operator==(const GroupElement& other) const {
  return algebra->id() == other.algebra->id() && coords == other.coords;
}

GroupElement mul(const GroupElement& x, const GroupElement& y) {
  require_same_algebra(x.algebra, y.algebra);
  return {x.algebra, bch_product<Rational>(*x.algebra, x.coords, y.coords)};
}

GroupElement operator*(const GroupElement& x, const GroupElement& y) { return mul(x, y); }

GroupElement inverse(const GroupElement& x) {
  GroupElement r = x;
  for (auto& q : r.coords) q = -q;
  return r;
}

GroupElement dilate(const Rational& lambda, const GroupElement& x) {
  GroupElement r = x;
  const auto& alg = *x.algebra;
  std::vector<Rational> powers(static_cast<std::size_t>(alg.step() + 1), Rational(1));
  for (std::size_t d = 1; d < powers.size(); ++d) powers[d] = powers[d - 1] * lambda;
  for (int i = 0; i < alg.dim(); ++i) {
    int d = alg.degree(i);
    if (d >= static_cast<int>(powers.size())) {
      Rational p = 1;
      for (int k = 0; k < d; ++k) p *= lambda;
      r.coords[static_cast<std::size_t>(i)] *= p;
    } else {
      r.coords[static_cast<std::size_t>(i)] *= powers[static_cast<std::size_t>(d)];
    }
  }
  return r;
}

GroupElement commutator(const GroupElement& x, const GroupElement& y) {
  return mul(mul(x, y), mul(inverse(x), inverse(y)));
}

GroupElement product(const AlgebraPtr& alg, const std::vector<GroupElement>& factors) {
  GroupElement acc = GroupElement::identity(alg);
  for (const auto& f : factors) acc = mul(acc, f);
  return acc;
}

bool first_layer_membership(const GroupElement& x) {
  const auto& alg = *x.algebra;
  for (int i = 0; i < alg.dim(); ++i)
    if (alg.degree(i) >= 2 && !is_zero(x.coords[static_cast<std::size_t>(i)])) return false;
  return true;
}

bool verify_first_layer_criterion(const AlgebraPtr& alg, int samples, unsigned long long seed) {
  std::vector<GroupElement> probes;
  for (int i = 0; i < alg->dim(); ++i) probes.push_back(GroupElement::exp_basis(alg, i, 1));
  Rng rng(seed);
  for (int s = 0; s < samples; ++s) {
    GroupElement g = GroupElement::identity(alg);
    bool flat = rng.coin();
    for (int i = 0; i < alg->dim(); ++i)
      if (!flat || alg->degree(i) == 1) g.coords[static_cast<std::size_t>(i)] = rng.rational(5, 4);
    probes.push_back(g);
  }
  const std::vector<std::pair<Rational, Rational>> params = {{1, 1}, {Rational(1, 2), Rational(-3, 2)}, {2, 3}};
  for (const auto& x : probes) {
    bool identity_holds = true;
    for (const auto& [t, s] : params)
      if (dilate(t + s, x) != mul(dilate(t, x), dilate(s, x))) identity_holds = false;
    if (identity_holds != first_layer_membership(x)) return false;
  }
  return true;
}

// ---- morphisms ---------------------------------------------------------------

namespace {

std::vector<Rational> bracket_coords(const AlgebraPtr& alg, const std::vector<Rational>& a,
                                     const std::vector<Rational>& b) {
  std::vector<Rational> out(static_cast<std::size_t>(alg->dim()));
  accumulate_bracket<Rational>(*alg, a, b, out);
  return out;
}

}  // namespace

std::vector<std::vector<Rational>> Morphism::generator_images() const {
  std::vector<std::vector<Rational>> out;
  for (int g : source_->primitive_words()) out.push_back(columns_[static_cast<std::size_t>(g)]);
  return out;
}

bool Morphism::operator==(const Morphism& other) const {
  return source_->id() == other.source_->id() && target_->id() == other.target_->id() && columns_ == other.columns_;
}

Morphism build_morphism(const AlgebraPtr& source, const AlgebraPtr& target,
                        const std::vector<std::vector<Rational>>& generator_images) {
  const auto prims = source->primitive_words();
  if (generator_images.size() != prims.size())
    fail(ErrorKind::Validation, "expected " + std::to_string(prims.size()) + " generator images, got " +
                                    std::to_string(generator_images.size()));
  Morphism phi;
  phi.source_ = source;
  phi.target_ = target;
  phi.columns_.assign(static_cast<std::size_t>(source->dim()), {});
  for (std::size_t g = 0; g < prims.size(); ++g) {
    const auto& img = generator_images[g];
    if (static_cast<int>(img.size()) != target->dim())
      fail(ErrorKind::Validation, "generator image has wrong length for " + target->id());
    const int d = source->degree(prims[g]);
    for (int k = 0; k < target->dim(); ++k)
      if (!is_zero(img[static_cast<std::size_t>(k)]) && target->degree(k) != d)
        fail(ErrorKind::Validation, "image of generator " + source->word(prims[g]).label +
                                        " is not in the degree-" + std::to_string(d) + " layer of " + target->id() +
                                        " (component on " + target->word(k).label + ")");
    phi.columns_[static_cast<std::size_t>(prims[g])] = img;
  }
  for (int i = 0; i < source->dim(); ++i) {
    const BasisWord& w = source->word(i);
    if (w.left < 0) continue;
    phi.columns_[static_cast<std::size_t>(i)] = bracket_coords(target, phi.columns_[static_cast<std::size_t>(w.left)],
                                                               phi.columns_[static_cast<std::size_t>(w.right)]);
  }
  // Bracket preservation on every basis pair.
  for (int i = 0; i < source->dim(); ++i)
    for (int j = i + 1; j < source->dim(); ++j) {
      std::vector<Rational> lhs(static_cast<std::size_t>(target->dim()));
      for (const auto& [k, c] : source->structure(i, j))
        for (int r = 0; r < target->dim(); ++r) lhs[static_cast<std::size_t>(r)] += c * phi.entry(r, k);
      auto rhs = bracket_coords(target, phi.columns_[static_cast<std::size_t>(i)],
                                phi.columns_[static_cast<std::size_t>(j)]);
      if (lhs != rhs)
        fail(ErrorKind::Validation, "generator images do not define a homomorphism " + source->id() + " -> " +
                                        target->id() + ": bracket of (" + source->word(i).label + ", " +
                                        source->word(j).label + ") is not preserved");
    }
  return phi;
}

Morphism identity_morphism(const AlgebraPtr& alg) {
  std::vector<std::vector<Rational>> imgs;
  for (int g : alg->primitive_words()) {
    std::vector<Rational> v(static_cast<std::size_t>(alg->dim()));
    v[static_cast<std::size_t>(g)] = 1;
    imgs.push_back(std::move(v));
  }
  return build_morphism(alg, alg, imgs);
}

Morphism compose(const Morphism& second, const Morphism& first) {
  if (first.target_->id() != second.source_->id())
    fail(ErrorKind::Domain, "cannot compose " + first.target_->id() + " with " + second.source_->id());
  Morphism out;
  out.source_ = first.source_;
  out.target_ = second.target_;
  for (int c = 0; c < first.source_dim(); ++c) {
    std::vector<Rational> col(static_cast<std::size_t>(second.target_dim()));
    for (int m = 0; m < first.target_dim(); ++m) {
      const Rational& a = first.entry(m, c);
      if (is_zero(a)) continue;
      for (int r = 0; r < second.target_dim(); ++r) col[static_cast<std::size_t>(r)] += second.entry(r, m) * a;
    }
    out.columns_.push_back(std::move(col));
  }
  return out;
}

GroupElement apply(const Morphism& phi, const GroupElement& x) {
  require_same_algebra(phi.source(), x.algebra);
  GroupElement out = GroupElement::identity(phi.target());
  for (int c = 0; c < phi.source_dim(); ++c) {
    const Rational& xc = x.coords[static_cast<std::size_t>(c)];
    if (is_zero(xc)) continue;
    const auto& col = phi.column(c);
    for (int r = 0; r < phi.target_dim(); ++r)
      if (!is_zero(col[static_cast<std::size_t>(r)])) out.coords[static_cast<std::size_t>(r)] += col[static_cast<std::size_t>(r)] * xc;
  }
  return out;
}

Morphism morphism_from_labels(const AlgebraPtr& source, const AlgebraPtr& target,
                              const std::vector<std::string>& image_labels) {
  const auto prims = source->primitive_words();
  if (image_labels.size() != prims.size()) fail(ErrorKind::Validation, "one image label per generator expected");
  std::vector<std::vector<Rational>> imgs;
  for (const auto& label : image_labels) {
    std::vector<Rational> v(static_cast<std::size_t>(target->dim()));
    if (!label.empty()) {
      int k = target->find_label(label);
      if (k < 0) fail(ErrorKind::Validation, "unknown generator label '" + label + "' in " + target->id());
      v[static_cast<std::size_t>(k)] = 1;
    }
    imgs.push_back(std::move(v));
  }
  return build_morphism(source, target, imgs);
}

BanachReport check_abelian_banach_equivalence(const AlgebraPtr& alg, int samples, unsigned long long seed) {
  BanachReport r;
  r.first_layer_is_everything = alg->first_layer_dim() == alg->dim();
  r.step_one = alg->step() == 1;
  bool table_zero = alg->upper_entries().empty();
  bool sampled_additive = true;
  Rng rng(seed);
  for (int s = 0; s < samples && sampled_additive; ++s) {
    GroupElement x = GroupElement::identity(alg), y = GroupElement::identity(alg);
    for (int i = 0; i < alg->dim(); ++i) {
      x.coords[static_cast<std::size_t>(i)] = rng.rational(7, 5);
      y.coords[static_cast<std::size_t>(i)] = rng.rational(7, 5);
    }
    GroupElement sum = x;
    for (int i = 0; i < alg->dim(); ++i) sum.coords[static_cast<std::size_t>(i)] += y.coords[static_cast<std::size_t>(i)];
    if (mul(x, y) != sum) sampled_additive = false;
  }
  r.additive_law = table_zero && sampled_additive;
  return r;
}

}  // namespace carnot
