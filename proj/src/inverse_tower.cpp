#include "carnot/limits.hpp"

#include <algorithm>

namespace carnot {

InverseTower InverseTower::build(const TowerSpec& spec, const SizeCap& cap) {
  InverseTower t;
  if (spec.levels.empty()) fail(ErrorKind::Validation, "an inverse tower needs at least one level");
  for (const auto& id : spec.levels) t.groups_.push_back(algebra_from_id(id, cap));
  const int K = t.size();
  std::vector<std::optional<Morphism>> down(static_cast<std::size_t>(std::max(0, K - 1)));
  for (const auto& p : spec.projections) {
    if (p.from != p.to + 1 || p.to < 1 || p.from > K)
      fail(ErrorKind::Validation, "projection (" + std::to_string(p.to) + "," + std::to_string(p.from) +
                                      ") must map level j to level j-1");
    down[static_cast<std::size_t>(p.to - 1)] = build_morphism(t.group(p.from), t.group(p.to), p.images);
  }
  for (int i = 1; i < K; ++i) {
    auto& d = down[static_cast<std::size_t>(i - 1)];
    if (!d) fail(ErrorKind::Validation, "missing projection (" + std::to_string(i) + "," + std::to_string(i + 1) + ")");
    if (!first_layer_contraction(*d))
      fail(ErrorKind::Validation, "projection (" + std::to_string(i) + "," + std::to_string(i + 1) + ") is not 1-Lipschitz");
    t.down_.push_back(*d);
  }
  return t;
}

InverseTower InverseTower::free_tower(int K) {
  if (K < 1) fail(ErrorKind::Validation, "K must be at least 1");
  TowerSpec spec;
  for (int k = 1; k <= K; ++k) spec.levels.push_back("free:2:" + std::to_string(k));
  for (int k = 1; k < K; ++k) {
    int n = algebra_from_id(spec.levels[static_cast<std::size_t>(k - 1)])->dim();
    std::vector<Rational> x(static_cast<std::size_t>(n)), y(static_cast<std::size_t>(n));
    x[0] = 1;
    y[1] = 1;
    spec.projections.push_back({k + 1, k, {x, y}});
  }
  return build(spec);
}

const AlgebraPtr& InverseTower::group(int level) const {
  if (level < 1 || level > size()) fail(ErrorKind::Validation, "level " + std::to_string(level) + " out of range");
  return groups_[static_cast<std::size_t>(level - 1)];
}

Morphism InverseTower::projection(int i, int j) const {
  if (i > j) fail(ErrorKind::Validation, "projections go from higher to lower levels");
  Morphism p = identity_morphism(group(j));
  for (int k = j - 1; k >= i; --k) p = compose(down_[static_cast<std::size_t>(k - 1)], p);
  return p;
}

void InverseTower::check_compatible(const std::vector<GroupElement>& tuple) const {
  if (static_cast<int>(tuple.size()) != size())
    fail(ErrorKind::Validation, "tuple has " + std::to_string(tuple.size()) + " entries, tower has " + std::to_string(size()));
  for (int k = 1; k <= size(); ++k) require_same_algebra(tuple[static_cast<std::size_t>(k - 1)].algebra, group(k));
  for (int i = 1; i < size(); ++i)
    if (apply(down_[static_cast<std::size_t>(i - 1)], tuple[static_cast<std::size_t>(i)]) != tuple[static_cast<std::size_t>(i - 1)])
      fail(ErrorKind::Validation, "incompatible tuple at (i,j) = (" + std::to_string(i) + "," + std::to_string(i + 1) +
                                      "): x_i != P_ij(x_j)");
}

SupDistanceReport sup_distance(const InverseTower& tower, const std::vector<GroupElement>& x,
                               const std::vector<GroupElement>& y, const SearchBudget& budget,
                               const std::vector<HorizontalPath>& top_seeds) {
  tower.check_compatible(x);
  tower.check_compatible(y);
  SupDistanceReport rep;
  const int K = tower.size();
  // Each level is searched on its own so the bracket at level k does not depend on K.
  for (int k = 1; k <= K; ++k) {
    std::vector<HorizontalPath> seeds;
    Morphism p = tower.projection(k, K);
    for (const auto& s : top_seeds) seeds.push_back(s.mapped(p));
    GroupElement z = mul(inverse(x[static_cast<std::size_t>(k - 1)]), y[static_cast<std::size_t>(k - 1)]);
    DistanceBracket br = cc_distance(z, budget, seeds);
    LevelDistance d;
    d.level = k;
    d.lower = br.lower;
    d.upper = br.upper;
    d.witness = br.witness;
    d.label = br.lower == br.upper ? "exact" : "certified-bound";
    rep.lower = std::max(rep.lower, d.lower);
    rep.upper = std::max(rep.upper, d.upper);
    rep.levels.push_back(std::move(d));
  }
  return rep;
}

std::vector<DegenerateRow> degenerate_table(const Rational& eps, int kmax, const SearchBudget& budget) {
  if (sgn(eps) <= 0) fail(ErrorKind::Domain, "epsilon must be positive");
  if (kmax < 1) fail(ErrorKind::Validation, "kmax must be at least 1");
  std::vector<DegenerateRow> rows;
  Rational carried_lower = 0;
  for (int k = 1; k <= kmax; ++k) {
    AlgebraPtr block = free_nilpotent(2, k);
    LiftResult lift = lift_polygonal(gamma_curve(eps), block);
    GroupElement x = GroupElement::exp_basis(block, 0), y = GroupElement::exp_basis(block, 1);
    GroupElement conj = mul(inverse(x), mul(dilate(eps, y), x));
    if (lift.endpoint != conj) fail(ErrorKind::Validation, "lifted curve does not end at x^-1 delta_eps(y) x");

    // The block sits isometrically in g_k: X -> X, Y -> Y^k, with the retraction killing other blocks.
    AlgebraPtr gk = amalgam_algebra(k);
    std::vector<std::vector<Rational>> in_imgs(2, std::vector<Rational>(static_cast<std::size_t>(gk->dim())));
    in_imgs[0][0] = 1;
    in_imgs[1][static_cast<std::size_t>(k)] = 1;
    Morphism iota = build_morphism(block, gk, in_imgs);
    std::vector<std::vector<Rational>> out_imgs(static_cast<std::size_t>(k + 1),
                                                std::vector<Rational>(static_cast<std::size_t>(block->dim())));
    out_imgs[0][0] = 1;
    out_imgs[static_cast<std::size_t>(k)][1] = 1;
    Morphism rho = build_morphism(gk, block, out_imgs);
    if (!(compose(rho, iota) == identity_morphism(block)) || !first_layer_contraction(iota) || !first_layer_contraction(rho))
      fail(ErrorKind::Validation, "block embedding of free(2," + std::to_string(k) + ") is not isometric");
    GroupElement xk = GroupElement::exp_basis(gk, 0), yk = GroupElement::exp_basis(gk, k);
    if (apply(iota, conj) != mul(inverse(xk), mul(dilate(eps, yk), xk)))
      fail(ErrorKind::Validation, "block image disagrees with the amalgam product");

    DistanceBracket br = cc_distance(conj, budget, {lift.path});
    DegenerateRow row;
    row.k = k;
    // Projections free(2,k) -> free(2,k-1) are 1-Lipschitz and carry the point to the previous one.
    row.lower = std::max(br.lower, carried_lower);
    row.upper = br.upper;
    if (row.lower > row.upper) fail(ErrorKind::NoCertifiedPath, "lower bound exceeds upper bound at k = " + std::to_string(k));
    carried_lower = row.lower;
    row.witness = br.witness;
    row.witness_length = dyadic_ceil(br.witness.length().hi);
    row.label = row.lower == row.upper ? "exact" : "certified-bound";
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace carnot
