#include "carnot/rademacher.hpp"
#include "carnot/random.hpp"

#include <gtest/gtest.h>

using namespace carnot;

namespace {

GroupElement el(const AlgebraPtr& alg, std::vector<Rational> c) { return GroupElement::from_coords(alg, std::move(c)); }

GroupElement random_element(const AlgebraPtr& alg, Rng& rng) {
  GroupElement g = GroupElement::identity(alg);
  for (auto& c : g.coords) c = rng.rational(5, 4);
  return g;
}

}  // namespace

TEST(Expr, EvaluationAndValidation) {
  auto h = heisenberg();
  auto x = el(h, {2, -3, 5});
  EXPECT_EQ(evaluate(*fx::coord(1), x).iv.lo, Rational(-3));
  EXPECT_EQ(evaluate(*fx::linear({1, 2}), x).iv.lo, Rational(-4));
  EXPECT_EQ(evaluate(*fx::abs(fx::add(fx::coord(0), fx::coord(1))), x).iv.lo, Rational(1));
  auto n = evaluate(*fx::quasinorm(), el(h, {0, 0, 4}));
  EXPECT_TRUE(n.exact);
  EXPECT_EQ(n.iv.lo, Rational(2));
  auto irr = evaluate(*fx::quasinorm(), el(h, {0, 0, 2}));
  EXPECT_LE(irr.iv.lo * irr.iv.lo, Rational(2));
  EXPECT_GE(irr.iv.hi * irr.iv.hi, Rational(2));
  EXPECT_LT(irr.width().get_d(), 1e-20);
  // translate: x -> f(g x)
  auto g = el(h, {1, 0, 0});
  EXPECT_EQ(evaluate(*fx::translate(g, fx::coord(2)), el(h, {0, 1, 0})).iv.lo, Rational(1, 2));
  EXPECT_THROW(validate(*fx::coord(2), h), Error);
  EXPECT_THROW(validate(*fx::linear({1, 2, 3}), h), Error);
  EXPECT_THROW(validate(*fx::translate(GroupElement::identity(free_nilpotent(2, 3)), fx::coord(0)), h), Error);
}

TEST(Expr, LipschitzRules) {
  EXPECT_EQ(*lipschitz_bound(*fx::constant(7)), Rational(0));
  EXPECT_EQ(*lipschitz_bound(*fx::coord(0)), Rational(1));
  EXPECT_EQ(*lipschitz_bound(*fx::scale(-3, fx::coord(0))), Rational(3));
  EXPECT_EQ(*lipschitz_bound(*fx::add(fx::coord(0), fx::coord(1))), Rational(2));
  EXPECT_EQ(*lipschitz_bound(*fx::linear({Rational(3, 5), Rational(4, 5)})), Rational(1));
  EXPECT_GE(*lipschitz_bound(*fx::linear({1, 1})), Rational(141421, 100000));
  EXPECT_EQ(*lipschitz_bound(*fx::dilate(Rational(-1, 2), fx::coord(1))), Rational(1, 2));
  EXPECT_EQ(*lipschitz_bound(*fx::max(fx::coord(0), fx::scale(2, fx::coord(1)))), Rational(2));
  EXPECT_FALSE(lipschitz_bound(*fx::quasinorm()).has_value());
  EXPECT_TRUE(contains_quasinorm(*fx::abs(fx::quasinorm())));
}

TEST(IncrementalRatio, Examples) {
  auto h = heisenberg();
  Rng rng(2);
  for (int n = 0; n < 30; ++n) {
    auto p = random_element(h, rng), g = random_element(h, rng);
    Rational l = rng.rational(5, 7);
    if (is_zero(l)) continue;
    auto v = incremental_ratio(*fx::coord(0), p, g, l);
    EXPECT_TRUE(v.exact);
    EXPECT_EQ(v.iv.lo, g.coords[0]);
    EXPECT_EQ(incremental_ratio(*fx::scale(3, fx::coord(0)), p, GroupElement::identity(h), l).iv.lo, Rational(0));
  }
  auto unit = el(h, {Rational(1, 2), -1, Rational(1, 9)});
  for (Rational l : {Rational(1, 4), Rational(-1, 4), Rational(3), Rational(-7)}) {
    auto v = incremental_ratio(*fx::quasinorm(), GroupElement::identity(h), unit, l);
    EXPECT_EQ(v.iv.lo, Rational(sgn(l)));
    EXPECT_EQ(v.iv.hi, Rational(sgn(l)));
  }
  EXPECT_THROW(incremental_ratio(*fx::coord(0), unit, unit, 0), Error);
}

TEST(Gateaux, CoordinateFunctionalConverges) {
  for (const char* id : {"heisenberg", "free:2:3", "amalgam:2"}) {
    auto alg = algebra_from_id(id);
    Rng rng(5);
    auto p = random_element(alg, rng);
    std::vector<GroupElement> dirs;
    for (int i = 0; i < alg->first_layer_dim(); ++i) dirs.push_back(GroupElement::exp_basis(alg, i));
    dirs.push_back(random_element(alg, rng));
    auto rep = gateaux_probe(*fx::coord(0), p, dirs);
    EXPECT_TRUE(rep.all_converged) << id;
    EXPECT_FALSE(rep.flagged_nd);
    ASSERT_TRUE(rep.differential.has_value());
    EXPECT_TRUE(rep.differential_exact);
    std::vector<Rational> expect(static_cast<std::size_t>(alg->first_layer_dim()));
    expect[0] = 1;
    EXPECT_EQ(*rep.differential, expect);
    EXPECT_EQ(rep.homomorphism, "passed");
    EXPECT_TRUE(rep.homomorphism_exact);
    EXPECT_GT(rep.homomorphism_pairs, 0);
    for (const auto& d : rep.directions) EXPECT_EQ(d.limit.iv.lo, d.direction.coords[0]);
  }
}

TEST(Gateaux, QuasiNormAtIdentityIsFlagged) {
  auto h = heisenberg();
  for (auto g : {el(h, {1, 0, 0}), el(h, {0, 0, 4}), el(h, {Rational(1, 3), Rational(-3, 2), 1})}) {
    auto rep = gateaux_probe(*fx::quasinorm(), GroupElement::identity(h), {g});
    ASSERT_EQ(rep.directions.size(), 1U);
    const auto& d = rep.directions[0];
    EXPECT_EQ(d.verdict, "oscillating");
    EXPECT_TRUE(rep.flagged_nd);
    EXPECT_NEAR(d.gap, 2 * quasi_norm(g).approx(), 1e-9);
    ASSERT_TRUE(d.witness.has_value());
    EXPECT_EQ(d.witness->first.lambda, -d.witness->second.lambda);
  }
  // away from e the quasi-norm is smooth along X at (1,0,0)
  auto rep = gateaux_probe(*fx::quasinorm(), el(h, {1, 0, 0}), {el(h, {1, 0, 0})});
  EXPECT_EQ(rep.directions[0].verdict, "converged");
}

TEST(Gateaux, TranslationCovariance) {
  auto h = heisenberg();
  Rng rng(13);
  for (int n = 0; n < 6; ++n) {
    auto p = random_element(h, rng), q = random_element(h, rng), g = random_element(h, rng);
    for (const auto& f0 : {fx::coord(1), fx::quasinorm(), fx::abs(fx::coord(0))}) {
      auto f = fx::translate(inverse(q), f0);
      auto a = gateaux_probe(*f0, p, {g});
      auto b = gateaux_probe(*f, mul(q, p), {g});
      EXPECT_EQ(a.flagged_nd, b.flagged_nd);
      EXPECT_EQ(a.directions[0].verdict, b.directions[0].verdict);
      EXPECT_EQ(a.directions[0].limit.iv.lo, b.directions[0].limit.iv.lo);
    }
    // p flagged for the quasi-norm exactly at e; translated copy flagged at q
    auto f = fx::translate(inverse(q), fx::quasinorm());
    EXPECT_TRUE(gateaux_probe(*f, q, {g}).flagged_nd || g.is_identity());
  }
}

TEST(Gateaux, DifferentialIsHomogeneous) {
  auto f3 = free_nilpotent(2, 3);
  auto f = fx::add(fx::scale(2, fx::coord(0)), fx::linear({0, Rational(-1, 3)}));
  Rng rng(3);
  auto p = random_element(f3, rng), g = random_element(f3, rng);
  for (Rational l : {Rational(2), Rational(-1, 5), Rational(7, 3)}) {
    auto rep = gateaux_probe(*f, p, {g, dilate(l, g)});
    ASSERT_TRUE(rep.all_converged);
    EXPECT_EQ(rep.directions[1].limit.iv.lo, l * rep.directions[0].limit.iv.lo);
  }
}

TEST(EquiLipschitz, ShippedAstsPass) {
  for (const char* id : {"heisenberg", "free:2:3"}) {
    auto alg = algebra_from_id(id);
    Rng rng(1);
    auto p = random_element(alg, rng);
    for (const auto& f : lipschitz_examples(alg)) {
      auto rep = equilipschitz_check(*f, p, 200, {}, 9);
      EXPECT_TRUE(rep.passed()) << id;
      EXPECT_EQ(rep.checks, 200);
    }
  }
  auto h = heisenberg();
  auto three = equilipschitz_check(*fx::scale(3, fx::coord(0)), GroupElement::identity(h), 100, {}, 4);
  EXPECT_TRUE(three.passed());
  EXPECT_EQ(*three.lipschitz, Rational(3));
}

TEST(EquiLipschitz, UnderstatedConstantIsCaught) {
  auto h = heisenberg();
  auto rep = equilipschitz_check(*fx::scale(3, fx::coord(0)), GroupElement::identity(h), 100, {}, 4, Rational(1));
  EXPECT_FALSE(rep.passed());
  ASSERT_FALSE(rep.violations.empty());
  const auto& v = rep.violations.front();
  EXPECT_GT(v.lhs.lo, v.rhs);
  auto qn = equilipschitz_check(*fx::quasinorm(), GroupElement::identity(h), 10, {}, 1);
  EXPECT_FALSE(qn.passed());
  EXPECT_EQ(qn.checks, 0);
  EXPECT_THROW(equilipschitz_check(*fx::coord(0), GroupElement::identity(h), 4, {Rational(0)}, 1), Error);
}

// ---- null families ----

namespace {

std::shared_ptr<const DirectSystem> degenerate3() {
  return std::make_shared<const DirectSystem>(preset_system("degenerate", 3));
}

BorelSet point_at(const AlgebraPtr& alg, Rng& rng) {
  BorelSet b;
  b.kind = BorelSet::Kind::Point;
  for (int i = 0; i < alg->dim(); ++i) b.center.push_back(rng.rational(3, 2));
  return b;
}

}  // namespace

TEST(NullFamily, EmptyAndUnion) {
  NullFamily fam(degenerate3());
  EXPECT_TRUE(fam.contains(NullFamily::empty_set));
  EXPECT_TRUE(fam.check_axioms().ok());
  Rng rng(1);
  const auto& sys = fam.system();
  int a = fam.add_cylinder(1, point_at(sys.group(1), rng), {1, GroupElement::identity(sys.group(1))});
  BorelSet plane;
  plane.kind = BorelSet::Kind::Affine;
  plane.center.assign(static_cast<std::size_t>(sys.group(2)->dim()), 0);
  plane.codim = 1;
  int b = fam.add_cylinder(2, plane, {2, GroupElement::exp_basis(sys.group(2), 0)});
  int u = fam.add_union({a, b, NullFamily::empty_set});
  EXPECT_TRUE(fam.contains(u));
  EXPECT_EQ(fam.obligations(u).size(), 2U);
  int s = fam.add_subset(u, "first coordinate positive");
  EXPECT_TRUE(fam.contains(s));
  EXPECT_TRUE(fam.check_axioms().ok());
  BorelSet ball;
  ball.kind = BorelSet::Kind::Ball;
  ball.center = plane.center;
  ball.radius = 1;
  EXPECT_THROW(fam.add_cylinder(2, ball, {1, GroupElement::identity(sys.group(1))}), Error);
  EXPECT_THROW(fam.add_union({}), Error);
  EXPECT_THROW(fam.add_union({999}), Error);
}

TEST(NullFamily, TranslationRewritesObligations) {
  NullFamily fam(degenerate3());
  const auto& sys = fam.system();
  Rng rng(2);
  ColimitElement q{1, GroupElement::exp_basis(sys.group(1), 1, 2)};
  int n = fam.add_cylinder(2, point_at(sys.group(2), rng), q);
  ColimitElement g{2, GroupElement::exp_basis(sys.group(2), 2, -1)};
  int t = fam.translate(g, n);
  const auto& d = fam.at(t);
  EXPECT_EQ(d.kind, NullDescriptor::Kind::Translate);
  auto obs = fam.obligations(t);
  ASSERT_EQ(obs.size(), 1U);
  EXPECT_EQ(obs[0].level, 2);
  EXPECT_TRUE(colimit_equal(sys, obs[0].shift, colimit_mul(sys, g, q)));
  EXPECT_NE(obs[0].text.find("phi_2^-1"), std::string::npos);
  // translating twice composes the shifts
  int tt = fam.translate(g, t);
  EXPECT_TRUE(colimit_equal(sys, fam.obligations(tt)[0].shift, colimit_mul(sys, g, colimit_mul(sys, g, q))));
  EXPECT_TRUE(fam.check_axioms().ok());
  auto limit = assemble_limit_family(fam, {n, t, tt});
  EXPECT_EQ(limit.obligations.size(), 3U);
  EXPECT_TRUE(fam.contains(limit.union_id));
}

TEST(NullFamily, RandomFamiliesSatisfyAxioms) {
  auto sys = degenerate3();
  for (int f = 0; f < 100; ++f) {
    NullFamily fam(sys);
    Rng rng = Rng::stream(2024, static_cast<std::uint64_t>(f));
    std::vector<int> ids = {NullFamily::empty_set};
    for (int op = 0; op < 12; ++op) {
      switch (rng.below(4)) {
        case 0: {
          int level = 1 + static_cast<int>(rng.below(3));
          int tl = 1 + static_cast<int>(rng.below(3));
          GroupElement t = GroupElement::identity(sys->group(tl));
          for (auto& c : t.coords) c = rng.rational(3, 2);
          BorelSet b = point_at(sys->group(level), rng);
          if (rng.coin()) {
            b.kind = BorelSet::Kind::Affine;
            b.codim = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(sys->group(level)->dim())));
          }
          ids.push_back(fam.add_cylinder(level, b, {tl, t}));
          break;
        }
        case 1: {
          std::vector<int> parts;
          for (int k = 0; k < 3; ++k) parts.push_back(ids[rng.below(ids.size())]);
          ids.push_back(fam.add_union(parts));
          break;
        }
        case 2: ids.push_back(fam.add_subset(ids[rng.below(ids.size())], "constraint " + std::to_string(op))); break;
        default: {
          int gl = 1 + static_cast<int>(rng.below(3));
          GroupElement g = GroupElement::identity(sys->group(gl));
          for (auto& c : g.coords) c = rng.rational(2, 3);
          ids.push_back(fam.translate({gl, g}, ids[rng.below(ids.size())]));
        }
      }
    }
    auto rep = fam.check_axioms();
    EXPECT_TRUE(rep.ok()) << f << ": " << (rep.failures.empty() ? "" : rep.failures.front());
    for (int id : ids) EXPECT_TRUE(fam.contains(id));
  }
}

TEST(NullFamily, AxiomCheckDetectsBrokenHook) {
  auto strict = std::make_shared<bool>(false);
  MembershipHook hook = [strict](const DirectSystem& s, int level, const BorelSet& b) {
    return !*strict && default_membership(s, level, b);
  };
  NullFamily fam(degenerate3(), hook);
  Rng rng(3);
  const auto& sys = fam.system();
  int a = fam.add_cylinder(1, point_at(sys.group(1), rng), {1, GroupElement::identity(sys.group(1))});
  fam.add_subset(fam.add_union({a}), "all");
  EXPECT_TRUE(fam.check_axioms().ok());
  *strict = true;
  auto rep = fam.check_axioms();
  EXPECT_FALSE(rep.ok());
  EXPECT_FALSE(rep.union_closed);
  EXPECT_FALSE(rep.subset_closed);
}
