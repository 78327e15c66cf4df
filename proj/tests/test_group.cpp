#include "carnot/group_ops.hpp"
#include "carnot/random.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace carnot;

namespace {

GroupElement random_element(const AlgebraPtr& alg, Rng& rng, long num = 5, long den = 4) {
  GroupElement g = GroupElement::identity(alg);
  for (auto& c : g.coords) c = rng.rational(num, den);
  return g;
}

std::vector<Rational> q(std::initializer_list<Rational> v) { return v; }

}  // namespace

TEST(Bch, MatchesTensorOracleOnFreeAlgebras) {
  const std::vector<std::pair<int, int>> shapes = {{2, 2}, {2, 3}, {2, 4}, {3, 3}};
  for (auto [r, s] : shapes) {
    auto alg = free_nilpotent(r, s);
    oracle::Tensor t(*alg);
    Rng rng(11 * r + s);
    for (int n = 0; n < 12; ++n) {
      auto x = random_element(alg, rng), y = random_element(alg, rng);
      EXPECT_EQ(mul(x, y).coords, t.product(x.coords, y.coords)) << alg->id();
    }
  }
}

TEST(Bch, HeisenbergClosedForm) {
  auto h = free_nilpotent(2, 2);
  Rng rng(3);
  for (int n = 0; n < 500; ++n) {
    auto x = random_element(h, rng, 9, 7), y = random_element(h, rng, 9, 7);
    EXPECT_EQ(mul(x, y).coords, oracle::heisenberg_law(x.coords, y.coords));
  }
  auto a = GroupElement::from_coords(h, q({1, 0, 0}));
  auto b = GroupElement::from_coords(h, q({0, 1, 0}));
  EXPECT_EQ(mul(a, b).coords, q({1, 1, Rational(1, 2)}));
}

TEST(Group, AssociativityInverseIdentity) {
  for (const char* id : {"free:2:4", "free:3:3", "amalgam:3"}) {
    auto alg = algebra_from_id(id);
    Rng rng(5);
    for (int n = 0; n < 20; ++n) {
      auto x = random_element(alg, rng), y = random_element(alg, rng), z = random_element(alg, rng);
      EXPECT_EQ(mul(mul(x, y), z), mul(x, mul(y, z))) << id;
      EXPECT_TRUE(mul(x, inverse(x)).is_identity());
      EXPECT_TRUE(mul(inverse(x), x).is_identity());
      EXPECT_EQ(mul(x, GroupElement::identity(alg)), x);
      EXPECT_EQ(inverse(mul(x, y)), mul(inverse(y), inverse(x)));
    }
  }
}

TEST(Group, ConjugationOfGenerators) {
  auto h = free_nilpotent(2, 2);
  auto x = GroupElement::exp_basis(h, 0), y = GroupElement::exp_basis(h, 1);
  EXPECT_EQ(product(h, {inverse(x), y, x}).coords, q({0, 1, -1}));
}

TEST(Dilation, AutomorphismAndComposition) {
  for (const char* id : {"free:2:4", "amalgam:2", "abelian:1,2,3"}) {
    auto alg = algebra_from_id(id);
    Rng rng(9);
    for (int n = 0; n < 20; ++n) {
      auto x = random_element(alg, rng), y = random_element(alg, rng);
      Rational l = rng.rational(7, 3), m = rng.rational(7, 3);
      EXPECT_EQ(dilate(l, mul(x, y)), mul(dilate(l, x), dilate(l, y))) << id;
      EXPECT_EQ(dilate(l, dilate(m, x)), dilate(l * m, x));
      EXPECT_TRUE(dilate(0, x).is_identity());
      EXPECT_EQ(dilate(1, x), x);
    }
  }
  auto h = free_nilpotent(2, 2);
  EXPECT_EQ(dilate(2, GroupElement::from_coords(h, q({1, 1, Rational(1, 2)}))).coords, q({2, 2, 2}));
}

TEST(FirstLayer, MembershipAndCriterion) {
  auto f = free_nilpotent(2, 3);
  EXPECT_TRUE(first_layer_membership(GroupElement::from_coords(f, q({3, -2, 0, 0, 0}))));
  EXPECT_FALSE(first_layer_membership(GroupElement::from_coords(f, q({3, -2, 0, 1, 0}))));
  for (const char* id : {"free:2:3", "free:3:2", "amalgam:3", "abelian:1,1,2"})
    EXPECT_TRUE(verify_first_layer_criterion(algebra_from_id(id), 24, 4)) << id;
  // on V1 inversion is dilation by -1
  auto v = GroupElement::from_coords(f, q({Rational(2, 3), 5, 0, 0, 0}));
  EXPECT_EQ(inverse(v), dilate(-1, v));
  auto w = GroupElement::from_coords(f, q({1, 1, 1, 0, 0}));
  EXPECT_NE(mul(dilate(1, w), dilate(1, w)), dilate(2, w));
}

TEST(Morphism, ProjectionIsHomomorphismInclusionIsNot) {
  auto f2 = free_nilpotent(2, 2), f3 = free_nilpotent(2, 3);
  auto pi = morphism_from_labels(f3, f2, {"X", "Y"});
  // [X,[X,Y]] = 0 upstairs but not in the step-3 target
  EXPECT_THROW(morphism_from_labels(f2, f3, {"X", "Y"}), Error);
  Rng rng(2);
  for (int n = 0; n < 10; ++n) {
    auto x = random_element(f3, rng), y = random_element(f3, rng);
    EXPECT_EQ(apply(pi, mul(x, y)), mul(apply(pi, x), apply(pi, y)));
    Rational l = rng.rational(5, 3);
    EXPECT_EQ(apply(pi, dilate(l, x)), dilate(l, apply(pi, x)));
  }
  auto g2 = amalgam_algebra(2), g3 = amalgam_algebra(3);
  auto up = morphism_from_labels(g2, g3, {"X", "Y1", "Y2"});
  auto down = morphism_from_labels(g3, g2, {"X", "Y1", "Y2", ""});
  EXPECT_EQ(compose(down, up), identity_morphism(g2));
}

TEST(Morphism, FunctorialComposition) {
  auto f2 = free_nilpotent(2, 2), f3 = free_nilpotent(2, 3), f4 = free_nilpotent(2, 4);
  auto p43 = morphism_from_labels(f4, f3, {"X", "Y"});
  auto p32 = morphism_from_labels(f3, f2, {"Y", "X"});
  auto p42 = morphism_from_labels(f4, f2, {"Y", "X"});
  EXPECT_EQ(compose(p32, p43), p42);
  Rng rng(8);
  for (int n = 0; n < 10; ++n) {
    auto x = random_element(f4, rng);
    EXPECT_EQ(apply(p42, x), apply(p32, apply(p43, x)));
  }
  EXPECT_THROW(compose(p43, p32), Error);
}

TEST(Morphism, RejectsBadImages) {
  auto f2 = free_nilpotent(2, 2), f3 = free_nilpotent(2, 3), ab = abelian_algebra({1, 1, 1});
  try {
    build_morphism(f2, f3, {q({0, 0, 1, 0, 0}), q({0, 1, 0, 0, 0})});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Validation);
    EXPECT_NE(std::string(e.what()).find("generator X"), std::string::npos);
  }
  // X,Y commute in the abelian target but [X,Y] maps to 0 only if the table agrees
  auto ok = build_morphism(f2, ab, {q({1, 0, 0}), q({0, 1, 0})});
  EXPECT_TRUE(ok.column(2) == q({0, 0, 0}));
  // abelian source into Heisenberg is not a homomorphism
  auto ab2 = abelian_algebra({1, 1});
  try {
    build_morphism(ab2, f2, {q({1, 0, 0}), q({0, 1, 0})});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Validation);
    EXPECT_NE(std::string(e.what()).find("homomorphism"), std::string::npos);
  }
  EXPECT_THROW(build_morphism(f2, f3, {q({1, 0, 0, 0, 0})}), Error);
  EXPECT_THROW(build_morphism(f2, f3, {q({1, 0}), q({0, 1})}), Error);
  EXPECT_THROW(morphism_from_labels(f2, f3, {"X", "Z"}), Error);
}

TEST(Banach, AbelianEquivalence) {
  for (const char* id : {"free:2:1", "free:2:2", "amalgam:1", "abelian:1,1,1", "free:3:1"}) {
    auto r = check_abelian_banach_equivalence(algebra_from_id(id));
    EXPECT_TRUE(r.equivalent()) << id;
  }
  auto r1 = check_abelian_banach_equivalence(free_nilpotent(2, 1));
  EXPECT_TRUE(r1.step_one && r1.additive_law && r1.first_layer_is_everything);
  auto r2 = check_abelian_banach_equivalence(free_nilpotent(2, 2));
  EXPECT_FALSE(r2.step_one || r2.additive_law || r2.first_layer_is_everything);
  // abelian with a weight-2 direction: additive law but V1 != G
  auto r3 = check_abelian_banach_equivalence(abelian_algebra({1, 2}));
  EXPECT_TRUE(r3.additive_law);
  EXPECT_FALSE(r3.first_layer_is_everything);
}
