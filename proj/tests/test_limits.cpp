#include "carnot/limits.hpp"
#include "carnot/random.hpp"

#include <gtest/gtest.h>

using namespace carnot;

namespace {

std::vector<Rational> unit_vec(int n, int i, const Rational& c = 1) {
  std::vector<Rational> v(static_cast<std::size_t>(n));
  v[static_cast<std::size_t>(i)] = c;
  return v;
}

ColimitElement random_colimit(const DirectSystem& sys, Rng& rng, int max_level) {
  int level = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_level)));
  GroupElement g = GroupElement::identity(sys.group(level));
  for (auto& c : g.coords) c = rng.rational(4, 3);
  return {level, g};
}

std::string error_text(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

SearchBudget quick() { return SearchBudget{6, 0, 30, 1, 20000}; }

}  // namespace

TEST(DirectSystem, PresetsValidate) {
  for (const char* name : {"filtration", "degenerate", "abelian-chain", "contracting"}) {
    auto sys = preset_system(name, 4);
    EXPECT_EQ(sys.size(), 4);
    EXPECT_EQ(sys.isometric(), std::string(name) != "contracting") << name;
    // DS1 and DS2 on the composed connectors
    for (int i = 1; i <= 4; ++i) {
      EXPECT_EQ(sys.connector(i, i), identity_morphism(sys.group(i)));
      for (int j = i; j <= 4; ++j)
        for (int k = j; k <= 4; ++k) EXPECT_EQ(sys.connector(i, k), compose(sys.connector(j, k), sys.connector(i, j)));
    }
  }
  EXPECT_THROW(preset_system("tree", 3), Error);
  EXPECT_THROW(preset_system("filtration", 0), Error);
}

TEST(DirectSystem, RejectsAxiomViolations) {
  auto spec = preset_spec("degenerate", 3);
  auto g1 = algebra_from_id("amalgam:1"), g3 = algebra_from_id("amalgam:3");
  // phi_13 sending Y1 to -Y1 is a homomorphism but breaks the triangle
  spec.connectors.push_back({1, 3, {unit_vec(g3->dim(), 0), unit_vec(g3->dim(), g3->find_label("Y1"), -1)}});
  auto msg = error_text([&] { DirectSystem::build(spec); });
  EXPECT_NE(msg.find("DS2"), std::string::npos);
  EXPECT_NE(msg.find("(1,2,3)"), std::string::npos);

  auto bad_id = preset_spec("degenerate", 2);
  bad_id.connectors.push_back({1, 1, {unit_vec(g1->dim(), 1), unit_vec(g1->dim(), 0)}});
  EXPECT_NE(error_text([&] { DirectSystem::build(bad_id); }).find("DS1"), std::string::npos);

  auto missing = preset_spec("degenerate", 3);
  missing.connectors.pop_back();
  EXPECT_NE(error_text([&] { DirectSystem::build(missing); }).find("missing connector (2,3)"), std::string::npos);

  // doubling the generators is not 1-Lipschitz
  SystemSpec expanding;
  expanding.levels = {"free:2:2", "free:2:2"};
  expanding.connectors = {{1, 2, {unit_vec(3, 0, 2), unit_vec(3, 1, 2)}}};
  EXPECT_NE(error_text([&] { DirectSystem::build(expanding); }).find("1-Lipschitz"), std::string::npos);
  expanding.backend = Backend::Box;
  EXPECT_NE(error_text([&] { DirectSystem::build(expanding); }).find("1-Lipschitz"), std::string::npos);
}

TEST(Colimit, OperationsAgreeAcrossLevels) {
  for (const char* name : {"filtration", "degenerate"}) {
    auto sys = preset_system(name, 4);
    Rng rng(3);
    for (int n = 0; n < 20; ++n) {
      auto a = random_colimit(sys, rng, 4), b = random_colimit(sys, rng, 4), c = random_colimit(sys, rng, 4);
      auto ab = colimit_mul(sys, a, b);
      EXPECT_EQ(ab.level, std::max(a.level, b.level));
      EXPECT_TRUE(colimit_equal(sys, colimit_mul(sys, ab, c), colimit_mul(sys, a, colimit_mul(sys, b, c))));
      auto e = colimit_mul(sys, a, colimit_inverse(a));
      EXPECT_TRUE(e.rep.is_identity());
      EXPECT_TRUE(colimit_equal(sys, a, push(sys, a, 4)));
      Rational l = rng.rational(5, 2);
      EXPECT_TRUE(colimit_equal(sys, colimit_dilate(l, ab), colimit_mul(sys, colimit_dilate(l, a), colimit_dilate(l, b))));
    }
  }
}

TEST(Colimit, CanonicalFormIsLowestLevel) {
  auto sys = preset_system("degenerate", 4);
  ColimitElement x{1, GroupElement::exp_basis(sys.group(1), 0, Rational(3, 2))};
  auto high = push(sys, x, 4);
  auto c = canonical_form(sys, high);
  EXPECT_EQ(c.level, 1);
  EXPECT_EQ(c.rep, x.rep);
  ColimitElement y{3, GroupElement::exp_basis(sys.group(3), sys.group(3)->find_label("Y3"))};
  EXPECT_EQ(canonical_form(sys, push(sys, y, 4)).level, 3);
  EXPECT_FALSE(colimit_equal(sys, x, y));
  EXPECT_THROW(push(sys, y, 2), Error);
}

TEST(Colimit, BoundedStepCommutatorsVanish) {
  auto sys = preset_system("filtration", 4);
  Rng rng(44);
  for (int n = 0; n < 20; ++n) {
    std::vector<ColimitElement> xs;
    for (int k = 0; k < 4; ++k) xs.push_back(random_colimit(sys, rng, 4));
    EXPECT_TRUE(iterated_commutator(sys, xs).rep.is_identity());
    xs.pop_back();
    (void)iterated_commutator(sys, xs);
  }
  // length three need not vanish
  auto g = sys.group(1);
  ColimitElement X{1, GroupElement::exp_basis(g, 0)}, Y{1, GroupElement::exp_basis(g, 1)};
  EXPECT_FALSE(iterated_commutator(sys, {X, Y, X}).rep.is_identity());
}

TEST(Pseudodistance, FiltrationHorizontalLineIsConstant) {
  auto sys = preset_system("filtration", 4);
  ColimitElement x{1, GroupElement::exp_basis(sys.group(1), 0)};
  ColimitElement e{1, GroupElement::identity(sys.group(1))};
  auto rep = infimum_pseudodistance(sys, x, e, 4, quick());
  ASSERT_EQ(rep.levels.size(), 4U);
  EXPECT_EQ(rep.tail, "constant");
  for (const auto& l : rep.levels) {
    EXPECT_EQ(l.lower, Rational(1));
    EXPECT_EQ(l.upper, Rational(1));
  }
  EXPECT_EQ(rep.running_inf_upper.back(), Rational(1));
  auto self = infimum_pseudodistance(sys, x, x, 3, quick());
  for (const auto& l : self.levels) EXPECT_EQ(l.upper, Rational(0));
  EXPECT_THROW(infimum_pseudodistance(sys, ColimitElement{3, GroupElement::identity(sys.group(3))}, e, 2, quick()), Error);
}

TEST(Pseudodistance, DegenerateExampleStaysBelowThree) {
  auto sys = preset_system("degenerate", 4);
  ColimitElement x{1, GroupElement::exp_basis(sys.group(1), 0)};
  for (int k = 1; k <= 3; ++k) {
    ColimitElement yk{k, GroupElement::exp_basis(sys.group(k), sys.group(k)->find_label("Y" + std::to_string(k)))};
    auto y = colimit_mul(sys, yk, x);
    auto rep = infimum_pseudodistance(sys, x, y, 4, SearchBudget{});
    for (std::size_t i = 0; i < rep.levels.size(); ++i) {
      EXPECT_LE(rep.levels[i].lower, rep.levels[i].upper);
      EXPECT_LE(rep.levels[i].upper, Rational(3));
      if (i > 0) EXPECT_LE(rep.levels[i].upper, rep.levels[i - 1].upper);
      EXPECT_LE(rep.running_inf_upper[i], rep.levels[i].upper);
    }
    EXPECT_NE(rep.tail, "irregular");
  }
}

TEST(Pseudodistance, CompatibleUnderBox) {
  auto sys = preset_system("contracting", 3);
  Rng rng(8);
  for (int n = 0; n < 10; ++n) {
    auto a = random_colimit(sys, rng, 2), b = random_colimit(sys, rng, 2), g = random_colimit(sys, rng, 2);
    Rational l = rng.rational(3, 2);
    auto base = infimum_pseudodistance(sys, a, b, 3, quick());
    auto moved = infimum_pseudodistance(sys, colimit_mul(sys, g, a), colimit_mul(sys, g, b), 3, quick());
    auto scaled = infimum_pseudodistance(sys, colimit_dilate(l, a), colimit_dilate(l, b), 3, quick());
    const auto& last = base.levels.back();
    ASSERT_TRUE(last.box.has_value());
    if (moved.join == base.join) EXPECT_EQ(*moved.levels.back().box, *last.box);
    if (scaled.join == base.join) EXPECT_EQ(*scaled.levels.back().box, last.box->scaled(l));
  }
}

TEST(ZeroSet, DetectsContractionOnly) {
  auto contracting = zero_set_probe(preset_system("contracting", 8), 8, 6, 2);
  EXPECT_FALSE(contracting.candidates.empty());
  for (const auto& c : contracting.candidates) EXPECT_LT(c.last_upper, c.first_upper);
  for (const char* name : {"filtration", "degenerate"}) {
    auto rep = zero_set_probe(preset_system(name, 3), 3, 4, 2);
    EXPECT_TRUE(rep.candidates.empty()) << name;
    EXPECT_EQ(rep.certified_nonzero, rep.samples) << name;
  }
}

TEST(Nondeg, VerdictsOnPresets) {
  NondegBudget b;
  for (const char* name : {"filtration", "abelian-chain", "degenerate"}) {
    auto sys = preset_system(name, 3);
    ColimitElement x{1, GroupElement::exp_basis(sys.group(1), 0)};
    EXPECT_EQ(nondeg_probe_c1(sys, x, 1, b).verdict, "no violation found at budget") << name;
    EXPECT_EQ(nondeg_probe_c3(sys, {x}, b).verdict, "no violation found at budget") << name;
    auto c2 = nondeg_probe_c2(sys, x, b);
    if (std::string(name) == "degenerate") {
      EXPECT_EQ(c2.verdict, "ratio unbounded (evidence)");
    } else {
      EXPECT_EQ(c2.verdict, "no violation found at budget") << name;
    }
    for (const auto& r : c2.rows) EXPECT_LE(r.lower, r.upper);
  }
  auto chain = preset_system("abelian-chain", 3);
  ColimitElement x{2, GroupElement::exp_basis(chain.group(2), 1)};
  EXPECT_NE(nondeg_probe_c3(chain, {x}, b).note.find("isometrically"), std::string::npos);
}

TEST(Nondeg, LowThresholdWitnessesOnIsometricSystem) {
  NondegBudget b;
  b.threshold = Rational(1, 1000);
  b.scales = 3;
  auto sys = preset_system("degenerate", 2);
  ColimitElement x{1, GroupElement::exp_basis(sys.group(1), 0)};
  EXPECT_EQ(nondeg_probe_c2(sys, x, b).verdict, "violation witnessed");
}

TEST(Filtration, ReportPassesOnPresets) {
  for (const char* name : {"filtration", "degenerate", "abelian-chain"}) {
    auto rep = filtration_report(preset_system(name, 3), 6, 1);
    EXPECT_TRUE(rep.ok()) << name;
    for (const auto& l : rep.levels) {
      EXPECT_TRUE(l.generates);
      EXPECT_TRUE(l.first_layer_preserved);
      EXPECT_EQ(l.generated_dimension, l.dimension);
    }
  }
}

TEST(Filtration, NonGeneratingLayerFails) {
  SystemSpec spec;
  spec.levels = {"abelian:1,2"};
  auto rep = filtration_report(DirectSystem::build(spec), 4, 1);
  EXPECT_FALSE(rep.generation_ok);
  EXPECT_EQ(rep.levels[0].generated_dimension, 1);
  EXPECT_EQ(generated_dimension(*free_nilpotent(2, 4)), free_nilpotent(2, 4)->dim());
}

TEST(Tower, CompatibilityAndSupDistance) {
  auto tower = InverseTower::free_tower(4);
  std::vector<GroupElement> x, e;
  for (int k = 1; k <= 4; ++k) {
    x.push_back(GroupElement::exp_basis(tower.group(k), 0));
    e.push_back(GroupElement::identity(tower.group(k)));
  }
  tower.check_compatible(x);
  auto rep = sup_distance(tower, x, e, quick());
  EXPECT_EQ(rep.lower, Rational(1));
  EXPECT_EQ(rep.upper, Rational(1));
  EXPECT_TRUE(rep.finite);

  auto bad = x;
  bad[1] = GroupElement::exp_basis(tower.group(2), 1);
  auto msg = error_text([&] { tower.check_compatible(bad); });
  EXPECT_NE(msg.find("(1,2)"), std::string::npos);
  for (int i = 1; i <= 4; ++i)
    for (int j = i; j <= 4; ++j)
      for (int k = j; k <= 4; ++k)
        EXPECT_EQ(tower.projection(i, k), compose(tower.projection(i, j), tower.projection(j, k)));
}

TEST(Tower, GammaConjugateSupIsMonotone) {
  const Rational eps = 1;
  Rational prev_upper = 0, prev_lower = 0;
  for (int K = 1; K <= 3; ++K) {
    auto tower = InverseTower::free_tower(K);
    std::vector<GroupElement> x, y;
    for (int k = 1; k <= K; ++k) {
      auto g = tower.group(k);
      auto xk = GroupElement::exp_basis(g, 0);
      x.push_back(xk);
      y.push_back(mul(dilate(eps, GroupElement::exp_basis(g, 1)), xk));
    }
    tower.check_compatible(y);
    auto lift = lift_polygonal(gamma_curve(eps), tower.group(K));
    auto rep = sup_distance(tower, x, y, quick(), {lift.path});
    EXPECT_GE(rep.upper, prev_upper);
    EXPECT_GE(rep.lower, prev_lower);
    EXPECT_LE(rep.upper, 2 + eps);
    prev_upper = rep.upper;
    prev_lower = rep.lower;
  }
}

TEST(Degenerate, TableProperties) {
  auto rows = degenerate_table(1, 3, quick());
  ASSERT_EQ(rows.size(), 3U);
  EXPECT_EQ(rows[0].lower, Rational(1));
  EXPECT_EQ(rows[0].upper, Rational(1));
  EXPECT_EQ(rows[0].label, "exact");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_LE(rows[i].lower, rows[i].upper);
    EXPECT_LE(rows[i].upper, Rational(3));
    EXPECT_EQ(rows[i].witness_length, rows[i].upper);
    if (i > 0) EXPECT_GE(rows[i].lower, rows[i - 1].lower);
  }
  auto half = degenerate_table(Rational(1, 2), 2, quick());
  EXPECT_EQ(half[0].upper, Rational(1, 2));
  EXPECT_LE(half[1].upper, Rational(5, 2));
}
