// One PASS/FAIL line per acceptance criterion. Tolerances and budgets are fixed here.

#include "carnot/rademacher.hpp"
#include "carnot/random.hpp"

#include "oracles.hpp"

#include <array>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

using namespace carnot;

namespace {

constexpr int kGroupLawPairs = 10000;
constexpr double kGroupLawSeconds = 5;
constexpr double kWittSeconds = 10;
constexpr double kJacobiSeconds = 60;
constexpr int kScalableSamples = 1000;
constexpr double kReproSeconds = 300;
constexpr int kModulusSamples = 10000;
constexpr double kModulusRelTol = 0.10;
constexpr int kIsometrySamples = 1000;
constexpr int kIsometryCcSamples = 40;
constexpr int kCommutatorSamples = 500;
constexpr double kGapTol = 1e-9;
constexpr int kEquiSamples = 10000;
constexpr int kNullFamilies = 100;

struct Outcome {
  bool pass = true;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

GroupElement random_element(const AlgebraPtr& alg, Rng& rng, long num = 9, long den = 7) {
  GroupElement g = GroupElement::identity(alg);
  for (auto& c : g.coords) c = rng.rational(num, den);
  return g;
}

struct Run {
  int status = -1;
  std::string out;
};

Run run_cli(const std::string& args) {
  std::string cmd = std::string("env -u CARNOT_CACHE_DIR ") + CARNOT_CLI_PATH + " " + args + " 2>&1";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  int st = pclose(p);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

Outcome c1_group_law() {
  auto h = free_nilpotent(2, 2);
  Rng rng(1);
  auto t0 = std::chrono::steady_clock::now();
  int bad = 0;
  for (int n = 0; n < kGroupLawPairs; ++n) {
    auto x = random_element(h, rng), y = random_element(h, rng);
    if (mul(x, y).coords != oracle::heisenberg_law(x.coords, y.coords)) ++bad;
  }
  double s = seconds_since(t0);
  return {bad == 0 && s < kGroupLawSeconds,
          std::to_string(kGroupLawPairs) + " pairs, " + std::to_string(bad) + " mismatches, " + std::to_string(s) + " s"};
}

Outcome c2_witt() {
  auto t0 = std::chrono::steady_clock::now();
  const std::vector<int> expected = {2, 1, 2, 3, 6, 9};
  bool ok = true;
  for (int k = 1; k <= 6; ++k) {
    auto dims = hall_basis(2, k);
    std::vector<int> per(static_cast<std::size_t>(k));
    for (const auto& w : dims) ++per[static_cast<std::size_t>(w.degree - 1)];
    for (int d = 0; d < k; ++d)
      ok = ok && per[static_cast<std::size_t>(d)] == expected[static_cast<std::size_t>(d)] &&
           per[static_cast<std::size_t>(d)] == oracle::lyndon_count(2, d + 1);
  }
  double s = seconds_since(t0);
  return {ok && s < kWittSeconds, "per-degree dims match [2,1,2,3,6,9] and the Lyndon count, " + std::to_string(s) + " s"};
}

Outcome c3_jacobi() {
  auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::string bad;
  for (int k = 1; k <= 5; ++k)
    if (!verify_jacobi(*free_nilpotent(2, k)).ok()) ok = false, bad += " free:2:" + std::to_string(k);
  for (int i = 1; i <= 4; ++i)
    if (!verify_jacobi(*amalgam_algebra(i)).ok()) ok = false, bad += " amalgam:" + std::to_string(i);
  double s = seconds_since(t0);
  return {ok && s < kJacobiSeconds, (ok ? "free(2,1..5), g_1..g_4 verified" : "violations in" + bad) + ", " +
                                        std::to_string(s) + " s"};
}

Outcome c4_scalable() {
  const std::vector<std::string> groups = {"free:2:1", "heisenberg", "free:2:3", "free:2:4", "free:3:2", "free:3:3",
                                           "amalgam:1", "amalgam:2", "amalgam:3", "amalgam:4", "abelian:1,1,2"};
  int bad = 0;
  for (const auto& id : groups) {
    auto alg = algebra_from_id(id);
    Rng rng(4);
    for (int n = 0; n < kScalableSamples; ++n) {
      auto x = random_element(alg, rng, 5, 4), y = random_element(alg, rng, 5, 4), g = random_element(alg, rng, 5, 4);
      Rational l = rng.rational(7, 5), m = rng.rational(7, 5);
      bool ok = dilate(l, dilate(m, x)) == dilate(l * m, x) && dilate(1, x) == x && dilate(0, x).is_identity() &&
                dilate(l, mul(x, y)) == mul(dilate(l, x), dilate(l, y)) &&
                (is_zero(l) || dilate(1 / l, dilate(l, x)) == x) &&
                box_distance(mul(g, x), mul(g, y)) == box_distance(x, y) &&
                box_distance(dilate(l, x), dilate(l, y)) == box_distance(x, y).scaled(l) &&
                box_distance(x, y) == box_distance(y, x);
      if (!ok) ++bad;
    }
  }
  return {bad == 0, std::to_string(groups.size()) + " groups x " + std::to_string(kScalableSamples) + " samples, " +
                        std::to_string(bad) + " failures"};
}

Outcome c5_lift() {
  bool ok = true;
  for (Rational eps : {Rational(1, 2), Rational(1)})
    for (int k = 1; k <= 6; ++k) {
      auto alg = free_nilpotent(2, k);
      auto x = GroupElement::exp_basis(alg, 0), y = GroupElement::exp_basis(alg, 1);
      auto lift = lift_polygonal(gamma_curve(eps), alg);
      ok = ok && lift.endpoint == product(alg, {inverse(x), dilate(eps, y), x}) && lift.length == 2 + eps &&
           lift.path.length().exact() && lift.path.length().lo == 2 + eps;
    }
  return {ok, "eps in {1/2, 1}, k = 1..6: endpoint and length 2+eps exact"};
}

Outcome c6_degenerate() {
  auto t0 = std::chrono::steady_clock::now();
  Run r = run_cli("--seed 7 repro degenerate --epsilon 1 --kmax 4 --csv");
  double s = seconds_since(t0);
  if (r.status != 0) return {false, "cli exit " + std::to_string(r.status) + ": " + r.out};
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  bool ok = line.rfind("k,lower,upper,witness-length", 0) == 0;
  Rational prev_lower = 0;
  int rows = 0;
  std::string summary;
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (f.size() < 4) return {false, "malformed row: " + line};
    int k = std::stoi(f[0]);
    Rational lower(f[1]), upper(f[2]);
    lower.canonicalize();
    upper.canonicalize();
    if (k == 1) ok = ok && lower == 1 && upper == 1;
    ok = ok && upper <= 3 && lower >= prev_lower && lower <= upper;
    prev_lower = lower;
    ++rows;
    summary += " k=" + f[0] + ":[" + to_decimal(lower, 4, Rounding::Down) + "," + to_decimal(upper, 4, Rounding::Up) + "]";
  }
  ok = ok && rows == 4 && s < kReproSeconds;
  return {ok, summary.substr(1) + ", " + std::to_string(s) + " s"};
}

Outcome c7_moduli() {
  auto h = heisenberg();
  auto x = GroupElement::from_coords(h, {1, 2, -1});
  auto y = GroupElement::from_coords(h, {-3, Rational(1, 2), 2});
  ProbeBudget b;
  b.samples = kModulusSamples;
  b.seed = 7;
  const double eps = 0.5;
  MapDescriptor rx{MapKind::RightTranslation, x};
  double a1 = modulus_probe(rx, GroupElement::identity(h), eps, b).omega;
  double a2 = modulus_probe(rx, y, eps, b).omega;
  MapDescriptor inv{MapKind::Inverse};
  MapDescriptor rxi{MapKind::RightTranslation, inverse(x)};
  double b1 = modulus_probe(inv, x, eps, b).omega;
  double b2 = modulus_probe(rxi, GroupElement::identity(h), eps, b).omega;
  double ra = std::abs(a1 - a2) / std::max(a1, a2), rb = std::abs(b1 - b2) / std::max(b1, b2);
  std::ostringstream os;
  os << "a) " << a1 << " vs " << a2 << " (rel " << ra << "); b) " << b1 << " vs " << b2 << " (rel " << rb << ")";
  return {a1 > 0 && b1 > 0 && ra <= kModulusRelTol && rb <= kModulusRelTol, os.str()};
}

Outcome c8_isometry() {
  int bad = 0;
  for (const char* id : {"heisenberg", "free:2:4", "free:3:3", "amalgam:3"}) {
    auto alg = algebra_from_id(id);
    Rng rng(8);
    for (int n = 0; n < kIsometrySamples; ++n) {
      GroupElement v = GroupElement::identity(alg);
      for (int i = 0; i < alg->first_layer_dim(); ++i) v.coords[static_cast<std::size_t>(i)] = rng.rational(9, 5);
      Rational t = rng.rational(9, 4), s = rng.rational(9, 4);
      if (!(box_distance(dilate(t, v), dilate(s, v)) == quasi_norm(v).scaled(t - s))) ++bad;
    }
  }
  int cc_bad = 0;
  auto f3 = free_nilpotent(2, 3);
  Rng rng(9);
  SearchBudget budget{4, 0, 10, 1, 20000};
  for (int n = 0; n < kIsometryCcSamples; ++n) {
    GroupElement v = GroupElement::identity(f3);
    v.coords[0] = rng.rational(9, 5);
    v.coords[1] = rng.rational(9, 5);
    if (v.is_identity()) continue;
    Rational t = rng.rational(9, 4), s = rng.rational(9, 4);
    auto b = cc_distance(mul(inverse(dilate(t, v)), dilate(s, v)), budget);
    Interval truth = abs(t - s) * sqrt_bounds(v.coords[0] * v.coords[0] + v.coords[1] * v.coords[1]);
    if (!(b.lower <= truth.hi && truth.lo <= b.upper)) ++cc_bad;
  }
  return {bad == 0 && cc_bad == 0, "box: " + std::to_string(4 * kIsometrySamples) + " exact checks, " +
                                       std::to_string(bad) + " failures; cc: " + std::to_string(kIsometryCcSamples) +
                                       " brackets, " + std::to_string(cc_bad) + " miss the value"};
}

Outcome c9_nilpotent() {
  auto sys = preset_system("filtration", 4);
  Rng rng(10);
  int bad = 0;
  for (int n = 0; n < kCommutatorSamples; ++n) {
    std::vector<ColimitElement> xs;
    for (int k = 0; k < 4; ++k) {
      int level = 1 + static_cast<int>(rng.below(4));
      xs.push_back({level, random_element(sys.group(level), rng, 4, 3)});
    }
    if (!iterated_commutator(sys, xs).rep.is_identity()) ++bad;
  }
  return {bad == 0, std::to_string(kCommutatorSamples) + " four-fold commutators in the step-3 chain, " +
                        std::to_string(bad) + " nontrivial"};
}

Outcome c10_gateaux() {
  auto h = heisenberg();
  Rng rng(11);
  bool coord_ok = true;
  for (int n = 0; n < 20; ++n) {
    auto p = random_element(h, rng);
    std::vector<GroupElement> dirs = {GroupElement::exp_basis(h, 0), GroupElement::exp_basis(h, 1), random_element(h, rng)};
    auto rep = gateaux_probe(*fx::coord(0), p, dirs);
    coord_ok = coord_ok && rep.all_converged && rep.differential_exact && rep.differential &&
               *rep.differential == std::vector<Rational>{1, 0} && rep.homomorphism == "passed" &&
               rep.homomorphism_exact;
  }
  bool nd_ok = true;
  double worst = 0;
  for (int n = 0; n < 20; ++n) {
    auto g = random_element(h, rng);
    if (g.is_identity()) continue;
    auto rep = gateaux_probe(*fx::quasinorm(), GroupElement::identity(h), {g});
    double err = std::abs(rep.directions[0].gap - 2 * quasi_norm(g).approx());
    worst = std::max(worst, err);
    nd_ok = nd_ok && rep.flagged_nd && rep.directions[0].verdict == "oscillating" && rep.directions[0].witness &&
            err <= kGapTol;
  }
  auto asts = lipschitz_examples(h);
  int checks = 0, violations = 0;
  for (std::size_t a = 0; a < asts.size(); ++a) {
    auto rep = equilipschitz_check(*asts[a], random_element(h, rng), kEquiSamples, {}, 100 + a);
    checks += rep.checks;
    violations += static_cast<int>(rep.violations.size()) + (rep.lipschitz ? 0 : 1);
  }
  std::ostringstream os;
  os << "coordinate functional exact at 20 points; quasi-norm gap error <= " << worst << "; " << checks
     << " equi-Lipschitz checks over " << asts.size() << " shipped expressions, " << violations << " violations";
  return {coord_ok && nd_ok && violations == 0 && checks == static_cast<int>(asts.size()) * kEquiSamples, os.str()};
}

Outcome c11_null_families() {
  auto sys = std::make_shared<const DirectSystem>(preset_system("degenerate", 3));
  int bad = 0;
  for (int f = 0; f < kNullFamilies; ++f) {
    NullFamily fam(sys);
    Rng rng = Rng::stream(11, static_cast<std::uint64_t>(f));
    std::vector<int> ids = {NullFamily::empty_set};
    for (int op = 0; op < 16; ++op) {
      switch (rng.below(4)) {
        case 0: {
          int level = 1 + static_cast<int>(rng.below(3)), tl = 1 + static_cast<int>(rng.below(3));
          BorelSet b;
          b.kind = rng.coin() ? BorelSet::Kind::Point : BorelSet::Kind::Affine;
          for (int i = 0; i < sys->group(level)->dim(); ++i) b.center.push_back(rng.rational(3, 2));
          b.codim = 1;
          ids.push_back(fam.add_cylinder(level, b, {tl, random_element(sys->group(tl), rng, 2, 2)}));
          break;
        }
        case 1: ids.push_back(fam.add_union({ids[rng.below(ids.size())], ids[rng.below(ids.size())]})); break;
        case 2: ids.push_back(fam.add_subset(ids[rng.below(ids.size())], "constraint")); break;
        default: {
          int gl = 1 + static_cast<int>(rng.below(3));
          ids.push_back(fam.translate({gl, random_element(sys->group(gl), rng, 2, 2)}, ids[rng.below(ids.size())]));
        }
      }
    }
    if (!fam.check_axioms().ok()) ++bad;
  }
  return {bad == 0, std::to_string(kNullFamilies) + " families, " + std::to_string(bad) + " with failing axioms"};
}

Outcome c12_determinism() {
  const std::string h = R"('{"algebra_id":"heisenberg","coords":[[0,"1"],[2,"-1/3"]]}')";
  const std::string e = R"('{"algebra_id":"heisenberg","coords":[]}')";
  const std::vector<std::string> cmds = {
      "hall-basis --rank 2 --step 5",
      "hall-basis --algebra amalgam:3 --csv",
      "mul --x " + h + " --y " + R"('{"algebra_id":"heisenberg","coords":[[1,"2"]]}')",
      "inv --x " + h,
      "dilate --x " + h + " --lambda 3/2",
      "lift --algebra free:2:5 --gamma --epsilon 1/2",
      std::string("ccdist --x ") + R"('{"algebra_id":"heisenberg","coords":[[1,"1"],[2,"-1"]]}')" + " --witness",
      std::string("lipschitz --morphism ") + R"('{"source":"free:2:3","target":"heisenberg","images":[[[0,"1"]],[[1,"1"]]]}')" +
          " --backend cc",
      std::string("modulus-probe --map ") + R"('{"kind":"right-translation","element":{"algebra_id":"heisenberg","coords":[[0,"1"]]}}')" +
          " --base " + e + " --epsilon 1/2 --samples 300",
      std::string("dl-pseudodist --system degenerate --K 3 --x ") + R"('{"coords":[[0,"1"]],"level":1}')" + " --y " +
          R"('{"coords":[[0,"1"],[2,"1"]],"level":2}')" + " --zero-set 3",
      std::string("nondeg-probe --system degenerate --condition c2 --K 2 --scales 3 --x ") + R"('{"coords":[[0,"1"]],"level":1}')",
      "tower-supdist --K 3 --epsilon 1",
      "filtration-report --system filtration --K 3 --samples 4",
      std::string("rademacher-probe --f ") + R"('{"node":"quasinorm"}')" + " --p " + e + " --equilipschitz 20",
      "repro degenerate --epsilon 1 --kmax 2",
  };
  int bad = 0;
  std::string which;
  for (const auto& c : cmds) {
    Run a = run_cli("--seed 3 " + c), b = run_cli("--seed 3 " + c);
    if (a.status != 0 || a.status != b.status || a.out != b.out || a.out.empty()) {
      ++bad;
      which += " [" + c.substr(0, c.find(' ')) + " exit " + std::to_string(a.status) + "]";
    }
  }
  return {bad == 0, std::to_string(cmds.size()) + " invocations run twice, " + std::to_string(bad) + " differ" + which};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"exact Heisenberg group law", c1_group_law},
      {"Witt dimensions of the Hall basis", c2_witt},
      {"Jacobi identity on shipped algebras", c3_jacobi},
      {"scalable-group axioms and compatible box distance", c4_scalable},
      {"lift of the square loop", c5_lift},
      {"degenerate-system bracket table", c6_degenerate},
      {"modulus identities for right translation and inversion", c7_moduli},
      {"one-parameter subgroups are isometric", c8_isometry},
      {"bounded-step colimit is nilpotent", c9_nilpotent},
      {"Gateaux probes and equi-Lipschitz bound", c10_gateaux},
      {"null-family axioms on random instances", c11_null_families},
      {"CLI byte determinism", c12_determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& ex) {
      o = {false, std::string("exception: ") + ex.what()};
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << i + 1 << "] " << criteria[i].first << ": " << o.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
