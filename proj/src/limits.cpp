#include "carnot/limits.hpp"

#include "carnot/random.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace carnot {

std::string to_string(Backend b) { return b == Backend::Box ? "box" : "cc"; }

Backend parse_backend(const std::string& s) {
  if (s == "box") return Backend::Box;
  if (s == "cc") return Backend::CC;
  fail(ErrorKind::Parse, "unknown backend '" + s + "' (expected box or cc)");
}

namespace {

std::vector<Rational> unit(int dim, int k) {
  std::vector<Rational> v(static_cast<std::size_t>(dim));
  v[static_cast<std::size_t>(k)] = 1;
  return v;
}

bool box_nonexpanding(const Morphism& phi) { return compare(*lipschitz_estimate(phi, "box").exact, Rational(1)) <= 0; }

bool one_lipschitz(const Morphism& phi, Backend b) {
  return b == Backend::Box ? box_nonexpanding(phi) : first_layer_contraction(phi);
}

// Left inverse sending each target generator hit by a source generator back to it.
std::optional<Morphism> retraction(const Morphism& phi, Backend b) {
  const auto& src = phi.source();
  const auto& tgt = phi.target();
  std::vector<std::vector<Rational>> imgs;
  for (int h : tgt->primitive_words()) {
    std::vector<Rational> img(static_cast<std::size_t>(src->dim()));
    for (int g : src->primitive_words())
      if (phi.column(g) == unit(tgt->dim(), h)) img = unit(src->dim(), g);
    imgs.push_back(std::move(img));
  }
  try {
    Morphism rho = build_morphism(tgt, src, imgs);
    if (!(compose(rho, phi) == identity_morphism(src))) return std::nullopt;
    if (!one_lipschitz(rho, b)) return std::nullopt;
    return rho;
  } catch (const Error&) {
    return std::nullopt;
  }
}

// Exact solve of A z = y (A given by morphism columns); particular solution with free variables 0.
std::optional<std::vector<Rational>> solve_linear(const Morphism& phi, const std::vector<Rational>& y) {
  const int rows = phi.target_dim(), cols = phi.source_dim();
  std::vector<std::vector<Rational>> m(static_cast<std::size_t>(rows), std::vector<Rational>(static_cast<std::size_t>(cols + 1)));
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) m[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = phi.entry(r, c);
    m[static_cast<std::size_t>(r)][static_cast<std::size_t>(cols)] = y[static_cast<std::size_t>(r)];
  }
  std::vector<int> pivot_col;
  int row = 0;
  for (int c = 0; c < cols && row < rows; ++c) {
    int piv = -1;
    for (int r = row; r < rows; ++r)
      if (!is_zero(m[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)])) {
        piv = r;
        break;
      }
    if (piv < 0) continue;
    std::swap(m[static_cast<std::size_t>(piv)], m[static_cast<std::size_t>(row)]);
    Rational p = m[static_cast<std::size_t>(row)][static_cast<std::size_t>(c)];
    for (auto& v : m[static_cast<std::size_t>(row)]) v /= p;
    for (int r = 0; r < rows; ++r) {
      if (r == row || is_zero(m[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)])) continue;
      Rational f = m[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
      for (int k = 0; k <= cols; ++k)
        m[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)] -= f * m[static_cast<std::size_t>(row)][static_cast<std::size_t>(k)];
    }
    pivot_col.push_back(c);
    ++row;
  }
  for (int r = row; r < rows; ++r)
    if (!is_zero(m[static_cast<std::size_t>(r)][static_cast<std::size_t>(cols)])) return std::nullopt;
  std::vector<Rational> z(static_cast<std::size_t>(cols));
  for (int r = 0; r < row; ++r) z[static_cast<std::size_t>(pivot_col[static_cast<std::size_t>(r)])] = m[static_cast<std::size_t>(r)][static_cast<std::size_t>(cols)];
  return z;
}

int rank_of(std::vector<std::vector<Rational>> rows) {
  int rank = 0;
  const std::size_t cols = rows.empty() ? 0 : rows[0].size();
  for (std::size_t c = 0; c < cols && rank < static_cast<int>(rows.size()); ++c) {
    int piv = -1;
    for (std::size_t r = static_cast<std::size_t>(rank); r < rows.size(); ++r)
      if (!is_zero(rows[r][c])) {
        piv = static_cast<int>(r);
        break;
      }
    if (piv < 0) continue;
    std::swap(rows[static_cast<std::size_t>(piv)], rows[static_cast<std::size_t>(rank)]);
    for (std::size_t r = static_cast<std::size_t>(rank) + 1; r < rows.size(); ++r) {
      if (is_zero(rows[r][c])) continue;
      Rational f = rows[r][c] / rows[static_cast<std::size_t>(rank)][c];
      for (std::size_t k = c; k < cols; ++k) rows[r][k] -= f * rows[static_cast<std::size_t>(rank)][k];
    }
    ++rank;
  }
  return rank;
}

Rational pow2(int m) {
  Rational r = 1;
  for (int k = 0; k < m; ++k) r /= 2;
  return r;
}

// Rational unit vector from a random stereographic parameter.
std::vector<Rational> random_unit(Rng& rng, int r) {
  std::vector<Rational> m;
  for (int k = 0; k + 1 < r; ++k) m.push_back(rng.rational(4, 4));
  Rational sq = 0;
  for (const auto& c : m) sq += c * c;
  std::vector<Rational> u(static_cast<std::size_t>(r));
  Rational den = 1 + sq;
  int sigma = rng.coin() ? 1 : -1;
  u[0] = sigma * (1 - sq) / den;
  for (int k = 1; k < r; ++k) u[static_cast<std::size_t>(k)] = sigma * 2 * m[static_cast<std::size_t>(k - 1)] / den;
  return u;
}

}  // namespace

// ---- direct systems ----------------------------------------------------------------

DirectSystem DirectSystem::build(const SystemSpec& spec, const SizeCap& cap) {
  DirectSystem sys;
  sys.name_ = spec.name;
  sys.backend_ = spec.backend;
  const std::size_t K = spec.algebras.empty() ? spec.levels.size() : spec.algebras.size();
  if (K == 0) fail(ErrorKind::Validation, "a direct system needs at least one level");
  for (std::size_t k = 0; k < K; ++k)
    sys.groups_.push_back(spec.algebras.empty() ? algebra_from_id(spec.levels[k], cap) : spec.algebras[k]);
  std::map<std::pair<int, int>, Morphism> given;
  for (const auto& c : spec.connectors) {
    if (c.from < 1 || c.to > static_cast<int>(K) || c.from > c.to)
      fail(ErrorKind::Validation, "connector (" + std::to_string(c.from) + "," + std::to_string(c.to) + ") out of range");
    Morphism phi = build_morphism(sys.group(c.from), sys.group(c.to), c.images);
    if (c.from == c.to && !(phi == identity_morphism(sys.group(c.from))))
      fail(ErrorKind::Validation, "DS1 violated: connector (" + std::to_string(c.from) + "," + std::to_string(c.to) +
                                      ") is not the identity");
    given.emplace(std::make_pair(c.from, c.to), std::move(phi));
  }
  for (int i = 1; i < static_cast<int>(K); ++i) {
    auto it = given.find({i, i + 1});
    if (it == given.end())
      fail(ErrorKind::Validation, "missing connector (" + std::to_string(i) + "," + std::to_string(i + 1) + ")");
    if (!one_lipschitz(it->second, sys.backend_))
      fail(ErrorKind::Validation, "connector (" + std::to_string(i) + "," + std::to_string(i + 1) +
                                      ") is not 1-Lipschitz for the " + to_string(sys.backend_) + " backend");
    sys.step_.push_back(it->second);
  }
  for (const auto& [key, phi] : given) {
    auto [i, k] = key;
    if (k - i < 2) continue;
    Morphism via = compose(sys.step_[static_cast<std::size_t>(k - 2)], sys.connector(i, k - 1));
    if (!(via == phi))
      fail(ErrorKind::Validation, "DS2 violated for (i,j,k) = (" + std::to_string(i) + "," + std::to_string(k - 1) + "," +
                                      std::to_string(k) + "): phi_ik != phi_jk o phi_ij");
  }
  sys.isometric_ = true;
  for (std::size_t i = 0; i < sys.step_.size(); ++i)
    if (!retraction(sys.step_[i], sys.backend_)) {
      sys.isometric_ = false;
      sys.notes_.push_back("connector (" + std::to_string(i + 1) + "," + std::to_string(i + 2) +
                           ") has no certified 1-Lipschitz left inverse");
    }
  return sys;
}

const AlgebraPtr& DirectSystem::group(int level) const {
  if (level < 1 || level > size()) fail(ErrorKind::Validation, "level " + std::to_string(level) + " out of range");
  return groups_[static_cast<std::size_t>(level - 1)];
}

Morphism DirectSystem::connector(int i, int j) const {
  if (i > j) fail(ErrorKind::Validation, "connectors go from lower to higher levels");
  Morphism phi = identity_morphism(group(i));
  for (int k = i; k < j; ++k) phi = compose(step_[static_cast<std::size_t>(k - 1)], phi);
  return phi;
}

SystemSpec preset_spec(const std::string& name, int K) {
  if (K < 1) fail(ErrorKind::Validation, "K must be at least 1");
  SystemSpec spec;
  spec.name = name;
  auto inclusion = [](int from, int r_src, const AlgebraPtr& tgt) {
    ConnectorSpec c{from, from + 1, {}};
    for (int g = 0; g < r_src; ++g) c.images.push_back(unit(tgt->dim(), g));
    return c;
  };
  if (name == "filtration" || name == "abelian-chain") {
    const int step = name == "filtration" ? 3 : 1;
    for (int k = 1; k <= K; ++k) spec.levels.push_back("free:" + std::to_string(k + 1) + ":" + std::to_string(step));
    for (int k = 1; k < K; ++k) spec.connectors.push_back(inclusion(k, k + 1, algebra_from_id(spec.levels[static_cast<std::size_t>(k)])));
    spec.backend = Backend::CC;
  } else if (name == "degenerate") {
    for (int k = 1; k <= K; ++k) spec.levels.push_back("amalgam:" + std::to_string(k));
    for (int k = 1; k < K; ++k) spec.connectors.push_back(inclusion(k, k + 1, algebra_from_id(spec.levels[static_cast<std::size_t>(k)])));
    spec.backend = Backend::CC;
  } else if (name == "contracting") {
    for (int k = 1; k <= K; ++k) spec.levels.push_back("free:2:2");
    for (int k = 1; k < K; ++k) {
      ConnectorSpec c{k, k + 1, {}};
      std::vector<Rational> x(3), y(3);
      x[0] = Rational(1, 2);
      y[1] = Rational(1, 2);
      c.images = {x, y};
      spec.connectors.push_back(c);
    }
    spec.backend = Backend::Box;
  } else {
    fail(ErrorKind::Validation, "unknown preset '" + name + "' (expected filtration, degenerate, abelian-chain, contracting)");
  }
  return spec;
}

DirectSystem preset_system(const std::string& name, int K) { return DirectSystem::build(preset_spec(name, K)); }

// ---- colimit -----------------------------------------------------------------------

ColimitElement push(const DirectSystem& sys, const ColimitElement& x, int level) {
  if (level < x.level) fail(ErrorKind::Validation, "cannot push an element to a lower level");
  require_same_algebra(x.rep.algebra, sys.group(x.level));
  if (level == x.level) return x;
  return {level, apply(sys.connector(x.level, level), x.rep)};
}

bool colimit_equal(const DirectSystem& sys, const ColimitElement& a, const ColimitElement& b) {
  int j = std::max(a.level, b.level);
  return push(sys, a, j).rep == push(sys, b, j).rep;
}

ColimitElement canonical_form(const DirectSystem& sys, const ColimitElement& x) {
  for (int i = 1; i < x.level; ++i) {
    auto z = solve_linear(sys.connector(i, x.level), x.rep.coords);
    if (z) return {i, GroupElement::from_coords(sys.group(i), *z)};
  }
  return x;
}

ColimitElement colimit_mul(const DirectSystem& sys, const ColimitElement& a, const ColimitElement& b) {
  int j = std::max(a.level, b.level);
  return {j, mul(push(sys, a, j).rep, push(sys, b, j).rep)};
}

ColimitElement colimit_inverse(const ColimitElement& a) { return {a.level, inverse(a.rep)}; }

ColimitElement colimit_dilate(const Rational& lambda, const ColimitElement& a) { return {a.level, dilate(lambda, a.rep)}; }

ColimitElement iterated_commutator(const DirectSystem& sys, const std::vector<ColimitElement>& xs) {
  if (xs.empty()) fail(ErrorKind::Validation, "empty commutator");
  int j = 1;
  for (const auto& x : xs) j = std::max(j, x.level);
  GroupElement acc = push(sys, xs[0], j).rep;
  for (std::size_t k = 1; k < xs.size(); ++k) acc = commutator(acc, push(sys, xs[k], j).rep);
  return {j, acc};
}

// ---- distances ---------------------------------------------------------------------

LevelDistance level_distance(const DirectSystem& sys, int level, const GroupElement& z, const SearchBudget& budget,
                             const std::vector<HorizontalPath>& seeds) {
  require_same_algebra(z.algebra, sys.group(level));
  LevelDistance d;
  d.level = level;
  if (sys.backend() == Backend::Box) {
    RootValue v = quasi_norm(z);
    Interval b = v.bounds();
    d.lower = b.lo;
    d.upper = b.hi;
    d.box = v;
    d.label = "exact";
    return d;
  }
  DistanceBracket br = cc_distance(z, budget, seeds);
  d.lower = br.lower;
  d.upper = br.upper;
  d.witness = br.witness;
  d.label = br.lower == br.upper ? "exact" : "certified-bound";
  return d;
}

PseudodistanceReport infimum_pseudodistance(const DirectSystem& sys, const ColimitElement& x, const ColimitElement& y,
                                            int K, const SearchBudget& budget) {
  PseudodistanceReport rep;
  rep.join = std::max(x.level, y.level);
  rep.K = K;
  rep.isometric = sys.isometric();
  if (K < rep.join) fail(ErrorKind::Validation, "K = " + std::to_string(K) + " is below the join level " + std::to_string(rep.join));
  if (K > sys.size()) fail(ErrorKind::Validation, "K = " + std::to_string(K) + " exceeds the system size " + std::to_string(sys.size()));
  std::optional<HorizontalPath> carried;
  for (int k = rep.join; k <= K; ++k) {
    GroupElement z = mul(inverse(push(sys, x, k).rep), push(sys, y, k).rep);
    LevelDistance d;
    if (k > rep.join && carried) {
      HorizontalPath pushed = carried->mapped(sys.connector(k - 1, k));
      if (pushed.endpoint() != z) fail(ErrorKind::NoCertifiedPath, "pushed witness lost its endpoint");
      const LevelDistance& prev = rep.levels.back();
      if (sys.isometric()) {
        d = prev;
        d.level = k;
        d.witness = pushed;
        d.upper = std::min(prev.upper, dyadic_ceil(pushed.length().hi));
      } else {
        d = level_distance(sys, k, z, budget, {pushed});
      }
    } else {
      d = level_distance(sys, k, z, budget);
    }
    if (sys.backend() == Backend::CC && !rep.levels.empty()) {
      const auto& prev = rep.levels.back();
      if (prev.upper < d.upper) d.upper = prev.upper;  // pushed witnesses are never longer under 1-Lipschitz connectors
      if (sys.isometric() && d.lower < prev.lower) d.lower = prev.lower;
      if (d.lower > d.upper) fail(ErrorKind::NoCertifiedPath, "lower bound exceeds upper bound at level " + std::to_string(k));
      d.label = d.lower == d.upper ? "exact" : "certified-bound";
    }
    if (d.witness) carried = d.witness;
    rep.levels.push_back(d);
    Rational inf = rep.running_inf_upper.empty() ? d.upper : std::min(rep.running_inf_upper.back(), d.upper);
    rep.running_inf_upper.push_back(inf);
  }
  bool constant = true, nonincreasing = true;
  for (std::size_t k = 1; k < rep.levels.size(); ++k) {
    const auto& a = rep.levels[k - 1];
    const auto& b = rep.levels[k];
    int c = a.box && b.box ? compare(*b.box, *a.box) : cmp(b.upper, a.upper);
    bool same_bracket = a.box && b.box ? c == 0 : (a.lower == b.lower && a.upper == b.upper);
    if (!same_bracket) constant = false;
    if (c > 0) nonincreasing = false;
  }
  rep.tail = constant ? "constant" : (nonincreasing ? "nonincreasing" : "irregular");
  return rep;
}

ZeroSetReport zero_set_probe(const DirectSystem& sys, int K, int samples, unsigned long long seed, const Rational& tolerance) {
  ZeroSetReport rep;
  rep.K = K;
  rep.samples = samples;
  if (K < 1 || K > sys.size()) fail(ErrorKind::Validation, "K out of range for the system");
  SearchBudget cheap{4, 0, 20, seed, 20000};
  for (int s = 0; s < samples; ++s) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(s));
    GroupElement g = GroupElement::identity(sys.group(1));
    while (g.is_identity())
      for (auto& c : g.coords) c = rng.rational(3, 4);
    ColimitElement x{1, g};
    LevelDistance first = level_distance(sys, 1, g, cheap);
    if (sys.isometric() && sgn(first.lower) > 0) {
      ++rep.certified_nonzero;
      continue;
    }
    LevelDistance last = K == 1 ? first : level_distance(sys, K, push(sys, x, K).rep, cheap);
    if (last.upper <= tolerance * first.upper) rep.candidates.push_back({x, first.upper, last.upper});
  }
  return rep;
}

// ---- non-degeneracy probes ---------------------------------------------------------

namespace {

struct Inner {
  Rational lower;
  Rational upper;
};

// Bracket for d'(e, z) with z at `level`, using levels level..K.
Inner inner_distance(const DirectSystem& sys, const ColimitElement& z, const NondegBudget& b) {
  LevelDistance d = level_distance(sys, z.level, z.rep, b.search);
  Inner in{d.lower, d.upper};
  if (sys.isometric()) return in;
  in.lower = 0;  // lower bounds at one level do not bound the infimum over later levels
  for (int k = z.level + 1; k <= std::min(b.K, sys.size()); ++k) {
    LevelDistance dk = level_distance(sys, k, push(sys, z, k).rep, b.search);
    if (dk.upper < in.upper) in.upper = dk.upper;
  }
  return in;
}

struct ScaleSummary {
  Rational sup_lower;
  Rational sup_upper;
  Rational max_ratio;  // lower / input at exactly this scale
};

std::vector<ScaleSummary> summarize(const std::vector<ProbeRow>& rows, int scales) {
  std::vector<ScaleSummary> out;
  for (int m = 1; m <= scales; ++m) {
    Rational eta = pow2(m);
    ScaleSummary s{0, 0, 0};
    for (const auto& r : rows) {
      if (r.parameter > eta) continue;
      s.sup_lower = std::max(s.sup_lower, r.lower);
      s.sup_upper = std::max(s.sup_upper, r.upper);
      if (r.parameter == eta && sgn(r.input) > 0) s.max_ratio = std::max(s.max_ratio, Rational(r.lower / r.input));
    }
    out.push_back(s);
  }
  return out;
}

// use_ratio: the ratio rule only applies when displacements also grow with the level.
std::string verdict(const std::vector<ScaleSummary>& s, const Rational& threshold, bool use_ratio, bool certified) {
  if (s.empty()) return "undecided";
  bool all_above = certified;
  for (const auto& x : s)
    if (x.sup_lower < threshold) all_above = false;
  if (all_above) return "violation witnessed";
  if (use_ratio && certified) {
    bool increasing = true;
    for (std::size_t k = 1; k < s.size(); ++k)
      if (!(s[k].max_ratio > s[k - 1].max_ratio)) increasing = false;
    if (increasing && s.back().max_ratio >= 4 * s.front().max_ratio) return "ratio unbounded (evidence)";
  }
  if (s.back().sup_upper < s.front().sup_upper || is_zero(s.back().sup_upper)) return "no violation found at budget";
  return "undecided";
}

}  // namespace

NondegReport nondeg_probe_c1(const DirectSystem& sys, const ColimitElement& x, const Rational& t, const NondegBudget& b) {
  NondegReport rep;
  rep.condition = "c1";
  GroupElement base = dilate(t, x.rep);
  for (int m = 1; m <= b.scales; ++m)
    for (int sign : {1, -1}) {
      Rational s = t + sign * pow2(m);
      ColimitElement z{x.level, mul(inverse(dilate(s, x.rep)), base)};
      Inner in = inner_distance(sys, z, b);
      rep.rows.push_back({"s=" + to_string(s), pow2(m), pow2(m), in.lower, in.upper});
    }
  rep.verdict = verdict(summarize(rep.rows, b.scales), b.threshold, false, sys.isometric());
  rep.note = "inner infimum replaced by the best bracket over levels up to K; suprema by sampled maxima";
  return rep;
}

NondegReport nondeg_probe_c2(const DirectSystem& sys, const ColimitElement& x, const NondegBudget& b) {
  NondegReport rep;
  rep.condition = "c2";
  const int K = std::min(b.K, sys.size());
  bool level_growth = K > 1;
  for (int m = 1; m <= b.scales; ++m) {
    Rational eps = pow2(m);
    Rational first_level = 0, later_levels = 0;
    for (int i = 1; i <= K; ++i) {
      const auto& alg = sys.group(i);
      for (int g : alg->primitive_words()) {
        if (alg->degree(g) != 1) continue;
        // Only generators that do not come from the previous level.
        if (i > 1) {
          bool inherited = false;
          Morphism phi = sys.connector(i - 1, i);
          for (int h : sys.group(i - 1)->primitive_words())
            if (phi.column(h) == unit(alg->dim(), g)) inherited = true;
          if (inherited) continue;
        }
        ColimitElement y{i, dilate(eps, GroupElement::exp_basis(alg, g, 1))};
        int j = std::max(i, x.level);
        GroupElement xj = push(sys, x, j).rep, yj = push(sys, y, j).rep;
        ColimitElement z{j, mul(inverse(xj), mul(yj, xj))};
        Inner in = inner_distance(sys, z, b);
        rep.rows.push_back({"level " + std::to_string(i) + " " + alg->word(g).label, eps, eps, in.lower, in.upper});
        Rational& slot = i == 1 ? first_level : later_levels;
        slot = std::max(slot, in.lower);
      }
    }
    if (!(later_levels > first_level)) level_growth = false;
  }
  rep.verdict = verdict(summarize(rep.rows, b.scales), b.threshold, level_growth, sys.isometric());
  rep.note =
      "y = dilate(eta, generator) has d(e,y) = eta exactly; the ratio rule needs certified displacements that grow "
      "with the level at every scale, since the ratio alone also grows for Holder-continuous right translations";
  return rep;
}

NondegReport nondeg_probe_c3(const DirectSystem& sys, const std::vector<ColimitElement>& cloud, const NondegBudget& b) {
  NondegReport rep;
  rep.condition = "c3";
  bool isometry = true;
  for (int m = 1; m <= b.scales; ++m) {
    Rational eta = pow2(m);
    for (std::size_t c = 0; c < cloud.size(); ++c) {
      const auto& x = cloud[c];
      const auto& alg = sys.group(x.level);
      for (int s = 0; s < b.samples; ++s) {
        Rng rng = Rng::stream(b.seed, static_cast<std::uint64_t>((m * 1000003 + static_cast<int>(c)) * 1009 + s));
        auto u = random_unit(rng, alg->first_layer_dim());
        GroupElement step = GroupElement::identity(alg);
        for (int k = 0; k < alg->first_layer_dim(); ++k) step.coords[static_cast<std::size_t>(k)] = eta * u[static_cast<std::size_t>(k)];
        GroupElement y = mul(x.rep, step);
        // d(x, y) = eta: a unit-speed segment, matched by the abelianization bound.
        ColimitElement z{x.level, mul(y, inverse(x.rep))};
        Inner in = inner_distance(sys, z, b);
        if (!(in.lower == eta && in.upper == eta)) isometry = false;
        rep.rows.push_back({"cloud " + std::to_string(c), eta, eta, in.lower, in.upper});
      }
    }
  }
  rep.verdict = verdict(summarize(rep.rows, b.scales), b.threshold, false, sys.isometric());
  rep.note = isometry ? "d(y^-1, x^-1) = d(x, y) on every sample: inversion acts isometrically"
                      : "inner infimum replaced by the best bracket over levels up to K";
  return rep;
}

// ---- filtration ------------------------------------------------------------------------

int generated_dimension(const LieAlgebra& alg) {
  const int n = alg.dim();
  std::vector<std::vector<Rational>> layer, all;
  for (int i = 0; i < alg.first_layer_dim(); ++i) layer.push_back(unit(n, i));
  std::vector<std::vector<Rational>> gens = layer;
  all = layer;
  for (int d = 2; d <= alg.step(); ++d) {
    std::vector<std::vector<Rational>> next;
    for (const auto& g : gens)
      for (const auto& v : layer) {
        std::vector<Rational> out(static_cast<std::size_t>(n));
        accumulate_bracket<Rational>(alg, g, v, out);
        next.push_back(std::move(out));
      }
    layer = next;
    all.insert(all.end(), next.begin(), next.end());
  }
  return rank_of(all);
}

FiltrationReport filtration_report(const DirectSystem& sys, int samples, unsigned long long seed) {
  FiltrationReport rep;
  rep.generation_ok = true;
  int max_step = 1;
  for (int k = 1; k <= sys.size(); ++k) {
    const auto& alg = sys.group(k);
    FiltrationLevel lv;
    lv.level = k;
    lv.algebra = alg->id();
    lv.dimension = alg->dim();
    lv.generated_dimension = generated_dimension(*alg);
    lv.step = alg->step();
    lv.generates = lv.generated_dimension == lv.dimension;
    if (k < sys.size()) {
      Morphism phi = sys.connector(k, k + 1);
      for (int g = 0; g < alg->first_layer_dim(); ++g)
        for (int r = 0; r < phi.target_dim(); ++r)
          if (!is_zero(phi.entry(r, g)) && phi.target()->degree(r) != 1) lv.first_layer_preserved = false;
    }
    if (!lv.generates || !lv.first_layer_preserved) rep.generation_ok = false;
    max_step = std::max(max_step, lv.step);
    rep.levels.push_back(lv);
  }
  // Commutators of length step + 1 vanish in the colimit.
  rep.nilpotent_ok = true;
  Rng rng(seed);
  for (int s = 0; s < samples; ++s) {
    std::vector<ColimitElement> xs;
    for (int c = 0; c <= max_step; ++c) {
      int level = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(sys.size())));
      GroupElement g = GroupElement::identity(sys.group(level));
      for (auto& q : g.coords) q = rng.rational(5, 3);
      xs.push_back({level, g});
    }
    if (!iterated_commutator(sys, xs).rep.is_identity()) rep.nilpotent_ok = false;
    ++rep.commutator_samples;
  }
  // One-parameter subgroups through first-layer elements are isometric embeddings.
  rep.isometry_ok = true;
  for (int s = 0; s < samples; ++s) {
    int level = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(sys.size())));
    const auto& alg = sys.group(level);
    GroupElement x = GroupElement::identity(alg);
    for (int k = 0; k < alg->first_layer_dim(); ++k) x.coords[static_cast<std::size_t>(k)] = rng.rational(6, 5);
    Rational t = rng.rational(8, 3), u = rng.rational(8, 3);
    GroupElement z = mul(inverse(dilate(t, x)), dilate(u, x));
    Rational gap = abs(t - u);
    if (sys.backend() == Backend::Box) {
      if (!(box_distance(dilate(t, x), dilate(u, x)) == quasi_norm(x).scaled(gap))) rep.isometry_ok = false;
    } else {
      Rational sq = 0;
      for (int k = 0; k < alg->first_layer_dim(); ++k) sq += x.coords[static_cast<std::size_t>(k)] * x.coords[static_cast<std::size_t>(k)];
      Interval expected = gap * sqrt_bounds(sq);
      SearchBudget cheap{4, 0, 10, seed, 20000};
      DistanceBracket br = cc_distance(z, cheap);
      if (br.lower > expected.hi || expected.lo > br.upper) rep.isometry_ok = false;
    }
    ++rep.isometry_samples;
  }
  return rep;
}

}  // namespace carnot
