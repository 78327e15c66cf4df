#include "carnot/rademacher.hpp"

#include "carnot/random.hpp"

#include <algorithm>
#include <cmath>

namespace carnot {

namespace {

const char* const kNodeNames[] = {"const", "coord", "linear", "quasinorm", "translate", "dilate",
                                  "add",   "scale", "min",    "max",       "abs"};

ExprPtr node(NodeKind k, std::vector<ExprPtr> children = {}) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  e->children = std::move(children);
  for (const auto& c : e->children)
    if (!c) fail(ErrorKind::Validation, std::string("missing operand of ") + kNodeNames[static_cast<int>(k)]);
  return e;
}

double mid(const Value& v) { return Rational((v.iv.lo + v.iv.hi) / 2).get_d(); }

Rational pow2(int m) {
  Rational r = 1;
  for (int k = 0; k < m; ++k) r /= 2;
  return r;
}

}  // namespace

std::string to_string(NodeKind k) { return kNodeNames[static_cast<int>(k)]; }

NodeKind parse_node_kind(const std::string& s) {
  for (int k = 0; k <= static_cast<int>(NodeKind::Abs); ++k)
    if (s == kNodeNames[k]) return static_cast<NodeKind>(k);
  fail(ErrorKind::Parse, "unknown function node '" + s + "'");
}

namespace fx {
ExprPtr constant(const Rational& c) {
  auto e = std::make_shared<Expr>();
  e->kind = NodeKind::Const;
  e->value = c;
  return e;
}
ExprPtr coord(int i) {
  auto e = std::make_shared<Expr>();
  e->kind = NodeKind::Coord;
  e->index = i;
  return e;
}
ExprPtr linear(std::vector<Rational> w) {
  auto e = std::make_shared<Expr>();
  e->kind = NodeKind::Linear;
  e->weights = std::move(w);
  return e;
}
ExprPtr quasinorm() { return node(NodeKind::QuasiNorm); }
ExprPtr translate(const GroupElement& g, ExprPtr f) {
  auto e = std::const_pointer_cast<Expr>(node(NodeKind::Translate, {std::move(f)}));
  e->element = g;
  return e;
}
ExprPtr dilate(const Rational& lambda, ExprPtr f) {
  auto e = std::const_pointer_cast<Expr>(node(NodeKind::Dilate, {std::move(f)}));
  e->value = lambda;
  return e;
}
ExprPtr add(ExprPtr a, ExprPtr b) { return node(NodeKind::Add, {std::move(a), std::move(b)}); }
ExprPtr scale(const Rational& c, ExprPtr f) {
  auto e = std::const_pointer_cast<Expr>(node(NodeKind::Scale, {std::move(f)}));
  e->value = c;
  return e;
}
ExprPtr min(ExprPtr a, ExprPtr b) { return node(NodeKind::Min, {std::move(a), std::move(b)}); }
ExprPtr max(ExprPtr a, ExprPtr b) { return node(NodeKind::Max, {std::move(a), std::move(b)}); }
ExprPtr abs(ExprPtr f) { return node(NodeKind::Abs, {std::move(f)}); }
}  // namespace fx

void validate(const Expr& f, const AlgebraPtr& alg) {
  const int r = alg->first_layer_dim();
  auto arity = [&](std::size_t n) {
    if (f.children.size() != n)
      fail(ErrorKind::Validation, to_string(f.kind) + " expects " + std::to_string(n) + " operand(s)");
  };
  switch (f.kind) {
    case NodeKind::Const:
    case NodeKind::QuasiNorm: arity(0); break;
    case NodeKind::Coord:
      arity(0);
      if (f.index < 0 || f.index >= r)
        fail(ErrorKind::Validation, "coord index " + std::to_string(f.index) + " is not a first-layer coordinate of " + alg->id());
      break;
    case NodeKind::Linear:
      arity(0);
      if (static_cast<int>(f.weights.size()) != r)
        fail(ErrorKind::Validation, "linear functional needs " + std::to_string(r) + " weights");
      break;
    case NodeKind::Translate:
      arity(1);
      if (!f.element) fail(ErrorKind::Validation, "translate without an element");
      require_same_algebra(f.element->algebra, alg);
      break;
    case NodeKind::Dilate:
    case NodeKind::Scale:
    case NodeKind::Abs: arity(1); break;
    case NodeKind::Add:
    case NodeKind::Min:
    case NodeKind::Max: arity(2); break;
  }
  for (const auto& c : f.children) validate(*c, alg);
}

bool contains_quasinorm(const Expr& f) {
  if (f.kind == NodeKind::QuasiNorm) return true;
  return std::any_of(f.children.begin(), f.children.end(), [](const ExprPtr& c) { return contains_quasinorm(*c); });
}

Value evaluate(const Expr& f, const GroupElement& x) {
  auto point = [](const Rational& q) { return Value{{q, q}, true}; };
  switch (f.kind) {
    case NodeKind::Const: return point(f.value);
    case NodeKind::Coord: return point(x.coords.at(static_cast<std::size_t>(f.index)));
    case NodeKind::Linear: {
      Rational s = 0;
      for (std::size_t i = 0; i < f.weights.size(); ++i) s += f.weights[i] * x.coords.at(i);
      return point(s);
    }
    case NodeKind::QuasiNorm: {
      RootValue v = quasi_norm(x);
      if (auto q = v.rational()) return point(*q);
      return {v.bounds(128), false};
    }
    case NodeKind::Translate: return evaluate(*f.children[0], mul(*f.element, x));
    case NodeKind::Dilate: return evaluate(*f.children[0], dilate(f.value, x));
    case NodeKind::Scale: {
      Value c = evaluate(*f.children[0], x);
      return {f.value * c.iv, c.exact};
    }
    case NodeKind::Abs: {
      Value c = evaluate(*f.children[0], x);
      return {abs(c.iv), c.exact};
    }
    case NodeKind::Add:
    case NodeKind::Min:
    case NodeKind::Max: {
      Value a = evaluate(*f.children[0], x), b = evaluate(*f.children[1], x);
      Interval iv = f.kind == NodeKind::Add ? a.iv + b.iv : (f.kind == NodeKind::Min ? min(a.iv, b.iv) : max(a.iv, b.iv));
      return {iv, a.exact && b.exact};
    }
  }
  fail(ErrorKind::Validation, "bad function node");
}

std::vector<ExprPtr> lipschitz_examples(const AlgebraPtr& alg) {
  if (alg->first_layer_dim() < 2) fail(ErrorKind::Domain, "lipschitz_examples needs rank >= 2");
  Rng rng(77);
  GroupElement q = GroupElement::identity(alg);
  for (auto& c : q.coords) c = rng.rational(5, 4);
  return {
      fx::coord(0),
      fx::scale(3, fx::coord(1)),
      fx::linear({Rational(3, 5), Rational(-4, 5)}),
      fx::add(fx::coord(0), fx::scale(Rational(-1, 2), fx::coord(1))),
      fx::abs(fx::translate(q, fx::coord(1))),
      fx::max(fx::coord(0), fx::min(fx::coord(1), fx::constant(Rational(1, 3)))),
      fx::dilate(Rational(-2), fx::linear({1, 1})),
      fx::translate(inverse(q), fx::abs(fx::add(fx::coord(0), fx::constant(-1)))),
  };
}

std::optional<Rational> lipschitz_bound(const Expr& f) {
  switch (f.kind) {
    case NodeKind::Const: return Rational(0);
    case NodeKind::Coord: return Rational(1);
    case NodeKind::Linear: {
      Rational sq = 0;
      for (const auto& w : f.weights) sq += w * w;
      return sqrt_bounds(sq).hi;
    }
    case NodeKind::QuasiNorm: return std::nullopt;
    case NodeKind::Translate: return lipschitz_bound(*f.children[0]);
    case NodeKind::Dilate:
    case NodeKind::Scale: {
      auto c = lipschitz_bound(*f.children[0]);
      if (!c) return std::nullopt;
      return Rational(abs(f.value) * *c);
    }
    case NodeKind::Abs: return lipschitz_bound(*f.children[0]);
    case NodeKind::Add:
    case NodeKind::Min:
    case NodeKind::Max: {
      auto a = lipschitz_bound(*f.children[0]), b = lipschitz_bound(*f.children[1]);
      if (!a || !b) return std::nullopt;
      return f.kind == NodeKind::Add ? Rational(*a + *b) : std::max(*a, *b);
    }
  }
  return std::nullopt;
}

Value incremental_ratio(const Expr& f, const GroupElement& p, const GroupElement& g, const Rational& lambda) {
  if (is_zero(lambda)) fail(ErrorKind::Domain, "incremental ratio needs lambda != 0");
  require_same_algebra(p.algebra, g.algebra);
  validate(f, p.algebra);
  Value a = evaluate(f, mul(p, dilate(lambda, g)));
  Value b = evaluate(f, p);
  return {Rational(1 / lambda) * (a.iv - b.iv), a.exact && b.exact};
}

namespace {

DirectionVerdict classify(const Expr& f, const GroupElement& p, const GroupElement& g, int M, double tol) {
  DirectionVerdict d;
  d.direction = g;
  std::vector<RatioSample> pos, neg;
  for (int m = 1; m <= M; ++m) {
    Rational l = pow2(m);
    pos.push_back({l, incremental_ratio(f, p, g, l)});
    neg.push_back({-l, incremental_ratio(f, p, g, -l)});
    d.samples.push_back(pos.back());
    d.samples.push_back(neg.back());
  }
  const std::size_t first = static_cast<std::size_t>(M / 2);
  auto diameter = [&](const std::vector<RatioSample>& s, std::size_t from, std::size_t* imax, std::size_t* imin) {
    Rational hi = s[from].value.iv.hi, lo = s[from].value.iv.lo;
    std::size_t a = from, b = from;
    for (std::size_t k = from; k < s.size(); ++k) {
      if (s[k].value.iv.hi > hi) hi = s[k].value.iv.hi, a = k;
      if (s[k].value.iv.lo < lo) lo = s[k].value.iv.lo, b = k;
    }
    if (imax) *imax = a;
    if (imin) *imin = b;
    return Rational(hi - lo).get_d();
  };
  std::size_t pa = 0, pb = 0, na = 0, nb = 0;
  double dp = diameter(pos, first, &pa, &pb), dn = diameter(neg, first, &na, &nb);
  d.tail_diameter = std::max(dp, dn);
  d.gap = std::fabs(mid(pos.back().value) - mid(neg.back().value));
  d.rate = pos.size() > 1 ? std::fabs(mid(pos.back().value) - mid(pos[pos.size() - 2].value)) : 0;
  if (dp < tol && dn < tol) {
    if (d.gap < tol) {
      d.verdict = "converged";
      d.limit = pos.back().value;
    } else {
      d.verdict = "oscillating";
      d.witness = std::make_pair(pos.back(), neg.back());
    }
    return d;
  }
  // Not Cauchy on some side: oscillation when the last quarter is as spread out as the tail.
  const std::size_t quarter = static_cast<std::size_t>(M - std::max(1, M / 4));
  bool pos_bad = dp >= tol, use_pos = pos_bad;
  double late = use_pos ? diameter(pos, quarter, nullptr, nullptr) : diameter(neg, quarter, nullptr, nullptr);
  double full = use_pos ? dp : dn;
  if (late >= full / 2) {
    d.verdict = "oscillating";
    d.witness = use_pos ? std::make_pair(pos[pa], pos[pb]) : std::make_pair(neg[na], neg[nb]);
  } else {
    d.verdict = "undecided";
  }
  return d;
}

// Least squares through exact normal equations; free variables set to zero.
std::optional<std::vector<Rational>> fit(const std::vector<std::vector<Rational>>& a, const std::vector<Rational>& b, int r) {
  std::vector<std::vector<Rational>> m(static_cast<std::size_t>(r), std::vector<Rational>(static_cast<std::size_t>(r + 1)));
  for (std::size_t k = 0; k < a.size(); ++k)
    for (int i = 0; i < r; ++i) {
      for (int j = 0; j < r; ++j) m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] += a[k][static_cast<std::size_t>(i)] * a[k][static_cast<std::size_t>(j)];
      m[static_cast<std::size_t>(i)][static_cast<std::size_t>(r)] += a[k][static_cast<std::size_t>(i)] * b[k];
    }
  std::vector<int> piv;
  int row = 0;
  for (int c = 0; c < r && row < r; ++c) {
    int p = -1;
    for (int i = row; i < r; ++i)
      if (!is_zero(m[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)])) {
        p = i;
        break;
      }
    if (p < 0) continue;
    std::swap(m[static_cast<std::size_t>(p)], m[static_cast<std::size_t>(row)]);
    Rational d = m[static_cast<std::size_t>(row)][static_cast<std::size_t>(c)];
    for (auto& v : m[static_cast<std::size_t>(row)]) v /= d;
    for (int i = 0; i < r; ++i) {
      if (i == row || is_zero(m[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)])) continue;
      Rational q = m[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
      for (int j = 0; j <= r; ++j) m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] -= q * m[static_cast<std::size_t>(row)][static_cast<std::size_t>(j)];
    }
    piv.push_back(c);
    ++row;
  }
  std::vector<Rational> w(static_cast<std::size_t>(r));
  for (int i = 0; i < row; ++i) w[static_cast<std::size_t>(piv[static_cast<std::size_t>(i)])] = m[static_cast<std::size_t>(i)][static_cast<std::size_t>(r)];
  return w;
}

Rational midpoint(const Value& v) { return (v.iv.lo + v.iv.hi) / 2; }

}  // namespace

DifferentialReport gateaux_probe(const Expr& f, const GroupElement& p, const std::vector<GroupElement>& directions,
                                 const GateauxOptions& opts) {
  validate(f, p.algebra);
  if (opts.schedule < 2) fail(ErrorKind::Validation, "the lambda schedule needs at least 2 scales");
  DifferentialReport rep;
  rep.base = p;
  rep.exact_function = !contains_quasinorm(f);
  rep.tolerance = opts.tolerance.value_or(rep.exact_function ? 1e-9 : 1e-6);
  std::vector<GroupElement> dirs = directions;
  if (dirs.empty())
    for (int i = 0; i < p.algebra->first_layer_dim(); ++i) dirs.push_back(GroupElement::exp_basis(p.algebra, i));
  rep.all_converged = true;
  for (const auto& g : dirs) {
    require_same_algebra(g.algebra, p.algebra);
    rep.directions.push_back(classify(f, p, g, opts.schedule, rep.tolerance));
    const auto& v = rep.directions.back().verdict;
    if (v != "converged") rep.all_converged = false;
    if (v == "oscillating") rep.flagged_nd = true;
  }
  if (!rep.all_converged) return rep;

  const int r = p.algebra->first_layer_dim();
  std::vector<std::vector<Rational>> a;
  std::vector<Rational> b;
  bool exact = true;
  for (const auto& d : rep.directions) {
    a.emplace_back(d.direction.coords.begin(), d.direction.coords.begin() + r);
    b.push_back(midpoint(d.limit));
    exact = exact && d.limit.exact;
  }
  auto w = fit(a, b, r);
  auto predict = [&](const GroupElement& g) {
    Rational s = 0;
    for (int i = 0; i < r; ++i) s += (*w)[static_cast<std::size_t>(i)] * g.coords[static_cast<std::size_t>(i)];
    return s;
  };
  bool fits = true;
  bool fits_exact = exact;
  for (std::size_t k = 0; k < a.size(); ++k) {
    Rational res = predict(rep.directions[k].direction) - b[k];
    if (!is_zero(res)) fits_exact = false;
    if (std::fabs(res.get_d()) >= rep.tolerance) fits = false;
  }
  if (fits) {
    rep.differential = w;
    rep.differential_exact = fits_exact;
  }

  // d(gh) = d(g) + d(h) on pairs of directions.
  bool ok = true, ok_exact = true;
  for (std::size_t i = 0; i < rep.directions.size() && rep.homomorphism_pairs < 16; ++i)
    for (std::size_t j = i; j < rep.directions.size() && rep.homomorphism_pairs < 16; ++j) {
      const auto& di = rep.directions[i];
      const auto& dj = rep.directions[j];
      DirectionVerdict prod = classify(f, p, mul(di.direction, dj.direction), opts.schedule, rep.tolerance);
      ++rep.homomorphism_pairs;
      if (prod.verdict != "converged") {
        ok = false;
        continue;
      }
      Rational lhs = midpoint(prod.limit), rhs = midpoint(di.limit) + midpoint(dj.limit);
      if (!(prod.limit.exact && di.limit.exact && dj.limit.exact && lhs == rhs)) ok_exact = false;
      if (std::fabs(Rational(lhs - rhs).get_d()) >= rep.tolerance) ok = false;
    }
  rep.homomorphism = ok ? "passed" : "failed";
  rep.homomorphism_exact = ok && ok_exact;
  return rep;
}

EquiLipschitzReport equilipschitz_check(const Expr& f, const GroupElement& p, int samples,
                                        const std::vector<Rational>& lambdas, unsigned long long seed,
                                        std::optional<Rational> lipschitz_override) {
  validate(f, p.algebra);
  EquiLipschitzReport rep;
  rep.lipschitz = lipschitz_override ? lipschitz_override : lipschitz_bound(f);
  if (!rep.lipschitz) {
    rep.note = "no finite Lipschitz estimate for this expression";
    return rep;
  }
  std::vector<Rational> ls = lambdas;
  if (ls.empty()) ls = {Rational(1), Rational(-1, 2), Rational(1, 8), Rational(-1, 64)};
  for (const auto& l : ls)
    if (is_zero(l)) fail(ErrorKind::Domain, "lambda set contains 0");
  const auto& alg = p.algebra;
  const int r = alg->first_layer_dim();
  for (int s = 0; s < samples; ++s) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(s));
    GroupElement g = GroupElement::identity(alg), h;
    for (auto& c : g.coords) c = rng.rational(4, 4);
    Rational d_upper;
    if (s % 2 == 0) {
      // h = g exp(v): the segment gives d(g, h) <= |v|.
      GroupElement v = GroupElement::identity(alg);
      Rational sq = 0;
      for (int i = 0; i < r; ++i) {
        v.coords[static_cast<std::size_t>(i)] = rng.rational(3, 4);
        sq += v.coords[static_cast<std::size_t>(i)] * v.coords[static_cast<std::size_t>(i)];
      }
      h = mul(g, v);
      d_upper = sqrt_bounds(sq).hi;
    } else {
      h = GroupElement::identity(alg);
      for (auto& c : h.coords) c = rng.rational(4, 4);
      d_upper = constructive_path(mul(inverse(g), h)).length().hi;
    }
    const Rational& lambda = ls[static_cast<std::size_t>(s) % ls.size()];
    Value a = incremental_ratio(f, p, g, lambda), b = incremental_ratio(f, p, h, lambda);
    Interval lhs = abs(a.iv - b.iv);
    Rational rhs = *rep.lipschitz * d_upper;
    ++rep.checks;
    if (lhs.lo > rhs) rep.violations.push_back({lambda, g, h, lhs, rhs});
  }
  rep.note = "d(g, h) replaced by a certified upper bound, which can only hide violations";
  return rep;
}

}  // namespace carnot
