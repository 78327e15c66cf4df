#include "carnot/metrics.hpp"

#include "carnot/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

namespace carnot {

// ---- RootValue -----------------------------------------------------------------

namespace {

Rational power(const Rational& q, unsigned e) {
  Rational r = 1;
  for (unsigned i = 0; i < e; ++i) r *= q;
  return r;
}

bool exact_root(const mpz_class& z, unsigned k, mpz_class& out) {
  if (sgn(z) < 0) return false;
  return mpz_root(out.get_mpz_t(), z.get_mpz_t(), k) != 0;
}

}  // namespace

RootValue RootValue::scaled(const Rational& lambda) const { return {radicand * power(abs(lambda), index), index}; }

double RootValue::approx() const {
  if (is_zero(radicand)) return 0.0;
  return std::pow(radicand.get_d(), 1.0 / index);
}

std::optional<Rational> RootValue::rational() const {
  if (index == 1) return radicand;
  mpz_class n, d;
  if (!exact_root(radicand.get_num(), index, n) || !exact_root(radicand.get_den(), index, d)) return std::nullopt;
  return Rational(n, d);
}

std::string RootValue::to_string() const {
  if (auto q = rational()) return carnot::to_string(*q);
  return carnot::to_string(radicand) + "^(1/" + std::to_string(index) + ")";
}

int compare(const RootValue& a, const RootValue& b) {
  Rational lhs = power(a.radicand, b.index), rhs = power(b.radicand, a.index);
  return cmp(lhs, rhs) < 0 ? -1 : (cmp(lhs, rhs) > 0 ? 1 : 0);
}

int compare(const RootValue& a, const Rational& b) {
  if (sgn(b) < 0) return 1;
  return compare(a, RootValue{b, 1});
}

RootValue quasi_norm(const GroupElement& x) {
  RootValue best;
  const auto& alg = *x.algebra;
  for (int i = 0; i < alg.dim(); ++i) {
    const Rational& c = x.coords[static_cast<std::size_t>(i)];
    if (is_zero(c)) continue;
    RootValue v{abs(c), static_cast<unsigned>(alg.degree(i))};
    if (best < v) best = v;
  }
  return best;
}

RootValue box_distance(const GroupElement& x, const GroupElement& y) { return quasi_norm(mul(inverse(x), y)); }

double quasi_norm_approx(const LieAlgebra& alg, const std::vector<double>& coords) {
  double best = 0;
  for (int i = 0; i < alg.dim(); ++i) {
    double c = std::abs(coords[static_cast<std::size_t>(i)]);
    if (c == 0) continue;
    int d = alg.degree(i);
    double v = d == 1 ? c : (d == 2 ? std::sqrt(c) : std::pow(c, 1.0 / d));
    best = std::max(best, v);
  }
  return best;
}

// ---- paths ---------------------------------------------------------------------

HorizontalPath HorizontalPath::axis(const AlgebraPtr& alg, int g, const Rational& t) {
  HorizontalPath p = empty(alg);
  if (is_zero(t)) return p;
  std::vector<Rational> dir(static_cast<std::size_t>(alg->first_layer_dim()));
  dir.at(static_cast<std::size_t>(g)) = sgn(t) > 0 ? 1 : -1;
  p.segments.push_back({std::move(dir), abs(t)});
  return p;
}

GroupElement HorizontalPath::endpoint() const {
  GroupElement acc = GroupElement::identity(algebra);
  const int r = algebra->first_layer_dim();
  for (const auto& s : segments) {
    GroupElement step = GroupElement::identity(algebra);
    for (int k = 0; k < r; ++k) step.coords[static_cast<std::size_t>(k)] = s.duration * s.direction[static_cast<std::size_t>(k)];
    acc = mul(acc, step);
  }
  return acc;
}

Interval HorizontalPath::length() const {
  Interval total = Interval::point(0);
  for (const auto& s : segments) {
    Rational sq = 0;
    for (const auto& c : s.direction) sq += c * c;
    total = total + s.duration * sqrt_bounds(sq);
  }
  return total;
}

HorizontalPath HorizontalPath::then(const HorizontalPath& other) const {
  require_same_algebra(algebra, other.algebra);
  HorizontalPath p = *this;
  p.segments.insert(p.segments.end(), other.segments.begin(), other.segments.end());
  return p;
}

HorizontalPath HorizontalPath::reversed() const {
  HorizontalPath p = empty(algebra);
  for (auto it = segments.rbegin(); it != segments.rend(); ++it) {
    Segment s = *it;
    for (auto& c : s.direction) c = -c;
    p.segments.push_back(std::move(s));
  }
  return p;
}

HorizontalPath HorizontalPath::mapped(const Morphism& phi) const {
  require_same_algebra(phi.source(), algebra);
  const int rs = phi.source()->first_layer_dim(), rt = phi.target()->first_layer_dim();
  HorizontalPath p = empty(phi.target());
  for (const auto& s : segments) {
    Segment m{std::vector<Rational>(static_cast<std::size_t>(rt)), s.duration};
    for (int r = 0; r < rt; ++r)
      for (int c = 0; c < rs; ++c) m.direction[static_cast<std::size_t>(r)] += phi.entry(r, c) * s.direction[static_cast<std::size_t>(c)];
    p.segments.push_back(std::move(m));
  }
  return p;
}

HorizontalPath HorizontalPath::simplified() const {
  HorizontalPath p = empty(algebra);
  for (const auto& s : segments) {
    if (is_zero(s.duration)) continue;
    if (std::all_of(s.direction.begin(), s.direction.end(), [](const Rational& q) { return is_zero(q); })) continue;
    if (!p.segments.empty() && p.segments.back().direction == s.direction) {
      p.segments.back().duration += s.duration;
      continue;
    }
    p.segments.push_back(s);
  }
  return p;
}

LiftResult lift_polygonal(const std::vector<std::pair<Rational, Rational>>& points, const AlgebraPtr& alg) {
  if (alg->first_layer_dim() != 2)
    fail(ErrorKind::Unsupported, "planar lifts need a rank-2 algebra, got " + alg->id());
  if (points.empty()) fail(ErrorKind::Validation, "a planar curve needs at least one point");
  HorizontalPath path = HorizontalPath::empty(alg);
  Rational length = 0;
  for (std::size_t k = 1; k < points.size(); ++k) {
    Rational dx = points[k].first - points[k - 1].first;
    Rational dy = points[k].second - points[k - 1].second;
    if (!is_zero(dx) && !is_zero(dy))
      fail(ErrorKind::Unsupported, "segment " + std::to_string(k) + " is not parallel to a coordinate axis");
    if (!is_zero(dx)) path = path.then(HorizontalPath::axis(alg, 0, dx));
    if (!is_zero(dy)) path = path.then(HorizontalPath::axis(alg, 1, dy));
    length += abs(dx) + abs(dy);
  }
  return {path.endpoint(), length, path};
}

std::vector<std::pair<Rational, Rational>> gamma_curve(const Rational& eps) {
  return {{0, 0}, {-1, 0}, {-1, eps}, {0, eps}};
}

// ---- lower bounds ------------------------------------------------------------------

AlgebraPtr heisenberg() {
  static const AlgebraPtr h = free_nilpotent(2, 2);
  return h;
}

std::vector<Morphism> heisenberg_projections(const AlgebraPtr& alg) {
  static std::mutex mu;
  static std::map<std::string, std::vector<Morphism>> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(alg->id());
    if (it != cache.end() && it->second.empty() == false && it->second.front().source().get() == alg.get())
      return it->second;
  }
  std::vector<Morphism> out;
  const auto prims = alg->primitive_words();
  auto labels_for = [&](int gx, int gy) {
    std::vector<std::string> labels(prims.size());
    for (std::size_t p = 0; p < prims.size(); ++p) {
      if (prims[p] == gx) labels[p] = "X";
      else if (prims[p] == gy) labels[p] = "Y";
    }
    return labels;
  };
  if (alg->step() >= 2) {
    if (alg->kind() == AlgebraKind::Free) {
      for (int i = 0; i < alg->rank(); ++i)
        for (int j = i + 1; j < alg->rank(); ++j) out.push_back(morphism_from_labels(alg, heisenberg(), labels_for(i, j)));
    } else if (alg->kind() == AlgebraKind::Amalgam) {
      for (int k = 2; k <= alg->rank() - 1; ++k)
        out.push_back(morphism_from_labels(alg, heisenberg(), labels_for(0, alg->find_label("Y" + std::to_string(k)))));
    }
  }
  std::lock_guard<std::mutex> lock(mu);
  cache[alg->id()] = out;
  return out;
}

Rational heisenberg_lower_bound(const Rational& a, const Rational& b, const Rational& c) {
  Rational r2 = a * a + b * b;
  Rational abelian = sqrt_bounds(r2).lo;
  if (is_zero(c)) return abelian;
  const double r = std::sqrt(r2.get_d());
  const double area = std::abs(c.get_d());
  double length;
  if (r == 0) {
    length = std::sqrt(4 * std::numbers::pi * area);
  } else {
    // Arc over a chord of length r bounding the given area; theta is half the central angle.
    auto f = [&](double t) {
      double s = std::sin(t);
      return r * r * (t - s * std::cos(t)) / (4 * s * s) - area;
    };
    double lo = 0, hi = std::numbers::pi;
    for (int it = 0; it < 200; ++it) {
      double mid = 0.5 * (lo + hi);
      if (mid <= 0 || mid >= std::numbers::pi) break;
      if (f(mid) < 0) lo = mid;
      else hi = mid;
    }
    double theta = lo;  // lower side of the bracket keeps the length an underestimate
    length = theta <= 0 ? r : r * theta / std::sin(theta);
  }
  double margin = length * (1 - 1e-9) - 1e-300;
  if (!(margin > 0) || !std::isfinite(margin)) return abelian;
  Rational iso = from_double(margin);
  return iso > abelian ? iso : abelian;
}

Rational cc_lower_bound(const GroupElement& x, std::vector<Certificate>* certificates) {
  const auto& alg = *x.algebra;
  Rational sq = 0;
  for (int k = 0; k < alg.first_layer_dim(); ++k) sq += x.coords[static_cast<std::size_t>(k)] * x.coords[static_cast<std::size_t>(k)];
  Rational best = sqrt_bounds(sq).lo;
  if (certificates)
    certificates->push_back({"abelianization", "l2 norm of the first-layer coordinates", best});
  for (const auto& pi : heisenberg_projections(x.algebra)) {
    GroupElement p = apply(pi, x);
    Rational v = heisenberg_lower_bound(p.coords[0], p.coords[1], p.coords[2]);
    if (certificates) {
      std::string labels;
      for (const auto& img : pi.generator_images()) {
        int k = -1;
        for (int t = 0; t < 2; ++t)
          if (!is_zero(img[static_cast<std::size_t>(t)])) k = t;
        labels += (labels.empty() ? "" : ",") + std::string(k == 0 ? "X" : (k == 1 ? "Y" : "0"));
      }
      certificates->push_back({"heisenberg-isoperimetric",
                               "projection onto free:2:2 with generator images (" + labels +
                                   "), arc bound with relative margin 1e-9",
                               v});
    }
    if (v > best) best = v;
  }
  return best;
}

DistanceBracket cc_distance(const GroupElement& x, const SearchBudget& budget, const std::vector<HorizontalPath>& seeds) {
  DistanceBracket b;
  b.lower = cc_lower_bound(x, &b.certificates);
  b.witness = cc_upper_bound(x, budget, seeds, &b.upper_source);
  b.upper = dyadic_ceil(b.witness.length().hi);
  if (b.lower > b.upper) fail(ErrorKind::NoCertifiedPath, "lower bound exceeds the witness length");
  return b;
}

// ---- maps --------------------------------------------------------------------------

std::string MapDescriptor::id() const {
  switch (kind) {
    case MapKind::Identity: return "identity";
    case MapKind::LeftTranslation: return "left-translation";
    case MapKind::RightTranslation: return "right-translation";
    case MapKind::Inverse: return "inverse";
    case MapKind::Dilation: return "dilation:" + to_string(lambda);
    case MapKind::Morphism: return "morphism:" + morphism->source()->id() + "->" + morphism->target()->id();
  }
  return "identity";
}

GroupElement MapDescriptor::apply(const GroupElement& x) const {
  switch (kind) {
    case MapKind::Identity: return x;
    case MapKind::LeftTranslation: return mul(*element, x);
    case MapKind::RightTranslation: return mul(x, *element);
    case MapKind::Inverse: return inverse(x);
    case MapKind::Dilation: return dilate(lambda, x);
    case MapKind::Morphism: return carnot::apply(*morphism, x);
  }
  return x;
}

namespace {

std::vector<double> to_doubles(const std::vector<Rational>& v) {
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& q : v) out.push_back(q.get_d());
  return out;
}

std::vector<double> bch_d(const LieAlgebra& alg, const std::vector<double>& a, const std::vector<double>& b) {
  return bch_product<double>(alg, a, b);
}

}  // namespace

std::vector<double> MapDescriptor::apply_approx(const LieAlgebra& alg, const std::vector<double>& x) const {
  switch (kind) {
    case MapKind::Identity: return x;
    case MapKind::LeftTranslation: return bch_d(alg, to_doubles(element->coords), x);
    case MapKind::RightTranslation: return bch_d(alg, x, to_doubles(element->coords));
    case MapKind::Inverse: {
      auto r = x;
      for (auto& v : r) v = -v;
      return r;
    }
    case MapKind::Dilation: {
      auto r = x;
      double l = lambda.get_d();
      for (int i = 0; i < alg.dim(); ++i) r[static_cast<std::size_t>(i)] *= std::pow(l, alg.degree(i));
      return r;
    }
    case MapKind::Morphism: {
      std::vector<double> r(static_cast<std::size_t>(morphism->target_dim()));
      for (int c = 0; c < morphism->source_dim(); ++c)
        for (int t = 0; t < morphism->target_dim(); ++t) r[static_cast<std::size_t>(t)] += morphism->entry(t, c).get_d() * x[static_cast<std::size_t>(c)];
      return r;
    }
  }
  return x;
}

ModulusEstimate modulus_probe(const MapDescriptor& map, const GroupElement& base, double eps, const ProbeBudget& budget) {
  if (!(eps > 0)) fail(ErrorKind::Domain, "modulus probe needs eps > 0");
  const LieAlgebra& alg = *base.algebra;
  const LieAlgebra& target = map.kind == MapKind::Morphism ? *map.morphism->target() : alg;
  ModulusEstimate est;
  est.map_id = map.id();
  est.base = base;
  est.epsilon = eps;
  est.samples = budget.samples;
  const auto base_d = to_doubles(base.coords);
  auto image_base = map.apply_approx(alg, base_d);
  for (auto& v : image_base) v = -v;  // inverse of the image
  const std::size_t n = static_cast<std::size_t>(alg.dim());
  double omega = std::numeric_limits<double>::infinity();
  double max_ratio = 0;
  std::vector<double> u(n), scaled(n);
  for (int s = 0; s < budget.samples; ++s) {
    Rng rng = Rng::stream(budget.seed, static_cast<std::uint64_t>(s));
    for (auto& c : u) c = rng.uniform(-1.0, 1.0);
    u[static_cast<std::size_t>(rng.below(n))] = rng.coin() ? 1.0 : -1.0;
    auto gap = [&](double rho) {
      for (std::size_t i = 0; i < n; ++i) scaled[i] = u[i] * std::pow(rho, alg.degree(static_cast<int>(i)));
      auto moved = map.apply_approx(alg, bch_d(alg, base_d, scaled));
      return quasi_norm_approx(target, bch_d(target, image_base, moved));
    };
    double prev = 0, rho = budget.rho_min;
    bool failed = false;
    while (rho <= budget.rho_max) {
      if (rho >= omega) break;  // cannot lower the running minimum any further
      if (gap(rho) >= eps) {
        failed = true;
        break;
      }
      prev = rho;
      rho *= 2;
    }
    if (!failed) continue;
    double lo = prev, hi = rho;
    for (int it = 0; it < budget.bisection_steps && lo > 0; ++it) {
      double mid = 0.5 * (lo + hi);
      if (gap(mid) >= eps) hi = mid;
      else lo = mid;
    }
    if (hi < omega) {
      omega = hi;
      max_ratio = std::max(max_ratio, gap(hi) / hi);
    }
  }
  est.unbounded = !std::isfinite(omega);
  est.omega = est.unbounded ? 0 : omega;
  est.max_ratio = max_ratio;
  return est;
}

// ---- Lipschitz ------------------------------------------------------------------------

bool is_positive_semidefinite(std::vector<std::vector<Rational>> m) {
  const std::size_t n = m.size();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = n;
    for (std::size_t i = k; i < n; ++i)
      if (sgn(m[i][i]) > 0) {
        piv = i;
        break;
      }
    if (piv == n) {
      for (std::size_t i = k; i < n; ++i)
        for (std::size_t j = k; j < n; ++j)
          if (!is_zero(m[i][j])) return false;
      return true;
    }
    if (piv != k) {
      std::swap(m[piv], m[k]);
      for (auto& row : m) std::swap(row[piv], row[k]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      if (is_zero(m[i][k])) continue;
      Rational f = m[i][k] / m[k][k];
      for (std::size_t j = k; j < n; ++j) m[i][j] -= f * m[k][j];
    }
    for (std::size_t j = k + 1; j < n; ++j) m[k][j] = 0;
    for (std::size_t i = k + 1; i < n; ++i) m[i][k] = 0;
  }
  return true;
}

bool first_layer_contraction(const Morphism& phi) {
  const int rs = phi.source()->first_layer_dim(), rt = phi.target()->first_layer_dim();
  std::vector<std::vector<Rational>> m(static_cast<std::size_t>(rs), std::vector<Rational>(static_cast<std::size_t>(rs)));
  for (int i = 0; i < rs; ++i)
    for (int j = 0; j < rs; ++j) {
      Rational s = i == j ? 1 : 0;
      for (int r = 0; r < rt; ++r) s -= phi.entry(r, i) * phi.entry(r, j);
      m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = s;
    }
  return is_positive_semidefinite(std::move(m));
}

LipschitzEstimate lipschitz_estimate(const Morphism& phi, const std::string& backend, int samples,
                                     unsigned long long seed) {
  LipschitzEstimate est;
  est.backend = backend;
  if (backend == "box") {
    RootValue best;
    for (int r = 0; r < phi.target_dim(); ++r) {
      Rational row = 0;
      for (int c = 0; c < phi.source_dim(); ++c) row += abs(phi.entry(r, c));
      if (is_zero(row)) continue;
      RootValue v{row, static_cast<unsigned>(phi.target()->degree(r))};
      if (best < v) best = v;
    }
    est.exact = best;
    est.estimate = best.approx();
    est.certified = true;
    est.note = "exact supremum over the unit box shell";
    return est;
  }
  if (backend != "cc") fail(ErrorKind::Validation, "unknown backend '" + backend + "' (expected box or cc)");
  const int rs = phi.source()->first_layer_dim(), rt = phi.target()->first_layer_dim();
  double best = 0;
  for (int s = 0; s < samples; ++s) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(s));
    std::vector<double> v(static_cast<std::size_t>(rs));
    double nv = 0;
    for (auto& c : v) {
      c = rng.uniform(-1.0, 1.0);
      nv += c * c;
    }
    if (nv == 0) continue;
    double na = 0;
    for (int r = 0; r < rt; ++r) {
      double a = 0;
      for (int c = 0; c < rs; ++c) a += phi.entry(r, c).get_d() * v[static_cast<std::size_t>(c)];
      na += a * a;
    }
    best = std::max(best, std::sqrt(na / nv));
  }
  est.estimate = best;
  est.at_most_one = first_layer_contraction(phi);
  est.certified = false;
  est.note = est.at_most_one ? "sampled ratio; first-layer operator norm <= 1 proven exactly"
                             : "sampled ratio; first-layer operator norm exceeds 1";
  return est;
}

}  // namespace carnot
