#include "carnot/metrics.hpp"
#include "carnot/random.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace carnot {

namespace {

// Rational with about 24 significant bits, positive for positive input.
Rational nice_positive(double v) {
  if (!(v > 0) || !std::isfinite(v)) return Rational(1);
  int e = 0;
  double m = std::frexp(v, &e);
  Rational q(static_cast<long>(std::llround(std::ldexp(m, 24))));
  if (e - 24 >= 0) q *= Rational(mpz_class(1) << static_cast<unsigned>(e - 24));
  else q /= Rational(mpz_class(1) << static_cast<unsigned>(24 - e));
  return q;
}

void leaf_count(const LieAlgebra& alg, int w, int& count) {
  const BasisWord& word = alg.word(w);
  if (word.left < 0) {
    ++count;
    return;
  }
  leaf_count(alg, word.left, count);
  leaf_count(alg, word.right, count);
}

// Path whose endpoint has logarithm (product of params) e_w + terms of higher degree.
HorizontalPath word_path(const AlgebraPtr& alg, int w, const std::vector<Rational>& params, std::size_t& next) {
  const BasisWord& word = alg->word(w);
  if (word.left < 0) {
    if (word.degree != 1)
      fail(ErrorKind::NoCertifiedPath, "basis word " + word.label + " is not generated by the first layer");
    return HorizontalPath::axis(alg, w, params.at(next++));
  }
  Combination c = alg->structure(word.left, word.right);
  if (c.size() != 1 || c[0].first != w || c[0].second != 1)
    fail(ErrorKind::NoCertifiedPath, "basis word " + word.label + " is not the bracket of its factors");
  HorizontalPath a = word_path(alg, word.left, params, next);
  HorizontalPath b = word_path(alg, word.right, params, next);
  return a.then(b).then(a.reversed()).then(b.reversed());
}

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct Problem {
  const LieAlgebra* alg;
  int r;       // first-layer dimension
  int n;       // algebra dimension
  int segs;    // segment count
  std::vector<double> target;

  std::vector<double> exp_vec(const double* v) const {
    std::vector<double> e(static_cast<std::size_t>(n), 0.0);
    for (int k = 0; k < r; ++k) e[static_cast<std::size_t>(k)] = v[k];
    return e;
  }
  std::vector<double> mul(const std::vector<double>& a, const std::vector<double>& b) const {
    return bch_product<double>(*alg, a, b);
  }
  std::vector<double> endpoint(const Vec& v) const {
    std::vector<double> z(static_cast<std::size_t>(n), 0.0);
    for (int j = 0; j < segs; ++j) z = mul(z, exp_vec(v.data() + j * r));
    return z;
  }
  Vec residual(const Vec& v) const {
    auto z = endpoint(v);
    Vec res(n);
    for (int i = 0; i < n; ++i) res(i) = z[static_cast<std::size_t>(i)] - target[static_cast<std::size_t>(i)];
    return res;
  }
  Mat jacobian(const Vec& v) const {
    std::vector<std::vector<double>> prefix(static_cast<std::size_t>(segs + 1)), suffix(static_cast<std::size_t>(segs + 1));
    prefix[0].assign(static_cast<std::size_t>(n), 0.0);
    for (int j = 0; j < segs; ++j) prefix[static_cast<std::size_t>(j + 1)] = mul(prefix[static_cast<std::size_t>(j)], exp_vec(v.data() + j * r));
    suffix[static_cast<std::size_t>(segs)].assign(static_cast<std::size_t>(n), 0.0);
    for (int j = segs - 1; j >= 0; --j) suffix[static_cast<std::size_t>(j)] = mul(exp_vec(v.data() + j * r), suffix[static_cast<std::size_t>(j + 1)]);
    Mat J(n, segs * r);
    for (int j = 0; j < segs; ++j)
      for (int k = 0; k < r; ++k) {
        const double h = 1e-6 * std::max(1.0, std::abs(v(j * r + k)));
        std::vector<double> plus(v.data() + j * r, v.data() + j * r + r), minus = plus;
        plus[static_cast<std::size_t>(k)] += h;
        minus[static_cast<std::size_t>(k)] -= h;
        auto fp = mul(mul(prefix[static_cast<std::size_t>(j)], exp_vec(plus.data())), suffix[static_cast<std::size_t>(j + 1)]);
        auto fm = mul(mul(prefix[static_cast<std::size_t>(j)], exp_vec(minus.data())), suffix[static_cast<std::size_t>(j + 1)]);
        for (int i = 0; i < n; ++i) J(i, j * r + k) = (fp[static_cast<std::size_t>(i)] - fm[static_cast<std::size_t>(i)]) / (2 * h);
      }
    return J;
  }
  double length(const Vec& v, double eta) const {
    double L = 0;
    for (int j = 0; j < segs; ++j) L += std::sqrt(v.segment(j * r, r).squaredNorm() + eta * eta);
    return L;
  }
};

Vec min_norm_solve(const Mat& J, const Vec& rhs) { return J.completeOrthogonalDecomposition().solve(rhs); }

// Gauss-Newton restoration of the endpoint constraint.
bool restore(const Problem& pb, Vec& v, double tol) {
  Vec res = pb.residual(v);
  double nr = res.norm();
  for (int it = 0; it < 40; ++it) {
    if (nr < tol) return true;
    Mat J = pb.jacobian(v);
    Vec step = min_norm_solve(J, res);
    double alpha = 1;
    bool improved = false;
    for (int ls = 0; ls < 12; ++ls) {
      Vec cand = v - alpha * step;
      Vec cres = pb.residual(cand);
      if (cres.norm() < nr) {
        v = cand;
        res = cres;
        nr = cres.norm();
        improved = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!improved) return nr < tol;
  }
  return nr < tol;
}

// Shortens a feasible path by projected gradient steps on the smoothed length.
bool optimize(const Problem& pb, Vec& v, int iterations, double scale) {
  const double tol = 1e-11 * std::max(1.0, scale);
  const double eta = 1e-7 * std::max(1.0, scale);
  if (!restore(pb, v, tol)) return false;
  double step = 0.1 * std::max(scale, 1e-3);
  double L = pb.length(v, eta);
  for (int it = 0; it < iterations; ++it) {
    Vec g(v.size());
    for (int j = 0; j < pb.segs; ++j) {
      Vec seg = v.segment(j * pb.r, pb.r);
      g.segment(j * pb.r, pb.r) = seg / std::sqrt(seg.squaredNorm() + eta * eta);
    }
    Mat J = pb.jacobian(v);
    Vec p = g - min_norm_solve(J, J * g);
    double pn = p.norm();
    if (pn < 1e-10) break;
    bool accepted = false;
    while (step > 1e-9 * std::max(scale, 1e-3)) {
      Vec cand = v - (step / pn) * p;
      if (restore(pb, cand, tol)) {
        double Lc = pb.length(cand, eta);
        if (Lc < L - 1e-13) {
          v = cand;
          L = Lc;
          accepted = true;
          step *= 1.5;
          break;
        }
      }
      step *= 0.25;
    }
    if (!accepted) break;
  }
  return restore(pb, v, tol);
}

// Unit direction sigma * S(m) from inverse stereographic coordinates.
template <class T>
std::vector<T> unit_direction(const T* m, int r, int sigma) {
  std::vector<T> u(static_cast<std::size_t>(r));
  T sq = 0;
  for (int k = 0; k + 1 < r; ++k) sq += m[k] * m[k];
  T den = T(1) + sq;
  u[0] = T(sigma) * (T(1) - sq) / den;
  for (int k = 1; k < r; ++k) u[static_cast<std::size_t>(k)] = T(sigma) * T(2) * m[k - 1] / den;
  return u;
}

struct Chart {
  int r;
  int segs;
  std::vector<int> sigma;
};

// theta = (t_j, m_j) per segment.
template <class T>
std::vector<T> chart_endpoint(const LieAlgebra& alg, const Chart& ch, const std::vector<T>& theta) {
  const std::size_t n = static_cast<std::size_t>(alg.dim());
  std::vector<T> z(n, T(0));
  for (int j = 0; j < ch.segs; ++j) {
    const T* p = theta.data() + j * ch.r;
    auto u = unit_direction<T>(p + 1, ch.r, ch.sigma[static_cast<std::size_t>(j)]);
    std::vector<T> e(n, T(0));
    for (int k = 0; k < ch.r; ++k) e[static_cast<std::size_t>(k)] = p[0] * u[static_cast<std::size_t>(k)];
    z = bch_product<T>(alg, z, e);
  }
  return z;
}

Rational snap(const HighFloat& x) {
  static const HighFloat scale = boost::multiprecision::pow(HighFloat(2), 200);
  HighFloat y = boost::multiprecision::round(x * scale);
  Rational q = from_high(y);
  return q / Rational(mpz_class(1) << 200);
}

// Numeric solution -> exact path: high-precision Newton in the stereographic chart, snapping, repair.
std::optional<HorizontalPath> certify(const GroupElement& x, const Problem& pb, const Vec& v, std::size_t max_segments) {
  const int r = pb.r;
  Chart ch{r, 0, {}};
  std::vector<double> theta_d;
  double scale = 0;
  for (int j = 0; j < pb.segs; ++j) scale += v.segment(j * r, r).norm();
  for (int j = 0; j < pb.segs; ++j) {
    Vec seg = v.segment(j * r, r);
    double t = seg.norm();
    if (t <= 1e-12 * std::max(1.0, scale)) continue;
    Vec u = seg / t;
    int sigma = u(0) >= 0 ? 1 : -1;
    u *= sigma;
    theta_d.push_back(t);
    for (int k = 1; k < r; ++k) theta_d.push_back(u(k) / (1 + u(0)));
    ch.sigma.push_back(sigma);
    ++ch.segs;
  }
  if (ch.segs == 0) return std::nullopt;
  const LieAlgebra& alg = *x.algebra;
  const int n = alg.dim();
  const int nv = ch.segs * r;
  // Fixed double Jacobian in the chart.
  Mat J(n, nv);
  for (int c = 0; c < nv; ++c) {
    const double h = 1e-6 * std::max(1.0, std::abs(theta_d[static_cast<std::size_t>(c)]));
    auto plus = theta_d, minus = theta_d;
    plus[static_cast<std::size_t>(c)] += h;
    minus[static_cast<std::size_t>(c)] -= h;
    auto fp = chart_endpoint<double>(alg, ch, plus), fm = chart_endpoint<double>(alg, ch, minus);
    for (int i = 0; i < n; ++i) J(i, c) = (fp[static_cast<std::size_t>(i)] - fm[static_cast<std::size_t>(i)]) / (2 * h);
  }
  auto cod = J.completeOrthogonalDecomposition();
  std::vector<HighFloat> theta(theta_d.begin(), theta_d.end());
  std::vector<HighFloat> target;
  for (const auto& q : x.coords) target.push_back(to_high(q));
  const HighFloat goal("1e-85");
  bool converged = false;
  HighFloat last_norm = -1;
  for (int it = 0; it < 40; ++it) {
    auto z = chart_endpoint<HighFloat>(alg, ch, theta);
    Vec res(n);
    HighFloat worst = 0;
    for (int i = 0; i < n; ++i) {
      HighFloat d = z[static_cast<std::size_t>(i)] - target[static_cast<std::size_t>(i)];
      worst = std::max(worst, HighFloat(abs(d)));
      res(i) = static_cast<double>(d);
    }
    if (worst < goal) {
      converged = true;
      break;
    }
    if (last_norm >= 0 && worst > last_norm * HighFloat(0.5)) break;  // not contracting
    last_norm = worst;
    Vec step = cod.solve(res);
    for (int c = 0; c < nv; ++c) theta[static_cast<std::size_t>(c)] -= HighFloat(step(c));
  }
  if (!converged) return std::nullopt;
  HorizontalPath path = HorizontalPath::empty(x.algebra);
  for (int j = 0; j < ch.segs; ++j) {
    std::vector<Rational> m;
    for (int k = 1; k < r; ++k) m.push_back(snap(theta[static_cast<std::size_t>(j * r + k)]));
    Rational t = snap(theta[static_cast<std::size_t>(j * r)]);
    auto u = unit_direction<Rational>(m.data(), r, ch.sigma[static_cast<std::size_t>(j)]);
    if (sgn(t) < 0) {
      t = -t;
      for (auto& c : u) c = -c;
    }
    path.segments.push_back({std::move(u), t});
  }
  GroupElement residual = mul(inverse(path.endpoint()), x);
  if (!residual.is_identity()) path = path.then(constructive_path(residual, max_segments));
  if (path.segments.size() > max_segments) return std::nullopt;
  if (path.endpoint() != x) return std::nullopt;
  return path;
}

}  // namespace

HorizontalPath constructive_path(const GroupElement& x, std::size_t max_segments) {
  const AlgebraPtr& alg = x.algebra;
  HorizontalPath path = HorizontalPath::empty(alg);
  const int r = alg->first_layer_dim();
  for (int g = 0; g < r; ++g) path = path.then(HorizontalPath::axis(alg, g, x.coords[static_cast<std::size_t>(g)]));
  GroupElement cur = path.endpoint();
  for (int d = 2; d <= alg->step(); ++d) {
    GroupElement residual = mul(inverse(cur), x);
    auto [lo, hi] = alg->degree_range(d);
    for (int w = lo; w < hi; ++w) {
      const Rational& c = residual.coords[static_cast<std::size_t>(w)];
      if (is_zero(c)) continue;
      int leaves = 0;
      leaf_count(*alg, w, leaves);
      Rational s = nice_positive(approx_root(c, static_cast<unsigned>(leaves)).get_d());
      std::vector<Rational> params(static_cast<std::size_t>(leaves), s);
      Rational rest = 1;
      for (int k = 0; k + 1 < leaves; ++k) rest *= s;
      params.back() = c / rest;
      std::size_t next = 0;
      HorizontalPath piece = word_path(alg, w, params, next);
      cur = mul(cur, piece.endpoint());
      path = path.then(piece);
      if (path.segments.size() > max_segments)
        fail(ErrorKind::NoCertifiedPath, "constructive path exceeds the segment cap of " + std::to_string(max_segments));
    }
  }
  if (cur != x) fail(ErrorKind::NoCertifiedPath, "no certified path found: element is not reachable by horizontal paths in " + alg->id());
  return path.simplified();
}

HorizontalPath cc_upper_bound(const GroupElement& x, const SearchBudget& budget, const std::vector<HorizontalPath>& seeds,
                              std::string* source) {
  const AlgebraPtr& alg = x.algebra;
  std::vector<std::pair<HorizontalPath, std::string>> candidates;
  if (x.is_identity()) {
    if (source) *source = "identity";
    return HorizontalPath::empty(alg);
  }
  const int r = alg->first_layer_dim();
  // Straight segment when the element is horizontal.
  if (first_layer_membership(x)) {
    Rational sq = 0;
    for (int k = 0; k < r; ++k) sq += x.coords[static_cast<std::size_t>(k)] * x.coords[static_cast<std::size_t>(k)];
    Interval nb = sqrt_bounds(sq);
    std::vector<Rational> dir(x.coords.begin(), x.coords.begin() + r);
    if (nb.exact()) {
      for (auto& c : dir) c /= nb.lo;
      candidates.push_back({HorizontalPath{alg, {{dir, nb.lo}}}, "segment"});
    } else {
      candidates.push_back({HorizontalPath{alg, {{dir, Rational(1)}}}, "segment"});
    }
  }
  candidates.push_back({constructive_path(x, budget.max_path_segments), "constructive"});
  for (const auto& seed : seeds) {
    require_same_algebra(seed.algebra, alg);
    GroupElement residual = mul(inverse(seed.endpoint()), x);
    HorizontalPath p = seed;
    if (!residual.is_identity()) p = p.then(constructive_path(residual, budget.max_path_segments));
    candidates.push_back({p.simplified(), "seed"});
  }
  if (r >= 1 && alg->step() >= 2 && budget.restarts > 0 && budget.segments > 0) {
    Problem pb{alg.get(), r, alg->dim(), budget.segments, {}};
    for (const auto& q : x.coords) pb.target.push_back(q.get_d());
    const double scale = quasi_norm(x).approx();
    for (int rs = 0; rs < budget.restarts; ++rs) {
      Rng rng = Rng::stream(budget.seed, static_cast<std::uint64_t>(rs));
      Vec v(pb.segs * r);
      for (int i = 0; i < v.size(); ++i) v(i) = rng.uniform(-1.0, 1.0) * scale * 2.0 / pb.segs;
      if (!optimize(pb, v, budget.iterations, scale)) continue;
      try {
        if (auto p = certify(x, pb, v, budget.max_path_segments)) candidates.push_back({p->simplified(), "search"});
      } catch (const Error&) {
      }
    }
    // Also refine short seeds (resampled to the segment budget).
    for (const auto& seed : seeds) {
      if (static_cast<int>(seed.segments.size()) > pb.segs) continue;
      Vec v = Vec::Zero(pb.segs * r);
      int parts = pb.segs / static_cast<int>(std::max<std::size_t>(1, seed.segments.size()));
      int j = 0;
      for (const auto& s : seed.segments) {
        for (int p = 0; p < parts; ++p, ++j)
          for (int k = 0; k < r; ++k) v(j * r + k) = Rational(s.duration * s.direction[static_cast<std::size_t>(k)]).get_d() / parts;
      }
      if (!optimize(pb, v, budget.iterations, scale)) continue;
      try {
        if (auto p = certify(x, pb, v, budget.max_path_segments)) candidates.push_back({p->simplified(), "search-from-seed"});
      } catch (const Error&) {
      }
    }
  }
  std::size_t best = 0;
  Rational best_len = candidates[0].first.length().hi;
  for (std::size_t k = 1; k < candidates.size(); ++k) {
    Rational len = candidates[k].first.length().hi;
    if (len < best_len) {
      best = k;
      best_len = len;
    }
  }
  if (candidates[best].first.endpoint() != x) fail(ErrorKind::NoCertifiedPath, "witness endpoint mismatch");
  if (source) *source = candidates[best].second;
  return candidates[best].first;
}

}  // namespace carnot
