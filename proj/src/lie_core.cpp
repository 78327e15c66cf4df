#include "carnot/lie_core.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace carnot {

namespace {

void add_scaled(Combination& acc, const Combination& c, const Rational& s) {
  if (is_zero(s)) return;
  Combination out;
  out.reserve(acc.size() + c.size());
  std::size_t i = 0, j = 0;
  while (i < acc.size() || j < c.size()) {
    if (j == c.size() || (i < acc.size() && acc[i].first < c[j].first)) {
      out.push_back(acc[i++]);
    } else if (i == acc.size() || c[j].first < acc[i].first) {
      out.emplace_back(c[j].first, s * c[j].second);
      ++j;
    } else {
      Rational v = acc[i].second + s * c[j].second;
      if (!is_zero(v)) out.emplace_back(acc[i].first, v);
      ++i;
      ++j;
    }
  }
  acc = std::move(out);
}

Combination negated(const Combination& c) {
  Combination out = c;
  for (auto& t : out) t.second = -t.second;
  return out;
}

std::string generator_label(int rank, int g) {
  if (rank == 2) return g == 0 ? "X" : "Y";
  return "X" + std::to_string(g + 1);
}

long long checked_pow(long long base, int e) {
  long long r = 1;
  for (int i = 0; i < e; ++i) {
    if (r > (1LL << 52) / std::max(1LL, base)) return 1LL << 52;
    r *= base;
  }
  return r;
}

int mobius(int n) {
  int result = 1;
  for (int p = 2; p * p <= n; ++p) {
    if (n % p == 0) {
      n /= p;
      if (n % p == 0) return 0;
      result = -result;
    }
  }
  if (n > 1) result = -result;
  return result;
}

void check_cap(long long dim, const SizeCap& cap, const std::string& what) {
  if (dim > static_cast<long long>(cap.max_dimension)) {
    std::ostringstream os;
    os << what << " has dimension " << dim << ", above the size cap max_dimension=" << cap.max_dimension;
    fail(ErrorKind::Resource, os.str());
  }
}

// Builds Hall words and rewrites brackets of basis words into the basis.
class HallBuilder {
 public:
  HallBuilder(int rank, int step, const SizeCap& cap) : rank_(rank), step_(step) {
    if (rank < 1 || step < 1) fail(ErrorKind::Domain, "hall_basis needs rank >= 1 and step >= 1");
    long long total = 0;
    for (int d = 1; d <= step; ++d) total += witt_dimension(rank, d);
    check_cap(total, cap, "free(" + std::to_string(rank) + "," + std::to_string(step) + ")");
    for (int g = 0; g < rank; ++g) {
      BasisWord w;
      w.index = g;
      w.degree = 1;
      w.label = generator_label(rank, g);
      words_.push_back(w);
    }
    for (int d = 2; d <= step; ++d) {
      const int n = static_cast<int>(words_.size());
      for (int u = 0; u < n; ++u) {
        for (int v = u + 1; v < n; ++v) {
          if (words_[u].degree + words_[v].degree != d) continue;
          if (words_[v].left >= 0 && words_[v].left > u) continue;
          BasisWord w;
          w.index = static_cast<int>(words_.size());
          w.degree = d;
          w.left = u;
          w.right = v;
          w.label = "[" + words_[u].label + "," + words_[v].label + "]";
          lookup_[{u, v}] = w.index;
          words_.push_back(std::move(w));
        }
      }
    }
  }

  const std::vector<BasisWord>& words() const { return words_; }

  Combination bracket(int a, int b) {
    if (a == b) return {};
    if (words_[a].degree + words_[b].degree > step_) return {};
    if (a > b) return negated(bracket(b, a));
    auto memo = memo_.find({a, b});
    if (memo != memo_.end()) return memo->second;
    Combination result;
    const BasisWord& wb = words_[b];
    if (wb.left < 0 || wb.left <= a) {
      result = {{lookup_.at({a, b}), Rational(1)}};
    } else {
      // [a,[b1,b2]] = [[a,b1],b2] + [b1,[a,b2]]
      const int b1 = wb.left, b2 = wb.right;
      for (const auto& [k, c] : bracket(a, b1)) add_scaled(result, bracket(k, b2), c);
      for (const auto& [k, c] : bracket(a, b2)) add_scaled(result, bracket(b1, k), c);
    }
    memo_[{a, b}] = result;
    return result;
  }

  std::vector<LieAlgebra::Entry> entries() {
    std::vector<LieAlgebra::Entry> out;
    const int n = static_cast<int>(words_.size());
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        if (words_[i].degree + words_[j].degree > step_) continue;
        Combination c = bracket(i, j);
        if (!c.empty()) out.push_back({i, j, std::move(c)});
      }
    return out;
  }

 private:
  int rank_;
  int step_;
  std::vector<BasisWord> words_;
  std::map<std::pair<int, int>, int> lookup_;
  std::map<std::pair<int, int>, Combination> memo_;
};

}  // namespace

std::string to_string(AlgebraKind kind) {
  switch (kind) {
    case AlgebraKind::Free: return "free";
    case AlgebraKind::Amalgam: return "amalgam";
    case AlgebraKind::Abelian: return "abelian";
    case AlgebraKind::Custom: return "custom";
  }
  return "custom";
}

long long witt_dimension(int rank, int n) {
  if (n < 1 || rank < 1) return 0;
  long long sum = 0;
  for (int d = 1; d <= n; ++d)
    if (n % d == 0) sum += mobius(d) * checked_pow(rank, n / d);
  return sum / n;
}

// ---- LieAlgebra ------------------------------------------------------------

LieAlgebra::LieAlgebra(std::string id, AlgebraKind kind, int rank, int step, std::vector<BasisWord> basis,
                       const std::vector<Entry>& upper_entries)
    : id_(std::move(id)), kind_(kind), rank_(rank), step_(step), basis_(std::move(basis)) {
  const int n = dim();
  for (int i = 1; i < n; ++i)
    if (basis_[i].degree < basis_[i - 1].degree) fail(ErrorKind::Validation, "basis must be sorted by degree");
  rows_q_.assign(static_cast<std::size_t>(n), {});
  for (const auto& e : upper_entries) {
    if (e.i == e.j || e.i < 0 || e.j < 0 || e.i >= n || e.j >= n)
      fail(ErrorKind::Validation, "structure entry out of range");
    if (e.value.empty()) continue;
    const int i = std::min(e.i, e.j), j = std::max(e.i, e.j);
    const Combination v = e.i < e.j ? e.value : negated(e.value);
    auto to_terms = [](const Combination& c) {
      std::vector<BracketTerm<Rational>> t;
      for (const auto& [k, q] : c) t.push_back({k, q});
      return t;
    };
    rows_q_[i].push_back({j, to_terms(v)});
    rows_q_[j].push_back({i, to_terms(negated(v))});
  }
  index_rows();
}

AlgebraPtr LieAlgebra::raw(std::string id, AlgebraKind kind, int rank, int step, std::vector<BasisWord> basis,
                           const std::vector<Entry>& all_entries) {
  auto alg = std::shared_ptr<LieAlgebra>(new LieAlgebra());
  alg->id_ = std::move(id);
  alg->kind_ = kind;
  alg->rank_ = rank;
  alg->step_ = step;
  alg->basis_ = std::move(basis);
  alg->rows_q_.assign(alg->basis_.size(), {});
  for (const auto& e : all_entries) {
    if (e.value.empty()) continue;
    std::vector<BracketTerm<Rational>> t;
    for (const auto& [k, q] : e.value) t.push_back({k, q});
    alg->rows_q_.at(static_cast<std::size_t>(e.i)).push_back({e.j, std::move(t)});
  }
  alg->index_rows();
  return alg;
}

void LieAlgebra::index_rows() {
  for (auto& row : rows_q_) {
    std::sort(row.begin(), row.end(), [](const auto& a, const auto& b) { return a.partner < b.partner; });
    for (auto& entry : row)
      std::sort(entry.terms.begin(), entry.terms.end(), [](const auto& a, const auto& b) { return a.index < b.index; });
  }
}

std::pair<int, int> LieAlgebra::degree_range(int d) const {
  auto lo = std::lower_bound(basis_.begin(), basis_.end(), d,
                             [](const BasisWord& w, int deg) { return w.degree < deg; });
  auto hi = std::upper_bound(basis_.begin(), basis_.end(), d,
                             [](int deg, const BasisWord& w) { return deg < w.degree; });
  return {static_cast<int>(lo - basis_.begin()), static_cast<int>(hi - basis_.begin())};
}

std::vector<int> LieAlgebra::dims_per_degree() const {
  std::vector<int> out;
  for (int d = 1; d <= step_; ++d) {
    auto [a, b] = degree_range(d);
    out.push_back(b - a);
  }
  return out;
}

std::vector<int> LieAlgebra::primitive_words() const {
  std::vector<int> out;
  for (const auto& w : basis_)
    if (w.left < 0) out.push_back(w.index);
  return out;
}

Combination LieAlgebra::structure(int i, int j) const {
  Combination out;
  const auto& row = rows_q_.at(static_cast<std::size_t>(i));
  auto it = std::lower_bound(row.begin(), row.end(), j, [](const auto& e, int p) { return e.partner < p; });
  if (it == row.end() || it->partner != j) return out;
  for (const auto& t : it->terms) out.emplace_back(t.index, t.coeff);
  return out;
}

std::vector<LieAlgebra::Entry> LieAlgebra::upper_entries() const {
  std::vector<Entry> out;
  for (int i = 0; i < dim(); ++i)
    for (const auto& e : rows_q_[static_cast<std::size_t>(i)]) {
      if (e.partner <= i) continue;
      Combination c;
      for (const auto& t : e.terms) c.emplace_back(t.index, t.coeff);
      out.push_back({i, e.partner, std::move(c)});
    }
  return out;
}

template <>
const BracketRows<Rational>& LieAlgebra::rows<Rational>() const {
  return rows_q_;
}

template <>
const BracketRows<double>& LieAlgebra::rows<double>() const {
  std::call_once(double_once_, [this] {
    rows_d_.resize(rows_q_.size());
    for (std::size_t i = 0; i < rows_q_.size(); ++i)
      for (const auto& e : rows_q_[i]) {
        BracketRowEntry<double> d{e.partner, {}};
        for (const auto& t : e.terms) d.terms.push_back({t.index, t.coeff.get_d()});
        rows_d_[i].push_back(std::move(d));
      }
  });
  return rows_d_;
}

template <>
const BracketRows<HighFloat>& LieAlgebra::rows<HighFloat>() const {
  std::call_once(high_once_, [this] {
    rows_h_.resize(rows_q_.size());
    for (std::size_t i = 0; i < rows_q_.size(); ++i)
      for (const auto& e : rows_q_[i]) {
        BracketRowEntry<HighFloat> h{e.partner, {}};
        for (const auto& t : e.terms) h.terms.push_back({t.index, to_high(t.coeff)});
        rows_h_[i].push_back(std::move(h));
      }
  });
  return rows_h_;
}

int LieAlgebra::find_label(const std::string& label) const {
  for (const auto& w : basis_)
    if (w.label == label) return w.index;
  return -1;
}

// ---- AlgebraElement --------------------------------------------------------

void require_same_algebra(const AlgebraPtr& a, const AlgebraPtr& b) {
  if (!a || !b) fail(ErrorKind::Domain, "element without an algebra");
  if (a != b && a->id() != b->id())
    fail(ErrorKind::Domain, "elements belong to different algebras: " + a->id() + " vs " + b->id());
}

AlgebraElement AlgebraElement::zero(const AlgebraPtr& alg) {
  return {alg, std::vector<Rational>(static_cast<std::size_t>(alg->dim()))};
}

AlgebraElement AlgebraElement::basis_vector(const AlgebraPtr& alg, int i, const Rational& c) {
  AlgebraElement e = zero(alg);
  e.coords.at(static_cast<std::size_t>(i)) = c;
  return e;
}

bool AlgebraElement::is_zero() const {
  return std::all_of(coords.begin(), coords.end(), [](const Rational& q) { return carnot::is_zero(q); });
}

bool AlgebraElement::operator==(const AlgebraElement& other) const {
  return algebra->id() == other.algebra->id() && coords == other.coords;
}

AlgebraElement operator+(const AlgebraElement& a, const AlgebraElement& b) {
  require_same_algebra(a.algebra, b.algebra);
  AlgebraElement r = a;
  for (std::size_t i = 0; i < r.coords.size(); ++i) r.coords[i] += b.coords[i];
  return r;
}

AlgebraElement operator-(const AlgebraElement& a, const AlgebraElement& b) {
  require_same_algebra(a.algebra, b.algebra);
  AlgebraElement r = a;
  for (std::size_t i = 0; i < r.coords.size(); ++i) r.coords[i] -= b.coords[i];
  return r;
}

AlgebraElement operator*(const Rational& c, const AlgebraElement& a) {
  AlgebraElement r = a;
  for (auto& q : r.coords) q *= c;
  return r;
}

AlgebraElement bracket(const AlgebraElement& a, const AlgebraElement& b) {
  require_same_algebra(a.algebra, b.algebra);
  AlgebraElement out = AlgebraElement::zero(a.algebra);
  accumulate_bracket<Rational>(*a.algebra, a.coords, b.coords, out.coords);
  return out;
}

// ---- constructors ------------------------------------------------------------

std::vector<BasisWord> hall_basis(int rank, int step, const SizeCap& cap) {
  return HallBuilder(rank, step, cap).words();
}

AlgebraPtr free_nilpotent(int rank, int step, const SizeCap& cap) {
  HallBuilder builder(rank, step, cap);
  auto entries = builder.entries();
  std::string id = "free:" + std::to_string(rank) + ":" + std::to_string(step);
  return std::make_shared<LieAlgebra>(id, AlgebraKind::Free, rank, step, builder.words(), entries);
}

AlgebraPtr amalgam_algebra(int i, const SizeCap& cap) {
  if (i < 1) fail(ErrorKind::Domain, "amalgam_algebra needs i >= 1");
  long long total = 1;
  for (int k = 1; k <= i; ++k)
    for (int d = 1; d <= k; ++d) total += witt_dimension(2, d) - (d == 1 ? 1 : 0);
  check_cap(total, cap, "amalgam(" + std::to_string(i) + ")");

  // Global order: X, Y1..Yi, then by degree, then by block, then in-block Hall order.
  std::vector<AlgebraPtr> blocks;
  for (int k = 1; k <= i; ++k) blocks.push_back(free_nilpotent(2, k, cap));
  std::vector<std::vector<int>> local_to_global(static_cast<std::size_t>(i));
  std::vector<BasisWord> basis;
  auto push = [&](int block, int local, int degree) {
    BasisWord w;
    w.index = static_cast<int>(basis.size());
    w.degree = degree;
    w.block = block;
    basis.push_back(w);
    local_to_global[static_cast<std::size_t>(block - 1)][static_cast<std::size_t>(local)] = w.index;
    return w.index;
  };
  for (int k = 1; k <= i; ++k) local_to_global[static_cast<std::size_t>(k - 1)].assign(
      static_cast<std::size_t>(blocks[static_cast<std::size_t>(k - 1)]->dim()), -1);
  {
    BasisWord x;
    x.index = 0;
    x.degree = 1;
    x.label = "X";
    basis.push_back(x);
    for (auto& m : local_to_global) m[0] = 0;
  }
  for (int k = 1; k <= i; ++k) push(k, 1, 1);
  for (int d = 2; d <= i; ++d)
    for (int k = d; k <= i; ++k) {
      const auto& blk = *blocks[static_cast<std::size_t>(k - 1)];
      auto [a, b] = blk.degree_range(d);
      for (int l = a; l < b; ++l) push(k, l, d);
    }
  // Factors and labels in global terms.
  for (int k = 1; k <= i; ++k) {
    const auto& blk = *blocks[static_cast<std::size_t>(k - 1)];
    const auto& map = local_to_global[static_cast<std::size_t>(k - 1)];
    for (int l = 1; l < blk.dim(); ++l) {
      BasisWord& w = basis[static_cast<std::size_t>(map[static_cast<std::size_t>(l)])];
      const BasisWord& lw = blk.word(l);
      if (lw.left >= 0) {
        w.left = map[static_cast<std::size_t>(lw.left)];
        w.right = map[static_cast<std::size_t>(lw.right)];
      }
    }
  }
  for (auto& w : basis) {
    if (w.index == 0) continue;
    if (w.left < 0) w.label = "Y" + std::to_string(w.block);
    else w.label = "[" + basis[static_cast<std::size_t>(w.left)].label + "," +
                   basis[static_cast<std::size_t>(w.right)].label + "]";
  }
  std::vector<LieAlgebra::Entry> entries;
  for (int k = 1; k <= i; ++k) {
    const auto& blk = *blocks[static_cast<std::size_t>(k - 1)];
    const auto& map = local_to_global[static_cast<std::size_t>(k - 1)];
    for (const auto& e : blk.upper_entries()) {
      Combination c;
      for (const auto& [l, q] : e.value) c.emplace_back(map[static_cast<std::size_t>(l)], q);
      std::sort(c.begin(), c.end());
      entries.push_back({map[static_cast<std::size_t>(e.i)], map[static_cast<std::size_t>(e.j)], std::move(c)});
    }
  }
  return std::make_shared<LieAlgebra>("amalgam:" + std::to_string(i), AlgebraKind::Amalgam, i + 1, i,
                                      std::move(basis), entries);
}

AlgebraPtr abelian_algebra(const std::vector<int>& degrees) {
  if (degrees.empty()) fail(ErrorKind::Domain, "abelian algebra needs at least one basis word");
  std::vector<int> sorted = degrees;
  for (int d : sorted)
    if (d < 1) fail(ErrorKind::Domain, "abelian weights must be positive");
  if (!std::is_sorted(sorted.begin(), sorted.end())) fail(ErrorKind::Domain, "abelian weights must be nondecreasing");
  std::vector<BasisWord> basis;
  std::string id = "abelian:";
  int rank = 0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    BasisWord w;
    w.index = static_cast<int>(k);
    w.degree = sorted[k];
    w.label = "A" + std::to_string(k + 1);
    basis.push_back(w);
    if (sorted[k] == 1) ++rank;
    id += (k ? "," : "") + std::to_string(sorted[k]);
  }
  return std::make_shared<LieAlgebra>(id, AlgebraKind::Abelian, rank, sorted.back(), std::move(basis),
                                      std::vector<LieAlgebra::Entry>{});
}

AlgebraPtr algebra_from_id(const std::string& id, const SizeCap& cap) {
  auto parts = [&] {
    std::vector<std::string> out;
    std::string cur;
    for (char c : id) {
      if (c == ':') {
        out.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    out.push_back(cur);
    return out;
  }();
  auto to_int = [&](const std::string& s) {
    if (s.empty() || s.size() > 6 || !std::all_of(s.begin(), s.end(), ::isdigit))
      fail(ErrorKind::Parse, "bad integer '" + s + "' in algebra id '" + id + "'");
    return std::stoi(s);
  };
  if (parts[0] == "heisenberg" && parts.size() == 1) return free_nilpotent(2, 2, cap);
  if (parts[0] == "free" && parts.size() == 3) return free_nilpotent(to_int(parts[1]), to_int(parts[2]), cap);
  if (parts[0] == "amalgam" && parts.size() == 2) return amalgam_algebra(to_int(parts[1]), cap);
  if (parts[0] == "abelian" && parts.size() == 2) {
    std::vector<int> degrees;
    std::string cur;
    for (char c : parts[1] + ",") {
      if (c == ',') {
        degrees.push_back(to_int(cur));
        cur.clear();
      } else {
        cur += c;
      }
    }
    return abelian_algebra(degrees);
  }
  fail(ErrorKind::Parse, "unknown algebra id '" + id + "' (expected free:r:s, heisenberg, amalgam:i, abelian:d1,...)");
}

// ---- verification ------------------------------------------------------------

StructureReport verify_jacobi(const LieAlgebra& alg) {
  StructureReport report;
  const int n = alg.dim();
  for (int i = 0; i < n; ++i) {
    if (!alg.structure(i, i).empty()) report.antisymmetry_violations.push_back({i, i});
    for (int j = i + 1; j < n; ++j) {
      Combination a = alg.structure(i, j);
      Combination b = alg.structure(j, i);
      add_scaled(a, b, Rational(1));
      if (!a.empty()) report.antisymmetry_violations.push_back({i, j});
      for (const auto& [k, q] : alg.structure(i, j)) {
        (void)q;
        if (alg.degree(k) != alg.degree(i) + alg.degree(j)) {
          report.grading_violations.push_back({i, j});
          break;
        }
      }
    }
  }
  // [e_a, comb] expanded through the table.
  auto bracket_left = [&](int a, const Combination& c) {
    Combination out;
    for (const auto& [k, q] : c) add_scaled(out, alg.structure(a, k), q);
    return out;
  };
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      for (int c = b + 1; c < n; ++c) {
        if (report.grading_violations.empty() && alg.degree(a) + alg.degree(b) + alg.degree(c) > alg.step()) continue;
        Combination sum = bracket_left(a, alg.structure(b, c));
        add_scaled(sum, bracket_left(b, alg.structure(c, a)), Rational(1));
        add_scaled(sum, bracket_left(c, alg.structure(a, b)), Rational(1));
        if (!sum.empty()) report.jacobi_violations.push_back({a, b, c, std::move(sum)});
      }
    }
  return report;
}

std::string word_string(const LieAlgebra& alg, int i) { return alg.word(i).label; }

}  // namespace carnot
