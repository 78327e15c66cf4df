#include "carnot/bch.hpp"

#include <map>
#include <memory>
#include <mutex>

namespace carnot {

namespace {

// Truncated free associative algebra on two letters: poly[len][bits].
using Poly = std::vector<std::vector<Rational>>;

Poly make_poly(int max_len) {
  Poly p(static_cast<std::size_t>(max_len + 1));
  for (int l = 0; l <= max_len; ++l) p[static_cast<std::size_t>(l)].assign(std::size_t{1} << l, Rational(0));
  return p;
}

Poly multiply(const Poly& a, const Poly& b, int max_len) {
  Poly out = make_poly(max_len);
  for (int la = 0; la <= max_len; ++la)
    for (std::size_t wa = 0; wa < a[la].size(); ++wa) {
      if (is_zero(a[la][wa])) continue;
      for (int lb = 0; la + lb <= max_len; ++lb)
        for (std::size_t wb = 0; wb < b[lb].size(); ++wb) {
          if (is_zero(b[lb][wb])) continue;
          out[la + lb][(wa << lb) | wb] += a[la][wa] * b[lb][wb];
        }
    }
  return out;
}

struct LogTable {
  int max_len = 0;
  Poly log;
};

const LogTable& log_table(int max_len) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<LogTable>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[max_len];
  if (slot) return *slot;
  auto table = std::make_unique<LogTable>();
  table->max_len = max_len;
  // P = exp(X) exp(Y) - 1; the word X^p Y^q has coefficient 1/(p! q!).
  Poly p = make_poly(max_len);
  mpz_class fp = 1;
  for (int a = 0; a <= max_len; ++a) {
    if (a > 0) fp *= a;
    mpz_class fq = 1;
    for (int b = 0; a + b <= max_len; ++b) {
      if (b > 0) fq *= b;
      if (a + b == 0) continue;
      unsigned bits = (1u << b) - 1u;  // a zeros then b ones
      p[a + b][bits] = Rational(1) / Rational(fp * fq);
    }
  }
  Poly log = make_poly(max_len);
  Poly power = p;
  for (int m = 1; m <= max_len; ++m) {
    Rational c = Rational(m % 2 == 1 ? 1 : -1, m);
    for (int l = 0; l <= max_len; ++l)
      for (std::size_t w = 0; w < power[l].size(); ++w) log[l][w] += c * power[l][w];
    if (m < max_len) power = multiply(power, p, max_len);
  }
  table->log = std::move(log);
  slot = std::move(table);
  return *slot;
}

// Suffix trie of right-nested brackets R_{a s} = [a, R_s].
struct Plan {
  struct Node {
    int letter;
    int child;  // -1 for a single letter
    int length;
  };
  struct Term {
    int node;
    Rational coeff;
  };
  std::vector<Node> nodes;
  std::vector<Term> terms;
  std::vector<double> coeff_d;
  std::vector<HighFloat> coeff_h;
};

const Plan& plan_for(int step) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<Plan>> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(step);
    if (it != cache.end()) return *it->second;
  }
  const LogTable& table = log_table(step);
  auto plan = std::make_unique<Plan>();
  std::map<std::pair<int, unsigned>, int> node_of;
  auto node = [&](auto&& self, int len, unsigned bits) -> int {
    auto it = node_of.find({len, bits});
    if (it != node_of.end()) return it->second;
    int letter = static_cast<int>((bits >> (len - 1)) & 1u);
    int child = len == 1 ? -1 : self(self, len - 1, bits & ((1u << (len - 1)) - 1u));
    plan->nodes.push_back({letter, child, len});
    int id = static_cast<int>(plan->nodes.size()) - 1;
    node_of[{len, bits}] = id;
    return id;
  };
  for (int n = 1; n <= step; ++n)
    for (unsigned w = 0; w < (1u << n); ++w) {
      const Rational& c = table.log[n][w];
      if (is_zero(c)) continue;
      if (n >= 2 && ((w & 1u) == ((w >> 1) & 1u))) continue;  // [a,a] = 0 at the innermost bracket
      plan->terms.push_back({node(node, n, w), c / n});
    }
  for (const auto& t : plan->terms) {
    plan->coeff_d.push_back(t.coeff.get_d());
    plan->coeff_h.push_back(to_high(t.coeff));
  }
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[step];
  if (!slot) slot = std::move(plan);
  return *slot;
}

template <class T>
const T& term_coeff(const Plan& plan, std::size_t k);
template <>
const Rational& term_coeff<Rational>(const Plan& plan, std::size_t k) {
  return plan.terms[k].coeff;
}
template <>
const double& term_coeff<double>(const Plan& plan, std::size_t k) {
  return plan.coeff_d[k];
}
template <>
const HighFloat& term_coeff<HighFloat>(const Plan& plan, std::size_t k) {
  return plan.coeff_h[k];
}

}  // namespace

Rational dynkin_word_coefficient(int length, unsigned bits) {
  if (length < 1) return Rational(0);
  return log_table(length).log[length][bits];
}

template <class T>
std::vector<T> bch_product(const LieAlgebra& alg, std::span<const T> x, std::span<const T> y) {
  const std::size_t n = static_cast<std::size_t>(alg.dim());
  if (x.size() != n || y.size() != n) fail(ErrorKind::Domain, "coordinate vector does not match the algebra");
  std::vector<T> z(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = x[i] + y[i];
  if (alg.step() <= 1) return z;
  bool x_zero = true, y_zero = true;
  for (std::size_t i = 0; i < n; ++i) {
    if (!is_zero(x[i])) x_zero = false;
    if (!is_zero(y[i])) y_zero = false;
  }
  if (x_zero || y_zero) return z;

  const Plan& plan = plan_for(alg.step());
  std::vector<std::vector<T>> value(plan.nodes.size());
  std::vector<char> nonzero(plan.nodes.size(), 0);
  // Nodes are created children-first, so a single forward pass suffices.
  for (std::size_t k = 0; k < plan.nodes.size(); ++k) {
    const auto& nd = plan.nodes[k];
    std::span<const T> letter = nd.letter == 0 ? x : y;
    if (nd.child < 0) {
      value[k].assign(letter.begin(), letter.end());
      nonzero[k] = 1;
      continue;
    }
    if (!nonzero[static_cast<std::size_t>(nd.child)] || nd.length > alg.step()) continue;
    value[k].assign(n, T(0));
    const auto& inner = value[static_cast<std::size_t>(nd.child)];
    accumulate_bracket<T>(alg, letter, std::span<const T>(inner), std::span<T>(value[k]), nd.length - 1);
    for (const T& v : value[k])
      if (!is_zero(v)) {
        nonzero[k] = 1;
        break;
      }
  }
  for (std::size_t t = 0; t < plan.terms.size(); ++t) {
    const auto& term = plan.terms[t];
    const auto& nd = plan.nodes[static_cast<std::size_t>(term.node)];
    if (nd.length < 2 || !nonzero[static_cast<std::size_t>(term.node)]) continue;
    const T& c = term_coeff<T>(plan, t);
    const auto& v = value[static_cast<std::size_t>(term.node)];
    for (std::size_t i = 0; i < n; ++i)
      if (!is_zero(v[i])) z[i] += c * v[i];
  }
  return z;
}

template std::vector<Rational> bch_product<Rational>(const LieAlgebra&, std::span<const Rational>,
                                                     std::span<const Rational>);
template std::vector<double> bch_product<double>(const LieAlgebra&, std::span<const double>, std::span<const double>);
template std::vector<HighFloat> bch_product<HighFloat>(const LieAlgebra&, std::span<const HighFloat>,
                                                       std::span<const HighFloat>);

}  // namespace carnot
