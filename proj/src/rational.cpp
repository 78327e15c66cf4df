#include "carnot/rational.hpp"

#include "carnot/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace carnot {

namespace {

mpz_class pow10(long e) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), 10, static_cast<unsigned long>(e));
  return r;
}

mpz_class pow2(unsigned long e) {
  mpz_class r = 1;
  mpz_mul_2exp(r.get_mpz_t(), r.get_mpz_t(), e);
  return r;
}

bool is_integer_text(std::string_view s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  return std::all_of(s.begin() + static_cast<long>(i), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

Rational parse_decimal(std::string_view s) {
  std::size_t i = 0;
  bool neg = false;
  if (i < s.size() && (s[i] == '-' || s[i] == '+')) neg = s[i++] == '-';
  mpz_class mant = 0;
  long scale = 0;
  bool digits = false, dot = false;
  for (; i < s.size(); ++i) {
    char c = s[i];
    if (c >= '0' && c <= '9') {
      mant = mant * 10 + (c - '0');
      if (dot) ++scale;
      digits = true;
    } else if (c == '.' && !dot) {
      dot = true;
    } else {
      break;
    }
  }
  if (!digits) fail(ErrorKind::Parse, "not a number: '" + std::string(s) + "'");
  long exponent = 0;
  if (i < s.size()) {
    if (s[i] != 'e' && s[i] != 'E') fail(ErrorKind::Parse, "not a number: '" + std::string(s) + "'");
    std::string_view rest = s.substr(i + 1);
    if (!is_integer_text(rest)) fail(ErrorKind::Parse, "bad exponent in '" + std::string(s) + "'");
    exponent = std::stol(std::string(rest));
    if (std::abs(exponent) > 4000) fail(ErrorKind::Parse, "exponent out of range in '" + std::string(s) + "'");
  }
  long e = exponent - scale;
  Rational q(mant);
  if (e >= 0) {
    q *= Rational(pow10(e));
  } else {
    q /= Rational(pow10(-e));
  }
  q.canonicalize();
  return neg ? Rational(-q) : q;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  if (s.empty()) fail(ErrorKind::Parse, "empty rational literal");
  auto slash = s.find('/');
  if (slash != std::string_view::npos) {
    auto num = s.substr(0, slash);
    auto den = s.substr(slash + 1);
    if (!is_integer_text(num) || !is_integer_text(den) || den[0] == '-' || den[0] == '+')
      fail(ErrorKind::Parse, "bad rational literal '" + std::string(s) + "'");
    mpz_class n(std::string(num[0] == '+' ? num.substr(1) : num), 10);
    mpz_class d(std::string(den), 10);
    if (d == 0) fail(ErrorKind::Parse, "zero denominator in '" + std::string(s) + "'");
    Rational q(n, d);
    q.canonicalize();
    return q;
  }
  if (is_integer_text(s)) return Rational(mpz_class(std::string(s[0] == '+' ? s.substr(1) : s), 10));
  return parse_decimal(s);
}

std::string to_string(const Rational& q) { return q.get_str(10); }

double to_double(const Rational& q) { return q.get_d(); }

Rational from_double(double d) {
  if (!std::isfinite(d)) fail(ErrorKind::Domain, "non-finite value cannot become a rational");
  Rational q(d);
  q.canonicalize();
  return q;
}

Rational from_high(const HighFloat& x) {
  Rational q;
  mpq_set_f(q.get_mpq_t(), x.backend().data());
  q.canonicalize();
  return q;
}

HighFloat to_high(const Rational& q) {
  HighFloat x;
  mpf_set_q(x.backend().data(), q.get_mpq_t());
  return x;
}

Interval operator+(const Interval& a, const Interval& b) { return {a.lo + b.lo, a.hi + b.hi}; }
Interval operator-(const Interval& a, const Interval& b) { return {a.lo - b.hi, a.hi - b.lo}; }
Interval operator*(const Rational& c, const Interval& a) {
  if (sgn(c) >= 0) return {c * a.lo, c * a.hi};
  return {c * a.hi, c * a.lo};
}
Interval abs(const Interval& a) {
  if (sgn(a.lo) >= 0) return a;
  if (sgn(a.hi) <= 0) return {-a.hi, -a.lo};
  return {Rational(0), std::max(Rational(-a.lo), a.hi)};
}
Interval min(const Interval& a, const Interval& b) { return {std::min(a.lo, b.lo), std::min(a.hi, b.hi)}; }
Interval max(const Interval& a, const Interval& b) { return {std::max(a.lo, b.lo), std::max(a.hi, b.hi)}; }

Interval root_bounds(const Rational& q, unsigned k, unsigned bits) {
  if (sgn(q) < 0) fail(ErrorKind::Domain, "root of a negative number");
  if (k == 0) fail(ErrorKind::Domain, "zeroth root");
  if (sgn(q) == 0 || k == 1) return Interval::point(q);
  const mpz_class& a = q.get_num();
  const mpz_class& b = q.get_den();
  mpz_class bk1;
  mpz_pow_ui(bk1.get_mpz_t(), b.get_mpz_t(), k - 1);
  mpz_class radicand = a * bk1 * pow2(static_cast<unsigned long>(k) * bits);
  mpz_class r;
  int exact = mpz_root(r.get_mpz_t(), radicand.get_mpz_t(), k);
  mpz_class den = b * pow2(bits);
  Rational lo(r, den);
  lo.canonicalize();
  if (exact) return Interval::point(lo);
  Rational hi(r + 1, den);
  hi.canonicalize();
  return {lo, hi};
}

Rational approx_root(const Rational& q, unsigned k) {
  if (sgn(q) == 0) return Rational(0);
  long en = 0, ed = 0;
  double mn = std::fabs(mpz_get_d_2exp(&en, q.get_num().get_mpz_t()));
  double md = mpz_get_d_2exp(&ed, q.get_den().get_mpz_t());
  double log2v = std::log2(mn) - std::log2(md) + static_cast<double>(en - ed);
  double r = std::exp2(log2v / static_cast<double>(k));
  if (!(r > 0) || !std::isfinite(r)) fail(ErrorKind::Domain, "root approximation out of range");
  return from_double(r);
}

std::string to_decimal(const Rational& q, int digits, Rounding mode) {
  if (sgn(q) == 0) return "0";
  digits = std::max(1, digits);
  bool neg = sgn(q) < 0;
  Rational a = neg ? Rational(-q) : q;
  // Round the magnitude away from / toward zero according to the signed direction.
  bool round_up_magnitude = (mode == Rounding::Up && !neg) || (mode == Rounding::Down && neg);
  bool round_down_magnitude = (mode == Rounding::Down && !neg) || (mode == Rounding::Up && neg);

  long e = static_cast<long>(std::floor(std::log10(a.get_d())));
  if (!std::isfinite(a.get_d())) e = 0;
  auto scaled = [&](long ee) {
    long shift = digits - 1 - ee;
    Rational s = a;
    if (shift >= 0) s *= Rational(pow10(shift));
    else s /= Rational(pow10(-shift));
    return s;
  };
  // Fix e so that 10^(digits-1) <= a * 10^(digits-1-e) < 10^digits.
  for (int guard = 0; guard < 8; ++guard) {
    Rational s = scaled(e);
    if (s < Rational(pow10(digits - 1))) --e;
    else if (s >= Rational(pow10(digits))) ++e;
    else break;
  }
  Rational s = scaled(e);
  mpz_class fl = s.get_num() / s.get_den();  // floor for positive s
  bool exact = Rational(fl) == s;
  mpz_class m = fl;
  if (!exact) {
    if (round_up_magnitude) {
      m = fl + 1;
    } else if (!round_down_magnitude) {
      Rational frac = s - Rational(fl);
      if (frac >= Rational(1, 2)) m = fl + 1;
    }
  }
  if (m == pow10(digits)) {
    m = pow10(digits - 1);
    ++e;
  }
  std::string mant = m.get_str(10);
  // mant has `digits` characters and represents mant * 10^(e - digits + 1).
  std::string out;
  if (e >= -6 && e < 15) {
    long point = e + 1;  // digits before the decimal point
    std::string intpart, fracpart;
    if (point <= 0) {
      intpart = "0";
      fracpart = std::string(static_cast<std::size_t>(-point), '0') + mant;
    } else if (point >= static_cast<long>(mant.size())) {
      intpart = mant + std::string(static_cast<std::size_t>(point) - mant.size(), '0');
    } else {
      intpart = mant.substr(0, static_cast<std::size_t>(point));
      fracpart = mant.substr(static_cast<std::size_t>(point));
    }
    while (!fracpart.empty() && fracpart.back() == '0') fracpart.pop_back();
    out = fracpart.empty() ? intpart : intpart + "." + fracpart;
  } else {
    std::string frac = mant.substr(1);
    while (!frac.empty() && frac.back() == '0') frac.pop_back();
    std::ostringstream os;
    os << mant[0];
    if (!frac.empty()) os << "." << frac;
    os << "e" << (e < 0 ? "-" : "+") << std::abs(e);
    out = os.str();
  }
  return neg ? "-" + out : out;
}

Rational dyadic_floor(const Rational& q, unsigned bits) {
  mpz_class scale = 1;
  scale <<= bits;
  mpz_class num = q.get_num() * scale;
  mpz_class fl;
  mpz_fdiv_q(fl.get_mpz_t(), num.get_mpz_t(), q.get_den().get_mpz_t());
  Rational r(fl, scale);
  r.canonicalize();
  return r;
}

Rational dyadic_ceil(const Rational& q, unsigned bits) { return -dyadic_floor(-q, bits); }

}  // namespace carnot
