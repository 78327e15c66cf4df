#pragma once

#include <gmpxx.h>

#include <boost/multiprecision/gmp.hpp>

#include <cstdint>
#include <string>
#include <string_view>

namespace carnot {

using Rational = mpq_class;

/// ~100 significant decimal digits; used to polish numeric path solutions
/// before they are snapped to exact rationals.
using HighFloat = boost::multiprecision::number<boost::multiprecision::gmp_float<100>,
                                                boost::multiprecision::et_off>;

inline bool is_zero(const Rational& q) { return sgn(q) == 0; }
inline bool is_zero(double d) { return d == 0.0; }
inline bool is_zero(const HighFloat& x) { return x.is_zero(); }

/// Accepts "p/q", "p", and plain decimals such as "-0.25" or "1e-3".
Rational parse_rational(std::string_view text);

/// Canonical "p/q" (or "p" when the denominator is one).
std::string to_string(const Rational& q);

double to_double(const Rational& q);
Rational from_double(double d);  // exact binary value
Rational from_high(const HighFloat& x);  // exact binary value
HighFloat to_high(const Rational& q);

template <class T>
T convert(const Rational& q);
template <>
inline Rational convert<Rational>(const Rational& q) { return q; }
template <>
inline double convert<double>(const Rational& q) { return q.get_d(); }
template <>
inline HighFloat convert<HighFloat>(const Rational& q) { return to_high(q); }

/// Closed rational interval; `lo == hi` means the value is exact.
struct Interval {
  Rational lo;
  Rational hi;

  static Interval point(const Rational& q) { return {q, q}; }
  bool exact() const { return lo == hi; }
  Rational width() const { return hi - lo; }
  Rational mid() const { return (lo + hi) / 2; }
};

Interval operator+(const Interval& a, const Interval& b);
Interval operator-(const Interval& a, const Interval& b);
Interval operator*(const Rational& c, const Interval& a);
Interval abs(const Interval& a);
Interval min(const Interval& a, const Interval& b);
Interval max(const Interval& a, const Interval& b);

/// Bracket of the k-th root of q >= 0 with width <= 2^-bits (exact when q is a perfect power).
Interval root_bounds(const Rational& q, unsigned k, unsigned bits = 96);
inline Interval sqrt_bounds(const Rational& q, unsigned bits = 96) { return root_bounds(q, 2, bits); }

/// Rational approximation of |q|^(1/k), positive whenever q != 0; accuracy is loose (double-level).
Rational approx_root(const Rational& q, unsigned k);

/// Smallest (largest) multiple of 2^-bits that is >= q (<= q).
Rational dyadic_ceil(const Rational& q, unsigned bits = 64);
Rational dyadic_floor(const Rational& q, unsigned bits = 64);

enum class Rounding { Down, Up, Nearest };

/// Decimal rendering with `digits` significant digits, rounded in the given direction.
std::string to_decimal(const Rational& q, int digits = 12, Rounding mode = Rounding::Nearest);

}  // namespace carnot
