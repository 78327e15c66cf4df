#pragma once

// Truncated Baker-Campbell-Hausdorff product log(exp(x) exp(y)) on a nilpotent
// algebra, evaluated from the Dynkin word expansion of the free series.

#include "carnot/lie_core.hpp"

#include <span>
#include <vector>

namespace carnot {

/// Coefficient of the word w (letters 0 = X, 1 = Y, first letter most significant)
/// in log(exp X exp Y), as an element of the free associative algebra.
Rational dynkin_word_coefficient(int length, unsigned bits);

template <class T>
std::vector<T> bch_product(const LieAlgebra& alg, std::span<const T> x, std::span<const T> y);

extern template std::vector<Rational> bch_product<Rational>(const LieAlgebra&, std::span<const Rational>,
                                                            std::span<const Rational>);
extern template std::vector<double> bch_product<double>(const LieAlgebra&, std::span<const double>,
                                                        std::span<const double>);
extern template std::vector<HighFloat> bch_product<HighFloat>(const LieAlgebra&, std::span<const HighFloat>,
                                                              std::span<const HighFloat>);

}  // namespace carnot
