#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

namespace nlg {

using Rational = mpq_class;

// Accepts "p/q", integers, and plain decimals such as "0.125" or "-3e-2".
Rational parse_rational(std::string_view text);

// "p/q" in lowest terms, or "p" when the denominator is 1.
std::string to_string(const Rational& q);

inline double to_double(const Rational& q) { return q.get_d(); }

// Floor of a rational as a big integer.
mpz_class floor(const Rational& q);

// q - floor(q), in [0, 1).
Rational frac(const Rational& q);

// Simplest rational (smallest denominator) in the closed interval [lo, hi].
Rational simplest_between(const Rational& lo, const Rational& hi);

}  // namespace nlg
