#pragma once

#include <gmpxx.h>

#include <string>

namespace stm {

// All arithmetic in this project is exact. Rational is GMP's canonical
// mpq_class; strings are the only lossy boundary and they are parsed exactly.
using Rational = mpq_class;

// Accepts "p", "-p/q" and plain decimal notation ("0.5", "-3.25").
// No exponents, no whitespace. Throws Errc::parse_error.
Rational parse_rational(const std::string& s);

// Canonical "p" or "p/q".
std::string to_string(const Rational& q);

// Fixed-point rendering with `digits` fractional digits, rounded half away
// from zero.
std::string to_decimal_string(const Rational& q, int digits);

} // namespace stm
