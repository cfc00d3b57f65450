#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace affrep {

/// Exact rational number. GMP keeps every value in lowest terms with a
/// positive denominator, and zero as 0/1.
using Rational = mpq_class;

/// "p/q", or "p" when the denominator is 1.
std::string to_string(const Rational& q);

/// Accepts "p", "-p", "p/q" with decimal integers; rejects decimals,
/// exponents, whitespace and zero denominators.
Rational parse_rational(std::string_view text);

double to_double(const Rational& q);

}  // namespace affrep
