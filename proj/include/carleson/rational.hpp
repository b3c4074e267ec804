#pragma once
// Exact rational arithmetic.
//
// Every quantity the stopping-time construction branches on is compared
// exactly, so the whole library works over GMP rationals. The helpers here
// cover the textual "p/q" exchange format and a few small numeric utilities.

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

namespace carleson {

using Rational = mpq_class;

/// num / den in lowest terms. mpq_class(num, den) alone is not canonical.
inline Rational ratio(const mpz_class& num, const mpz_class& den) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}
inline Rational ratio(long num, long den) { return ratio(mpz_class(num), mpz_class(den)); }

/// Parses "p/q", "p", or a finite decimal such as "-0.125" or "3.5e-2".
/// Throws ParseError on anything else; the result is canonical.
Rational parse_rational(std::string_view text);

/// Canonical "p/q" form; integers keep the "/1" suffix ("0/1", "3/1").
std::string to_string(const Rational& value);

/// 2^{-k} for k >= 0.
Rational pow2_neg(unsigned k);

/// base^k for k >= 0.
Rational pow(const Rational& base, unsigned k);

inline Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }
inline Rational min(const Rational& a, const Rational& b) { return b < a ? b : a; }

/// Floor of a rational as a signed 64-bit integer; the caller guarantees range.
std::int64_t floor_to_int(const Rational& value);

}  // namespace carleson
