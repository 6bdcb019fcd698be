#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>
#include <vector>

namespace facpoly {

// Exact rational scalar. GMP keeps every mpq_class result canonical
// (lowest terms, positive denominator).
using Rational = mpq_class;
using BigInt = mpz_class;
using RationalVector = std::vector<Rational>;

/// Parses "p/q" or "p" (optional leading sign). Throws ValidationError on
/// malformed text or a zero denominator. The result is canonical.
Rational parse_rational(std::string_view text);

/// Canonical "p/q", or "p" when the denominator is 1.
std::string to_string(const Rational& value);

inline int sign(const Rational& value) { return sgn(value); }

Rational inner_product(const RationalVector& a, const RationalVector& b);

/// Inner product with a 0/1 vector.
template <typename Bits>
Rational select_sum(const RationalVector& c, const Bits& bits) {
  Rational sum = 0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (bits[k]) sum += c[k];
  }
  return sum;
}

bool is_zero(const RationalVector& v);

}  // namespace facpoly
