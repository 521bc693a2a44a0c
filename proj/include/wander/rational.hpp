#pragma once

#include <gmpxx.h>

#include <string>

namespace wander {

using Int = mpz_class;
using Rat = mpq_class;

// num/den in canonical form (den > 0, gcd 1).
Rat make_rat(Int num, Int den);

// p^e as an exact rational, e of either sign.
Rat pow_p(unsigned long p, long e);

// base^e, e >= 0.
Int pow_ui(unsigned long base, unsigned long e);

// Canonical decimal "num/den" ("n" when den == 1).
std::string rat_str(const Rat& r);

// Accepts "num/den" or "num"; throws std::invalid_argument on anything else.
Rat parse_rat(const std::string& s);

bool is_prime(unsigned long n);

}  // namespace wander
