#include "wander/rational.hpp"

#include <stdexcept>

namespace wander {

Rat make_rat(Int num, Int den) {
  if (den == 0) throw std::invalid_argument("rational with zero denominator");
  Rat r(std::move(num), std::move(den));
  r.canonicalize();
  return r;
}

Int pow_ui(unsigned long base, unsigned long e) {
  Int r;
  mpz_ui_pow_ui(r.get_mpz_t(), base, e);
  return r;
}

Rat pow_p(unsigned long p, long e) {
  if (e >= 0) return Rat(pow_ui(p, static_cast<unsigned long>(e)));
  return make_rat(1, pow_ui(p, static_cast<unsigned long>(-e)));
}

std::string rat_str(const Rat& r) { return r.get_str(); }

Rat parse_rat(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("empty rational");
  Rat r;
  if (mpq_set_str(r.get_mpq_t(), s.c_str(), 10) != 0)
    throw std::invalid_argument("bad rational: " + s);
  if (r.get_den() == 0)
    throw std::invalid_argument("rational with zero denominator: " + s);
  r.canonicalize();
  return r;
}

bool is_prime(unsigned long n) {
  if (n < 2) return false;
  for (unsigned long d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

}  // namespace wander
