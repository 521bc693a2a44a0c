#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "wander/rational.hpp"

// Exact arithmetic for the dynamics of P_a(z) = a z^p + (1-a) z^{p+1} over an
// ultrametric field with |a| > 1.  Every size in this module is stored as the
// exponent t of a norm |a|^t, as an exact rational; larger exponent means
// strictly larger norm, and no concrete value of |a| is ever needed.

namespace wander {

struct PrimeParams {
  unsigned long p = 2;
  long q = 3;  // (p-1)(2p^2 - 2p - 1)
  Rat kappa;   // p^{2p-2} / (p^{2p-1} - p + 1), in (0, 1]

  // Throws std::invalid_argument unless p is prime.
  static PrimeParams for_prime(unsigned long p);
};

// c_m = -(1/(p-1))(1 - p^{-m}): exponent of the radius scale rho_m, the norm
// of points that reach the unit sphere after exactly m steps inside B(0).
// c_0 = 0, strictly decreasing, bounded below by -1/(p-1).
Rat rho_exponent(const PrimeParams& pp, long m);

// Strictly increasing index sequence (l_s), l_0 = 0, given by its increments:
// a finite prefix followed by a repeating cycle.  "id" means all increments 1,
// i.e. l_s = s.  Text form: "id" or "prefix=a,b,c;cycle=d,e" (prefix may be
// empty or omitted).
struct EllSpec {
  std::vector<long> prefix;
  std::vector<long> cycle;  // nonempty, all entries >= 1

  static EllSpec id();
  static EllSpec parse(const std::string& text);
  std::string str() const;

  long increment(std::size_t s) const;
  void validate() const;  // throws std::invalid_argument
};

// Certified enclosure of a truncated infinite sum of exponents.
struct ExponentInterval {
  Rat lo, hi;
  bool contains(const Rat& x) const { return lo <= x && x <= hi; }
  Rat width() const { return hi - lo; }
};

// Derived sequences M_k, m_k, N_i and the block quantities delta_k, tau_s,
// r_s for a prime p and an index sequence (l_s).  Accessors are memoized;
// instances are meant to be used from a single thread.
class Schedule {
 public:
  Schedule(PrimeParams pp, EllSpec ells);

  const PrimeParams& params() const { return pp_; }
  const EllSpec& ells() const { return ells_; }

  long ell(std::size_t s) const;
  // Index of the block that starts the s-th wild passage: l_s (p-1)^2.
  long special_block(std::size_t s) const;
  // The unique s with l_s (p-1)^2 - 1 <= k < l_{s+1} (p-1)^2 - 1.
  std::size_t s_of_k(long k) const;
  bool is_special(long i, std::size_t* s_out = nullptr) const;

  // Itinerary block lengths: the orbit spends m_i steps in B(0) and then M_i
  // steps in B(1) during block i; N_i counts the steps before block i.
  Int M(long k) const;
  Int m(long k) const;
  Int N(long i) const;

  // Net diameter-exponent change over one block: -m_k/(p-1)
  // + p/(p-1)^2 (1 - p^{-m_k}) + M_k.
  Rat delta(long k) const;
  // Same value through the per-position closed form (block-final vs
  // intermediate k); used as an independent route in tests.
  Rat delta_closed_form(long k) const;

  // Sum of delta over block s, term by term and in closed geometric form.
  Rat block_delta_sum(std::size_t s) const;
  Rat block_delta_sum_closed(std::size_t s) const;

  // tau_s > 0, the per-passage defect; closed form and literal definition.
  Rat tau(std::size_t s) const;
  Rat tau_from_definition(std::size_t s) const;

  // Exponent of r_s = rho_{m_{l_s(p-1)^2}}^{p/(p-1)}.
  Rat r_exponent(std::size_t s) const;

  // sum_{u>=0} tau_{s+u} p^{-(u+1)}, exactly (geometric over the cycle).
  Rat tail_sum(std::size_t s) const;
  // Partial sum of `terms` leading terms plus a certified tail majorant.
  ExponentInterval tail_sum_interval(std::size_t s, long terms) const;
  // sum_{u>=0} tau_{s+u} p^{-u} = p * tail_sum(s).
  Rat tail_sum0(std::size_t s) const;

  // sum_s p^{-(q l_s + s)} (1 - kappa p^{-2(p-1)^3 (l_{s+1}-l_s)}).
  Rat series_sum() const;

  // Diameter exponent of the wandering ball:
  //   t = -p/(p-1)^2 + (p^{2p-1}-p+1) / ((p-1)^2 p^{2p+1} (p^{2p-2}-1)) * series_sum().
  // Equals r_exponent(0) + tail_sum(0) exactly.
  Rat t() const;

 private:
  PrimeParams pp_;
  EllSpec ells_;
  long sq_;  // (p-1)^2

  mutable std::vector<long> ell_;      // l_s
  mutable std::vector<Int> M_, m_, N_;

  void extend_ell(std::size_t s) const;
  void extend_M(std::size_t k) const;
  void extend_m(std::size_t k) const;
  void extend_N(std::size_t i) const;

  // sum_{u>=0} w(increment(s0+u)) * p^{-(q l_{s0+u} + u)}, exactly.
  Rat weighted_tail(std::size_t s0, const std::function<Rat(long)>& w) const;
  Rat tau_bracket(long inc) const;  // the l-free factor of tau
};

}  // namespace wander
