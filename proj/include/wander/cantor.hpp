#pragma once

#include <string>
#include <vector>

#include "wander/scale.hpp"

// The Cantor set of attainable diameter exponents.  Every 0/1 sequence beta
// selects, through the doubling sequence (u_v) and the index sequence (l_s)
// it induces, a value of the series
//   S(l) = sum_s p^{-(q l_s + s)} (1 - kappa p^{-2(p-1)^3 (l_{s+1}-l_s)}),
// and S(l) depends on beta affinely: S = R + R' sum_m beta(m) / P^{2m} with
// P = p^{q(q+1)}.  This module computes the constants of that affine map and
// verifies the identity exactly for eventually-constant beta.

namespace wander::cantor {

struct BetaSeq {
  std::vector<int> prefix;  // bits
  int tail = 0;             // constant bit from index prefix.size() on

  static BetaSeq parse(const std::string& text);  // "bits;tail=b", bits may be empty
  std::string str() const;
  int bit(std::size_t m) const { return m < prefix.size() ? prefix[m] : tail; }
  void validate() const;
};

// u_0 = 0; from even u with beta(u/2) = 0 the step is 2, otherwise 1.
std::vector<long> u_sequence(const BetaSeq& beta, std::size_t count);

// The index sequence l_{vq+r} = (q+1) u_v - v + r as an increment spec:
// within a v-block the increments are 1, at the block boundary
// (q+1)(u_{v+1} - u_v) - q.  Eventually periodic since beta is.
EllSpec ells_from_beta(const PrimeParams& pp, const BetaSeq& beta);

struct CantorConstants {
  Int P;  // p^{q(q+1)}
  Int Q;  // p^{2(p-1)^3(q+1)}
  Rat E;
  Rat F;  // coefficient of the E-F factorization: E^{-1} kappa p^{2(p-1)^3 q} / p^{q^2-1}
  Rat R;
  Rat Rprime;  // nonzero
};

// Throws std::logic_error if R' degenerates to zero.
CantorConstants cantor_constants(const PrimeParams& pp);

struct ChainEntry {
  std::string what;
  std::string lhs, rhs;  // exact values compared
  bool pass;
};

// Exact comparison battery on the constants' magnitudes, stated with the
// conservative bound quantity Fbar with Fbar P = kappa p^{q+1} / (p^{2(p-1)^3 q} E).
std::vector<ChainEntry> inequality_chain(const PrimeParams& pp);

struct IdentityReport {
  std::string beta;
  Rat affine;   // R + R' sum_m beta(m) P^{-2m}
  Rat ef_form;  // E sum_v P^{-u_v} (1 - F Q^{-(u_{v+1}-u_v)})
  Rat series;   // S(l) for l = ells_from_beta(beta)
  bool pass;    // all three exactly equal
};

IdentityReport verify_affine_identity(const PrimeParams& pp, const BetaSeq& beta);

struct Decomposition {
  Int base;                // B = p^{2q(q+1)}
  std::vector<Int> digits; // d(1)..d(M); d(0) = 0 since tau < 1
  std::vector<Int> counts; // per-digit count of j in [1, B-1] with j <= d(m)
  Rat tau;
  Rat reconstructed;       // sum_m d(m) B^{-m}
  bool pass;
};

// tau in [0,1) with denominator a power of p (finite base-B expansion).
// The beta family behind the digits is implicit: beta_j(m) = 1 iff j <= d(m);
// the per-digit counts realize the sum over j without enumerating B-1
// sequences.  Throws std::invalid_argument on inadmissible tau.
Decomposition digit_decompose(const Rat& tau, const PrimeParams& pp);

}  // namespace wander::cantor
