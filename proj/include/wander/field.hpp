#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "wander/rational.hpp"

// Truncated digit arithmetic in a totally ramified extension of Q_p with
// uniformizer pi, pi^e = p.  An element is sum_i c_i pi^i with c_i in [0, p),
// known for all indices i below an absolute precision bound; a base-p carry
// at position i lands at position i+e.  Valuations are normalized to v(p) = 1,
// so v(pi^i) = i/e and the valuation grid is (1/e)Z.

namespace wander::field {

class grid_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PadicElement {
 public:
  // Zero known modulo pi^prec.
  PadicElement(unsigned long p, unsigned e, long prec);

  static PadicElement from_integer(unsigned long p, unsigned e, const Int& n, long prec);
  static PadicElement from_rational(unsigned long p, unsigned e, const Rat& x, long prec);
  static PadicElement pi_power(unsigned long p, unsigned e, long k, long prec);
  // pi^k times a unit with uniformly random digits (constant digit nonzero).
  static PadicElement random_unit(unsigned long p, unsigned e, long k, long prec,
                                  std::mt19937_64& rng);

  unsigned long p() const { return p_; }
  unsigned e() const { return e_; }
  long precision() const { return prec_; }

  bool is_zero_at_precision() const { return lowest() >= prec_; }
  // pi-exponent of the lowest nonzero digit; prec when none.
  long lowest() const;
  // v with v(p) = 1, i.e. lowest()/e; nullopt when zero at precision
  // (the precision-exhaustion signal).
  std::optional<Rat> valuation() const;
  int digit(long i) const;

  PadicElement operator-() const;
  friend PadicElement operator+(const PadicElement& a, const PadicElement& b);
  friend PadicElement operator-(const PadicElement& a, const PadicElement& b);
  friend PadicElement operator*(const PadicElement& a, const PadicElement& b);
  PadicElement pow(unsigned long k) const;

  std::string str() const;

 private:
  unsigned long p_;
  unsigned e_;
  long prec_;
  long lo_ = 0;                 // index of d_[0]
  std::vector<uint32_t> d_;    // trimmed: d_.front() != 0 unless empty

  static PadicElement carry_normalize(unsigned long p, unsigned e, long prec, long lo,
                                      std::vector<long long> acc);
  void check_compatible(const PadicElement& other) const;
};

// a z^p + (1 - a) z^{p+1}
PadicElement eval_P(const PadicElement& a, const PadicElement& z);

struct LabConfig {
  unsigned long p = 2;
  unsigned e = 1;
  long prec = 0;  // pi-adic digits; 0 means the default 64 e
  Rat v_a = Rat(-1);
  uint64_t seed = 0;

  long effective_prec() const { return prec > 0 ? prec : 64 * static_cast<long>(e); }
  void validate() const;  // throws grid_error / std::invalid_argument
};

struct TrialFailure {
  long trial;
  std::string expected_v;
  std::string actual_v;  // "none" on precision exhaustion
  std::string lhs, rhs;  // operand digit dumps
};

struct LemmaReport {
  LabConfig config;
  std::string check;
  long trials = 0;
  long passes = 0;
  std::vector<TrialFailure> failures;
  uint64_t digest = 0;  // order-sensitive hash of all per-trial data
  double wall_ms = 0.0;
  bool all_pass() const { return passes == trials && failures.empty(); }
};

// Per-trial check of the one-step contraction/expansion rules inside B(0)
// (items 1 and 2, at level m) and the affine rule inside B(1) (item 3).
LemmaReport check_contraction_lemma(const LabConfig& cfg, int item, long m, long trials);

// Two-orbit perturbation checks: `which` = 42 compares M steps from B(1)
// under parameters at distance matched to |y - y'|; `which` = 43 compares m
// steps from the sphere |x| = rho_m.  `size` is M resp. m.
LemmaReport check_perturbation_lemmas(const LabConfig& cfg, int which, long size, long trials);

}  // namespace wander::field
