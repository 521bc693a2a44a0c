#include "wander/field.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>

#include "wander/scale.hpp"

namespace wander::field {

PadicElement::PadicElement(unsigned long p, unsigned e, long prec) : p_(p), e_(e), prec_(prec) {
  if (e < 1) throw std::invalid_argument("PadicElement: e must be >= 1");
  if (prec < 1) throw std::invalid_argument("PadicElement: precision must be >= 1");
}

PadicElement PadicElement::carry_normalize(unsigned long p, unsigned e, long prec, long lo,
                                           std::vector<long long> acc) {
  const long long lp = static_cast<long long>(p);
  // floor-mod carries keep digits in [0, p); negative carries borrow upward.
  for (std::size_t i = 0; i < acc.size(); ++i) {
    long long v = acc[i];
    long long r = v % lp;
    if (r < 0) r += lp;
    long long carry = (v - r) / lp;
    acc[i] = r;
    if (carry != 0) {
      std::size_t target = i + e;
      if (lo + static_cast<long>(target) < prec) {
        if (target >= acc.size()) acc.resize(target + 1, 0);
        acc[target] += carry;
      }
    }
  }
  PadicElement out(p, e, prec);
  std::size_t first = 0;
  while (first < acc.size() && acc[first] == 0) ++first;
  std::size_t last = acc.size();
  while (last > first && acc[last - 1] == 0) --last;
  out.lo_ = lo + static_cast<long>(first);
  for (std::size_t i = first; i < last; ++i) {
    if (out.lo_ + static_cast<long>(i - first) >= prec) break;
    out.d_.push_back(static_cast<uint32_t>(acc[i]));
  }
  while (!out.d_.empty() && out.d_.back() == 0) out.d_.pop_back();
  if (out.d_.empty()) out.lo_ = 0;
  return out;
}

PadicElement PadicElement::from_integer(unsigned long p, unsigned e, const Int& n, long prec) {
  if (n < 0) return -from_integer(p, e, -n, prec);
  // base-p digits of n live at pi-positions 0, e, 2e, ...
  std::vector<long long> acc;
  Int rest = n;
  long idx = 0;
  while (rest != 0 && idx < prec) {
    Int digit = rest % static_cast<long>(p);
    acc.resize(static_cast<std::size_t>(idx) + 1, 0);
    acc[static_cast<std::size_t>(idx)] = digit.get_si();
    rest /= static_cast<long>(p);
    idx += static_cast<long>(e);
  }
  return carry_normalize(p, e, prec, 0, std::move(acc));
}

PadicElement PadicElement::from_rational(unsigned long p, unsigned e, const Rat& x, long prec) {
  if (x == 0) return PadicElement(p, e, prec);
  Int num = x.get_num(), den = x.get_den();
  long shift = 0;  // power of p pulled out, in pi-units: e * (alpha - beta)
  while (num % static_cast<long>(p) == 0) {
    num /= static_cast<long>(p);
    shift += static_cast<long>(e);
  }
  while (den % static_cast<long>(p) == 0) {
    den /= static_cast<long>(p);
    shift -= static_cast<long>(e);
  }
  // x = p^{shift/e} * num/den with num, den units; invert den modulo p^T.
  long t = (prec - shift) / static_cast<long>(e) + 2;
  if (t < 1) t = 1;
  Int modulus;
  mpz_ui_pow_ui(modulus.get_mpz_t(), p, static_cast<unsigned long>(t));
  Int inv;
  if (mpz_invert(inv.get_mpz_t(), den.get_mpz_t(), modulus.get_mpz_t()) == 0)
    throw std::invalid_argument("from_rational: denominator not invertible");
  Int unit = ((num % modulus) * inv) % modulus;
  if (unit < 0) unit += modulus;
  std::vector<long long> acc;
  long idx = 0;
  while (unit != 0) {
    Int digit = unit % static_cast<long>(p);
    acc.resize(static_cast<std::size_t>(idx) + 1, 0);
    acc[static_cast<std::size_t>(idx)] = digit.get_si();
    unit /= static_cast<long>(p);
    idx += static_cast<long>(e);
  }
  return carry_normalize(p, e, prec, shift, std::move(acc));
}

PadicElement PadicElement::pi_power(unsigned long p, unsigned e, long k, long prec) {
  PadicElement out(p, e, prec);
  if (k < prec) {
    out.lo_ = k;
    out.d_ = {1};
  }
  return out;
}

PadicElement PadicElement::random_unit(unsigned long p, unsigned e, long k, long prec,
                                       std::mt19937_64& rng) {
  PadicElement out(p, e, prec);
  if (k >= prec) return out;
  out.lo_ = k;
  std::uniform_int_distribution<uint32_t> digit(0, static_cast<uint32_t>(p - 1));
  std::uniform_int_distribution<uint32_t> nonzero(1, static_cast<uint32_t>(p - 1));
  out.d_.push_back(nonzero(rng));
  for (long i = k + 1; i < prec; ++i) out.d_.push_back(digit(rng));
  while (!out.d_.empty() && out.d_.back() == 0) out.d_.pop_back();
  return out;
}

long PadicElement::lowest() const { return d_.empty() ? prec_ : lo_; }

std::optional<Rat> PadicElement::valuation() const {
  if (d_.empty()) return std::nullopt;
  return make_rat(lo_, static_cast<long>(e_));
}

int PadicElement::digit(long i) const {
  if (i < lo_ || i >= lo_ + static_cast<long>(d_.size())) return 0;
  return static_cast<int>(d_[static_cast<std::size_t>(i - lo_)]);
}

void PadicElement::check_compatible(const PadicElement& other) const {
  if (p_ != other.p_ || e_ != other.e_)
    throw std::invalid_argument("PadicElement: mixed p or e");
}

PadicElement operator+(const PadicElement& a, const PadicElement& b) {
  a.check_compatible(b);
  long prec = std::min(a.prec_, b.prec_);
  long lo = std::min(a.lo_, b.lo_);
  long hi = std::min(prec, std::max(a.lo_ + static_cast<long>(a.d_.size()),
                                    b.lo_ + static_cast<long>(b.d_.size())));
  if (a.d_.empty() && b.d_.empty()) return PadicElement(a.p_, a.e_, prec);
  std::vector<long long> acc(static_cast<std::size_t>(std::max(hi - lo, 1L)), 0);
  for (long i = lo; i < hi; ++i)
    acc[static_cast<std::size_t>(i - lo)] =
        static_cast<long long>(a.digit(i)) + static_cast<long long>(b.digit(i));
  return PadicElement::carry_normalize(a.p_, a.e_, prec, lo, std::move(acc));
}

PadicElement operator-(const PadicElement& a, const PadicElement& b) {
  a.check_compatible(b);
  long prec = std::min(a.prec_, b.prec_);
  long lo = std::min(a.lo_, b.lo_);
  // Borrows can ripple e positions at a time all the way up to the precision
  // bound, so subtract over the full window.
  if (a.d_.empty() && b.d_.empty()) return PadicElement(a.p_, a.e_, prec);
  long hi = prec;
  std::vector<long long> acc(static_cast<std::size_t>(std::max(hi - lo, 1L)), 0);
  for (long i = lo; i < hi; ++i)
    acc[static_cast<std::size_t>(i - lo)] =
        static_cast<long long>(a.digit(i)) - static_cast<long long>(b.digit(i));
  return PadicElement::carry_normalize(a.p_, a.e_, prec, lo, std::move(acc));
}

PadicElement PadicElement::operator-() const {
  PadicElement zero(p_, e_, prec_);
  return zero - *this;
}

PadicElement operator*(const PadicElement& a, const PadicElement& b) {
  a.check_compatible(b);
  // Known modulo pi^min(lo_a + prec_b, lo_b + prec_a).
  long prec = std::min(a.lowest() + b.prec_, b.lowest() + a.prec_);
  if (a.d_.empty() || b.d_.empty()) return PadicElement(a.p_, a.e_, prec);
  long lo = a.lo_ + b.lo_;
  if (lo >= prec) return PadicElement(a.p_, a.e_, prec);
  std::vector<long long> acc(static_cast<std::size_t>(prec - lo), 0);
  for (std::size_t i = 0; i < a.d_.size(); ++i) {
    if (a.d_[i] == 0) continue;
    long base = a.lo_ + static_cast<long>(i) + b.lo_;
    if (base >= prec) break;
    std::size_t jmax = std::min(b.d_.size(), static_cast<std::size_t>(prec - base));
    for (std::size_t j = 0; j < jmax; ++j)
      acc[static_cast<std::size_t>(base - lo) + j] +=
          static_cast<long long>(a.d_[i]) * static_cast<long long>(b.d_[j]);
  }
  return PadicElement::carry_normalize(a.p_, a.e_, prec, lo, std::move(acc));
}

PadicElement PadicElement::pow(unsigned long k) const {
  PadicElement result = from_integer(p_, e_, 1, prec_);
  for (unsigned long i = 0; i < k; ++i) result = result * *this;
  return result;
}

std::string PadicElement::str() const {
  std::ostringstream os;
  if (d_.empty()) {
    os << "O(pi^" << prec_ << ")";
    return os.str();
  }
  os << "pi^" << lo_ << "*[";
  std::size_t shown = std::min<std::size_t>(d_.size(), 32);
  for (std::size_t i = 0; i < shown; ++i) {
    if (i) os << ' ';
    os << d_[i];
  }
  if (shown < d_.size()) os << " ..";
  os << "] + O(pi^" << prec_ << ")";
  return os.str();
}

PadicElement eval_P(const PadicElement& a, const PadicElement& z) {
  const unsigned long p = a.p();
  PadicElement one = PadicElement::from_integer(p, a.e(), 1, std::max(a.precision(), z.precision()));
  PadicElement zp = z.pow(p);
  return a * zp + (one - a) * (zp * z);
}

void LabConfig::validate() const {
  if (!is_prime(p)) throw std::invalid_argument("LabConfig: p must be prime");
  if (e < 1) throw std::invalid_argument("LabConfig: e must be >= 1");
  Rat idx = v_a * static_cast<long>(e);
  if (idx.get_den() != 1)
    throw grid_error("LabConfig: v_a is not on the (1/e)Z grid");
  if (!(v_a < 0 && v_a >= Rat(-(static_cast<long>(p) - 1))))
    throw std::invalid_argument("LabConfig: need -(p-1) <= v_a < 0");
}

namespace {

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void digest_mix(uint64_t& h, const std::string& s) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;  // FNV-1a
  }
}

// pi-index of a rational valuation; throws when off the grid.
long grid_index(const Rat& v, unsigned e, const char* what) {
  Rat idx = v * static_cast<long>(e);
  if (idx.get_den() != 1)
    throw grid_error(std::string(what) + ": valuation " + rat_str(v) + " not on the (1/e)Z grid");
  if (!idx.get_num().fits_slong_p()) throw std::overflow_error("valuation index overflow");
  return idx.get_num().get_si();
}

struct TrialRecorder {
  LemmaReport& rep;
  long trial;
  void record(const Rat& expected, const PadicElement& diff, const std::string& lhs,
              const std::string& rhs) {
    auto actual = diff.valuation();
    bool ok = actual.has_value() && *actual == expected;
    std::string actual_s = actual ? rat_str(*actual) : "none";
    digest_mix(rep.digest, rat_str(expected));
    digest_mix(rep.digest, actual_s);
    digest_mix(rep.digest, lhs);
    digest_mix(rep.digest, rhs);
    if (ok)
      ++rep.passes;
    else
      rep.failures.push_back(TrialFailure{trial, rat_str(expected), actual_s, lhs, rhs});
  }
};

}  // namespace

LemmaReport check_contraction_lemma(const LabConfig& cfg, int item, long m, long trials) {
  cfg.validate();
  if (item < 1 || item > 3) throw std::invalid_argument("item must be 1, 2 or 3");
  if (m < 1) throw std::invalid_argument("m must be >= 1");
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  auto start = std::chrono::steady_clock::now();

  PrimeParams pp = PrimeParams::for_prime(cfg.p);
  const long prec = cfg.effective_prec();
  const unsigned e = cfg.e;
  const long p = static_cast<long>(cfg.p);

  LemmaReport rep;
  rep.config = cfg;
  rep.check = "contraction_item" + std::to_string(item) + "_m" + std::to_string(m);
  rep.trials = trials;

  const long a_idx = grid_index(cfg.v_a, e, "v_a");
  // |x| = rho_m: v(x) = v_a c_m (items 1 and 2).
  Rat vx = cfg.v_a * rho_exponent(pp, m);
  Rat thr = vx * make_rat(p, p - 1);  // v of rho_m^{p/(p-1)}

  long x_idx = 0;
  std::vector<long> window;  // admissible eps indices for item 2
  if (item != 3) {
    x_idx = grid_index(vx, e, "rho_m");
    if (item == 2) {
      // integer pi-indices strictly inside (vx, thr)
      Rat lo = vx * static_cast<long>(e), hi = thr * static_cast<long>(e);
      for (Int i = lo.get_num() / lo.get_den() - 1; Rat(i) <= hi + 1; ++i)
        if (Rat(i) > lo && Rat(i) < hi) window.push_back(i.get_si());
      if (window.empty())
        throw grid_error("item 2: no admissible perturbation valuation on the (1/e)Z grid");
    }
  }

  for (long trial = 0; trial < trials; ++trial) {
    std::mt19937_64 rng(splitmix64(cfg.seed ^ (0x5851f42d4c957f2dULL * (trial + 1))));
    TrialRecorder rec{rep, trial};
    PadicElement a = PadicElement::random_unit(cfg.p, e, a_idx, prec, rng);

    if (item == 3) {
      std::uniform_int_distribution<long> off(1, 2 * static_cast<long>(e));
      PadicElement one = PadicElement::from_integer(cfg.p, e, 1, prec);
      PadicElement y = one + PadicElement::random_unit(cfg.p, e, off(rng), prec, rng);
      long d_idx = off(rng);
      PadicElement span = PadicElement::random_unit(cfg.p, e, d_idx, prec, rng);
      PadicElement yp = y + span;
      PadicElement diff = eval_P(a, y) - eval_P(a, yp);
      rec.record(cfg.v_a + make_rat(d_idx, e), diff, y.str(), yp.str());
      continue;
    }

    PadicElement x = PadicElement::random_unit(cfg.p, e, x_idx, prec, rng);
    long eps_idx;
    Rat expected;
    if (item == 1) {
      Rat he = thr * static_cast<long>(e);
      Int fl;
      mpz_fdiv_q(fl.get_mpz_t(), he.get_num().get_mpz_t(), he.get_den().get_mpz_t());
      std::uniform_int_distribution<long> off(1, static_cast<long>(e));
      eps_idx = fl.get_si() + off(rng);
      // v(P(x') - P(x)) = v(rho_{m-1}) + v(eps)
      expected = cfg.v_a * rho_exponent(pp, m - 1) + make_rat(eps_idx, e);
    } else {
      std::uniform_int_distribution<std::size_t> pick(0, window.size() - 1);
      eps_idx = window[pick(rng)];
      // v(P(x') - P(x)) = v_a + p v(eps)
      expected = cfg.v_a + make_rat(p * eps_idx, e);
    }
    PadicElement eps = PadicElement::random_unit(cfg.p, e, eps_idx, prec, rng);
    PadicElement diff = eval_P(a, x + eps) - eval_P(a, x);
    rec.record(expected, diff, x.str(), eps.str());
  }

  rep.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

LemmaReport check_perturbation_lemmas(const LabConfig& cfg, int which, long size, long trials) {
  cfg.validate();
  if (which != 42 && which != 43) throw std::invalid_argument("which must be 42 or 43");
  if (size < 1) throw std::invalid_argument("M/m must be >= 1");
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  auto start = std::chrono::steady_clock::now();

  PrimeParams pp = PrimeParams::for_prime(cfg.p);
  const long prec = cfg.effective_prec();
  const unsigned e = cfg.e;
  const long p = static_cast<long>(cfg.p);

  LemmaReport rep;
  rep.config = cfg;
  rep.check = (which == 42 ? "perturbation_ones_M" : "perturbation_zeros_m") + std::to_string(size);
  rep.trials = trials;

  const long a_idx = grid_index(cfg.v_a, e, "v_a");
  const Rat alpha = -cfg.v_a;

  for (long trial = 0; trial < trials; ++trial) {
    std::mt19937_64 rng(splitmix64(cfg.seed ^ (0x9e3779b97f4a7c15ULL * (trial + 3))));
    TrialRecorder rec{rep, trial};
    PadicElement a = PadicElement::random_unit(cfg.p, e, a_idx, prec, rng);

    if (which == 42) {
      const long M = size;
      std::uniform_int_distribution<long> off0(0, static_cast<long>(e));
      // |y - 1| <= |a|^{-M} and |a|^{-1}|a - a'| = |y - y'|
      long h_idx = M * (-a_idx) + off0(rng);
      long w_idx = (M - 1) * (-a_idx) + off0(rng);
      PadicElement one = PadicElement::from_integer(cfg.p, e, 1, prec);
      PadicElement y = one + PadicElement::random_unit(cfg.p, e, h_idx, prec, rng);
      PadicElement yp = y + PadicElement::random_unit(cfg.p, e, w_idx - a_idx, prec, rng);
      PadicElement ap = a + PadicElement::random_unit(cfg.p, e, w_idx, prec, rng);
      PadicElement u = y, up = yp;
      for (long i = 0; i < M; ++i) {
        u = eval_P(a, u);
        up = eval_P(ap, up);
      }
      // v = v(a - a') + (M-1) v_a
      rec.record(make_rat(w_idx, e) + Rat(M - 1) * cfg.v_a, u - up, y.str(), yp.str());
      continue;
    }

    const long m = size;
    Rat vx = cfg.v_a * rho_exponent(pp, m);
    long x_idx = grid_index(vx, e, "rho_m");
    PadicElement x = PadicElement::random_unit(cfg.p, e, x_idx, prec, rng);
    Rat thr = vx * make_rat(p, p - 1);

    std::uniform_int_distribution<int> coin(0, 1);
    PadicElement xp = x;
    Rat hi_w;  // exclusive upper bound for w
    bool perturbed = coin(rng) == 1;
    if (perturbed) {
      Rat he = thr * static_cast<long>(e);
      Int fl;
      mpz_fdiv_q(fl.get_mpz_t(), he.get_num().get_mpz_t(), he.get_den().get_mpz_t());
      std::uniform_int_distribution<long> off(2, static_cast<long>(e) + 2);
      long xi_idx = fl.get_si() + off(rng);
      xp = x + PadicElement::random_unit(cfg.p, e, xi_idx, prec, rng);
      // rho_1 ... rho_{m-1} |x - x'| < |a|^{-1} |a - a'|
      Rat prod(0);
      for (long i = 1; i < m; ++i) prod += cfg.v_a * rho_exponent(pp, i);
      hi_w = prod + make_rat(xi_idx, e) - alpha;
    }
    Rat lo_w = thr - alpha;  // exclusive
    if (!perturbed) hi_w = lo_w + 2;
    std::vector<long> window;
    {
      Rat lo = lo_w * static_cast<long>(e), hi = hi_w * static_cast<long>(e);
      for (Int i = lo.get_num() / lo.get_den() - 1; Rat(i) <= hi + 1; ++i)
        if (Rat(i) > lo && Rat(i) < hi) window.push_back(i.get_si());
    }
    if (window.empty()) throw grid_error("no admissible parameter distance on the (1/e)Z grid");
    std::uniform_int_distribution<std::size_t> pick(0, window.size() - 1);
    long w_idx = window[pick(rng)];
    PadicElement ap = a + PadicElement::random_unit(cfg.p, e, w_idx, prec, rng);
    PadicElement u = x, up = xp;
    for (long i = 0; i < m; ++i) {
      u = eval_P(a, u);
      up = eval_P(ap, up);
    }
    // v = v(a - a') + alpha
    rec.record(make_rat(w_idx, e) + alpha, u - up, x.str(), xp.str());
  }

  rep.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

}  // namespace wander::field
