#include "wander/cantor.hpp"

#include <stdexcept>

namespace wander::cantor {

BetaSeq BetaSeq::parse(const std::string& text) {
  auto semi = text.find(';');
  if (semi == std::string::npos || text.compare(semi + 1, 5, "tail=") != 0)
    throw std::invalid_argument("BetaSeq: expected 'bits;tail=b', got '" + text + "'");
  BetaSeq b;
  for (std::size_t i = 0; i < semi; ++i) {
    char c = text[i];
    if (c != '0' && c != '1') throw std::invalid_argument("BetaSeq: bits must be 0/1");
    b.prefix.push_back(c - '0');
  }
  std::string tail = text.substr(semi + 6);
  if (tail != "0" && tail != "1") throw std::invalid_argument("BetaSeq: tail must be 0 or 1");
  b.tail = tail[0] - '0';
  return b;
}

std::string BetaSeq::str() const {
  std::string s;
  for (int b : prefix) s += static_cast<char>('0' + b);
  s += ";tail=";
  s += static_cast<char>('0' + tail);
  return s;
}

void BetaSeq::validate() const {
  if (tail != 0 && tail != 1) throw std::invalid_argument("BetaSeq: tail must be 0 or 1");
  for (int b : prefix)
    if (b != 0 && b != 1) throw std::invalid_argument("BetaSeq: bits must be 0/1");
}

std::vector<long> u_sequence(const BetaSeq& beta, std::size_t count) {
  if (count < 1) throw std::invalid_argument("u_sequence: count must be >= 1");
  beta.validate();
  std::vector<long> u;
  u.reserve(count);
  u.push_back(0);
  while (u.size() < count) {
    long cur = u.back();
    long step = (cur % 2 == 0 && beta.bit(static_cast<std::size_t>(cur / 2)) == 0) ? 2 : 1;
    u.push_back(cur + step);
  }
  return u;
}

EllSpec ells_from_beta(const PrimeParams& pp, const BetaSeq& beta) {
  beta.validate();
  const long q = pp.q;
  EllSpec spec;
  // One v-block contributes q increments: q-1 ones and the boundary jump
  // (q+1)(u_{v+1}-u_v) - q.  Once u_v has passed the beta prefix the jumps
  // repeat (for a 0-tail the first such u_v is automatically even).
  const long settled = 2 * static_cast<long>(beta.prefix.size());
  long u = 0;
  while (u < settled) {
    long du = (u % 2 == 0 && beta.bit(static_cast<std::size_t>(u / 2)) == 0) ? 2 : 1;
    for (long r = 0; r < q - 1; ++r) spec.prefix.push_back(1);
    spec.prefix.push_back((q + 1) * du - q);
    u += du;
  }
  long du_tail = beta.tail == 0 ? 2 : 1;
  for (long r = 0; r < q - 1; ++r) spec.cycle.push_back(1);
  spec.cycle.push_back((q + 1) * du_tail - q);
  spec.validate();
  return spec;
}

CantorConstants cantor_constants(const PrimeParams& pp) {
  const unsigned long p = pp.p;
  const unsigned long q = static_cast<unsigned long>(pp.q);
  const unsigned long w = 2 * (p - 1) * (p - 1) * (p - 1);  // 2(p-1)^3
  // P = p^{q(q+1)} has ~q^2 log p bits; keep the exact constants desk-sized.
  if (pp.q > 20000)
    throw std::invalid_argument("cantor_constants: p too large for exact constants");
  CantorConstants cc;
  cc.P = pow_ui(p, q * (q + 1));
  cc.Q = pow_ui(p, w * (q + 1));

  // E = (1 - kappa p^{-w}) sum_{r=0}^{q-2} p^{-(q+1)r} + p^{-(q^2-1)}
  Rat geo = (1 - pow_p(p, -(static_cast<long>(q) + 1) * (static_cast<long>(q) - 1))) /
            (1 - pow_p(p, -(static_cast<long>(q) + 1)));
  cc.E = (1 - pp.kappa * pow_p(p, -static_cast<long>(w))) * geo +
         pow_p(p, -(static_cast<long>(q) * static_cast<long>(q) - 1));

  // F = E^{-1} kappa p^{wq} / p^{q^2-1}: the boundary term of the series is
  // (1/p^{q^2-1})(1 - kappa p^{wq} Q^{-du}), which factors through E as
  // E (1 - F Q^{-du}).
  cc.F = pp.kappa * pow_p(p, static_cast<long>(w * q) - (static_cast<long>(q) * static_cast<long>(q) - 1)) / cc.E;

  Rat p2 = Rat(cc.P) * Rat(cc.P);
  cc.R = cc.E * (1 - cc.F / Rat(cc.Q * cc.Q)) * p2 / (p2 - 1);
  cc.Rprime = cc.E * ((1 - cc.F / Rat(cc.Q)) * (1 + 1 / Rat(cc.P)) - (1 - cc.F / Rat(cc.Q * cc.Q)));
  if (cc.Rprime == 0) throw std::logic_error("cantor_constants: R' vanished");
  return cc;
}

std::vector<ChainEntry> inequality_chain(const PrimeParams& pp) {
  const unsigned long p = pp.p;
  const long q = pp.q;
  const long w = 2 * (static_cast<long>(p) - 1) * (static_cast<long>(p) - 1) * (static_cast<long>(p) - 1);
  CantorConstants cc = cantor_constants(pp);

  // Conservative bound quantity: Fbar = E^{-1} kappa / (p^{q^2-1} p^{wq}).
  Rat fbar = pp.kappa * pow_p(p, -(q * q - 1) - w * q) / cc.E;

  std::vector<ChainEntry> out;
  auto push = [&out](std::string what, const Rat& lhs, const Rat& rhs, bool pass) {
    out.push_back(ChainEntry{std::move(what), rat_str(lhs), rat_str(rhs), pass});
  };

  push("E > 0", cc.E, Rat(0), cc.E > 0);
  push("kappa <= 1", pp.kappa, Rat(1), pp.kappa <= 1);
  Rat pw = pow_p(p, w);
  push("p^w E >= p^w - kappa", pw * cc.E, pw - pp.kappa, pw * cc.E >= pw - pp.kappa);
  push("p^w - kappa >= 1", pw - pp.kappa, Rat(1), pw - pp.kappa >= 1);
  Rat fbar_p = fbar * Rat(cc.P);
  Rat fbar_p_spelled = pp.kappa * pow_p(p, q + 1 - w * q) / cc.E;
  push("Fbar P == kappa p^{q+1} / (p^{wq} E)", fbar_p, fbar_p_spelled, fbar_p == fbar_p_spelled);
  Rat mid = pow_p(p, q + 1 - w * (q - 1));
  push("Fbar P <= p^{q+1-w(q-1)}", fbar_p, mid, fbar_p <= mid);
  Rat pq3 = pow_p(p, -(q - 3));
  push("p^{q+1-w(q-1)} <= p^{-(q-3)}", mid, pq3, mid <= pq3);
  push("p^{-(q-3)} <= 1", pq3, Rat(1), pq3 <= 1);
  Rat lhs9 = (1 - fbar / Rat(cc.Q)) * (1 + 1 / Rat(cc.P));
  Rat rhs9 = (1 - 1 / Rat(cc.Q * cc.P)) * (1 + 1 / Rat(cc.P));
  push("(1 - Fbar/Q)(1 + 1/P) >= (1 - 1/(QP))(1 + 1/P)", lhs9, rhs9, lhs9 >= rhs9);
  push("(1 - 1/(QP))(1 + 1/P) > 1", rhs9, Rat(1), rhs9 > 1);
  Rat rhs11 = 1 - fbar / Rat(cc.Q * cc.Q);
  push("1 > 1 - Fbar/Q^2", Rat(1), rhs11, Rat(1) > rhs11);
  push("R' != 0", cc.Rprime, Rat(0), cc.Rprime != 0);
  return out;
}

namespace {

// sum_m beta(m) P^{-2m}, exactly (prefix plus constant tail).
Rat beta_power_sum(const BetaSeq& beta, const Int& P) {
  Rat p2 = make_rat(1, P * P);
  Rat term(1);
  Rat sum(0);
  for (int b : beta.prefix) {
    if (b) sum += term;
    term *= p2;
  }
  if (beta.tail) sum += term / (1 - p2);  // term = P^{-2L}
  return sum;
}

Rat inv_pow(const Int& base, unsigned long e) {
  Int b;
  mpz_pow_ui(b.get_mpz_t(), base.get_mpz_t(), e);
  return make_rat(1, b);
}

// E sum_v P^{-u_v} (1 - F Q^{-du_v}), exactly.
Rat ef_series(const BetaSeq& beta, const CantorConstants& cc) {
  Rat invP = make_rat(1, cc.P);
  Rat fq1 = 1 - cc.F / Rat(cc.Q);
  Rat fq2 = 1 - cc.F / Rat(cc.Q * cc.Q);
  const long settled = 2 * static_cast<long>(beta.prefix.size());
  Rat sum(0);
  long u = 0;
  while (u < settled) {
    long du = (u % 2 == 0 && beta.bit(static_cast<std::size_t>(u / 2)) == 0) ? 2 : 1;
    sum += inv_pow(cc.P, static_cast<unsigned long>(u)) * (du == 2 ? fq2 : fq1);
    u += du;
  }
  // Settled tail starting at even u: steps of 1 (tail bit 1) or 2 (tail bit 0).
  Rat pu = inv_pow(cc.P, static_cast<unsigned long>(u));
  if (beta.tail == 1)
    sum += fq1 * pu / (1 - invP);
  else
    sum += fq2 * pu / (1 - invP * invP);
  return cc.E * sum;
}

}  // namespace

IdentityReport verify_affine_identity(const PrimeParams& pp, const BetaSeq& beta) {
  CantorConstants cc = cantor_constants(pp);
  IdentityReport rep;
  rep.beta = beta.str();
  rep.affine = cc.R + cc.Rprime * beta_power_sum(beta, cc.P);
  rep.ef_form = ef_series(beta, cc);
  Schedule sched(pp, ells_from_beta(pp, beta));
  rep.series = sched.series_sum();
  rep.pass = rep.affine == rep.ef_form && rep.ef_form == rep.series;
  return rep;
}

Decomposition digit_decompose(const Rat& tau, const PrimeParams& pp) {
  if (tau < 0 || tau >= 1) throw std::invalid_argument("digit_decompose: tau must be in [0,1)");
  Decomposition dec;
  dec.tau = tau;
  const unsigned long q = static_cast<unsigned long>(pp.q);
  dec.base = pow_ui(pp.p, 2 * q * (q + 1));

  // Admissible iff the denominator is a power of p.
  Int den = tau.get_den();
  while (den % static_cast<long>(pp.p) == 0) den /= static_cast<long>(pp.p);
  if (den != 1)
    throw std::invalid_argument("digit_decompose: tau has no finite base-B expansion");

  Rat rest = tau;
  while (rest != 0) {
    rest *= Rat(dec.base);
    Int num = rest.get_num(), d;
    mpz_fdiv_q(d.get_mpz_t(), num.get_mpz_t(), rest.get_den().get_mpz_t());
    dec.digits.push_back(d);
    rest -= Rat(d);
  }

  // beta_j(m) = 1 iff j <= d(m); the number of such j in [1, B-1] is d(m).
  dec.reconstructed = 0;
  Rat scale(1);
  for (const Int& d : dec.digits) {
    Int count = d <= dec.base - 1 ? d : dec.base - 1;
    dec.counts.push_back(count);
    scale /= Rat(dec.base);
    dec.reconstructed += Rat(d) * scale;
  }
  bool counts_ok = dec.counts == dec.digits;
  dec.pass = counts_ok && dec.reconstructed == tau;
  return dec;
}

}  // namespace wander::cantor
