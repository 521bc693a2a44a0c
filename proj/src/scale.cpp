#include "wander/scale.hpp"

#include <algorithm>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace wander {

PrimeParams PrimeParams::for_prime(unsigned long p) {
  if (!is_prime(p)) throw std::invalid_argument("p must be prime, got " + std::to_string(p));
  PrimeParams pp;
  pp.p = p;
  const long lp = static_cast<long>(p);
  pp.q = (lp - 1) * (2 * lp * lp - 2 * lp - 1);
  // kappa = p^{2p-2} / (p^{2p-1} - p + 1)
  pp.kappa = make_rat(pow_ui(p, 2 * p - 2), pow_ui(p, 2 * p - 1) - lp + 1);
  return pp;
}

Rat rho_exponent(const PrimeParams& pp, long m) {
  if (m < 0) throw std::invalid_argument("rho_exponent: m must be >= 0");
  // -(1/(p-1))(1 - p^{-m}) = -(p^m - 1) / ((p-1) p^m)
  Int pm = pow_ui(pp.p, static_cast<unsigned long>(m));
  return make_rat(1 - pm, Int(static_cast<long>(pp.p) - 1) * pm);
}

EllSpec EllSpec::id() {
  EllSpec e;
  e.cycle = {1};
  return e;
}

void EllSpec::validate() const {
  if (cycle.empty()) throw std::invalid_argument("EllSpec: cycle must be nonempty");
  for (long v : prefix)
    if (v < 1) throw std::invalid_argument("EllSpec: increments must be >= 1");
  for (long v : cycle)
    if (v < 1) throw std::invalid_argument("EllSpec: increments must be >= 1");
}

long EllSpec::increment(std::size_t s) const {
  if (s < prefix.size()) return prefix[s];
  return cycle[(s - prefix.size()) % cycle.size()];
}

namespace {

std::vector<long> parse_increment_list(const std::string& text) {
  std::vector<long> out;
  if (text.empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    long v = 0;
    try {
      v = std::stol(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || item.empty())
      throw std::invalid_argument("EllSpec: bad increment '" + item + "'");
    out.push_back(v);
  }
  return out;
}

}  // namespace

EllSpec EllSpec::parse(const std::string& text) {
  if (text == "id") return id();
  EllSpec e;
  std::string rest = text;
  if (rest.rfind("prefix=", 0) == 0) {
    auto semi = rest.find(';');
    if (semi == std::string::npos)
      throw std::invalid_argument("EllSpec: expected ';cycle=' in '" + text + "'");
    e.prefix = parse_increment_list(rest.substr(7, semi - 7));
    rest = rest.substr(semi + 1);
  }
  if (rest.rfind("cycle=", 0) != 0)
    throw std::invalid_argument("EllSpec: expected 'id' or '[prefix=..;]cycle=..', got '" + text + "'");
  e.cycle = parse_increment_list(rest.substr(6));
  e.validate();
  return e;
}

std::string EllSpec::str() const {
  if (prefix.empty() && cycle.size() == 1 && cycle[0] == 1) return "id";
  std::string s = "prefix=";
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(prefix[i]);
  }
  s += ";cycle=";
  for (std::size_t i = 0; i < cycle.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(cycle[i]);
  }
  return s;
}

Schedule::Schedule(PrimeParams pp, EllSpec ells) : pp_(std::move(pp)), ells_(std::move(ells)) {
  ells_.validate();
  const long pm1 = static_cast<long>(pp_.p) - 1;
  sq_ = pm1 * pm1;
  ell_.push_back(0);  // l_0 = 0
}

void Schedule::extend_ell(std::size_t s) const {
  while (ell_.size() <= s)
    ell_.push_back(ell_.back() + ells_.increment(ell_.size() - 1));
}

long Schedule::ell(std::size_t s) const {
  extend_ell(s);
  return ell_[s];
}

long Schedule::special_block(std::size_t s) const { return ell(s) * sq_; }

std::size_t Schedule::s_of_k(long k) const {
  if (k < 0) throw std::invalid_argument("s_of_k: k must be >= 0");
  // l_s (p-1)^2 - 1 <= k  <  l_{s+1} (p-1)^2 - 1
  std::size_t s = 0;
  while (special_block(s + 1) - 1 <= k) ++s;
  return s;
}

bool Schedule::is_special(long i, std::size_t* s_out) const {
  if (i < 0) return false;
  std::size_t s = 0;
  while (special_block(s) < i) ++s;
  if (special_block(s) != i) return false;
  if (s_out) *s_out = s;
  return true;
}

void Schedule::extend_M(std::size_t k) const {
  while (M_.size() <= k) {
    long kk = static_cast<long>(M_.size());
    long s = static_cast<long>(s_of_k(kk));
    M_.push_back(Int(2 * kk + 2 + (2 * static_cast<long>(pp_.p) - 3) * ell(s)));
  }
}

void Schedule::extend_m(std::size_t k) const {
  const long p = static_cast<long>(pp_.p);
  if (m_.empty()) m_.push_back(Int(2 * p + 1));  // m_0 = 2p+1
  while (m_.size() <= k) {
    Int prev = M(static_cast<long>(m_.size()) - 1);
    m_.push_back((p - 1) * prev + 2 * p + 1);
  }
}

void Schedule::extend_N(std::size_t i) const {
  if (N_.empty()) N_.push_back(Int(0));
  while (N_.size() <= i) {
    long prev = static_cast<long>(N_.size()) - 1;
    N_.push_back(N_[prev] + m(prev) + M(prev));
  }
}

Int Schedule::M(long k) const {
  if (k < 0) throw std::invalid_argument("M: k must be >= 0");
  extend_M(static_cast<std::size_t>(k));
  return M_[static_cast<std::size_t>(k)];
}

Int Schedule::m(long k) const {
  if (k < 0) throw std::invalid_argument("m: k must be >= 0");
  extend_m(static_cast<std::size_t>(k));
  return m_[static_cast<std::size_t>(k)];
}

Int Schedule::N(long i) const {
  if (i < 0) throw std::invalid_argument("N: i must be >= 0");
  extend_N(static_cast<std::size_t>(i));
  return N_[static_cast<std::size_t>(i)];
}

namespace {

long to_long(const Int& v) {
  if (!v.fits_slong_p()) throw std::overflow_error("exponent too large for this build");
  return v.get_si();
}

}  // namespace

Rat Schedule::delta(long k) const {
  const long p = static_cast<long>(pp_.p);
  long mk = to_long(m(k));
  // -m_k/(p-1) + p/(p-1)^2 (1 - p^{-m_k}) + M_k
  Rat r = make_rat(-mk, p - 1);
  r += make_rat(p, sq_) * (1 - pow_p(pp_.p, -mk));
  r += Rat(M(k));
  return r;
}

Rat Schedule::delta_closed_form(long k) const {
  const long p = static_cast<long>(pp_.p);
  std::size_t s = s_of_k(k);
  long mk = to_long(m(k));
  // -(1/(p-1)^2)(2p - 3 + p^{-(m_k-1)}), plus (2p-3)(l_s - l_{s-1}) at the
  // final position of a block.
  Rat base = make_rat(-1, sq_) * (Rat(2 * p - 3) + pow_p(pp_.p, -(mk - 1)));
  if (s > 0 && k == special_block(s) - 1)
    return base + Rat(2 * p - 3) * Rat(ell(s) - ell(s - 1));
  return base;
}

Rat Schedule::block_delta_sum(std::size_t s) const {
  Rat sum = 0;
  for (long k = special_block(s); k < special_block(s + 1); ++k) sum += delta(k);
  return sum;
}

Rat Schedule::block_delta_sum_closed(std::size_t s) const {
  const long p = static_cast<long>(pp_.p);
  const long d = ell(s + 1) - ell(s);
  // -(p/(p-1)^2) * p^{2(p-1)}/(p^{2(p-1)}-1) * p^{-(q l_s + 2p + 1)} (1 - p^{-2 d (p-1)^3})
  Rat geo = make_rat(pow_ui(pp_.p, 2 * (pp_.p - 1)), pow_ui(pp_.p, 2 * (pp_.p - 1)) - 1);
  Rat head = pow_p(pp_.p, -(pp_.q * ell(s) + 2 * p + 1));
  Rat tail = 1 - pow_p(pp_.p, -2 * d * (p - 1) * (p - 1) * (p - 1));
  return make_rat(-p, sq_) * geo * head * tail;
}

Rat Schedule::tau_bracket(long inc) const {
  const long p = static_cast<long>(pp_.p);
  // 1/(p^{2(p-1)}-1) + p^{-q inc} - p^{2(p-1)}/(p^{2(p-1)}-1) p^{-2 inc (p-1)^3}
  Int p2 = pow_ui(pp_.p, 2 * (pp_.p - 1));
  Rat r = make_rat(1, p2 - 1);
  r += pow_p(pp_.p, -pp_.q * inc);
  r -= make_rat(p2, p2 - 1) * pow_p(pp_.p, -2 * inc * (p - 1) * (p - 1) * (p - 1));
  return r;
}

Rat Schedule::tau(std::size_t s) const {
  // (1/((p-1)^2 p^{q l_s + 2p})) * bracket(l_{s+1} - l_s)
  long inc = ell(s + 1) - ell(s);
  Rat scale = make_rat(1, sq_) * pow_p(pp_.p, -(pp_.q * ell(s) + 2 * static_cast<long>(pp_.p)));
  return scale * tau_bracket(inc);
}

Rat Schedule::tau_from_definition(std::size_t s) const {
  const long p = static_cast<long>(pp_.p);
  // -(p/(p-1)^2)(p^{-m_{l_s(p-1)^2}} - p^{-m_{l_{s+1}(p-1)^2}}) - sum of block deltas
  Rat head = make_rat(-p, sq_) *
             (pow_p(pp_.p, -to_long(m(special_block(s)))) - pow_p(pp_.p, -to_long(m(special_block(s + 1)))));
  return head - block_delta_sum(s);
}

Rat Schedule::r_exponent(std::size_t s) const {
  const long p = static_cast<long>(pp_.p);
  // (p/(p-1)) c_m with m = m_{l_s(p-1)^2} = q l_s + 2p + 1
  long mval = pp_.q * ell(s) + 2 * p + 1;
  return make_rat(-p, sq_) * (1 - pow_p(pp_.p, -mval));
}

Rat Schedule::weighted_tail(std::size_t s0, const std::function<Rat(long)>& w) const {
  const std::size_t pl = ells_.prefix.size();
  Rat total = 0;
  std::size_t sigma = s0;
  for (; sigma < std::max(s0, pl); ++sigma)
    total += w(ells_.increment(sigma)) *
             pow_p(pp_.p, -(pp_.q * ell(sigma) + static_cast<long>(sigma - s0)));
  // From here the increments repeat with period C and cycle sum L, so each
  // full period scales the terms by p^{-(qL + C)}.
  const std::size_t C = ells_.cycle.size();
  long L = 0;
  for (long v : ells_.cycle) L += v;
  Rat period = 0;
  for (std::size_t j = 0; j < C; ++j)
    period += w(ells_.increment(sigma + j)) *
              pow_p(pp_.p, -(pp_.q * ell(sigma + j) + static_cast<long>(sigma + j - s0)));
  Rat ratio = pow_p(pp_.p, -(pp_.q * L + static_cast<long>(C)));
  return total + period / (1 - ratio);
}

Rat Schedule::tail_sum(std::size_t s) const {
  // sum_u tau_{s+u} p^{-(u+1)}
  //   = (1/((p-1)^2 p^{2p+1})) sum_u bracket(inc(s+u)) p^{-(q l_{s+u} + u)}
  Rat scale = make_rat(1, sq_) * pow_p(pp_.p, -(2 * static_cast<long>(pp_.p) + 1));
  return scale * weighted_tail(s, [this](long inc) -> Rat { return tau_bracket(inc); });
}

Rat Schedule::tail_sum0(std::size_t s) const { return Rat(static_cast<long>(pp_.p)) * tail_sum(s); }

ExponentInterval Schedule::tail_sum_interval(std::size_t s, long terms) const {
  if (terms < 1) throw std::invalid_argument("tail_sum_interval: need at least one term");
  Rat partial = 0;
  for (long u = 0; u < terms; ++u)
    partial += tau(s + static_cast<std::size_t>(u)) * pow_p(pp_.p, -(u + 1));
  // tau_{s+u} < (1/(p-1)^2) p^{-(q l_{s+u} + 2p)} and l is strictly increasing,
  // so the dropped tail is below a geometric series with ratio p^{-(q+1)}.
  const long p = static_cast<long>(pp_.p);
  Rat bound = make_rat(1, sq_) *
              pow_p(pp_.p, -(pp_.q * ell(s + static_cast<std::size_t>(terms)) + 2 * p + terms + 1)) *
              make_rat(pow_ui(pp_.p, static_cast<unsigned long>(pp_.q + 1)),
                       pow_ui(pp_.p, static_cast<unsigned long>(pp_.q + 1)) - 1);
  return ExponentInterval{partial, partial + bound};
}

Rat Schedule::series_sum() const {
  return weighted_tail(0, [this](long inc) -> Rat {
    const long p = static_cast<long>(pp_.p);
    return 1 - pp_.kappa * pow_p(pp_.p, -2 * inc * (p - 1) * (p - 1) * (p - 1));
  });
}

Rat Schedule::t() const {
  const long p = static_cast<long>(pp_.p);
  // coefficient (p^{2p-1} - p + 1) / ((p-1)^2 p^{2p+1} (p^{2p-2} - 1))
  Rat coeff = make_rat(pow_ui(pp_.p, 2 * pp_.p - 1) - p + 1,
                       Int(sq_) * pow_ui(pp_.p, 2 * pp_.p + 1) * (pow_ui(pp_.p, 2 * pp_.p - 2) - 1));
  return make_rat(-p, sq_) + coeff * series_sum();
}

}  // namespace wander
