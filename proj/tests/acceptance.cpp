// Acceptance suite: one line per criterion, exact comparisons throughout.
// Exit status 0 iff every criterion passes.

#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#include "gen.hpp"
#include "wander/ball.hpp"
#include "wander/cantor.hpp"
#include "wander/field.hpp"
#include "wander/scale.hpp"

using namespace wander;

namespace {

int failures = 0;

struct Criterion {
  const char* label;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  bool ok = true;
  std::string detail;

  explicit Criterion(const char* l) : label(l) {}
  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
  ~Criterion() {
    double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    if (ok) {
      std::printf("[PASS] %s (%.0f ms)\n", label, ms);
    } else {
      std::printf("[FAIL] %s: %s\n", label, detail.c_str());
      ++failures;
    }
  }
};

Rat R(const char* s) { return parse_rat(s); }

}  // namespace

int main() {
  {
    Criterion c("criterion 1: diameter exponent -29/15 for p=2, l_s=s, by two independent routes");
    Schedule sched(PrimeParams::for_prime(2), EllSpec::id());
    c.require(sched.t() == R("-29/15"), "series route != -29/15");
    c.require(sched.r_exponent(0) + sched.tail_sum(0) == R("-29/15"), "checkpoint route != -29/15");
  }

  std::vector<ball::VerifyReport> replays;
  {
    Criterion c("criterion 2: orbit replay reproduces every closed form exactly (s <= 4)");
    struct Row {
      unsigned long p;
      const char* ells;
    };
    const Row rows[] = {{2, "id"}, {2, "cycle=2"}, {2, "prefix=1;cycle=2,1"}, {3, "id"}};
    for (const auto& row : rows) {
      Schedule sched(PrimeParams::for_prime(row.p), EllSpec::parse(row.ells));
      auto rep = ball::verify_diameter_theorem(sched, 4);
      for (const auto& cp : rep.checkpoints)
        c.require(cp.pass, std::string(row.ells) + ": mismatch at block " + std::to_string(cp.i));
      c.require(!rep.failure.has_value(), std::string(row.ells) + ": step error");
      replays.push_back(std::move(rep));
    }
    // pinned values on the p=2, l_s=s orbit
    Schedule sched(PrimeParams::for_prime(2), EllSpec::id());
    auto p8 = ball::propagate(sched, sched.t(), 8);
    c.require(p8.final_state.diam == R("-239/120"), "diameter at step 8 != -239/120");
    auto p22 = ball::propagate(sched, sched.t(), 22);
    c.require(p22.final_state.diam == R("-1919/960"), "diameter at step 22 != -1919/960");
    c.require(p22.final_state.diam == sched.r_exponent(2) + sched.tail_sum(2),
              "step-22 diameter != r_2 + tail_2");
  }

  {
    Criterion c("criterion 3: wild rule fires exactly at the special-block steps");
    for (const auto& rep : replays) {
      c.require(rep.wild_locus_ok, "wild locus mismatch");
      c.require(rep.wild_steps == rep.expected_wild_steps, "wild step list mismatch");
    }
  }

  {
    Criterion c("criterion 4: tau/delta identity suite over >=100 random schedules, s,k <= 20");
    std::mt19937_64 rng(0xACCE97);
    int pairs = 0;
    for (unsigned long p : {2ul, 3ul, 5ul}) {
      auto pp = PrimeParams::for_prime(p);
      for (int rep = 0; rep < 35; ++rep) {
        Schedule sched(pp, testgen::random_ellspec(rng));
        ++pairs;
        Rat bound = make_rat(1, (static_cast<long>(p) - 1) * (static_cast<long>(p) - 1)) *
                    pow_p(p, -2 * static_cast<long>(p));
        for (std::size_t s = 0; s <= 20; ++s) {
          c.require(sched.tau(s) == sched.tau_from_definition(s), "tau closed form != definition");
          c.require(sched.tau(s) > 0 && sched.tau(s) < bound, "tau bound violated");
        }
        for (long k = 0; k <= 20; ++k)
          c.require(sched.delta(k) == sched.delta_closed_form(k), "delta closed form mismatch");
        for (std::size_t s = 0; s <= 20; ++s)
          c.require(sched.block_delta_sum(s) == sched.block_delta_sum_closed(s),
                    "block delta sum mismatch");
        if (!c.ok) break;
      }
    }
    c.require(pairs >= 100, "population too small");
  }

  {
    Criterion c("criterion 5: affine Cantor identity for >=50 beta at p=2; constants chain at p=2,3");
    auto pp = PrimeParams::for_prime(2);
    std::mt19937_64 rng(0xCA7);
    int checked = 0;
    for (int rep = 0; rep < 50; ++rep) {
      auto beta = testgen::random_beta(rng);
      auto idrep = cantor::verify_affine_identity(pp, beta);
      c.require(idrep.pass, "identity failed for beta " + beta.str());
      ++checked;
    }
    c.require(checked >= 50, "population too small");
    for (unsigned long p : {2ul, 3ul}) {
      auto cc = cantor::cantor_constants(PrimeParams::for_prime(p));
      c.require(cc.Rprime != 0, "R' vanished");
      for (const auto& entry : cantor::inequality_chain(PrimeParams::for_prime(p)))
        c.require(entry.pass, "chain entry failed: " + entry.what);
    }
  }

  {
    Criterion c("criterion 6: base-B digit decomposition, 20 random finite expansions at p=2");
    auto pp = PrimeParams::for_prime(2);
    Int B = pow_ui(2, 24);
    std::mt19937_64 rng(0xD16175);
    std::uniform_int_distribution<int> len(1, 5);
    std::uniform_int_distribution<unsigned long> digit(0, (1ul << 24) - 1);
    for (int rep = 0; rep < 20; ++rep) {
      int n = len(rng);
      Rat tau = 0;
      Rat scale(1);
      for (int i = 1; i <= n; ++i) {
        scale /= Rat(B);
        tau += Rat(Int(digit(rng))) * scale;
      }
      auto dec = cantor::digit_decompose(tau, pp);
      c.require(dec.counts == dec.digits, "per-digit counting mismatch");
      c.require(dec.reconstructed == tau, "reconstruction not exact");
      c.require(dec.pass, "decomposition flagged failure");
    }
  }

  {
    Criterion c("criterion 7: component certification: exact doubling, escape, monotone escape time");
    Schedule sched(PrimeParams::for_prime(2), EllSpec::id());
    Rat t = sched.t();
    auto fast = ball::certify_component(sched, t + R("1/100"), 500);
    c.require(fast.escaped && fast.escape_step <= 500, "gap 1/100 did not escape within 500 steps");
    c.require(fast.matched_checkpoints >= 3, "too few matched checkpoints");
    c.require(!fast.differences.empty() && fast.differences[0] == R("1/100"), "initial gap wrong");
    for (std::size_t s = 0; s + 1 < fast.matched_checkpoints; ++s)
      c.require(fast.differences[s + 1] == 2 * fast.differences[s],
                "difference did not double at checkpoint " + std::to_string(s + 1));
    auto slow = ball::certify_component(sched, t + R("1/1000000"), 5000);
    c.require(slow.escaped, "gap 1e-6 did not escape within 5000 steps");
    c.require(fast.escape_step < slow.escape_step, "escape time not monotone in the gap");
  }

  {
    Criterion c("criterion 8: ramified-extension lemma checks pass 100/100 seeded trials");
    // concrete affine witness: a = 1/2, v(P(3) - P(7)) = 1
    auto a = field::PadicElement::from_rational(2, 1, R("1/2"), 96);
    auto diff = field::eval_P(a, field::PadicElement::from_integer(2, 1, 7, 96)) -
                field::eval_P(a, field::PadicElement::from_integer(2, 1, 3, 96));
    c.require(diff.valuation() == Rat(1), "affine witness valuation != 1");
    // concrete wild witness at e=4: x = pi^2, eps = pi^3
    auto a4 = field::PadicElement::from_rational(2, 4, R("1/2"), 256);
    auto x = field::PadicElement::pi_power(2, 4, 2, 256);
    auto eps = field::PadicElement::pi_power(2, 4, 3, 256);
    auto wdiff = field::eval_P(a4, x + eps) - field::eval_P(a4, x);
    c.require(wdiff.valuation() == R("1/2"), "wild witness valuation != 1/2");

    struct Row {
      unsigned long p;
      unsigned e;
      long m;
    };
    const Row contraction[] = {{2, 4, 1}, {2, 4, 2}, {3, 12, 1}, {3, 9, 2}};
    for (const auto& row : contraction) {
      field::LabConfig cfg;
      cfg.p = row.p;
      cfg.e = row.e;
      cfg.seed = 7;
      cfg.prec = 24 * static_cast<long>(row.e);
      for (int item : {1, 2, 3}) {
        auto rep = field::check_contraction_lemma(cfg, item, row.m, 100);
        c.require(rep.passes == 100 && rep.all_pass(),
                  "contraction item " + std::to_string(item) + " failed at p=" + std::to_string(row.p) +
                      " m=" + std::to_string(row.m));
      }
    }
    for (unsigned long p : {2ul, 3ul})
      for (long M : {2L, 3L, 4L}) {
        field::LabConfig cfg;
        cfg.p = p;
        cfg.e = 1;
        cfg.seed = 7;
        auto rep = field::check_perturbation_lemmas(cfg, 42, M, 100);
        c.require(rep.passes == 100 && rep.all_pass(),
                  "M-step perturbation failed at p=" + std::to_string(p) + " M=" + std::to_string(M));
      }
    const Row zeros[] = {{2, 2, 1}, {2, 4, 2}, {2, 8, 3}, {3, 3, 1}, {3, 9, 2}, {3, 27, 3}};
    for (const auto& row : zeros) {
      field::LabConfig cfg;
      cfg.p = row.p;
      cfg.e = row.e;
      cfg.seed = 7;
      cfg.prec = 24 * static_cast<long>(row.e);
      auto rep = field::check_perturbation_lemmas(cfg, 43, row.m, 100);
      c.require(rep.passes == 100 && rep.all_pass(),
                "m-step perturbation failed at p=" + std::to_string(row.p) + " m=" + std::to_string(row.m));
    }
  }

  if (failures == 0)
    std::printf("acceptance: all criteria passed\n");
  else
    std::printf("acceptance: %d criterion(s) FAILED\n", failures);
  return failures == 0 ? 0 : 1;
}
