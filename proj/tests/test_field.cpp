#include <doctest.h>

#include <random>

#include "wander/field.hpp"
#include "wander/scale.hpp"

using namespace wander;
using namespace wander::field;

namespace {
Rat R(const char* s) { return parse_rat(s); }

PadicElement I(unsigned long p, unsigned e, long n, long prec = 64) {
  return PadicElement::from_integer(p, e, n, prec);
}
}  // namespace

TEST_CASE("integer digit arithmetic embeds") {
  auto three = I(2, 1, 3), seven = I(2, 1, 7);
  auto ten = three + seven;
  CHECK((ten - I(2, 1, 10)).is_zero_at_precision());
  CHECK(ten.digit(1) == 1);
  CHECK(ten.digit(3) == 1);
  CHECK(ten.digit(0) == 0);
  auto prod = three * seven;
  CHECK((prod - I(2, 1, 21)).is_zero_at_precision());
  CHECK(prod.valuation() == Rat(0));
  auto cancel = I(2, 1, 5) - I(2, 1, 5);
  CHECK(cancel.is_zero_at_precision());
  CHECK(!cancel.valuation().has_value());  // precision exhaustion signal
  auto neg = I(2, 1, 3) - I(2, 1, 7);      // -4
  CHECK(neg.valuation() == Rat(2));
  CHECK(((-neg) - I(2, 1, 4)).is_zero_at_precision());
}

TEST_CASE("uniformizer powers") {
  auto pi2 = PadicElement::pi_power(2, 4, 2, 64);
  auto pi3 = PadicElement::pi_power(2, 4, 3, 64);
  auto prod = pi2 * pi3;
  CHECK(prod.valuation() == R("5/4"));
  CHECK(prod.digit(5) == 1);
  // pi^4 = 2
  auto pi4 = PadicElement::pi_power(2, 4, 4, 64);
  CHECK((pi4 - I(2, 4, 2)).is_zero_at_precision());
}

TEST_CASE("rational embeddings") {
  auto half = PadicElement::from_rational(2, 1, R("1/2"), 64);
  CHECK(half.valuation() == Rat(-1));
  CHECK(((half * I(2, 1, 2)) - I(2, 1, 1)).is_zero_at_precision());
  auto third = PadicElement::from_rational(2, 1, R("1/3"), 64);
  CHECK(third.valuation() == Rat(0));
  CHECK(((third * I(2, 1, 3)) - I(2, 1, 1)).is_zero_at_precision());
  auto neg = PadicElement::from_rational(2, 1, R("-9/4"), 64);
  CHECK(neg.valuation() == Rat(-2));
  CHECK(((neg * I(2, 1, 4)) + I(2, 1, 9)).is_zero_at_precision());
}

TEST_CASE("eval_P concrete values") {
  auto a = PadicElement::from_rational(2, 1, R("1/2"), 96);
  auto p3 = eval_P(a, I(2, 1, 3, 96));
  CHECK((p3 - I(2, 1, 18, 96)).is_zero_at_precision());
  auto p7 = eval_P(a, I(2, 1, 7, 96));
  CHECK((p7 - I(2, 1, 196, 96)).is_zero_at_precision());
  auto z0 = eval_P(a, PadicElement(2, 1, 96));
  CHECK(z0.is_zero_at_precision());
  // the concrete affine-rule witness: v(P(3) - P(7)) = 1, and 196-18 = 178 = 2*89
  auto diff = p7 - p3;
  CHECK(diff.valuation() == Rat(1));
  CHECK((diff - I(2, 1, 178, 96)).is_zero_at_precision());
}

TEST_CASE("ultrametric law on random pairs") {
  std::mt19937_64 rng(5150);
  std::uniform_int_distribution<long> idx(-8, 24);
  for (unsigned long p : {2ul, 3ul}) {
    for (int rep = 0; rep < 500; ++rep) {
      auto x = PadicElement::random_unit(p, 2, idx(rng), 72, rng);
      auto y = PadicElement::random_unit(p, 2, idx(rng), 72, rng);
      auto sum = x + y;
      Rat vx = *x.valuation(), vy = *y.valuation();
      if (sum.valuation()) CHECK(*sum.valuation() >= std::min(vx, vy));
      if (vx != vy) {
        REQUIRE(sum.valuation().has_value());
        CHECK(*sum.valuation() == std::min(vx, vy));
      }
    }
  }
}

TEST_CASE("distributivity at tracked precision") {
  std::mt19937_64 rng(6021);
  std::uniform_int_distribution<long> idx(-4, 12);
  for (int rep = 0; rep < 500; ++rep) {
    auto x = PadicElement::random_unit(3, 2, idx(rng), 60, rng);
    auto y = PadicElement::random_unit(3, 2, idx(rng), 60, rng);
    auto z = PadicElement::random_unit(3, 2, idx(rng), 60, rng);
    auto lhs = (x + y) * z;
    auto rhs = x * z + y * z;
    CHECK((lhs - rhs).is_zero_at_precision());
  }
}

TEST_CASE("escape rate for |z| > 1") {
  // v(P(z)) = v_a + (p+1) v(z) when v(z) < 0
  std::mt19937_64 rng(888);
  for (unsigned long p : {2ul, 3ul}) {
    std::uniform_int_distribution<long> idx(-6, -1);
    for (int rep = 0; rep < 40; ++rep) {
      long va = -1;
      auto a = PadicElement::random_unit(p, 1, va, 96, rng);
      long vz = idx(rng);
      auto z = PadicElement::random_unit(p, 1, vz, 96, rng);
      auto out = eval_P(a, z);
      REQUIRE(out.valuation().has_value());
      CHECK(*out.valuation() == Rat(va + (static_cast<long>(p) + 1) * vz));
    }
  }
}

TEST_CASE("contraction lemma witnesses, e=4") {
  LabConfig cfg;
  cfg.p = 2;
  cfg.e = 4;
  cfg.seed = 7;
  cfg.v_a = Rat(-1);
  // item 2 witness: x = pi^2, eps = pi^3, v(P(x+eps) - P(x)) = 1/2
  auto a = PadicElement::from_rational(2, 4, R("1/2"), 256);
  auto x = PadicElement::pi_power(2, 4, 2, 256);
  auto eps = PadicElement::pi_power(2, 4, 3, 256);
  auto diff = eval_P(a, x + eps) - eval_P(a, x);
  CHECK(diff.valuation() == R("1/2"));
  // item 1 witness: v(eps) = 5/4 above the threshold, image distance 5/4
  auto eps1 = PadicElement::pi_power(2, 4, 5, 256);
  auto diff1 = eval_P(a, x + eps1) - eval_P(a, x);
  CHECK(diff1.valuation() == R("5/4"));
}

TEST_CASE("contraction lemma trials pass 100%") {
  struct Row {
    unsigned long p;
    unsigned e;
    long m;
  };
  // e chosen so the valuation grids of items 1 and 2 are feasible
  const Row rows[] = {{2, 4, 1}, {2, 4, 2}, {3, 12, 1}, {3, 9, 2}};
  for (const auto& row : rows) {
    LabConfig cfg;
    cfg.p = row.p;
    cfg.e = row.e;
    cfg.seed = 20260810;
    cfg.prec = 24 * static_cast<long>(row.e);
    for (int item : {1, 2, 3}) {
      auto rep = check_contraction_lemma(cfg, item, row.m, 100);
      INFO("p=", row.p, " e=", row.e, " m=", row.m, " item=", item);
      CHECK(rep.passes == 100);
      CHECK(rep.failures.empty());
      CHECK(rep.all_pass());
    }
  }
}

TEST_CASE("item 2 grid infeasibility is reported") {
  LabConfig cfg;
  cfg.p = 2;
  cfg.e = 2;  // (1/2, 1) contains no half-integer point
  cfg.seed = 1;
  CHECK_THROWS_AS(check_contraction_lemma(cfg, 2, 1, 10), grid_error);
}

TEST_CASE("perturbation lemmas pass 100%") {
  SUBCASE("M-step from the fixed-point basin") {
    for (unsigned long p : {2ul, 3ul}) {
      for (long M : {2L, 3L, 4L}) {
        LabConfig cfg;
        cfg.p = p;
        cfg.e = 1;
        cfg.seed = 4711;
        auto rep = check_perturbation_lemmas(cfg, 42, M, 100);
        INFO("p=", p, " M=", M);
        CHECK(rep.passes == 100);
        CHECK(rep.all_pass());
      }
    }
  }
  SUBCASE("m-step from the sphere") {
    struct Row {
      unsigned long p;
      unsigned e;
      long m;
    };
    const Row rows[] = {{2, 2, 1}, {2, 4, 2}, {2, 8, 3}, {3, 3, 1}, {3, 9, 2}, {3, 27, 3}};
    for (const auto& row : rows) {
      LabConfig cfg;
      cfg.p = row.p;
      cfg.e = row.e;
      cfg.seed = 929;
      cfg.prec = 24 * static_cast<long>(row.e);
      auto rep = check_perturbation_lemmas(cfg, 43, row.m, 100);
      INFO("p=", row.p, " e=", row.e, " m=", row.m);
      CHECK(rep.passes == 100);
      CHECK(rep.all_pass());
    }
  }
}

TEST_CASE("degenerate control: identical orbits vanish at precision") {
  auto a = PadicElement::from_rational(2, 1, R("1/2"), 64);
  auto x = I(2, 1, 3);
  auto u = eval_P(a, x), up = eval_P(a, x);
  auto diff = u - up;
  CHECK(diff.is_zero_at_precision());
  CHECK(!diff.valuation().has_value());
}

TEST_CASE("identical seed reproduces the report") {
  LabConfig cfg;
  cfg.p = 2;
  cfg.e = 4;
  cfg.seed = 616;
  cfg.prec = 96;
  auto r1 = check_contraction_lemma(cfg, 2, 1, 50);
  auto r2 = check_contraction_lemma(cfg, 2, 1, 50);
  CHECK(r1.digest == r2.digest);
  CHECK(r1.passes == r2.passes);
  cfg.seed = 617;
  auto r3 = check_contraction_lemma(cfg, 2, 1, 50);
  CHECK(r1.digest != r3.digest);
}

TEST_CASE("config validation") {
  LabConfig cfg;
  cfg.p = 2;
  cfg.e = 2;
  cfg.v_a = R("-1/3");  // not on the (1/2)Z grid
  CHECK_THROWS_AS(cfg.validate(), grid_error);
  cfg.v_a = R("-3");  // below -(p-1)
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.v_a = Rat(0);
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.p = 9;
  cfg.v_a = Rat(-1);
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
