#include "zar/error.hpp"
#include "zar/semantics.hpp"
#include "zar/stdlib.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace zar {
namespace {

const Symbol x("x"), a("a"), h("h"), out("out");

// Reference values computed independently with mpmath (30 digits).
constexpr double kExpMinusHalf = 0.606530659712633423603799534991;
constexpr double kExpMinusThreeHalves = 0.223130160148429828933280470764;
constexpr double kExpMinusOne = 0.367879441171442321595523770161;
constexpr double kPrimesHalfAt2 = 0.602870856766446313225884300727;
constexpr double kPrimesTwoThirdsAt2 = 0.468219826665389810905110885829;
constexpr double kTanhOne = 0.761594155955764888119458282605;

Expectation is_true(Symbol v) { return Expectation::point(v, Value::boolean(true)); }

ErrorKind error_kind(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::kInternal;
}

TEST(WpTest, LoopFree) {
  State s{{x, Value::integer(5)}};
  EXPECT_EQ(wp(false, Command::skip(), Expectation::from_expr(Expr::var(x)), s).value, ExtReal(5));
  EXPECT_EQ(wp(false, flip(x, Expr::rational(1, 2)), is_true(x), State{}).value, ExtReal(Rational(1, 2)));
  EXPECT_EQ(wp(false, flip(x, Expr::rational(2, 3)), is_true(x), State{}).value, ExtReal(Rational(2, 3)));
  EXPECT_EQ(wp(false, flip(x, Expr::integer(1)), is_true(x), State{}).value, ExtReal(1));
  Command c = Command::seq(flip(x, Expr::rational(1, 3)), Command::observe(Expr::var(x)));
  EXPECT_EQ(wp(false, c, Expectation::one(), State{}).value, ExtReal(Rational(1, 3)));
  EXPECT_EQ(wp(true, c, Expectation::zero(), State{}).value, ExtReal(Rational(2, 3)));
}

TEST(WpTest, Divergence) {
  Command spin = Command::loop(Expr::boolean(true), Command::skip());
  FixpointConfig cfg;
  cfg.max_iters = 50;
  InferenceResult lower = wp(false, spin, Expectation::one(), State{}, cfg);
  EXPECT_EQ(lower.value, ExtReal(0));
  EXPECT_EQ(wlp(false, spin, Expectation::zero(), State{}, cfg).value, ExtReal(1));
}

TEST(WlpTest, Examples) {
  EXPECT_EQ(wlp(false, Command::observe(Expr::boolean(false)), Expectation::one(), State{}).value, ExtReal(0));
  EXPECT_EQ(wlp(false, flip(x, Expr::rational(2, 3)), Expectation::one(), State{}).value, ExtReal(1));
  EXPECT_EQ(error_kind([] { wlp(false, Command::skip(), Expectation::constant(2), State{}); }),
            ErrorKind::kBoundError);
}

TEST(WpTest, Errors) {
  EXPECT_EQ(error_kind([] { wp(false, flip(x, Expr::rational(3, 2)), Expectation::one(), State{}); }),
            ErrorKind::kChoiceOutOfRange);
  EXPECT_EQ(error_kind([] {
              wp(false, Command::uniform(Expr::integer(0), x, Command::skip()), Expectation::one(), State{});
            }),
            ErrorKind::kUniformNonPositive);
  EXPECT_EQ(error_kind([] {
              wp(false, Command::assign(x, Expr::integer(1) / Expr::var(a)), Expectation::one(), State{});
            }),
            ErrorKind::kDivisionByZero);
  EXPECT_EQ(error_kind([] { wp(false, Command::ite(Expr::integer(1), Command::skip(), Command::skip()),
                               Expectation::one(), State{}); }),
            ErrorKind::kTypeError);
}

TEST(CwpTest, Conditioning) {
  EXPECT_EQ(cwp(flip(x, Expr::rational(1, 2)), is_true(x), State{}).lo, ExtReal(Rational(1, 2)));
  Command c = Command::seq(flip(x, Expr::rational(1, 2)), Command::observe(Expr::var(x)));
  CwpResult r = cwp(c, is_true(x), State{});
  EXPECT_EQ(r.lo, ExtReal(1));
  ASSERT_TRUE(r.hi);
  EXPECT_EQ(*r.hi, ExtReal(1));
  EXPECT_EQ(error_kind([] { cwp(Command::observe(Expr::boolean(false)), Expectation::one(), State{}); }),
            ErrorKind::kZeroDenominator);
}

TEST(CwpTest, DieIsExactlyUniform) {
  for (int n : {1, 6, 7, 12}) {
    for (int k = 1; k <= n; ++k) {
      CwpResult r = cwp(die(Expr::integer(n)), Expectation::point(x, Value::integer(k)), State{});
      EXPECT_EQ(r.lo, ExtReal(Rational(1, n))) << n << " " << k;
      EXPECT_TRUE(r.converged);
    }
  }
}

TEST(CwpTest, DuelingCoinsIsFair) {
  FixpointConfig cfg;
  cfg.tolerance = Rational(1, 1000000000000LL);
  for (Rational p : {Rational(1, 2), Rational(2, 3), Rational(4, 5), Rational(1, 20)}) {
    CwpResult r = cwp(dueling_coins(Expr::rational(p)), is_true(a), State{}, cfg);
    EXPECT_NEAR(r.lo.to_double(), 0.5, 1e-9) << p;
    ASSERT_TRUE(r.hi);
    EXPECT_LE(r.lo, *r.hi);
  }
}

TEST(CwpTest, PrimesPosterior) {
  FixpointConfig cfg;
  cfg.tolerance = Rational(1, 1000000000000LL);
  for (auto [p, want] : {std::pair{Rational(1, 2), kPrimesHalfAt2}, std::pair{Rational(2, 3), kPrimesTwoThirdsAt2}}) {
    CwpResult r = cwp(geometric_primes(Expr::rational(p)), Expectation::point(h, Value::integer(2)), State{}, cfg);
    ASSERT_TRUE(r.hi);
    EXPECT_NEAR(r.lo.to_double(), want, 1e-9);
    EXPECT_LE(r.lo.to_double(), want + 1e-12);
    EXPECT_GE(r.hi->to_double(), want - 1e-12);
  }
}

TEST(CwpTest, BernoulliExponential) {
  FixpointConfig cfg;
  cfg.tolerance = Rational(1, 1000000000000LL);
  auto pr = [&](const Command& c) { return cwp(c, is_true(out), State{}, cfg).lo.to_double(); };
  EXPECT_EQ(pr(Subroutines().bern_exp_0_1(out, Expr::integer(0))), 1.0);
  EXPECT_NEAR(pr(Subroutines().bern_exp_0_1(out, Expr::rational(1, 2))), kExpMinusHalf, 1e-9);
  EXPECT_NEAR(pr(Subroutines().bern_exp(out, Expr::rational(3, 2))), kExpMinusThreeHalves, 1e-9);

  // gamma = 1 through the small branch and through the loop branch.
  Subroutines lib;
  const Symbol i("i"), b("b");
  Command looped = Command::seq({
      Command::assign(i, Expr::integer(1)),
      Command::assign(b, Expr::boolean(true)),
      Command::loop(Expr::var(b) && le(Expr::var(i), Expr::integer(1)),
                    Command::seq(lib.bern_exp_0_1(b, Expr::integer(1)), Command::assign(i, Expr::var(i) + Expr::integer(1)))),
      Command::ite(Expr::var(b), lib.bern_exp_0_1(out, Expr::integer(0)), Command::assign(out, Expr::boolean(false))),
  });
  const double small = pr(Subroutines().bern_exp(out, Expr::integer(1)));
  EXPECT_NEAR(small, kExpMinusOne, 1e-9);
  EXPECT_NEAR(pr(looped), small, 1e-9);
}

TEST(CwpTest, LaplaceAtZero) {
  FixpointConfig cfg;
  cfg.tolerance = Rational(1, 1000000);
  CwpResult r = cwp(Subroutines().laplace(out, Expr::integer(2), Expr::integer(1)),
                    Expectation::point(out, Value::integer(0)), State{}, cfg);
  ASSERT_TRUE(r.hi);
  EXPECT_LE(r.lo.to_double(), kTanhOne + 1e-12);
  EXPECT_GE(r.hi->to_double(), kTanhOne - 1e-12);
  EXPECT_NEAR(r.lo.to_double(), kTanhOne, 1e-4);
}

TEST(InvariantSumTest, Exact) {
  EXPECT_EQ(invariant_sum_check(Command::skip(), Expectation::constant(Rational(1, 2)), State{}), 0);
  EXPECT_EQ(invariant_sum_check(flip(x, Expr::rational(1, 3)), is_true(x), State{}), 0);
  Command c = Command::seq(flip(x, Expr::rational(1, 3)), Command::observe(Expr::var(x)));
  EXPECT_EQ(invariant_sum_check(c, is_true(x), State{}, {}, false), 0);
  EXPECT_EQ(invariant_sum_check(c, is_true(x), State{}, {}, true), 0);
}

TEST(InvariantSumTest, DuelingCoinsResidual) {
  for (std::size_t n : {1, 5, 10, 20}) {
    FixpointConfig cfg;
    cfg.max_iters = n;
    cfg.tolerance = 0;
    cfg.closed_form = false;
    Rational gap = invariant_sum_check(dueling_coins(Expr::rational(2, 3)), is_true(a), State{}, cfg);
    EXPECT_LE(to_double(gap), 2 * std::pow(5.0 / 9.0, double(n))) << n;
  }
}

TEST(FixpointTest, ClosedFormMatchesIteration) {
  FixpointConfig exact;
  FixpointConfig iterated;
  iterated.closed_form = false;
  iterated.tolerance = Rational(1, 1000000000000LL);
  const Symbol y("y");
  Command c = Command::seq(Command::assign(x, Expr::boolean(true)),
                           Command::loop(Expr::var(x), Command::seq(flip(y, Expr::rational(1, 3)), flip(x, Expr::rational(1, 2)))));
  Expectation f = is_true(y);
  InferenceResult r1 = wp(false, c, f, State{}, exact);
  InferenceResult r2 = wp(false, c, f, State{}, iterated);
  EXPECT_GT(r1.stats.closed_forms, 0u);
  EXPECT_EQ(r2.stats.closed_forms, 0u);
  EXPECT_EQ(r1.value, ExtReal(Rational(1, 3)));
  EXPECT_NEAR(r1.value.to_double(), r2.value.to_double(), 1e-9);
}

}  // namespace
}  // namespace zar
