#include "zar/compile.hpp"
#include "zar/error.hpp"
#include "zar/semantics.hpp"
#include "zar/stdlib.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace zar {
namespace {

const Symbol out("out"), o1("o1"), o2("o2");

double total(const Pmf& p) {
  double s = 0;
  for (const auto& [v, m] : p) s += m;
  return s;
}

double mean_of(const Pmf& p) {
  double s = 0;
  for (const auto& [v, m] : p) s += to_double(v) * m;
  return s;
}

double sd_of(const Pmf& p) {
  const double mu = mean_of(p);
  double s = 0;
  for (const auto& [v, m] : p) s += (to_double(v) - mu) * (to_double(v) - mu) * m;
  return std::sqrt(s);
}

TEST(FlipTest, Examples) {
  Expectation heads = Expectation::point(out, Value::boolean(true));
  EXPECT_EQ(wp(false, flip(out, Expr::integer(1)), heads, State{}).value, ExtReal(1));
  EXPECT_EQ(wp(false, flip(out, Expr::rational(1, 2)), heads, State{}).value, ExtReal(Rational(1, 2)));
  EXPECT_EQ(wp(false, flip(out, Expr::rational(2, 3)), heads, State{}).value, ExtReal(Rational(2, 3)));
}

TEST(DieTest, SingleFace) {
  CwpResult r = cwp(die(Expr::integer(1)), Expectation::point(Symbol("x"), Value::integer(1)), State{});
  EXPECT_EQ(r.lo, ExtReal(1));
}

TEST(PmfTest, Normalized) {
  for (const Pmf& p : {primes_pmf(Rational(1, 2)), primes_pmf(Rational(1, 5)), die_pmf(200), bern_exp_pmf(1.5),
                       laplace_pmf(0.5), laplace_pmf(2), gaussian_pmf(0, 1), gaussian_pmf(10, 2)}) {
    EXPECT_NEAR(total(p), 1.0, 1e-12);
  }
}

TEST(PmfTest, Moments) {
  EXPECT_NEAR(mean_of(primes_pmf(Rational(1, 2))), 2.63590634216756063, 1e-9);
  EXPECT_NEAR(mean_of(primes_pmf(Rational(2, 3))), 3.23222699546654022, 1e-9);
  EXPECT_NEAR(mean_of(primes_pmf(Rational(1, 5))), 2.18670942661583652, 1e-9);
  EXPECT_NEAR(primes_pmf(Rational(1, 2)).at(Value::integer(2)), 0.602870856766446313, 1e-12);
  EXPECT_NEAR(mean_of(die_pmf(200)), 100.5, 1e-9);
  EXPECT_NEAR(sd_of(laplace_pmf(0.5)), 0.601689978712588526, 1e-9);
  EXPECT_NEAR(gaussian_pmf(0, 1).at(Value::integer(0)), 0.398942278266861706, 1e-12);
  EXPECT_NEAR(mean_of(gaussian_pmf(10, 2)), 10.0, 1e-9);
  EXPECT_THROW(primes_pmf(Rational(1)), Error);
  EXPECT_THROW(die_pmf(0), Error);
}

TEST(HygieneTest, FreshScratchPerCall) {
  Subroutines lib;
  Command a = lib.bern_exp(o1, Expr::rational(1, 2));
  Command b = lib.bern_exp(o2, Expr::rational(1, 2));
  VarSet va = all_vars(a), vb = all_vars(b);
  va.erase(o1);
  vb.erase(o2);
  for (Symbol v : va) EXPECT_EQ(vb.count(v), 0u) << v.name();

  Subroutines shared(true);
  EXPECT_TRUE(all_vars(shared.bern_exp(o1, Expr::integer(2))).count(Symbol("k")));
  EXPECT_TRUE(all_vars(shared.bern_exp(o2, Expr::integer(2))).count(Symbol("k")));
}

TEST(HygieneTest, IndependentDraws) {
  // Two draws with separate scratch: Pr(o1 and o2) = exp(-1/2)^2.
  FixpointConfig cfg;
  cfg.tolerance = Rational(1, 1000000000000LL);
  Subroutines lib;
  Command c = Command::seq(lib.bern_exp(o1, Expr::rational(1, 2)), lib.bern_exp(o2, Expr::rational(1, 2)));
  Expectation both([](const State& s) {
    return ExtReal(s.lookup(Symbol("o1")) == Value::boolean(true) && s.lookup(Symbol("o2")) == Value::boolean(true) ? 1 : 0);
  }, VarSet{o1, o2});
  const double e = 0.606530659712633423603799534991;
  EXPECT_NEAR(cwp(c, both, State{}, cfg).lo.to_double(), e * e, 1e-9);
}

TEST(StdlibTest, EveryProgramCompilesUnbiased) {
  Subroutines lib;
  const std::vector<Command> programs = {
      flip(out, Expr::rational(2, 3)),
      dueling_coins(Expr::rational(2, 3)),
      geometric_primes(Expr::rational(1, 5)),
      die(Expr::integer(200)),
      lib.bern_exp_0_1(out, Expr::rational(1, 2)),
      lib.bern_exp(out, Expr::integer(10)),
      lib.laplace(out, Expr::integer(1), Expr::integer(2)),
      lib.gaussian_0(out, Expr::integer(1)),
      lib.gaussian(out, Expr::integer(10), Expr::integer(2)),
      hare_tortoise(le(Expr::integer(10), Expr::var("time"))),
  };
  for (const Command& c : programs) EXPECT_TRUE(is_unbiased(compile_debiased(c, State{}), {}, 5));
}

TEST(StdlibTest, SubroutineSamples) {
  ExperimentConfig cfg;
  cfg.n = 20000;
  cfg.seed = 9;
  Subroutines lib;
  Report be = run_experiment(lib.bern_exp(out, Expr::rational(3, 2)), State{}, out, cfg, bern_exp_pmf(1.5));
  EXPECT_NEAR(be.mean, 0.22313016014842983, 4 * std::sqrt(0.2231 * 0.7769 / cfg.n));
  Report lap = run_experiment(lib.laplace(out, Expr::integer(2), Expr::integer(1)), State{}, out, cfg, laplace_pmf(0.5));
  EXPECT_NEAR(lap.stddev, 0.6017, 0.03);
  EXPECT_LT(lap.tv, 0.02);
  Report g = run_experiment(lib.gaussian(out, Expr::integer(0), Expr::integer(1)), State{}, out, cfg, gaussian_pmf(0, 1));
  EXPECT_NEAR(g.mean, 0, 0.04);
  EXPECT_NEAR(g.stddev, 1, 0.04);
  EXPECT_LT(g.tv, 0.03);
}

TEST(StdlibTest, ContradictoryObservation) {
  const Symbol h("h");
  Command c = Command::seq({
      die(Expr::integer(6), h),
      Command::loop(lt(Expr::var(h), Expr::integer(9)), Command::assign(h, Expr::var(h) + Expr::integer(1))),
      Command::observe(eq(Expr::var(h), Expr::integer(3))),
  });
  try {
    cwp(c, Expectation::one(), State{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kZeroDenominator);
  }
}

}  // namespace
}  // namespace zar
