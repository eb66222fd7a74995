#include "zar/compile.hpp"
#include "zar/error.hpp"
#include "zar/stats.hpp"
#include "zar/stdlib.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace zar {
namespace {

const Value va = Value::integer(0), vb = Value::integer(1);

Pmf random_pmf(std::mt19937& rng, int n) {
  std::uniform_real_distribution<double> u(0.01, 1.0);
  Pmf p;
  double sum = 0;
  for (int i = 0; i < n; ++i) sum += p[Value::integer(i)] = u(rng);
  for (auto& [v, m] : p) m /= sum;
  double fix = 1;
  for (const auto& [v, m] : p) fix -= m;
  p.begin()->second += fix;
  return p;
}

TEST(MetricTest, TvExamples) {
  Pmf p{{va, 1.0}};
  Pmf q{{va, 0.5}, {vb, 0.5}};
  EXPECT_DOUBLE_EQ(tv_distance(p, p), 0);
  EXPECT_DOUBLE_EQ(tv_distance(p, q), 0.5);
  EXPECT_DOUBLE_EQ(tv_distance(p, Pmf{{vb, 1.0}}), 1);
}

TEST(MetricTest, KlExamples) {
  Pmf p{{va, 1.0}};
  Pmf q{{va, 0.5}, {vb, 0.5}};
  EXPECT_DOUBLE_EQ(kl_divergence(p, p), 0);
  EXPECT_NEAR(kl_divergence(p, q), std::log(2.0), 1e-15);
  EXPECT_TRUE(std::isinf(kl_divergence(p, Pmf{{vb, 1.0}})));
}

TEST(MetricTest, SmapeExamples) {
  Pmf p{{va, 1.0}};
  EXPECT_DOUBLE_EQ(smape(p, p), 0);
  EXPECT_DOUBLE_EQ(smape(p, Pmf{{va, 0.0}, {vb, 1.0}}), 2);
  EXPECT_DOUBLE_EQ(smape(Pmf{{va, 0.75}, {vb, 0.25}}, Pmf{{va, 0.25}, {vb, 0.75}}), 1);
  EXPECT_DOUBLE_EQ(smape(Pmf{{va, 1.0}, {vb, 0.0}}, Pmf{{va, 1.0}, {vb, 0.0}}), 0);
}

TEST(MetricTest, RejectsUnnormalized) {
  Pmf bad{{va, 0.5}};
  Pmf good{{va, 1.0}};
  for (auto fn : {tv_distance, kl_divergence, smape}) {
    try {
      fn(bad, good);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kNotNormalized);
    }
  }
}

TEST(MetricTest, Identities) {
  std::mt19937 rng(11);
  for (int i = 0; i < 100; ++i) {
    Pmf p = random_pmf(rng, 1 + i % 9);
    Pmf q = random_pmf(rng, 1 + i % 9);
    EXPECT_NEAR(tv_distance(p, p), 0, 1e-15);
    EXPECT_NEAR(kl_divergence(p, p), 0, 1e-12);
    EXPECT_NEAR(smape(p, p), 0, 1e-15);
    EXPECT_DOUBLE_EQ(tv_distance(p, q), tv_distance(q, p));
    EXPECT_GE(kl_divergence(p, q), -1e-12);
    EXPECT_LE(tv_distance(p, q), 1);
  }
}

TEST(ReportTest, JsonFields) {
  Report r;
  r.param = "p=2/3";
  r.kl = std::numeric_limits<double>::infinity();
  r.n = 10;
  r.seed = 3;
  nlohmann::json j = to_json(r);
  for (const char* key : {"param", "mean", "stddev", "tv", "kl", "smape", "bit_mean", "bit_stddev", "n", "seed"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j.size(), 10u);
  EXPECT_TRUE(j["kl"].is_null());
  EXPECT_EQ(j["n"], 10);
  std::string header = csv_header();
  std::string row = csv_row(r);
  EXPECT_EQ(std::count(header.begin(), header.end(), ','), std::count(row.begin(), row.end(), ','));
}

TEST(DrawTest, IndependentOfWorkers) {
  const Symbol x("x");
  Tree t = compile_debiased(die(Expr::integer(6)), State{});
  SampleSet one = draw_samples(t, x, 10000, 17, 1);
  SampleSet four = draw_samples(t, x, 10000, 17, 4);
  EXPECT_EQ(one.values, four.values);
  EXPECT_EQ(one.bits, four.bits);
  SampleSet other = draw_samples(t, x, 10000, 18, 1);
  EXPECT_NE(one.values, other.values);
}

TEST(DrawTest, EquidistributedWithCwp) {
  // |freq(Q) - cwp [Q]| <= 4 sigma for events of the die and the primes.
  const Symbol x("x"), h("h");
  const std::uint64_t n = 20000;
  SampleSet die_samples = draw_samples(compile_debiased(die(Expr::integer(6)), State{}), x, n, 1);
  Pmf emp = die_samples.empirical();
  for (int k = 1; k <= 6; ++k) {
    const double p = 1.0 / 6;
    EXPECT_LE(std::abs(emp[Value::integer(k)] - p), 4 * std::sqrt(p * (1 - p) / n));
  }
  SampleSet primes = draw_samples(compile_debiased(geometric_primes(Expr::rational(1, 2)), State{}), h, n, 2);
  const double p2 = 0.602870856766446313;
  EXPECT_LE(std::abs(primes.empirical()[Value::integer(2)] - p2), 4 * std::sqrt(p2 * (1 - p2) / n));
}

TEST(ExperimentTest, DieSummary) {
  ExperimentConfig cfg;
  cfg.n = 20000;
  cfg.seed = 5;
  Report r = run_experiment(die(Expr::integer(6)), State{}, Symbol("x"), cfg, die_pmf(6));
  EXPECT_NEAR(r.mean, 3.5, 0.05);
  EXPECT_NEAR(r.bit_mean, 11.0 / 3, 0.1);
  EXPECT_LT(r.tv, 0.02);
  EXPECT_EQ(r.n, 20000u);
  Report again = run_experiment(die(Expr::integer(6)), State{}, Symbol("x"), cfg, die_pmf(6));
  EXPECT_EQ(to_json(r).dump(), to_json(again).dump());
}

TEST(ExperimentTest, OracleReference) {
  std::string note;
  Tree t = compile_debiased(dueling_coins(Expr::rational(2, 3)), State{});
  Pmf ref = oracle_pmf(t, Symbol("a"), &note);
  EXPECT_NEAR(ref[Value::boolean(true)], 0.5, 1e-6);
  EXPECT_NE(note.find("enumerate_paths"), std::string::npos);
}

}  // namespace
}  // namespace zar
