#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "skirental/experiments.hpp"

using namespace skirental;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.trials = 30;
  c.lambdas = {0.1, 0.5};
  c.sigmas = {0.0, 20.0};
  c.master_seed = 12345;
  return c;
}

std::string records_csv(const ExperimentConfig& c) {
  std::ostringstream out;
  write_records_csv(out, run_grid(c), c);
  return out.str();
}

}  // namespace

TEST(GenInstance, RepairExample) {
  std::vector<std::uint64_t> d{4, 10};
  std::vector<double> r{0.5, 0.15};
  const auto c = repaired_costs(d, r);
  EXPECT_EQ(c[0], 2.0);
  EXPECT_NEAR(r[1], 0.2 + 1e-4, 1e-15);
  EXPECT_NEAR(c[1], 2.001, 1e-12);
}

TEST(GenInstance, RepairKeepsRatesSortedAndCostsNondecreasing) {
  CounterStream rng(8, 120);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 2 + rng.below(20);
    std::set<std::uint64_t> ds;
    while (ds.size() < n) ds.insert(1 + rng.below(60));
    std::vector<std::uint64_t> d(ds.begin(), ds.end());
    std::vector<double> r(n);
    for (auto& x : r) x = rng.open_unit();
    std::sort(r.begin(), r.end());
    const auto c = repaired_costs(d, r);
    for (std::size_t i = 1; i < n; ++i) {
      EXPECT_LE(r[i - 1], r[i]);
      EXPECT_LE(c[i - 1], c[i]);
    }
  }
}

TEST(GenInstance, Shape) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    CounterStream rng(seed, 121);
    const auto inst = gen_instance(rng);
    ASSERT_EQ(inst.options.size(), 15u);
    for (std::size_t i = 0; i < 15; ++i) {
      const auto d = inst.options[i].duration.count();
      EXPECT_GE(d, 1u);
      EXPECT_LE(d, 50u);
      EXPECT_GT(inst.options[i].cost, 0.0);
      if (i > 0) {
        EXPECT_LT(inst.options[i - 1].duration.count(), d);
        EXPECT_LE(inst.options[i - 1].cost, inst.options[i].cost);
      }
    }
  }
  CounterStream rng(0, 0);
  EXPECT_THROW(gen_instance(rng, 0, 50), std::invalid_argument);
  EXPECT_THROW(gen_instance(rng, 51, 50), std::invalid_argument);
}

TEST(Prediction, RoundingExamples) {
  EXPECT_EQ(noisy_prediction(137, 0.0), 137u);
  EXPECT_EQ(noisy_prediction(10, -12.4), 1u);
  EXPECT_EQ(noisy_prediction(3, 0.5), 4u);
  EXPECT_EQ(noisy_prediction(3, -0.5), 3u);
  EXPECT_EQ(noisy_prediction(3, 0.49), 3u);
  EXPECT_EQ(round_half_up(-2.5), -2.0);
}

TEST(Prediction, ZeroNoiseIsExact) {
  CounterStream rng(5, 122);
  for (int i = 0; i < 1000; ++i) {
    const auto [T, That] = gen_T_and_prediction(rng, 0.0);
    EXPECT_GE(T, 1u);
    EXPECT_LE(T, 500u);
    EXPECT_EQ(T, That);
  }
  EXPECT_THROW(gen_T_and_prediction(rng, -1.0), std::invalid_argument);
}

TEST(Prediction, NoiseHasTheRequestedSpread) {
  CounterStream rng(6, 123);
  double sum = 0.0, sq = 0.0;
  const int n = 20000;
  int kept = 0;
  for (int i = 0; i < n; ++i) {
    const auto [T, That] = gen_T_and_prediction(rng, 5.0);
    if (T < 30) continue;  // away from the clamp at 1
    const double err = static_cast<double>(That) - static_cast<double>(T);
    sum += err;
    sq += err * err;
    ++kept;
  }
  const double mean = sum / kept, sd = std::sqrt(sq / kept - mean * mean);
  EXPECT_NEAR(mean, 0.0, 0.15);
  EXPECT_NEAR(sd, std::sqrt(25.0 + 1.0 / 12.0), 0.15);
}

TEST(Grid, RecordCounts) {
  ExperimentConfig c;
  c.trials = 1;
  c.lambdas = {0.3};
  c.sigmas = {0.0};
  EXPECT_EQ(run_grid(c).size(), 3u);
  const auto cfg = small_config();
  const auto recs = run_grid(cfg);
  EXPECT_EQ(recs.size(), 2u * 2u * 30u * 3u);
  for (const auto& r : recs) {
    if (r.sigma == 0.0) EXPECT_EQ(r.T, r.That);
    EXPECT_GE(r.ratio, 1.0 - 1e-9);
    EXPECT_EQ(r.ratio, r.alg_cost / r.opt_cost);
    if (r.strategy == StrategyKind::DetLA) EXPECT_LE(r.ratio, 2.0 + 2.0 / r.lambda + 1e-9);
  }
}

TEST(Grid, TrialsShareInstanceAcrossStrategies) {
  const auto recs = run_grid(small_config());
  for (std::size_t i = 0; i < recs.size(); i += 3) {
    EXPECT_EQ(recs[i].T, recs[i + 2].T);
    EXPECT_EQ(recs[i].opt_cost, recs[i + 1].opt_cost);
    EXPECT_EQ(recs[i].trial, recs[i + 2].trial);
  }
}

TEST(Grid, CellIsRecomputableInIsolation) {
  const auto cfg = small_config();
  const auto recs = run_grid(cfg);
  // lambda index 1, sigma index 1, trial 7.
  const std::size_t idx = ((1 * 2 + 1) * cfg.trials + 7) * 3;
  const auto one = run_trial(cfg, 1, 1, 7);
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_EQ(one[k].alg_cost, recs[idx + k].alg_cost);
    EXPECT_EQ(one[k].That, recs[idx + k].That);
  }
}

TEST(Grid, CsvIsDeterministicAndIndependentOfWorkers) {
  auto cfg = small_config();
  const auto a = records_csv(cfg);
  EXPECT_EQ(a, records_csv(cfg));
  cfg.jobs = 4;
  EXPECT_EQ(a, records_csv(cfg));
  EXPECT_EQ(a.rfind("# charging=lazy master_seed=12345", 0), 0u);
  EXPECT_NE(a.find("\nlambda,sigma,strategy,trial,T,That,alg_cost,opt_cost,ratio\n"), std::string::npos);
  EXPECT_NE(a.find("anand-doubling-baseline"), std::string::npos);
  cfg.master_seed = 12346;
  EXPECT_NE(a, records_csv(cfg));
}

TEST(Grid, Validation) {
  ExperimentConfig c = small_config();
  c.trials = 0;
  EXPECT_THROW(run_grid(c), std::invalid_argument);
  c = small_config();
  c.lambdas = {1.5};
  EXPECT_THROW(run_grid(c), std::invalid_argument);
  c = small_config();
  c.sigmas = {-1.0};
  EXPECT_THROW(run_grid(c), std::invalid_argument);
  c = small_config();
  c.strategies = {StrategyKind::DetComp};
  EXPECT_THROW(run_grid(c), std::invalid_argument);
}

TEST(Summary, Examples) {
  TrialRecord r;
  r.lambda = 0.5;
  r.ratio = 1.7;
  auto one = summarize({r});
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].mean_ratio, 1.7);
  EXPECT_EQ(one[0].standard_error, 0.0);
  TrialRecord a = r, b = r;
  a.ratio = 1.0;
  b.ratio = 3.0;
  auto two = summarize({a, b});
  EXPECT_EQ(two[0].mean_ratio, 2.0);
  EXPECT_NEAR(two[0].standard_error, 1.0, 1e-15);
  EXPECT_THROW(summarize({}), std::invalid_argument);
}

TEST(Summary, OneRowPerCellOverAllTrials) {
  const auto cfg = small_config();
  const auto rows = summarize(run_grid(cfg));
  EXPECT_EQ(rows.size(), 2u * 2u * 3u);
  for (const auto& row : rows) EXPECT_EQ(row.trials, cfg.trials);
  std::ostringstream out;
  write_summary_csv(out, rows);
  EXPECT_EQ(out.str().rfind("lambda,sigma,strategy,mean_ratio,stderr,trials\n", 0), 0u);
}

TEST(Summary, RandomizedMeanWithinConsistencyAtZeroNoise) {
  ExperimentConfig c;
  c.trials = 300;
  c.lambdas = {0.1, 0.5};
  c.sigmas = {0.0};
  c.master_seed = 77;
  c.jobs = 4;
  for (const auto& row : summarize(run_grid(c))) {
    if (row.strategy != StrategyKind::RandLA) continue;
    EXPECT_LE(row.mean_ratio, chi(row.lambda) + 4.0 * row.standard_error);
  }
}
