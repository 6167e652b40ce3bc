#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <stdexcept>

#include "adrcm/error.hpp"
#include "adrcm/parallel.hpp"
#include "adrcm/random.hpp"
#include "adrcm/stats.hpp"

using namespace adrcm;

namespace {

std::vector<double> normals(std::size_t m, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> xs(m);
  for (auto& x : xs) x = rng.standard_normal();
  return xs;
}

}  // namespace

TEST(Moments, SumIsCompensated) {
  std::vector<double> xs{1e16, 1.0, -1e16, 1.0};
  EXPECT_EQ(stats::sum(xs), 2.0);
}

TEST(Moments, CovarianceAndErrors) {
  const std::vector<double> x{1, 2, 3, 4}, y{2, 4, 6, 8};
  EXPECT_DOUBLE_EQ(stats::mean(x), 2.5);
  EXPECT_DOUBLE_EQ(stats::variance(x), 5.0 / 3.0);
  EXPECT_DOUBLE_EQ(stats::covariance(x, y), 10.0 / 3.0);
  EXPECT_DOUBLE_EQ(stats::standard_error_of_mean(x), std::sqrt(5.0 / 3.0 / 4.0));
  const auto z = normals(20000, 3);
  // SE of the sample variance of N(0,1) data is about sqrt(2/m).
  EXPECT_NEAR(stats::covariance_standard_error(z, z), std::sqrt(2.0 / 20000.0), 0.002);
}

TEST(Standardize, HandAndRandom) {
  const std::vector<double> two{0.0, 2.0};
  const auto s = stats::standardize(two);
  EXPECT_DOUBLE_EQ(s[0], -1.0);
  EXPECT_DOUBLE_EQ(s[1], 1.0);
  EXPECT_THROW(stats::standardize(std::vector<double>{3, 3, 3}), DegenerateError);
  EXPECT_THROW(stats::standardize(std::vector<double>{3}), DegenerateError);
  Rng rng(4);
  std::vector<double> xs(1000);
  for (auto& x : xs) x = 5.0 + 3.0 * rng.uniform();
  const auto z = stats::standardize(xs);
  EXPECT_NEAR(stats::mean(z), 0.0, 1e-13);
  EXPECT_NEAR(stats::variance(z) * 999.0 / 1000.0, 1.0, 1e-13);
}

TEST(Normal, CdfQuantile) {
  EXPECT_DOUBLE_EQ(stats::normal_cdf(0.0), 0.5);
  EXPECT_NEAR(stats::normal_cdf(1.959963984540054), 0.975, 1e-15);
  for (double p : {1e-10, 0.01, 0.3, 0.5, 0.9, 0.999}) EXPECT_NEAR(stats::normal_cdf(stats::normal_quantile(p)), p, 1e-14);
}

TEST(Kolmogorov, SurvivalFunction) {
  EXPECT_NEAR(stats::kolmogorov_survival(1.3581), 0.05, 1e-4);
  EXPECT_NEAR(stats::kolmogorov_survival(1.6276), 0.01, 1e-4);
  EXPECT_DOUBLE_EQ(stats::kolmogorov_survival(0.0), 1.0);
  EXPECT_NEAR(stats::kolmogorov_sd(), 0.2603, 1e-4);
}

TEST(Ks, LargeNormalSample) {
  const auto r = stats::ks_distance_normal(normals(100000, 5));
  EXPECT_LT(r.statistic, 0.01);
  EXPECT_GT(r.p_value, 0.05);
  EXPECT_THROW(stats::ks_distance_normal(normals(29, 5)), ParameterError);
}

// Type-I error at alpha = 0.05 within 3 SE over 200 meta-trials.
TEST(Ks, SelfCalibration) {
  const int trials = 200;
  int rejected = 0;
  for (int t = 0; t < trials; ++t) rejected += stats::ks_distance_normal(normals(500, derive_seed(6, 0, t))).p_value < 0.05;
  const double rate = rejected / static_cast<double>(trials);
  EXPECT_NEAR(rate, 0.05, 3.0 * std::sqrt(0.05 * 0.95 / trials)) << rate;
}

TEST(Ks, PowerAgainstUniform) {
  Rng rng(7);
  std::vector<double> xs(10000);
  for (auto& x : xs) x = rng.uniform();
  EXPECT_LT(stats::ks_distance_normal(stats::standardize(xs)).p_value, 0.001);
}

TEST(Wasserstein, QuantileGrid) {
  double prev = 1.0;
  for (std::size_t m : {100u, 1000u, 10000u}) {
    std::vector<double> xs(m);
    for (std::size_t i = 0; i < m; ++i) xs[i] = stats::normal_quantile((static_cast<double>(i) + 0.5) / m);
    const double d = stats::wasserstein1_distance_normal(xs);
    EXPECT_LT(d, prev);
    prev = d;
  }
  EXPECT_LT(prev, 0.02);
}

TEST(Wasserstein, ShiftIdentity) {
  auto xs = normals(10000, 8);
  for (double c : {0.3, -1.0}) {
    std::vector<double> shifted(xs);
    for (auto& x : shifted) x += c;
    EXPECT_NEAR(stats::wasserstein1_distance_normal(shifted), std::fabs(c), 0.1 * std::fabs(c));
  }
  EXPECT_GE(stats::wasserstein1_distance_normal(xs), 0.0);
  EXPECT_THROW(stats::wasserstein1_distance_normal(normals(10, 1)), ParameterError);
}

TEST(ChiSquare, PoissonFit) {
  Rng rng(9);
  std::vector<std::size_t> counts(5000);
  for (auto& c : counts) c = rng.poisson(10.0 / 7.0);
  EXPECT_GT(stats::chi_square_poisson(counts, 10.0 / 7.0).p_value, 0.01);
  EXPECT_LT(stats::chi_square_poisson(counts, 2.0).p_value, 1e-6);
  const auto r = stats::chi_square_poisson(counts, 10.0 / 7.0);
  EXPECT_GE(r.dof, 3);
}

TEST(Regression, SlopeAndQuantile) {
  const std::vector<double> x{1, 2, 3, 4}, y{3, 5, 7, 9};
  EXPECT_DOUBLE_EQ(stats::ls_slope(x, y), 2.0);
  EXPECT_DOUBLE_EQ(stats::quantile({4, 1, 3, 2}, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(stats::quantile({4, 1, 3, 2}, 1.0), 4.0);
}

TEST(Bootstrap, PercentileIntervalOfMean) {
  const auto xs = normals(2000, 10);
  auto mean_fn = [](std::span<const double> s) { return stats::mean(s); };
  const auto ci = stats::percentile_bootstrap(xs, mean_fn, 1000, 11);
  EXPECT_TRUE(ci.contains(stats::mean(xs)));
  EXPECT_NEAR(ci.hi - ci.lo, 2 * 1.96 / std::sqrt(2000.0), 0.02);
  EXPECT_EQ(ci.lo, stats::percentile_bootstrap(xs, mean_fn, 1000, 11).lo);
  EXPECT_TRUE((stats::Interval{0, 1}).overlaps({1, 2}));
  EXPECT_FALSE((stats::Interval{0, 1}).overlaps({1.5, 2}));
}

TEST(Jackknife, MeanStandardError) {
  const auto xs = normals(4000, 12);
  const double se = stats::batch_jackknife_se<double>(
      xs, 20, [](std::span<const double> s) { return stats::mean(s); });
  EXPECT_NEAR(se, 1.0 / std::sqrt(4000.0), 0.006);
  EXPECT_TRUE(std::isnan(stats::batch_jackknife_se<double>(
      std::vector<double>{1.0}, 20, [](std::span<const double> s) { return stats::mean(s); })));
}

TEST(Parallel, ResultsIndependentOfThreads) {
  auto run = [](unsigned threads) {
    std::vector<double> out(500);
    parallel_for(out.size(), threads, [&](std::size_t i) { out[i] = Rng(derive_seed(1, 2, i)).uniform(); });
    return out;
  };
  EXPECT_EQ(run(1), run(4));
}

TEST(Parallel, ProgressAndFailure) {
  std::size_t last = 0;
  parallel_for(10, 2, [](std::size_t) {}, [&](std::size_t done, std::size_t total) {
    EXPECT_EQ(total, 10u);
    last = std::max(last, done);
  });
  EXPECT_EQ(last, 10u);
  try {
    parallel_for(20, 1, [](std::size_t i) {
      if (i >= 5) throw std::runtime_error(std::to_string(i));
    });
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "5");
  }
  EXPECT_THROW(parallel_for(20, 3, [](std::size_t i) {
                 if (i % 7 == 3) throw std::runtime_error("x");
               }),
               std::runtime_error);
}

TEST(Errors, ReplicateAndConfigErrors) {
  const ReplicateError r(1234, "boom");
  EXPECT_EQ(r.seed(), 1234u);
  EXPECT_NE(std::string(r.what()).find("1234"), std::string::npos);
  const ConfigError c({"a", "b"});
  EXPECT_EQ(c.problems().size(), 2u);
}
