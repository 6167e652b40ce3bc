#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "adrcm/io.hpp"
#include "adrcm/model.hpp"
#include "adrcm/stats.hpp"
#include "adrcm/theory.hpp"
#include "oracles.hpp"

using namespace adrcm;

namespace {

ModelParams params(double gamma, double beta, double n) { return {gamma, beta, n}; }

std::set<PointIndex> as_set(const std::vector<PointIndex>& v) { return {v.begin(), v.end()}; }

}  // namespace

TEST(Random, DerivedSeedsAreDistinctAndStable) {
  EXPECT_EQ(derive_seed(1, 2, 3), derive_seed(1, 2, 3));
  EXPECT_NE(derive_seed(1, 2, 3), derive_seed(1, 2, 4));
  EXPECT_NE(derive_seed(1, 2, 3), derive_seed(1, 3, 3));
  EXPECT_NE(derive_seed(1, 2, 3), derive_seed(2, 2, 3));
}

TEST(Random, UniformRanges) {
  Rng rng(7);
  for (int i = 0; i < 100000; ++i) {
    const double a = rng.uniform();
    const double b = rng.uniform_open_closed();
    ASSERT_GE(a, 0.0);
    ASSERT_LT(a, 1.0);
    ASSERT_GT(b, 0.0);
    ASSERT_LE(b, 1.0);
    ASSERT_LT(rng.below(10), 10u);
  }
}

TEST(Random, PoissonMeanAndVariance) {
  for (double mean : {0.5, 7.0, 300.0}) {
    Rng rng(derive_seed(11, 0, static_cast<std::uint64_t>(mean * 10)));
    std::vector<double> xs(20000);
    for (auto& x : xs) x = static_cast<double>(rng.poisson(mean));
    EXPECT_NEAR(stats::mean(xs), mean, 4.0 * std::sqrt(mean / 20000.0));
    EXPECT_NEAR(stats::variance(xs) / mean, 1.0, 0.05);
  }
}

TEST(Model, ParamsValidation) {
  EXPECT_THROW(params(0.0, 1, 10).validate(), ParameterError);
  EXPECT_THROW(params(1.0, 1, 10).validate(), ParameterError);
  EXPECT_THROW(params(0.3, 0, 10).validate(), ParameterError);
  EXPECT_THROW(params(0.3, 1, -1).validate(), ParameterError);
  EXPECT_NO_THROW(params(0.3, 1, 10).validate());
}

TEST(Model, TorusDistance) {
  const double n = 10.0;
  EXPECT_NEAR(torus_dist(-0.4 * n, 0.4 * n, n), 0.2 * n, 1e-12);
  EXPECT_EQ(torus_dist(1.7, 1.7, n), 0.0);
  EXPECT_NEAR(torus_dist(0.0, n / 2, n), n / 2, 1e-12);
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> pos(-5.0, 5.0);
  for (int i = 0; i < 1000; ++i) {
    const double a = pos(gen), b = pos(gen);
    const double d = torus_dist(a, b, n);
    EXPECT_GE(d, 0.0);
    EXPECT_LE(d, n / 2);
    EXPECT_DOUBLE_EQ(d, torus_dist(b, a, n));
  }
}

TEST(Model, CanonicalPosition) {
  EXPECT_DOUBLE_EQ(canonical_position(5.0, 10.0), -5.0);
  EXPECT_DOUBLE_EQ(canonical_position(-5.0, 10.0), -5.0);
  EXPECT_DOUBLE_EQ(canonical_position(12.5, 10.0), 2.5);
  EXPECT_DOUBLE_EQ(canonical_position(-27.0, 10.0), 3.0);
}

TEST(Model, ConnectsHandExamples) {
  const auto p = params(0.5, 1.0, 100.0);
  EXPECT_TRUE(connects({0, 0.25}, {1.0, 0.64}, p));
  EXPECT_FALSE(connects({0, 1.0}, {2.0, 1.0 - 1e-9}, p));
  EXPECT_TRUE(connects({3.0, 0.9}, {3.0, 0.95}, p));
}

TEST(Model, ConnectsIsSymmetric) {
  std::mt19937_64 gen(5);
  const auto p = params(0.3, 1.0, 50.0);
  const auto pts = oracle::random_points(gen, 400, 50.0);
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) EXPECT_EQ(connects(pts[i], pts[i + 1], p), connects(pts[i + 1], pts[i], p));
}

TEST(Model, ConfigSortedWithValidMarkOrder) {
  const auto c = sample_config(params(0.3, 1.0, 200.0), 9);
  ASSERT_GT(c.size(), 100u);
  for (std::size_t i = 1; i < c.size(); ++i) EXPECT_LE(c[i - 1].x, c[i].x);
  std::vector<PointIndex> order(c.mark_order().begin(), c.mark_order().end());
  for (std::size_t i = 1; i < order.size(); ++i) EXPECT_LT(c[order[i - 1]].u, c[order[i]].u);
  std::sort(order.begin(), order.end());
  for (std::size_t i = 0; i < order.size(); ++i) EXPECT_EQ(order[i], i);
  for (const auto& pt : c.points()) {
    EXPECT_GE(pt.x, -100.0);
    EXPECT_LT(pt.x, 100.0);
    EXPECT_GT(pt.u, 0.0);
    EXPECT_LE(pt.u, 1.0);
  }
}

TEST(Model, ConfigRejectsBadPoints) {
  const auto p = params(0.3, 1.0, 10.0);
  EXPECT_THROW(PointConfig(p, {{0, 0.0}}), ParameterError);
  EXPECT_THROW(PointConfig(p, {{0, 1.5}}), ParameterError);
  EXPECT_THROW(PointConfig(p, {{0, 0.5}, {1, 0.5}}), ParameterError);
}

TEST(Model, SampleIsDeterministic) {
  const auto p = params(0.3, 1.0, 300.0);
  const auto a = sample_config(p, 42);
  const auto b = sample_config(p, 42);
  ASSERT_EQ(a.size(), b.size());
  EXPECT_TRUE(std::equal(a.points().begin(), a.points().end(), b.points().begin()));
  const auto c = sample_config(p, 43);
  EXPECT_FALSE(a.size() == c.size() && std::equal(a.points().begin(), a.points().end(), c.points().begin()));
}

TEST(Model, SampleMeanPointCount) {
  const auto p = params(0.3, 1.0, 1000.0);
  std::vector<double> counts(10000);
  for (std::size_t i = 0; i < counts.size(); ++i)
    counts[i] = static_cast<double>(sample_config(p, derive_seed(17, 1, i)).size());
  EXPECT_NEAR(stats::mean(counts), 1000.0, 3.0 * stats::standard_error_of_mean(counts));
}

TEST(Model, TinyTorusIsUsuallyEmpty) {
  const auto p = params(0.3, 1.0, 0.001);
  const std::size_t trials = 100000;
  double empty = 0.0;
  for (std::size_t i = 0; i < trials; ++i) empty += sample_config(p, derive_seed(23, 0, i)).empty() ? 1.0 : 0.0;
  const double expected = std::exp(-0.001);
  const double se = std::sqrt(expected * (1 - expected) / static_cast<double>(trials));
  EXPECT_NEAR(empty / static_cast<double>(trials), expected, 3.0 * se);
}

TEST(Model, NeighborsOfEmptyConfig) {
  const PointConfig c(params(0.3, 1.0, 10.0), {});
  EXPECT_TRUE(c.up_neighbors(MarkedPoint{0, 0.5}).empty());
  EXPECT_TRUE(c.down_neighbors(MarkedPoint{0, 0.5}).empty());
}

TEST(Model, UpNeighborHandExample) {
  const PointConfig c(params(0.5, 1.0, 100.0), {{1.0, 0.64}});
  EXPECT_EQ(c.up_neighbors(MarkedPoint{0, 0.25}), std::vector<PointIndex>{0});
  EXPECT_TRUE(c.down_neighbors(MarkedPoint{0, 0.25}).empty());
}

// Interval queries agree with an O(N^2) scan written from the kernel definition.
TEST(Model, NeighborQueriesMatchBruteForce) {
  std::mt19937_64 gen(101);
  std::uniform_int_distribution<int> size(0, 50);
  const double gammas[] = {0.1, 0.3, 0.45, 0.7};
  for (int trial = 0; trial < 500; ++trial) {
    const double gamma = gammas[trial % 4];
    const double beta = trial % 3 == 0 ? 0.5 : 1.0;
    const double n = 5.0 + 45.0 * (trial % 7) / 6.0;
    const auto pts = oracle::random_points(gen, static_cast<std::size_t>(size(gen)), n);
    const PointConfig c(params(gamma, beta, n), pts);
    const oracle::Model m{gamma, beta, n};
    for (PointIndex i = 0; i < c.size(); ++i) {
      std::set<PointIndex> up, down;
      for (PointIndex j = 0; j < c.size(); ++j) {
        if (j == i || !oracle::adjacent(c[i], c[j], m)) continue;
        (c[j].u > c[i].u ? up : down).insert(j);
      }
      const auto got_up = c.up_neighbors(i);
      const auto got_down = c.down_neighbors(i);
      ASSERT_EQ(as_set(got_up), up) << "trial " << trial;
      ASSERT_EQ(as_set(got_down), down) << "trial " << trial;
      // up and down partition the neighbor set
      auto all = as_set(c.neighbors(i));
      EXPECT_EQ(all.size(), up.size() + down.size());
      for (std::size_t k = 1; k < got_up.size(); ++k) EXPECT_LT(c[got_up[k - 1]].u, c[got_up[k]].u);
    }
  }
}

TEST(Model, AddPoint) {
  const auto p = params(0.3, 1.0, 20.0);
  const PointConfig empty(p, {});
  EXPECT_EQ(add_point(empty, {1.0, 0.5}).size(), 1u);

  std::mt19937_64 gen(77);
  const oracle::Model m{0.3, 1.0, 20.0};
  for (int trial = 0; trial < 100; ++trial) {
    const PointConfig c(p, oracle::random_points(gen, 30, 20.0));
    const MarkedPoint q = oracle::random_points(gen, 1, 20.0).front();
    const auto bigger = add_point(c, q);
    const auto qi = bigger.find(q);
    ASSERT_TRUE(qi.has_value());
    std::set<PointIndex> down;
    for (PointIndex j = 0; j < bigger.size(); ++j) {
      if (j != *qi && bigger[j].u < q.u && oracle::adjacent(q, bigger[j], m)) down.insert(j);
    }
    EXPECT_EQ(as_set(bigger.down_neighbors(*qi)), down);
    // existing up-neighborhoods grow by at most one
    for (PointIndex i = 0; i < c.size(); ++i) {
      const auto j = *bigger.find(c[i]);
      const auto before = c.up_neighbors(i).size();
      const auto after = bigger.up_neighbors(j).size();
      EXPECT_GE(after, before);
      EXPECT_LE(after, before + 1);
    }
  }
  EXPECT_THROW(add_point(PointConfig(p, {{0, 0.5}}), {3.0, 0.5}), ParameterError);
}

TEST(Model, PalmNeighborhoodMeans) {
  const auto p = params(0.3, 0.5, 200.0);
  const double u = 0.2;
  std::vector<double> up(4000), down(4000);
  for (std::size_t i = 0; i < up.size(); ++i) {
    const auto c = sample_config(p, derive_seed(31, 0, i));
    up[i] = static_cast<double>(c.up_neighbors(MarkedPoint{0, u}).size());
    down[i] = static_cast<double>(c.down_neighbors(MarkedPoint{0, u}).size());
  }
  EXPECT_NEAR(stats::mean(up), lambda_up(u, p), 3.0 * stats::standard_error_of_mean(up));
  EXPECT_NEAR(stats::mean(down), lambda_down(p), 3.0 * stats::standard_error_of_mean(down));
  // Independent Poisson counts: correlation within 3 SE of 0.
  const double corr = stats::covariance(up, down) / std::sqrt(stats::variance(up) * stats::variance(down));
  EXPECT_LT(std::fabs(corr), 3.0 / std::sqrt(static_cast<double>(up.size())));
}

TEST(Io, ConfigCsvRoundTrip) {
  const auto p = params(0.3, 1.0, 50.0);
  const auto c = sample_config(p, 5);
  std::ostringstream out;
  const std::string comment = "seed: 5";
  write_config_csv(out, c, std::span(&comment, 1));
  std::istringstream in(out.str());
  const auto back = read_config_csv(in, p);
  ASSERT_EQ(back.size(), c.size());
  EXPECT_TRUE(std::equal(c.points().begin(), c.points().end(), back.points().begin()));
}

TEST(Io, ConfigCsvRejectsMalformedInput) {
  const auto p = params(0.3, 1.0, 50.0);
  std::istringstream no_header("1,0.5\n");
  EXPECT_THROW(read_config_csv(no_header, p), FormatError);
  std::istringstream extra_field("x,u\n1,0.5,3\n");
  EXPECT_THROW(read_config_csv(extra_field, p), FormatError);
  std::istringstream not_number("x,u\n1,abc\n");
  EXPECT_THROW(read_config_csv(not_number, p), FormatError);
}

TEST(Io, FormatRealRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456.789}) EXPECT_EQ(std::stod(format_real(v)), v);
  for (double v : {0.1, 1.0 / 3.0, 0.6}) EXPECT_EQ(std::stod(format_shortest(v)), v);
  EXPECT_EQ(format_shortest(0.6), "0.6");
}
