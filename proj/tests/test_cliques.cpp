#include <gtest/gtest.h>

#include <random>

#include "adrcm/cliques.hpp"
#include "adrcm/count.hpp"
#include "oracles.hpp"

using namespace adrcm;

namespace {

struct Instance {
  ModelParams params;
  std::vector<MarkedPoint> points;
  oracle::Model model() const { return {params.gamma, params.beta, params.torus_length}; }
};

// Small random instances over the parameter grid of the oracle checks.
Instance random_instance(std::mt19937_64& gen, std::size_t max_points) {
  static const double gammas[] = {0.2, 0.3, 0.45};
  static const double betas[] = {0.5, 1.0};
  std::uniform_int_distribution<std::size_t> count(0, max_points);
  std::uniform_real_distribution<double> length(3.0, 20.0);
  Instance in;
  in.params = {gammas[gen() % 3], betas[gen() % 2], length(gen)};
  in.points = oracle::random_points(gen, count(gen), in.params.torus_length);
  return in;
}

}  // namespace

TEST(Count, CheckedArithmetic) {
  EXPECT_EQ(checked_add(2, 3), 5u);
  EXPECT_EQ(checked_mul(4, 5), 20u);
  EXPECT_THROW(checked_add(~Count{0}, 1), OverflowError);
  EXPECT_THROW(checked_mul(Count{1} << 40, Count{1} << 40), OverflowError);
}

TEST(Cliques, RejectsBadSize) {
  const PointConfig c({0.3, 1, 10}, {});
  EXPECT_THROW(count_cliques(c, 0), ParameterError);
}

TEST(Cliques, TrivialSizes) {
  std::mt19937_64 gen(1);
  for (int trial = 0; trial < 50; ++trial) {
    const auto in = random_instance(gen, 25);
    const PointConfig c(in.params, in.points);
    EXPECT_EQ(count_cliques(c, 1).total, c.size());
    Count edges = 0;
    for (PointIndex i = 0; i < c.size(); ++i) edges += c.up_neighbors(i).size();
    EXPECT_EQ(count_cliques(c, 2).total, edges);
  }
}

TEST(Cliques, MatchSubsetOracle) {
  std::mt19937_64 gen(2);
  for (int trial = 0; trial < 200; ++trial) {
    const auto in = random_instance(gen, 25);
    const PointConfig c(in.params, in.points);
    const auto upto = count_cliques_upto(c, 5);
    for (int k = 2; k <= 5; ++k) {
      const auto expected = oracle::cliques(in.points, k, in.model());
      ASSERT_EQ(count_cliques(c, k).total, expected) << "trial " << trial << " k " << k;
      ASSERT_EQ(upto[static_cast<std::size_t>(k)], expected);
    }
  }
}

TEST(Cliques, CenterDecomposition) {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 100; ++trial) {
    const auto in = random_instance(gen, 25);
    const PointConfig c(in.params, in.points);
    std::vector<MarkedPoint> sorted(c.points().begin(), c.points().end());
    for (int k = 1; k <= 4; ++k) {
      const auto r = count_cliques(c, k, true);
      ASSERT_TRUE(r.per_center.has_value());
      Count sum = 0;
      for (PointIndex i = 0; i < c.size(); ++i) {
        const Count v = (*r.per_center)[i];
        sum += v;
        EXPECT_EQ(v, count_cliques_centered(c, c[i], k));
        EXPECT_EQ(v, oracle::cliques_centered_at(sorted, i, k, in.model()));
      }
      EXPECT_EQ(sum, r.total);
    }
  }
}

TEST(Cliques, CenteredSmallSizes) {
  std::mt19937_64 gen(4);
  const auto in = random_instance(gen, 25);
  const PointConfig c(in.params, in.points);
  const MarkedPoint p{0.1, 0.05};
  EXPECT_EQ(count_cliques_centered(c, p, 1), 1u);
  EXPECT_EQ(count_cliques_centered(c, p, 2), c.up_neighbors(p).size());
}

TEST(Cliques, FirstDifference) {
  const PointConfig empty({0.3, 1, 10}, {});
  EXPECT_EQ(diff1_clique(empty, 0.4, 1), 1u);
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 200; ++trial) {
    const auto in = random_instance(gen, 20);
    const PointConfig c(in.params, in.points);
    const double u = std::uniform_real_distribution<double>(0.01, 1.0)(gen);
    EXPECT_EQ(diff1_clique(c, u, 2), c.neighbors(MarkedPoint{0, u}).size());
    for (int k = 1; k <= 4; ++k) {
      ASSERT_EQ(static_cast<std::int64_t>(diff1_clique(c, u, k)), oracle::diff1(in.points, {0, u}, k, in.model()))
          << "trial " << trial << " k " << k;
    }
    const auto upto = cliques_through_upto(c, {0, u}, 4);
    for (int k = 1; k <= 4; ++k) EXPECT_EQ(upto[static_cast<std::size_t>(k)], diff1_clique(c, u, k));
  }
}

TEST(Cliques, SecondDifference) {
  std::mt19937_64 gen(6);
  std::uniform_real_distribution<double> mark(0.01, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto in = random_instance(gen, 18);
    const PointConfig c(in.params, in.points);
    const double u = mark(gen);
    const MarkedPoint q{std::uniform_real_distribution<double>(-3.0, 3.0)(gen), mark(gen)};
    EXPECT_EQ(diff2_clique(c, u, q, 1), 0u);
    if (!connects({0, u}, q, in.params)) {
      EXPECT_EQ(diff2_clique(c, u, q, 3), 0u);
    }
    for (int k = 2; k <= 4; ++k) {
      ASSERT_EQ(static_cast<std::int64_t>(diff2_clique(c, u, q, k)),
                oracle::diff2(in.points, {0, u}, q, k, in.model()))
          << "trial " << trial << " k " << k;
    }
    const auto p_nb = c.neighbors(MarkedPoint{0, u});
    const auto upto = cliques_through_pair_upto(c, {0, u}, p_nb, q, 4);
    for (int k = 1; k <= 4; ++k) EXPECT_EQ(upto[static_cast<std::size_t>(k)], diff2_clique(c, u, q, k));
  }
}

// Swapping the roles of the added points after translating q to the origin.
TEST(Cliques, SecondDifferenceSymmetry) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> mark(0.01, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto in = random_instance(gen, 20);
    const PointConfig c(in.params, in.points);
    const double u = mark(gen);
    const MarkedPoint q{std::uniform_real_distribution<double>(-2.0, 2.0)(gen), mark(gen)};
    std::vector<MarkedPoint> shifted;
    for (const auto& p : in.points) shifted.push_back({p.x - q.x, p.u});
    const PointConfig cs(in.params, shifted);
    for (int k = 2; k <= 4; ++k) EXPECT_EQ(diff2_clique(c, u, q, k), diff2_clique(cs, q.u, {-q.x, u}, k));
  }
}

TEST(Cliques, TranslationInvariance) {
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 50; ++trial) {
    const auto in = random_instance(gen, 25);
    const double shift = std::uniform_real_distribution<double>(-50.0, 50.0)(gen);
    std::vector<MarkedPoint> moved;
    for (const auto& p : in.points) moved.push_back({p.x + shift, p.u});
    const PointConfig a(in.params, in.points), b(in.params, moved);
    for (int k = 1; k <= 4; ++k) {
      EXPECT_EQ(diff1_clique(a, 0.2, k), cliques_through(b, {shift, 0.2}, k));
      EXPECT_EQ(count_cliques(a, k).total, count_cliques(b, k).total);
    }
  }
}

TEST(Cliques, AddingPointNeverDecreasesCounts) {
  std::mt19937_64 gen(9);
  for (int trial = 0; trial < 50; ++trial) {
    const auto in = random_instance(gen, 20);
    const PointConfig c(in.params, in.points);
    const auto bigger = add_point(c, oracle::random_points(gen, 1, in.params.torus_length).front());
    for (int k = 1; k <= 4; ++k) EXPECT_GE(count_cliques(bigger, k).total, count_cliques(c, k).total);
  }
}

TEST(Cliques, JointCountTrivialCases) {
  const PointConfig empty({0.3, 1, 100}, {});
  EXPECT_EQ(count_joint_cliques(empty, {0, 0.3}, {1, 0.6}, 1, 1), 0u);
  // p and q far apart: no edge, no shared clique
  EXPECT_EQ(count_joint_cliques(empty, {0, 0.3}, {40, 0.6}, 2, 2), 0u);
  // single edge q -> p: the 2-clique {p, q} is centered at p, q centers nothing of size 2
  EXPECT_EQ(count_joint_cliques(empty, {0, 0.3}, {0.5, 0.6}, 2, 1), 1u);
  EXPECT_EQ(count_joint_cliques(empty, {0, 0.3}, {0.5, 0.6}, 2, 2), 0u);
}

TEST(Cliques, JointCountMatchesPairOracle) {
  std::mt19937_64 gen(10);
  std::uniform_real_distribution<double> mark(0.01, 1.0);
  for (int trial = 0; trial < 150; ++trial) {
    const auto in = random_instance(gen, 18);
    const PointConfig c(in.params, in.points);
    const MarkedPoint p{0.0, mark(gen)};
    const MarkedPoint q{std::uniform_real_distribution<double>(-3.0, 3.0)(gen), mark(gen)};
    for (int k = 1; k <= 3; ++k) {
      for (int l = 1; l <= 3; ++l) {
        ASSERT_EQ(count_joint_cliques(c, p, q, k, l), oracle::joint(in.points, p, q, k, l, in.model()))
            << "trial " << trial << " k " << k << " l " << l;
      }
    }
    // also with p and q already present
    if (!in.points.empty()) {
      const auto& a = c[0];
      const auto& b = c[c.size() - 1];
      if (!(a == b)) {
        EXPECT_EQ(count_joint_cliques(c, a, b, 3, 2), oracle::joint(in.points, a, b, 3, 2, in.model()));
      }
    }
  }
}

// Neighborhoods longer than the pairwise limit go through the spatial index.
TEST(Cliques, DenseNeighborhoods) {
  std::mt19937_64 gen(12);
  for (int trial = 0; trial < 3; ++trial) {
    const ModelParams params{0.3, 0.5, 6.0};
    const oracle::Model m{params.gamma, params.beta, params.torus_length};
    const auto pts = oracle::random_points(gen, 110, params.torus_length);
    const PointConfig c(params, pts);
    const MarkedPoint p{0.0, 1e-4}, q{0.7, 2e-4};
    ASSERT_GT(c.up_neighbors(p).size(), detail::kPairwiseLimit);
    for (int k = 2; k <= 4; ++k) EXPECT_EQ(count_cliques(c, k).total, oracle::cliques(pts, k, m)) << k;
    auto with_p = pts;
    with_p.push_back(p);
    EXPECT_EQ(count_cliques_centered(c, p, 3), oracle::cliques_centered_at(with_p, pts.size(), 3, m));
    EXPECT_EQ(count_joint_cliques(c, p, q, 2, 3), oracle::joint(pts, p, q, 2, 3, m));
  }
}

TEST(Cliques, DMax) {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto in = random_instance(gen, 25);
    const PointConfig c(in.params, in.points);
    const double u = 0.05;
    std::size_t best = 0;
    for (const auto& q : in.points) {
      if (q.u <= u || !oracle::adjacent({0, u}, q, in.model())) continue;
      std::size_t down = 0;
      for (const auto& r : in.points) down += (r.u < q.u && oracle::adjacent(q, r, in.model())) ? 1 : 0;
      best = std::max(best, down);
    }
    EXPECT_EQ(d_max(c, u), best);
  }
}
