#pragma once

// Brute-force reference implementations. They share no code with the
// library beyond the point types: the connection rule, subset enumeration and
// tree embeddings are rewritten from the model definition.

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <utility>
#include <vector>

#include "adrcm/model.hpp"

namespace oracle {

using adrcm::MarkedPoint;

struct Model {
  double gamma;
  double beta;
  double n;
};

inline bool adjacent(const MarkedPoint& a, const MarkedPoint& b, const Model& m) {
  double d = std::fabs(a.x - b.x);
  while (d > m.n) d -= m.n;
  if (m.n - d < d) d = m.n - d;
  const double lo = a.u < b.u ? a.u : b.u;
  const double hi = a.u < b.u ? b.u : a.u;
  return d * std::pow(lo, m.gamma) * std::pow(hi, 1.0 - m.gamma) <= m.beta;
}

// Calls visit(subset) for every k-subset that is a clique.
inline void for_each_clique(const std::vector<MarkedPoint>& pts, int k, const Model& m,
                            const std::function<void(const std::vector<std::size_t>&)>& visit) {
  std::vector<std::size_t> chosen;
  std::function<void(std::size_t)> rec = [&](std::size_t start) {
    if (static_cast<int>(chosen.size()) == k) {
      visit(chosen);
      return;
    }
    for (std::size_t i = start; i < pts.size(); ++i) {
      bool ok = true;
      for (auto j : chosen) ok = ok && adjacent(pts[i], pts[j], m);
      if (!ok) continue;
      chosen.push_back(i);
      rec(i + 1);
      chosen.pop_back();
    }
  };
  rec(0);
}

inline std::uint64_t cliques(const std::vector<MarkedPoint>& pts, int k, const Model& m) {
  std::uint64_t c = 0;
  for_each_clique(pts, k, m, [&](const auto&) { ++c; });
  return c;
}

// Number of k-cliques whose lowest-mark member is pts[center].
inline std::uint64_t cliques_centered_at(const std::vector<MarkedPoint>& pts, std::size_t center, int k,
                                         const Model& m) {
  std::uint64_t c = 0;
  for_each_clique(pts, k, m, [&](const std::vector<std::size_t>& s) {
    std::size_t low = s.front();
    for (auto i : s) {
      if (pts[i].u < pts[low].u) low = i;
    }
    if (low == center) ++c;
  });
  return c;
}

inline std::vector<MarkedPoint> with(std::vector<MarkedPoint> pts, const MarkedPoint& p) {
  pts.push_back(p);
  return pts;
}

// C_k(P + p) - C_k(P)
inline std::int64_t diff1(const std::vector<MarkedPoint>& pts, const MarkedPoint& p, int k, const Model& m) {
  return static_cast<std::int64_t>(cliques(with(pts, p), k, m)) - static_cast<std::int64_t>(cliques(pts, k, m));
}

// Four-term second difference.
inline std::int64_t diff2(const std::vector<MarkedPoint>& pts, const MarkedPoint& p, const MarkedPoint& q, int k,
                          const Model& m) {
  auto c = [&](const std::vector<MarkedPoint>& v) { return static_cast<std::int64_t>(cliques(v, k, m)); };
  return c(with(with(pts, p), q)) - c(with(pts, p)) - c(with(pts, q)) + c(pts);
}

// Ordered pairs (A, B): A a k-clique with lowest mark p, B an l-clique with
// lowest mark q, sharing at least one point, in pts + {p, q}.
inline std::uint64_t joint(const std::vector<MarkedPoint>& pts, const MarkedPoint& p, const MarkedPoint& q, int k,
                           int l, const Model& m) {
  auto all = pts;
  std::size_t ip = all.size(), iq = all.size() + 1;
  bool have_p = false, have_q = false;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pts[i] == p) {
      ip = i;
      have_p = true;
    }
    if (pts[i] == q) {
      iq = i;
      have_q = true;
    }
  }
  if (!have_p) {
    ip = all.size();
    all.push_back(p);
  }
  if (!have_q) {
    iq = all.size();
    all.push_back(q);
  }
  auto centered = [&](std::size_t center, int size) {
    std::vector<std::vector<std::size_t>> out;
    for_each_clique(all, size, m, [&](const std::vector<std::size_t>& s) {
      std::size_t low = s.front();
      for (auto i : s) {
        if (all[i].u < all[low].u) low = i;
      }
      if (low == center) out.push_back(s);
    });
    return out;
  };
  const auto as = centered(ip, k);
  const auto bs = centered(iq, l);
  std::uint64_t c = 0;
  for (const auto& a : as) {
    for (const auto& b : bs) {
      bool shared = false;
      for (auto i : a) {
        for (auto j : b) shared = shared || i == j;
      }
      if (shared) ++c;
    }
  }
  return c;
}

struct Tree {
  int vertices;
  std::vector<std::pair<int, int>> edges;  // 1-based, i -> j: i younger than j
  int root;                                // 1-based
};

// Injective maps of tree vertices into pts preserving every directed edge.
// If root_image >= 0 only maps sending the root there are counted.
inline std::uint64_t tree_maps(const std::vector<MarkedPoint>& pts, const Tree& t, const Model& m,
                               long root_image = -1) {
  std::vector<long> image(static_cast<std::size_t>(t.vertices), -1);
  std::vector<bool> used(pts.size(), false);
  std::uint64_t count = 0;
  std::function<void(int)> rec = [&](int v) {
    if (v == t.vertices) {
      for (auto [a, b] : t.edges) {
        const auto& pa = pts[static_cast<std::size_t>(image[static_cast<std::size_t>(a - 1)])];
        const auto& pb = pts[static_cast<std::size_t>(image[static_cast<std::size_t>(b - 1)])];
        if (!(pa.u > pb.u) || !adjacent(pa, pb, m)) return;
      }
      ++count;
      return;
    }
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (used[i]) continue;
      if (v == t.root - 1 && root_image >= 0 && static_cast<long>(i) != root_image) continue;
      used[i] = true;
      image[static_cast<std::size_t>(v)] = static_cast<long>(i);
      rec(v + 1);
      used[i] = false;
    }
  };
  rec(0);
  return count;
}

// Random configuration with `count` points on a torus of length n; marks are
// distinct with probability one.
inline std::vector<MarkedPoint> random_points(std::mt19937_64& gen, std::size_t count, double n) {
  std::uniform_real_distribution<double> pos(-0.5 * n, 0.5 * n);
  std::uniform_real_distribution<double> mark(0.0, 1.0);
  std::vector<MarkedPoint> pts;
  for (std::size_t i = 0; i < count; ++i) pts.push_back({pos(gen), 1.0 - mark(gen)});
  return pts;
}

// Trapezoid rule on [a, b] with a geometric grid, for integrands singular at 0.
inline double integrate_geometric(const std::function<double(double)>& f, double a, double b, std::size_t steps) {
  double total = 0.0;
  const double r = std::pow(b / a, 1.0 / static_cast<double>(steps));
  double x = a;
  for (std::size_t i = 0; i < steps; ++i) {
    const double y = x * r;
    total += 0.5 * (f(x) + f(y)) * (y - x);
    x = y;
  }
  return total;
}

// Hand-built wedge scenario: one old hub with four younger neighbors, one of
// which has two younger neighbors of its own, plus three isolated points.
inline std::vector<MarkedPoint> figure_fixture() {
  return {{0.0, 0.01}, {1.0, 0.2}, {2.0, 0.5}, {-1.0, 0.6}, {-8.0, 0.9}, {30.0, 0.3}, {-30.0, 0.4}, {45.0, 0.7}};
}

inline const adrcm::ModelParams kFixtureParams{0.5, 1.0, 100.0};

}  // namespace oracle
