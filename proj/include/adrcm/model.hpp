#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "adrcm/error.hpp"
#include "adrcm/random.hpp"

namespace adrcm {

// Parameters of the age-dependent random connection model on the 1-D torus
// with the hard profile: Q -> P iff dist * u_P^gamma * u_Q^(1-gamma) <= beta.
struct ModelParams {
  double gamma = 0.3;
  double beta = 1.0;
  double torus_length = 100.0;

  void validate() const {
    if (!(gamma > 0.0 && gamma < 1.0))
      throw ParameterError("gamma must lie in (0,1), got " + std::to_string(gamma));
    if (!(beta > 0.0) || !std::isfinite(beta))
      throw ParameterError("beta must be positive, got " + std::to_string(beta));
    if (!(torus_length > 0.0) || !std::isfinite(torus_length))
      throw ParameterError("torus length must be positive, got " + std::to_string(torus_length));
  }

  bool operator==(const ModelParams&) const = default;
};

// A point (x, u): position on the torus and mark (birth time) in (0, 1].
struct MarkedPoint {
  double x = 0.0;
  double u = 1.0;

  bool operator==(const MarkedPoint&) const = default;
};

using PointIndex = std::uint32_t;

// Reduces x to the canonical range [-n/2, n/2).
inline double canonical_position(double x, double n) {
  double r = x - n * std::floor((x + 0.5 * n) / n);
  if (r >= 0.5 * n) r -= n;
  if (r < -0.5 * n) r += n;
  return r;
}

// Toroidal distance min_z |x - y + n z|, in [0, n/2].
inline double torus_dist(double x, double y, double n) {
  double d = std::fmod(std::fabs(x - y), n);
  return std::min(d, n - d);
}

inline bool connects(const MarkedPoint& p, const MarkedPoint& q, const ModelParams& params) {
  const double lo = std::min(p.u, q.u);
  const double hi = std::max(p.u, q.u);
  const double d = torus_dist(p.x, q.x, params.torus_length);
  return d * std::pow(lo, params.gamma) * std::pow(hi, 1.0 - params.gamma) <= params.beta;
}

// Immutable marked configuration on the torus. Points are kept sorted by
// position; a second copy is split into dyadic mark layers
// (2^-(j+1), 2^-j], each sorted by position, so that neighbor queries use a
// per-layer radius bound instead of the global worst case.
class PointConfig {
 public:
  PointConfig() = default;

  PointConfig(const ModelParams& params, std::vector<MarkedPoint> points, std::uint64_t seed = 0)
      : params_(params), points_(std::move(points)), seed_(seed) {
    params_.validate();
    const double n = params_.torus_length;
    for (auto& p : points_) {
      if (!(p.u > 0.0 && p.u <= 1.0))
        throw ParameterError("mark must lie in (0,1], got " + std::to_string(p.u));
      if (!std::isfinite(p.x)) throw ParameterError("position must be finite");
      p.x = canonical_position(p.x, n);
    }
    if (points_.size() >= std::numeric_limits<PointIndex>::max())
      throw ParameterError("configuration too large");
    std::sort(points_.begin(), points_.end(), [](const MarkedPoint& a, const MarkedPoint& b) {
      return a.x < b.x || (a.x == b.x && a.u < b.u);
    });
    mark_order_.resize(points_.size());
    std::iota(mark_order_.begin(), mark_order_.end(), PointIndex{0});
    std::sort(mark_order_.begin(), mark_order_.end(),
              [&](PointIndex a, PointIndex b) { return points_[a].u < points_[b].u; });
    for (std::size_t i = 1; i < mark_order_.size(); ++i) {
      if (points_[mark_order_[i]].u == points_[mark_order_[i - 1]].u)
        throw ParameterError("marks must be pairwise distinct");
    }
    for (PointIndex i = 0; i < points_.size(); ++i) {
      layers_[layer_of(points_[i].u)].push_back({points_[i].x, points_[i].u, i});
    }
    // Points were inserted in position order, so each layer is already sorted.
  }

  const ModelParams& params() const noexcept { return params_; }
  std::span<const MarkedPoint> points() const noexcept { return points_; }
  const MarkedPoint& operator[](PointIndex i) const { return points_[i]; }
  std::span<const PointIndex> mark_order() const noexcept { return mark_order_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }

  // Index of an exactly equal point, if present.
  std::optional<PointIndex> find(const MarkedPoint& p) const {
    const double x = canonical_position(p.x, params_.torus_length);
    auto it = std::lower_bound(points_.begin(), points_.end(), x,
                               [](const MarkedPoint& a, double v) { return a.x < v; });
    for (; it != points_.end() && it->x == x; ++it) {
      if (it->u == p.u) return static_cast<PointIndex>(it - points_.begin());
    }
    return std::nullopt;
  }

  // Points q with mark(q) > mark(p) and q -> p. Sorted by ascending mark.
  // p need not belong to the configuration.
  std::vector<PointIndex> up_neighbors(const MarkedPoint& p) const {
    std::vector<PointIndex> out;
    const double x = canonical_position(p.x, params_.torus_length);
    for (int j = 0; j < kLayers; ++j) {
      if (layers_[j].empty() || layer_upper(j) <= p.u) continue;
      const double v_min = std::max(layer_lower(j), p.u);
      const double radius =
          params_.beta * std::pow(p.u, -params_.gamma) * std::pow(v_min, params_.gamma - 1.0);
      scan(j, x, radius, [&](const Entry& e) {
        if (e.u > p.u && connects(p, {e.x, e.u}, params_)) out.push_back(e.index);
      });
    }
    sort_by_mark(out);
    return out;
  }

  // Points q with mark(q) < mark(p) and p -> q. Sorted by ascending mark.
  std::vector<PointIndex> down_neighbors(const MarkedPoint& p) const {
    std::vector<PointIndex> out;
    const double x = canonical_position(p.x, params_.torus_length);
    for (int j = 0; j < kLayers; ++j) {
      if (layers_[j].empty() || layer_lower(j) >= p.u) continue;
      const double w_min = layer_lower(j);
      const double radius =
          w_min > 0.0 ? params_.beta * std::pow(w_min, -params_.gamma) * std::pow(p.u, params_.gamma - 1.0)
                      : std::numeric_limits<double>::infinity();
      scan(j, x, radius, [&](const Entry& e) {
        if (e.u < p.u && connects(p, {e.x, e.u}, params_)) out.push_back(e.index);
      });
    }
    sort_by_mark(out);
    return out;
  }

  // Up- and down-neighbors merged, sorted by ascending mark.
  std::vector<PointIndex> neighbors(const MarkedPoint& p) const {
    auto down = down_neighbors(p);
    auto up = up_neighbors(p);
    down.insert(down.end(), up.begin(), up.end());
    return down;
  }

  std::vector<PointIndex> up_neighbors(PointIndex i) const { return up_neighbors(points_[i]); }
  std::vector<PointIndex> down_neighbors(PointIndex i) const { return down_neighbors(points_[i]); }
  std::vector<PointIndex> neighbors(PointIndex i) const { return neighbors(points_[i]); }

  bool connected(PointIndex a, PointIndex b) const { return connects(points_[a], points_[b], params_); }

 private:
  struct Entry {
    double x;
    double u;
    PointIndex index;
  };

  static constexpr int kLayers = 48;

  static int layer_of(double u) {
    // u in (2^-(j+1), 2^-j]  <=>  j = ceil(-log2 u) - 1, clamped to the last layer.
    int e = 0;
    const double m = std::frexp(u, &e);  // u = m 2^e, m in [0.5, 1)
    int j = (m == 0.5) ? -e + 1 : -e;
    return std::clamp(j, 0, kLayers - 1);
  }
  static double layer_upper(int j) { return std::ldexp(1.0, -j); }
  static double layer_lower(int j) { return j == kLayers - 1 ? 0.0 : std::ldexp(1.0, -(j + 1)); }

  template <class Visit>
  void scan(int j, double x, double radius, Visit&& visit) const {
    const auto& layer = layers_[j];
    const double n = params_.torus_length;
    // Widened slightly; the exact kernel test is applied to every candidate.
    radius = radius * (1.0 + 1e-9) + 1e-12;
    if (!(2.0 * radius < n)) {
      for (const auto& e : layer) visit(e);
      return;
    }
    auto visit_range = [&](double lo, double hi) {
      auto first = std::lower_bound(layer.begin(), layer.end(), lo,
                                    [](const Entry& e, double v) { return e.x < v; });
      for (; first != layer.end() && first->x <= hi; ++first) visit(*first);
    };
    const double lo = x - radius;
    const double hi = x + radius;
    const double half = 0.5 * n;
    if (lo < -half) {
      visit_range(lo + n, half);
      visit_range(-half, hi);
    } else if (hi >= half) {
      visit_range(lo, half);
      visit_range(-half, hi - n);
    } else {
      visit_range(lo, hi);
    }
  }

  void sort_by_mark(std::vector<PointIndex>& idx) const {
    std::sort(idx.begin(), idx.end(),
              [&](PointIndex a, PointIndex b) { return points_[a].u < points_[b].u; });
  }

  ModelParams params_{};
  std::vector<MarkedPoint> points_;
  std::vector<PointIndex> mark_order_;
  std::array<std::vector<Entry>, kLayers> layers_;
  std::uint64_t seed_ = 0;
};

// Samples a unit-intensity Poisson process on [-n/2, n/2) x (0, 1].
// The Poisson count is drawn first, then positions and marks; a mark equal to
// one already drawn is redrawn.
inline PointConfig sample_config(const ModelParams& params, std::uint64_t seed) {
  params.validate();
  Rng rng(seed);
  const double n = params.torus_length;
  const auto count = rng.poisson(n);
  std::vector<MarkedPoint> pts;
  pts.reserve(count);
  std::unordered_set<double> seen;
  seen.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const double x = canonical_position(-0.5 * n + n * rng.uniform(), n);
    double u = rng.uniform_open_closed();
    while (!seen.insert(u).second) u = rng.uniform_open_closed();
    pts.push_back({x, u});
  }
  return PointConfig(params, std::move(pts), seed);
}

// New configuration with p inserted. Rejects a point whose mark is already used.
inline PointConfig add_point(const PointConfig& config, const MarkedPoint& p) {
  std::vector<MarkedPoint> pts(config.points().begin(), config.points().end());
  for (const auto& q : pts) {
    if (q.u == p.u) {
      throw ParameterError(q == MarkedPoint{canonical_position(p.x, config.params().torus_length), p.u}
                               ? "point already present in configuration"
                               : "mark already used by another point");
    }
  }
  pts.push_back(p);
  return PointConfig(config.params(), std::move(pts), config.seed());
}

}  // namespace adrcm
