#pragma once

#include <algorithm>
#include <iterator>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "adrcm/count.hpp"
#include "adrcm/error.hpp"
#include "adrcm/model.hpp"

namespace adrcm {

struct CliqueCountResult {
  Count total = 0;
  // Count of k-cliques whose lowest-mark vertex is point i (position order).
  std::optional<std::vector<Count>> per_center;
};

namespace detail {

inline void require_clique_size(int k) {
  if (k < 1) throw ParameterError("clique size k must be >= 1, got " + std::to_string(k));
}

// Above this many candidates, adjacency among them is found through the
// spatial index rather than by testing every pair.
inline constexpr std::size_t kPairwiseLimit = 64;

// candidates[j], j > i, adjacent to candidates[i]. Candidates are sorted by
// mark, so these are exactly the up-neighbors of candidates[i] in the list.
inline void later_neighbors(const PointConfig& config, std::span<const PointIndex> candidates, std::size_t i,
                            std::vector<PointIndex>& out) {
  out.clear();
  if (candidates.size() - i - 1 <= kPairwiseLimit) {
    for (std::size_t j = i + 1; j < candidates.size(); ++j) {
      if (config.connected(candidates[i], candidates[j])) out.push_back(candidates[j]);
    }
    return;
  }
  const auto up = config.up_neighbors(candidates[i]);
  std::size_t a = 0, b = i + 1;
  while (a < up.size() && b < candidates.size()) {
    const double ua = config[up[a]].u, ub = config[candidates[b]].u;
    if (ua == ub) {
      out.push_back(up[a]);
      ++a;
      ++b;
    } else if (ua < ub) {
      ++a;
    } else {
      ++b;
    }
  }
}

// Every vertex in `candidates` is adjacent to all `size` members of the
// current clique; candidates are sorted by mark. Adds the number of cliques of
// each size in (size, max_size] obtained by extending with increasing marks.
inline void extend_cliques(const PointConfig& config, std::span<const PointIndex> candidates, int size,
                           int max_size, std::vector<Count>& by_size) {
  if (size >= max_size || candidates.empty()) return;
  by_size[size + 1] = checked_add(by_size[size + 1], candidates.size());
  if (size + 1 >= max_size) return;
  std::vector<PointIndex> next;
  for (std::size_t i = 0; i + 1 < candidates.size(); ++i) {
    later_neighbors(config, candidates, i, next);
    extend_cliques(config, next, size + 1, max_size, by_size);
  }
}

// Same traversal, but reports each clique (members in increasing mark order).
template <class Visit>
void enumerate_cliques(const PointConfig& config, std::span<const PointIndex> candidates,
                       std::vector<PointIndex>& current, std::size_t target, Visit&& visit) {
  if (current.size() == target) {
    visit(std::as_const(current));
    return;
  }
  std::vector<PointIndex> next;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    later_neighbors(config, candidates, i, next);
    current.push_back(candidates[i]);
    enumerate_cliques(config, next, current, target, visit);
    current.pop_back();
  }
}

inline std::vector<PointIndex> intersect_by_mark(const PointConfig& config, std::vector<PointIndex> a,
                                                 std::vector<PointIndex> b) {
  std::vector<PointIndex> out;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  std::sort(out.begin(), out.end(),
            [&](PointIndex x, PointIndex y) { return config[x].u < config[y].u; });
  return out;
}

inline void require_absent(const PointConfig& config, const MarkedPoint& p) {
  if (config.find(p)) throw ParameterError("added point must not already belong to the configuration");
}

}  // namespace detail

// Number of k-cliques for every k in [1, max_k]; entry k of the result (entry 0 unused).
// Each clique is enumerated once from its lowest-mark vertex through
// mark-increasing chains inside that vertex's up-neighborhood.
inline std::vector<Count> count_cliques_upto(const PointConfig& config, int max_k) {
  detail::require_clique_size(max_k);
  std::vector<Count> totals(static_cast<std::size_t>(max_k) + 1, 0);
  totals[1] = config.size();
  if (max_k == 1) return totals;
  for (PointIndex c = 0; c < config.size(); ++c) {
    const auto up = config.up_neighbors(c);
    detail::extend_cliques(config, up, 1, max_k, totals);
  }
  return totals;
}

inline CliqueCountResult count_cliques(const PointConfig& config, int k, bool with_per_center = false) {
  detail::require_clique_size(k);
  CliqueCountResult result;
  if (with_per_center) result.per_center.emplace(config.size(), 0);
  std::vector<Count> local(static_cast<std::size_t>(k) + 1);
  for (PointIndex c = 0; c < config.size(); ++c) {
    std::fill(local.begin(), local.end(), 0);
    local[1] = 1;
    if (k > 1) detail::extend_cliques(config, config.up_neighbors(c), 1, k, local);
    result.total = checked_add(result.total, local[k]);
    if (with_per_center) (*result.per_center)[c] = local[k];
  }
  return result;
}

// k-cliques of config + {p} whose lowest-mark vertex is p. If p is already a
// member the count refers to the configuration itself.
inline Count count_cliques_centered(const PointConfig& config, const MarkedPoint& p, int k) {
  detail::require_clique_size(k);
  std::vector<Count> local(static_cast<std::size_t>(k) + 1, 0);
  local[1] = 1;
  detail::extend_cliques(config, config.up_neighbors(p), 1, k, local);
  return local[k];
}

// Number of k-cliques containing p in config + {p}, for p not in config.
inline Count cliques_through(const PointConfig& config, const MarkedPoint& p, int k) {
  detail::require_clique_size(k);
  detail::require_absent(config, p);
  std::vector<Count> local(static_cast<std::size_t>(k) + 1, 0);
  local[1] = 1;
  detail::extend_cliques(config, config.neighbors(p), 1, k, local);
  return local[k];
}

// First difference D_u C_k: k-cliques through the added point (0, u).
inline Count diff1_clique(const PointConfig& config, double u, int k) {
  return cliques_through(config, {0.0, u}, k);
}

// Number of k-cliques of config + {p, q} containing both p and q.
inline Count cliques_through_pair(const PointConfig& config, const MarkedPoint& p, const MarkedPoint& q,
                                  int k) {
  detail::require_clique_size(k);
  if (p.u == q.u) throw ParameterError("the two added points must have distinct marks");
  detail::require_absent(config, p);
  detail::require_absent(config, q);
  if (k == 1 || !connects(p, q, config.params())) return 0;
  std::vector<Count> local(static_cast<std::size_t>(k) + 1, 0);
  local[2] = 1;
  const auto common = detail::intersect_by_mark(config, config.neighbors(p), config.neighbors(q));
  detail::extend_cliques(config, common, 2, k, local);
  return local[k];
}

// Second difference D_{u,q} C_k: k-cliques through both (0, u) and q.
inline Count diff2_clique(const PointConfig& config, double u, const MarkedPoint& q, int k) {
  return cliques_through_pair(config, {0.0, u}, q, k);
}

// Ordered pairs (A, B) with A a k-clique centered at p, B an l-clique
// centered at q and A, B sharing a vertex, evaluated on config + {p, q}.
// Members of p and q that are missing from config are inserted.
inline Count count_joint_cliques(const PointConfig& config, const MarkedPoint& p, const MarkedPoint& q, int k,
                                 int l) {
  detail::require_clique_size(k);
  detail::require_clique_size(l);
  if (p == q) throw ParameterError("joint clique count needs two distinct points");
  if (k > 30 || l > 30) throw ParameterError("joint clique count supports clique sizes up to 30");
  PointConfig aug = config;
  if (!aug.find(p)) aug = add_point(aug, p);
  if (!aug.find(q)) aug = add_point(aug, q);
  const PointIndex ip = *aug.find(p);
  const PointIndex iq = *aug.find(q);

  // N(S) = number of cliques centered at `center` containing the vertex set
  // S, for every non-empty S of at most `max_shared` vertices.
  const std::size_t max_shared = static_cast<std::size_t>(std::min(k, l));
  using Subsets = std::map<std::vector<PointIndex>, Count>;
  auto subset_counts = [&](PointIndex center, int size) {
    Subsets counts;
    std::vector<PointIndex> current{center}, subset;
    const auto up = aug.up_neighbors(center);
    detail::enumerate_cliques(aug, up, current, static_cast<std::size_t>(size),
                              [&](const std::vector<PointIndex>& members) {
                                auto sorted = members;
                                std::sort(sorted.begin(), sorted.end());
                                const std::size_t m = sorted.size();
                                for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
                                  if (static_cast<std::size_t>(__builtin_popcount(mask)) > max_shared) continue;
                                  subset.clear();
                                  for (std::size_t b = 0; b < m; ++b) {
                                    if (mask >> b & 1u) subset.push_back(sorted[b]);
                                  }
                                  auto& c = counts[subset];
                                  c = checked_add(c, 1);
                                }
                              });
    return counts;
  };
  const auto a_sets = subset_counts(ip, k);
  if (a_sets.empty()) return 0;
  const auto b_sets = subset_counts(iq, l);
  // Inclusion-exclusion over the shared vertex set: a pair sharing the
  // non-empty set I is counted sum_{S in I, S non-empty} (-1)^(|S|+1) = 1 times.
  Count plus = 0, minus = 0;
  for (const auto& [set, na] : a_sets) {
    const auto it = b_sets.find(set);
    if (it == b_sets.end()) continue;
    const Count term = checked_mul(na, it->second);
    if (set.size() % 2 == 1) plus = checked_add(plus, term);
    else minus = checked_add(minus, term);
  }
  return plus - minus;
}

// Counts of cliques through p for every size in [1, max_k] (entry 0 unused);
// p is not a member of config.
inline std::vector<Count> cliques_through_upto(const PointConfig& config, const MarkedPoint& p, int max_k) {
  detail::require_clique_size(max_k);
  std::vector<Count> local(static_cast<std::size_t>(max_k) + 1, 0);
  local[1] = 1;
  detail::extend_cliques(config, config.neighbors(p), 1, max_k, local);
  return local;
}

// Counts of cliques through both p and q for every size in [1, max_k], given
// the precomputed neighbor list of p in config (as returned by neighbors()).
inline std::vector<Count> cliques_through_pair_upto(const PointConfig& config, const MarkedPoint& p,
                                                    std::span<const PointIndex> p_neighbors,
                                                    const MarkedPoint& q, int max_k) {
  detail::require_clique_size(max_k);
  std::vector<Count> local(static_cast<std::size_t>(max_k) + 1, 0);
  if (max_k < 2 || !connects(p, q, config.params())) return local;
  local[2] = 1;
  const auto common = detail::intersect_by_mark(
      config, std::vector<PointIndex>(p_neighbors.begin(), p_neighbors.end()), config.neighbors(q));
  detail::extend_cliques(config, common, 2, max_k, local);
  return local;
}

// Largest down-degree among the up-neighbors of (0, u); 0 when there are none.
inline std::size_t d_max(const PointConfig& config, double u) {
  std::size_t best = 0;
  for (PointIndex q : config.up_neighbors(MarkedPoint{0.0, u})) {
    best = std::max(best, config.down_neighbors(q).size());
  }
  return best;
}

}  // namespace adrcm
