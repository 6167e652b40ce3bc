#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <queue>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "adrcm/count.hpp"
#include "adrcm/error.hpp"
#include "adrcm/io.hpp"
#include "adrcm/model.hpp"

namespace adrcm {

// Abstract rooted directed tree on vertices 1..vertex_count. An edge (i, j)
// means i -> j: the image of i has the higher mark and connects to the image of j.
struct DirectedTreeSpec {
  int vertex_count = 1;
  std::vector<std::pair<int, int>> edges;
  int root = 1;

  bool operator==(const DirectedTreeSpec&) const = default;
};

enum class EdgeDirection {
  kChildYounger,  // child -> parent: child lies in the parent's up-neighborhood
  kChildOlder,    // parent -> child: child lies in the parent's down-neighborhood
};

struct TreeStep {
  int vertex;  // 0-based
  int parent;  // 0-based, already assigned when this step runs
  EdgeDirection direction;
};

class ValidatedTree {
 public:
  const DirectedTreeSpec& spec() const noexcept { return spec_; }
  int vertex_count() const noexcept { return spec_.vertex_count; }
  // Degree-one vertices other than the root.
  int leaf_count() const noexcept { return leaf_count_; }
  // Set when the root itself has degree one; it is not counted as a leaf.
  bool root_has_degree_one() const noexcept { return root_has_degree_one_; }
  int root() const noexcept { return spec_.root - 1; }
  // Non-root vertices in breadth-first order from the root.
  std::span<const TreeStep> steps() const noexcept { return steps_; }

 private:
  friend ValidatedTree validate_tree(const DirectedTreeSpec& spec);

  DirectedTreeSpec spec_;
  int leaf_count_ = 0;
  bool root_has_degree_one_ = false;
  std::vector<TreeStep> steps_;
};

inline ValidatedTree validate_tree(const DirectedTreeSpec& spec) {
  const int m = spec.vertex_count;
  if (m < 1) throw SpecError("tree needs at least one vertex");
  if (spec.root < 1 || spec.root > m) throw SpecError("root " + std::to_string(spec.root) + " out of range");
  std::vector<int> parent(m);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  std::vector<std::vector<std::pair<int, EdgeDirection>>> adj(m);
  for (std::size_t e = 0; e < spec.edges.size(); ++e) {
    const auto [i, j] = spec.edges[e];
    if (i < 1 || i > m || j < 1 || j > m)
      throw SpecError("edge " + std::to_string(i) + "->" + std::to_string(j) + " out of range");
    if (i == j) throw SpecError("self-loop at vertex " + std::to_string(i) + " (cycle)");
    for (std::size_t f = 0; f < e; ++f) {
      const auto [a, b] = spec.edges[f];
      if (a == i && b == j) throw SpecError("multi-edge " + std::to_string(i) + "->" + std::to_string(j));
      if (a == j && b == i) throw SpecError("cycle between vertices " + std::to_string(i) + " and " + std::to_string(j));
    }
    const int ri = find(i - 1);
    const int rj = find(j - 1);
    if (ri == rj) throw SpecError("edge " + std::to_string(i) + "->" + std::to_string(j) + " closes a cycle");
    parent[ri] = rj;
    // From i's side j is older (i -> j); from j's side i is younger.
    adj[i - 1].push_back({j - 1, EdgeDirection::kChildOlder});
    adj[j - 1].push_back({i - 1, EdgeDirection::kChildYounger});
  }
  if (static_cast<int>(spec.edges.size()) != m - 1) throw SpecError("tree is disconnected");

  ValidatedTree tree;
  tree.spec_ = spec;
  const int r = spec.root - 1;
  for (int v = 0; v < m; ++v) {
    if (adj[v].size() == 1 && v != r) ++tree.leaf_count_;
  }
  tree.root_has_degree_one_ = adj[r].size() == 1;
  std::vector<bool> seen(m, false);
  std::queue<int> frontier;
  frontier.push(r);
  seen[r] = true;
  while (!frontier.empty()) {
    const int v = frontier.front();
    frontier.pop();
    for (const auto& [w, dir] : adj[v]) {
      if (seen[w]) continue;
      seen[w] = true;
      tree.steps_.push_back({w, v, dir});
      frontier.push(w);
    }
  }
  return tree;
}

// Tree file grammar (one item per line, surrounding whitespace ignored):
//   m=<int>            vertex count, exactly once
//   root=<int>         root vertex, exactly once
//   edge=<i>-><j>      one line per directed edge
// Blank lines and lines starting with '#' are ignored; anything else is rejected.
inline DirectedTreeSpec parse_tree_spec(std::string_view text) {
  DirectedTreeSpec spec;
  spec.edges.clear();
  bool have_m = false, have_root = false;
  auto parse_int = [](std::string_view s, std::size_t line) {
    const std::string t = trim(s);
    if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos || t.size() > 9)
      throw FormatError("line " + std::to_string(line) + ": expected a non-negative integer, got '" + t + "'");
    return std::stoi(t);
  };
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string t = trim(raw);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw FormatError("line " + std::to_string(line) + ": expected key=value");
    const std::string key = trim(std::string_view(t).substr(0, eq));
    const std::string_view value = std::string_view(t).substr(eq + 1);
    if (key == "m") {
      if (have_m) throw FormatError("line " + std::to_string(line) + ": duplicate m");
      spec.vertex_count = parse_int(value, line);
      have_m = true;
    } else if (key == "root") {
      if (have_root) throw FormatError("line " + std::to_string(line) + ": duplicate root");
      spec.root = parse_int(value, line);
      have_root = true;
    } else if (key == "edge") {
      const auto arrow = value.find("->");
      if (arrow == std::string_view::npos) throw FormatError("line " + std::to_string(line) + ": expected <i>-><j>");
      spec.edges.emplace_back(parse_int(value.substr(0, arrow), line), parse_int(value.substr(arrow + 2), line));
    } else {
      throw FormatError("line " + std::to_string(line) + ": unknown key '" + key + "'");
    }
  }
  if (!have_m) throw FormatError("missing m=<int>");
  if (!have_root) throw FormatError("missing root=<int>");
  return spec;
}

inline std::string render_tree_spec(const DirectedTreeSpec& spec) {
  std::string out = "m=" + std::to_string(spec.vertex_count) + "\nroot=" + std::to_string(spec.root) + "\n";
  for (const auto& [i, j] : spec.edges) out += "edge=" + std::to_string(i) + "->" + std::to_string(j) + "\n";
  return out;
}

namespace trees {

// 2 -> 1, rooted at the older endpoint.
inline DirectedTreeSpec edge() { return {2, {{2, 1}}, 1}; }
// Two younger leaves attached to an older root.
inline DirectedTreeSpec wedge() { return {3, {{2, 1}, {3, 1}}, 1}; }
// 4 -> 3 -> 2 -> 1, marks increasing away from the root.
inline DirectedTreeSpec path3() { return {4, {{4, 3}, {3, 2}, {2, 1}}, 1}; }
// Three younger leaves attached to an older root.
inline DirectedTreeSpec star3() { return {4, {{2, 1}, {3, 1}, {4, 1}}, 1}; }

}  // namespace trees

namespace detail {

class NeighborCache {
 public:
  explicit NeighborCache(const PointConfig& config)
      : config_(config), up_(config.size()), down_(config.size()) {}

  const std::vector<PointIndex>& up(PointIndex i) {
    if (!up_[i]) up_[i] = config_.up_neighbors(i);
    return *up_[i];
  }
  const std::vector<PointIndex>& down(PointIndex i) {
    if (!down_[i]) down_[i] = config_.down_neighbors(i);
    return *down_[i];
  }

 private:
  const PointConfig& config_;
  std::vector<std::optional<std::vector<PointIndex>>> up_;
  std::vector<std::optional<std::vector<PointIndex>>> down_;
};

constexpr std::int64_t kExternal = -1;

// Backtracking over injective assignments, one tree vertex per step.
class TreeEmbedder {
 public:
  TreeEmbedder(const PointConfig& config, const ValidatedTree& tree)
      : tree_(tree), cache_(config), images_(static_cast<std::size_t>(tree.vertex_count()), kExternal) {}

  Count count_member_root(PointIndex root) {
    images_[tree_.root()] = root;
    if (tree_.steps().empty()) return 1;
    return extend(0);
  }

  Count count_external_root(const PointConfig& config, const MarkedPoint& p) {
    images_[tree_.root()] = kExternal;
    if (tree_.steps().empty()) return 1;
    root_up_ = config.up_neighbors(p);
    root_down_ = config.down_neighbors(p);
    return extend(0);
  }

 private:
  const std::vector<PointIndex>& candidates(const TreeStep& step) {
    const std::int64_t pi = images_[step.parent];
    const bool up = step.direction == EdgeDirection::kChildYounger;
    if (pi == kExternal) return up ? root_up_ : root_down_;
    return up ? cache_.up(static_cast<PointIndex>(pi)) : cache_.down(static_cast<PointIndex>(pi));
  }

  bool used(std::size_t s, PointIndex c) const {
    if (images_[tree_.root()] == c) return true;
    for (std::size_t t = 0; t < s; ++t) {
      if (images_[tree_.steps()[t].vertex] == c) return true;
    }
    return false;
  }

  Count extend(std::size_t s) {
    const auto& step = tree_.steps()[s];
    const auto& cand = candidates(step);
    const bool last = s + 1 == tree_.steps().size();
    Count total = 0;
    for (PointIndex c : cand) {
      if (used(s, c)) continue;
      if (last) {
        total = checked_add(total, 1);
      } else {
        images_[step.vertex] = c;
        total = checked_add(total, extend(s + 1));
      }
    }
    images_[step.vertex] = kExternal;
    return total;
  }

  const ValidatedTree& tree_;
  NeighborCache cache_;
  std::vector<std::int64_t> images_;
  std::vector<PointIndex> root_up_;
  std::vector<PointIndex> root_down_;
};

}  // namespace detail

// Injective homomorphisms of the tree into config (+ p) with the root mapped
// to p. Non-induced: leaves need not be mutually (non)adjacent.
inline Count d_in(const PointConfig& config, const MarkedPoint& p, const ValidatedTree& tree) {
  detail::TreeEmbedder embedder(config, tree);
  if (auto idx = config.find(p)) return embedder.count_member_root(*idx);
  return embedder.count_external_root(config, p);
}

// Per-point root counts D_in(P) for every configuration point, in position order.
inline std::vector<Count> d_in_all(const PointConfig& config, const ValidatedTree& tree) {
  detail::TreeEmbedder embedder(config, tree);
  std::vector<Count> out(config.size());
  for (PointIndex i = 0; i < config.size(); ++i) out[i] = embedder.count_member_root(i);
  return out;
}

inline Count count_trees(const PointConfig& config, const ValidatedTree& tree) {
  Count total = 0;
  for (Count c : d_in_all(config, tree)) total = checked_add(total, c);
  return total;
}

struct BlockSums {
  // values[i] collects roots with shifted position x + n/2 in [i, i+1).
  std::vector<Count> values;
  ModelParams params;
};

inline std::size_t integer_torus_length(const ModelParams& params) {
  const double n = params.torus_length;
  const double r = std::round(n);
  if (r < 1.0 || std::fabs(n - r) > 1e-9)
    throw ParameterError("block sums need an integer torus length, got " + format_shortest(n));
  return static_cast<std::size_t>(r);
}

inline BlockSums block_sums(const PointConfig& config, const ValidatedTree& tree) {
  const std::size_t n = integer_torus_length(config.params());
  BlockSums out{std::vector<Count>(n, 0), config.params()};
  const auto roots = d_in_all(config, tree);
  const double half = 0.5 * config.params().torus_length;
  for (PointIndex i = 0; i < config.size(); ++i) {
    auto b = static_cast<std::size_t>(std::floor(config[i].x + half));
    b = std::min(b, n - 1);
    out.values[b] = checked_add(out.values[b], roots[i]);
  }
  return out;
}

}  // namespace adrcm
