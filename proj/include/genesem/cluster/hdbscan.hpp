#pragma once

// HDBSCAN: mutual reachability graph, minimum spanning tree, single-linkage
// hierarchy, condensed tree and excess-of-mass cluster selection.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <vector>

#include "genesem/cluster/labels.hpp"
#include "genesem/error.hpp"
#include "genesem/matrix.hpp"

namespace genesem {

/// core_i is the distance to the min_samples-th nearest other point;
/// entry (i, j) is max(core_i, core_j, d_ij), zero on the diagonal.
inline DenseMatrix mutual_reachability(const DenseMatrix& distances, std::size_t min_samples) {
  const std::size_t n = distances.rows();
  if (distances.cols() != n) throw Error(ErrorCode::BadShape, "distance matrix must be square");
  require(min_samples >= 1 && min_samples < n, "min_samples must lie in [1, n-1]");
  std::vector<double> core(n);
  std::vector<double> row;
  for (std::size_t i = 0; i < n; ++i) {
    row.clear();
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) row.push_back(distances(i, j));
    std::nth_element(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(min_samples - 1),
                     row.end());
    core[i] = row[min_samples - 1];
  }
  DenseMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) out(i, j) = std::max({core[i], core[j], distances(i, j)});
  return out;
}

struct MstEdge {
  std::size_t a;
  std::size_t b;
  double weight;
};

/// Prim's algorithm on a dense symmetric weight matrix. Ties pick the lowest
/// vertex index.
inline std::vector<MstEdge> minimum_spanning_tree(const DenseMatrix& weights) {
  const std::size_t n = weights.rows();
  std::vector<MstEdge> edges;
  if (n < 2) return edges;
  std::vector<bool> in_tree(n, false);
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> from(n, 0);
  std::size_t current = 0;
  in_tree[0] = true;
  for (std::size_t step = 1; step < n; ++step) {
    std::size_t next = n;
    for (std::size_t v = 0; v < n; ++v) {
      if (in_tree[v]) continue;
      if (weights(current, v) < best[v]) {
        best[v] = weights(current, v);
        from[v] = current;
      }
      if (next == n || best[v] < best[next]) next = v;
    }
    edges.push_back({from[next], next, best[next]});
    in_tree[next] = true;
    current = next;
  }
  return edges;
}

/// One row of the condensed tree. Cluster ids start at n (the root); child
/// ids below n are points falling out of `parent`.
struct CondensedEntry {
  std::size_t parent;
  std::size_t child;
  double lambda;
  std::size_t child_size;
};

struct HdbscanResult {
  ClusterLabels labels;
  std::vector<MstEdge> mst;
  std::vector<CondensedEntry> condensed;
  std::map<std::size_t, double> stability;
  std::vector<std::size_t> selected;  // condensed-tree cluster ids
};

namespace detail {

struct LinkageNode {
  std::size_t left;
  std::size_t right;
  double distance;
  std::size_t size;
};

// Single-linkage hierarchy from MST edges; node n + i is the i-th merge.
inline std::vector<LinkageNode> single_linkage_tree(std::size_t n, std::vector<MstEdge> mst) {
  std::stable_sort(mst.begin(), mst.end(),
                   [](const MstEdge& x, const MstEdge& y) { return x.weight < y.weight; });
  std::vector<std::size_t> parent(2 * n - 1);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  std::vector<std::size_t> size(2 * n - 1, 1);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<LinkageNode> tree;
  for (std::size_t i = 0; i < mst.size(); ++i) {
    const std::size_t ra = find(mst[i].a);
    const std::size_t rb = find(mst[i].b);
    const std::size_t node = n + i;
    tree.push_back({ra, rb, mst[i].weight, size[ra] + size[rb]});
    parent[ra] = node;
    parent[rb] = node;
    size[node] = size[ra] + size[rb];
  }
  return tree;
}

}  // namespace detail

inline HdbscanResult hdbscan_fit(const DenseMatrix& points, const ClustererSpec& spec) {
  const std::size_t n = points.rows();
  const std::size_t mcs = spec.min_cluster_size;
  require(mcs >= 2, "min_cluster_size must be at least 2");
  require(n >= mcs, "need at least min_cluster_size points");
  const std::size_t min_samples = std::min(spec.effective_min_samples(), n - 1);

  HdbscanResult out;
  out.mst = minimum_spanning_tree(mutual_reachability(pairwise_distances(points), min_samples));
  const auto tree = detail::single_linkage_tree(n, out.mst);

  // Zero-distance merges get a finite lambda above every other one.
  double min_positive = std::numeric_limits<double>::infinity();
  for (const auto& node : tree)
    if (node.distance > 0.0) min_positive = std::min(min_positive, node.distance);
  const double lambda_cap = std::isfinite(min_positive) ? 2.0 / min_positive : 1.0;
  auto lambda_of = [&](double d) { return d > 0.0 ? 1.0 / d : lambda_cap; };
  auto node_size = [&](std::size_t id) { return id < n ? std::size_t{1} : tree[id - n].size; };

  // Leaves under a hierarchy node.
  auto leaves = [&](std::size_t id) {
    std::vector<std::size_t> out_leaves, stack{id};
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      if (v < n) {
        out_leaves.push_back(v);
      } else {
        stack.push_back(tree[v - n].right);
        stack.push_back(tree[v - n].left);
      }
    }
    return out_leaves;
  };

  const std::size_t root = 2 * n - 2;
  std::vector<std::size_t> relabel(2 * n - 1, 0);
  relabel[root] = n;
  std::size_t next_label = n + 1;
  std::vector<std::size_t> queue{root};
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    const std::size_t node = queue[qi];
    if (node < n) continue;
    const auto& t = tree[node - n];
    const double lambda = lambda_of(t.distance);
    const std::size_t lsize = node_size(t.left);
    const std::size_t rsize = node_size(t.right);
    const std::size_t parent = relabel[node];
    auto fall_out = [&](std::size_t child) {
      for (std::size_t leaf : leaves(child)) out.condensed.push_back({parent, leaf, lambda, 1});
    };
    if (lsize >= mcs && rsize >= mcs) {
      relabel[t.left] = next_label++;
      out.condensed.push_back({parent, relabel[t.left], lambda, lsize});
      relabel[t.right] = next_label++;
      out.condensed.push_back({parent, relabel[t.right], lambda, rsize});
      queue.push_back(t.left);
      queue.push_back(t.right);
    } else if (lsize < mcs && rsize < mcs) {
      fall_out(t.left);
      fall_out(t.right);
    } else if (lsize < mcs) {
      relabel[t.right] = parent;
      fall_out(t.left);
      queue.push_back(t.right);
    } else {
      relabel[t.left] = parent;
      fall_out(t.right);
      queue.push_back(t.left);
    }
  }

  // Stability: sum over rows of (lambda - lambda_birth(parent)) * size.
  std::map<std::size_t, double> birth{{n, 0.0}};
  for (const auto& e : out.condensed)
    if (e.child >= n) birth[e.child] = e.lambda;
  for (const auto& [cluster, b] : birth) out.stability[cluster] = 0.0;
  for (const auto& e : out.condensed)
    out.stability[e.parent] += (e.lambda - birth[e.parent]) * static_cast<double>(e.child_size);

  std::map<std::size_t, std::vector<std::size_t>> children;
  std::map<std::size_t, std::size_t> parent_of;
  for (const auto& e : out.condensed)
    if (e.child >= n) {
      children[e.parent].push_back(e.child);
      parent_of[e.child] = e.parent;
    }

  // Excess of mass, bottom-up (children carry larger ids than parents).
  std::map<std::size_t, bool> is_cluster;
  std::map<std::size_t, double> subtree = out.stability;
  for (auto it = out.stability.rbegin(); it != out.stability.rend(); ++it) {
    const std::size_t c = it->first;
    if (c == n && !spec.allow_single_cluster) continue;
    double child_sum = 0.0;
    for (std::size_t ch : children[c]) child_sum += subtree[ch];
    if (!children[c].empty() && child_sum > subtree[c]) {
      is_cluster[c] = false;
      subtree[c] = child_sum;
    } else {
      is_cluster[c] = true;
      std::vector<std::size_t> stack(children[c]);
      while (!stack.empty()) {
        const std::size_t v = stack.back();
        stack.pop_back();
        is_cluster[v] = false;
        for (std::size_t ch : children[v]) stack.push_back(ch);
      }
    }
  }
  for (const auto& [c, sel] : is_cluster)
    if (sel) out.selected.push_back(c);

  std::vector<std::int64_t> groups(n, -1);
  for (const auto& e : out.condensed) {
    if (e.child >= n) continue;
    std::size_t c = e.parent;
    while (true) {
      const auto sel = is_cluster.find(c);
      if (sel != is_cluster.end() && sel->second) {
        groups[e.child] = static_cast<std::int64_t>(c);
        break;
      }
      const auto up = parent_of.find(c);
      if (up == parent_of.end()) break;
      c = up->second;
    }
  }
  out.labels = relabel_by_first_appearance(groups);
  return out;
}

inline ClusterLabels hdbscan(const DenseMatrix& points, const ClustererSpec& spec) {
  return hdbscan_fit(points, spec).labels;
}

}  // namespace genesem
