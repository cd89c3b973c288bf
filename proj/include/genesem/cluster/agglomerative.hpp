#pragma once

// Agglomerative clustering with Lance-Williams updates over a dense
// dissimilarity matrix. Single and average linkage work on Euclidean
// distances, Ward on squared Euclidean distances (where the Lance-Williams
// recurrence reproduces twice the Ward merge cost).

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "genesem/cluster/labels.hpp"
#include "genesem/error.hpp"
#include "genesem/matrix.hpp"

namespace genesem {

enum class Linkage { Single, Average, Ward };

struct Merge {
  std::size_t kept;     // surviving slot (the smaller id)
  std::size_t absorbed; // slot retired by the merge
  double height;        // linkage value at the merge
};

/// Full merge sequence (n - 1 merges). Slot ids equal the smallest original
/// point index in the cluster; the pair with the smallest linkage value is
/// merged first, ties going to the lexicographically smallest (i, j) pair.
inline std::vector<Merge> agglomerative_merges(const DenseMatrix& points, Linkage linkage) {
  const std::size_t n = points.rows();
  DenseMatrix d = linkage == Linkage::Ward ? pairwise_squared_distances(points)
                                           : pairwise_distances(points);
  std::vector<std::size_t> size(n, 1);
  std::vector<bool> active(n, true);
  std::vector<std::size_t> nn(n, n);
  std::vector<Merge> merges;
  if (n < 2) return merges;

  auto refresh = [&](std::size_t i) {
    nn[i] = n;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || !active[j]) continue;
      if (nn[i] == n || d(i, j) < d(i, nn[i])) nn[i] = j;
    }
  };
  for (std::size_t i = 0; i < n; ++i) refresh(i);

  for (std::size_t step = 0; step + 1 < n; ++step) {
    std::size_t a = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i] || nn[i] == n) continue;
      if (a == n || d(i, nn[i]) < d(a, nn[a])) a = i;
    }
    const std::size_t b = nn[a];
    const std::size_t lo = std::min(a, b);
    const std::size_t hi = std::max(a, b);
    const double height = d(lo, hi);
    merges.push_back({lo, hi, height});

    const double na = static_cast<double>(size[lo]);
    const double nb = static_cast<double>(size[hi]);
    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == lo || k == hi) continue;
      double v = 0.0;
      switch (linkage) {
        case Linkage::Single:
          v = std::min(d(k, lo), d(k, hi));
          break;
        case Linkage::Average:
          v = (na * d(k, lo) + nb * d(k, hi)) / (na + nb);
          break;
        case Linkage::Ward: {
          const double nk = static_cast<double>(size[k]);
          v = ((na + nk) * d(k, lo) + (nb + nk) * d(k, hi) - nk * height) / (na + nb + nk);
          break;
        }
      }
      d(k, lo) = v;
      d(lo, k) = v;
    }
    active[hi] = false;
    size[lo] += size[hi];

    refresh(lo);
    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == lo) continue;
      if (nn[k] == lo || nn[k] == hi) {
        refresh(k);
      } else if (d(k, lo) < d(k, nn[k]) || (d(k, lo) == d(k, nn[k]) && lo < nn[k])) {
        nn[k] = lo;
      }
    }
  }
  return merges;
}

/// Applies the first n - k merges; labels follow the order of each
/// cluster's first member point.
inline ClusterLabels cut_dendrogram(std::size_t n, const std::vector<Merge>& merges, std::size_t k) {
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t m = 0; m + k < n && m < merges.size(); ++m)
    parent[find(merges[m].absorbed)] = find(merges[m].kept);
  std::vector<std::int64_t> groups(n);
  for (std::size_t i = 0; i < n; ++i) groups[i] = static_cast<std::int64_t>(find(i));
  return relabel_by_first_appearance(groups);
}

inline Linkage linkage_for(ClusterMethod m) {
  switch (m) {
    case ClusterMethod::AggSingle: return Linkage::Single;
    case ClusterMethod::AggAverage: return Linkage::Average;
    case ClusterMethod::AggWard: return Linkage::Ward;
    default: break;
  }
  throw Error(ErrorCode::PreconditionViolation, "not an agglomerative method");
}

inline ClusterLabels agglomerative(const DenseMatrix& points, const ClustererSpec& spec) {
  const std::size_t n = points.rows();
  if (spec.k < 1 || spec.k > n)
    throw Error(ErrorCode::InvalidK, "k must lie in [1, n]; got k=" + std::to_string(spec.k) +
                                         " for n=" + std::to_string(n));
  return cut_dendrogram(n, agglomerative_merges(points, linkage_for(spec.method)), spec.k);
}

}  // namespace genesem
