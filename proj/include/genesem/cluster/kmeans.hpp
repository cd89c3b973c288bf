#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "genesem/cluster/labels.hpp"
#include "genesem/error.hpp"
#include "genesem/matrix.hpp"
#include "genesem/rng.hpp"

namespace genesem {

struct KMeansResult {
  ClusterLabels labels;
  DenseMatrix centroids;  // rows follow the relabelled cluster ids
  double inertia = 0.0;
  std::size_t iterations = 0;
  /// Inertia after every assignment step and after the final update, one
  /// list per restart. Each list is non-increasing.
  std::vector<std::vector<double>> inertia_history;
};

namespace detail {

inline std::vector<std::size_t> kmeanspp_seeds(const DenseMatrix& points, std::size_t k, Rng& rng) {
  const std::size_t n = points.rows();
  std::vector<std::size_t> seeds;
  seeds.push_back(static_cast<std::size_t>(rng.below(n)));
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  while (seeds.size() < k) {
    const auto last = points.row(seeds.back());
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], squared_distance(points.row(i), last));
      total += d2[i];
    }
    if (total <= 0.0) {
      seeds.push_back(static_cast<std::size_t>(rng.below(n)));
      continue;
    }
    const double r = rng.uniform() * total;
    double cum = 0.0;
    std::size_t pick = n;
    for (std::size_t i = 0; i < n; ++i) {
      cum += d2[i];
      if (d2[i] > 0.0) pick = i;  // fallback: last candidate with positive weight
      if (cum > r && d2[i] > 0.0) {
        pick = i;
        break;
      }
    }
    seeds.push_back(pick);
  }
  return seeds;
}

struct LloydRun {
  std::vector<std::size_t> assign;
  DenseMatrix centroids;
  double inertia = 0.0;
  std::size_t iterations = 0;
  std::vector<double> history;
};

inline LloydRun lloyd(const DenseMatrix& points, std::size_t k, std::size_t max_iter, Rng& rng) {
  const std::size_t n = points.rows();
  const std::size_t dims = points.cols();
  LloydRun run;
  run.centroids = DenseMatrix(k, dims);
  const auto seeds = kmeanspp_seeds(points, k, rng);
  for (std::size_t c = 0; c < k; ++c) {
    const auto src = points.row(seeds[c]);
    std::copy(src.begin(), src.end(), run.centroids.row(c).begin());
  }

  run.assign.assign(n, k);
  std::vector<double> cost(n);
  std::vector<std::size_t> counts(k);
  for (std::size_t it = 0; it < max_iter; ++it) {
    bool changed = false;
    double inertia = 0.0;
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        const double d = squared_distance(points.row(i), run.centroids.row(c));
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      changed |= run.assign[i] != best;
      run.assign[i] = best;
      cost[i] = best_d;
      inertia += best_d;
      ++counts[best];
    }
    run.history.push_back(inertia);
    run.iterations = it + 1;
    if (!changed) break;

    // Empty cluster: take over the point farthest from its centroid among
    // clusters that can spare one. Ties go to the lowest point index.
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] != 0) continue;
      std::size_t far = n;
      for (std::size_t i = 0; i < n; ++i)
        if (counts[run.assign[i]] > 1 && (far == n || cost[i] > cost[far])) far = i;
      --counts[run.assign[far]];
      run.assign[far] = c;
      cost[far] = 0.0;
      counts[c] = 1;
    }

    std::fill(run.centroids.values().begin(), run.centroids.values().end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      auto dst = run.centroids.row(run.assign[i]);
      const auto src = points.row(i);
      for (std::size_t d = 0; d < dims; ++d) dst[d] += src[d];
    }
    for (std::size_t c = 0; c < k; ++c)
      for (double& v : run.centroids.row(c)) v /= static_cast<double>(counts[c]);
  }

  run.inertia = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    run.inertia += squared_distance(points.row(i), run.centroids.row(run.assign[i]));
  run.history.push_back(run.inertia);
  return run;
}

}  // namespace detail

/// k-means++ seeding and Lloyd iterations; keeps the lowest-inertia restart
/// (the earliest one on ties).
inline KMeansResult kmeans_fit(const DenseMatrix& points, const ClustererSpec& spec) {
  const std::size_t n = points.rows();
  if (spec.k < 1 || spec.k > n)
    throw Error(ErrorCode::InvalidK, "k must lie in [1, n]; got k=" + std::to_string(spec.k) +
                                         " for n=" + std::to_string(n));
  require(spec.restarts >= 1, "k-means needs at least one restart");
  Rng rng(spec.seed);
  KMeansResult out;
  detail::LloydRun best;
  bool have_best = false;
  for (std::size_t r = 0; r < spec.restarts; ++r) {
    detail::LloydRun run = detail::lloyd(points, spec.k, spec.max_iterations, rng);
    out.inertia_history.push_back(run.history);
    if (!have_best || run.inertia < best.inertia) {
      best = std::move(run);
      have_best = true;
    }
  }

  std::vector<std::int64_t> groups(best.assign.begin(), best.assign.end());
  out.labels = relabel_by_first_appearance(groups);
  out.centroids = DenseMatrix(spec.k, points.cols());
  for (std::size_t i = 0; i < n; ++i) {
    const auto src = best.centroids.row(best.assign[i]);
    std::copy(src.begin(), src.end(), out.centroids.row(static_cast<std::size_t>(out.labels.labels[i])).begin());
  }
  out.inertia = best.inertia;
  out.iterations = best.iterations;
  return out;
}

inline ClusterLabels kmeans(const DenseMatrix& points, const ClustererSpec& spec) {
  return kmeans_fit(points, spec).labels;
}

}  // namespace genesem
