#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "genesem/cluster/labels.hpp"
#include "genesem/error.hpp"
#include "genesem/matrix.hpp"

namespace genesem {

struct SilhouetteReport {
  double score = 0.0;
  std::vector<double> per_point;       // aligned with `evaluated`
  std::vector<std::size_t> evaluated;  // indices of the scored points
  std::size_t n_evaluated = 0;
};

/// Silhouette over Euclidean distances. Noise points are skipped unless
/// `include_noise_as_cluster`, in which case they form one extra cluster.
/// Points alone in their cluster score 0.
inline SilhouetteReport silhouette(const DenseMatrix& points, const ClusterLabels& labels,
                                   bool include_noise_as_cluster = false) {
  const std::size_t n = points.rows();
  if (labels.size() != n) throw Error(ErrorCode::ShapeMismatch, "one label per point required");

  int max_label = -1;
  for (int l : labels.labels) max_label = std::max(max_label, l);
  const std::size_t noise_group = static_cast<std::size_t>(max_label + 1);
  std::vector<std::ptrdiff_t> group(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    if (labels.labels[i] >= 0) group[i] = labels.labels[i];
    else if (include_noise_as_cluster) group[i] = static_cast<std::ptrdiff_t>(noise_group);
  }
  const std::size_t n_groups = noise_group + 1;
  std::vector<std::size_t> count(n_groups, 0);
  for (auto g : group)
    if (g >= 0) ++count[static_cast<std::size_t>(g)];
  const auto populated = std::count_if(count.begin(), count.end(), [](std::size_t c) { return c > 0; });
  if (populated < 2)
    throw Error(ErrorCode::TooFewClusters, "silhouette needs at least two clusters");

  SilhouetteReport report;
  std::vector<double> sums(n_groups);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (group[i] < 0) continue;
    const auto own = static_cast<std::size_t>(group[i]);
    double s = 0.0;
    if (count[own] > 1) {
      std::fill(sums.begin(), sums.end(), 0.0);
      for (std::size_t j = 0; j < n; ++j)
        if (j != i && group[j] >= 0)
          sums[static_cast<std::size_t>(group[j])] += euclidean_distance(points.row(i), points.row(j));
      const double a = sums[own] / static_cast<double>(count[own] - 1);
      double b = -1.0;
      for (std::size_t g = 0; g < n_groups; ++g) {
        if (g == own || count[g] == 0) continue;
        const double mean = sums[g] / static_cast<double>(count[g]);
        if (b < 0.0 || mean < b) b = mean;
      }
      const double denom = std::max(a, b);
      s = denom > 0.0 ? (b - a) / denom : 0.0;
    }
    report.per_point.push_back(s);
    report.evaluated.push_back(i);
    total += s;
  }
  report.n_evaluated = report.evaluated.size();
  report.score = total / static_cast<double>(report.n_evaluated);
  return report;
}

inline std::vector<double> silhouette_samples(const DenseMatrix& points, const ClusterLabels& labels) {
  return silhouette(points, labels).per_point;
}

inline double silhouette_score(const DenseMatrix& points, const ClusterLabels& labels) {
  return silhouette(points, labels).score;
}

}  // namespace genesem
