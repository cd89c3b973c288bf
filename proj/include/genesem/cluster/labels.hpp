#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace genesem {

inline constexpr int kNoise = -1;

/// Per-point cluster ids: dense 0..n_clusters-1, or kNoise.
struct ClusterLabels {
  std::vector<int> labels;
  std::size_t n_clusters = 0;

  std::size_t size() const noexcept { return labels.size(); }
  std::size_t noise_count() const noexcept {
    std::size_t n = 0;
    for (int l : labels) n += (l == kNoise);
    return n;
  }
  friend bool operator==(const ClusterLabels&, const ClusterLabels&) = default;
};

/// Renumbers arbitrary non-negative group ids densely by first appearance;
/// negative ids become noise.
inline ClusterLabels relabel_by_first_appearance(const std::vector<std::int64_t>& groups) {
  ClusterLabels out;
  out.labels.resize(groups.size());
  std::unordered_map<std::int64_t, int> seen;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (groups[i] < 0) {
      out.labels[i] = kNoise;
      continue;
    }
    const auto [it, inserted] = seen.try_emplace(groups[i], static_cast<int>(seen.size()));
    out.labels[i] = it->second;
  }
  out.n_clusters = seen.size();
  return out;
}

enum class ClusterMethod { AggSingle, AggWard, AggAverage, Hdbscan, KMeans };

/// Row order of the pivoted score table.
inline constexpr std::array<ClusterMethod, 5> kAllClusterMethods = {
    ClusterMethod::AggSingle, ClusterMethod::AggWard, ClusterMethod::AggAverage,
    ClusterMethod::Hdbscan, ClusterMethod::KMeans};

inline std::string_view to_string(ClusterMethod m) {
  switch (m) {
    case ClusterMethod::AggSingle: return "agg_single";
    case ClusterMethod::AggWard: return "agg_ward";
    case ClusterMethod::AggAverage: return "agg_average";
    case ClusterMethod::Hdbscan: return "hdbscan";
    case ClusterMethod::KMeans: return "kmeans";
  }
  return "";
}

inline std::string_view display_name(ClusterMethod m) {
  switch (m) {
    case ClusterMethod::AggSingle: return "AC single";
    case ClusterMethod::AggWard: return "AC ward";
    case ClusterMethod::AggAverage: return "AC average";
    case ClusterMethod::Hdbscan: return "HDBSCAN";
    case ClusterMethod::KMeans: return "K-means";
  }
  return "";
}

inline std::optional<ClusterMethod> parse_cluster_method(std::string_view s) {
  for (ClusterMethod m : kAllClusterMethods)
    if (s == to_string(m)) return m;
  return std::nullopt;
}

struct ClustererSpec {
  ClusterMethod method = ClusterMethod::KMeans;
  std::size_t k = 6;
  std::size_t min_cluster_size = 15;
  std::size_t min_samples = 0;  // 0 means "same as min_cluster_size"
  bool allow_single_cluster = false;
  std::size_t restarts = 10;
  std::size_t max_iterations = 300;
  std::uint64_t seed = 0;

  std::size_t effective_min_samples() const noexcept {
    return min_samples == 0 ? min_cluster_size : min_samples;
  }
};

}  // namespace genesem
