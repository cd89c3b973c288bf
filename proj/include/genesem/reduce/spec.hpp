#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

#include "genesem/matrix.hpp"

namespace genesem {

enum class ReducerMethod { Tsne, Umap };

inline std::string_view to_string(ReducerMethod m) { return m == ReducerMethod::Tsne ? "tsne" : "umap"; }
inline std::string_view display_name(ReducerMethod m) {
  return m == ReducerMethod::Tsne ? "T-SNE" : "UMAP";
}
inline std::optional<ReducerMethod> parse_reducer(std::string_view s) {
  if (s == "tsne" || s == "t-sne") return ReducerMethod::Tsne;
  if (s == "umap") return ReducerMethod::Umap;
  return std::nullopt;
}

struct TsneParams {
  double perplexity = 30.0;
  std::size_t iterations = 1000;
  double learning_rate = 200.0;
  double early_exaggeration = 12.0;
  std::size_t exaggeration_iterations = 250;
  double initial_momentum = 0.5;
  double final_momentum = 0.8;
  std::size_t momentum_switch = 250;
  double init_scale = 1e-4;
};

struct UmapParams {
  std::size_t n_neighbors = 15;
  double min_dist = 0.1;
  double spread = 1.0;
  std::size_t epochs = 500;
  std::size_t negative_sample_rate = 5;
  double init_range = 10.0;
  double learning_rate = 1.0;
};

struct ReducerSpec {
  ReducerMethod method = ReducerMethod::Umap;
  std::size_t target_dims = 2;
  TsneParams tsne;
  UmapParams umap;
  std::uint64_t seed = 0;
};

/// Symmetric, non-negative n x n weights with zero diagonal.
using AffinityMatrix = DenseMatrix;

}  // namespace genesem
