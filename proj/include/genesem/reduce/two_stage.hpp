#pragma once

// Two-stage reduction: every selected feature block is reduced on its own
// (stage 1), the blocks are concatenated, and the result is reduced again
// with the same method (stage 2).

#include <cstddef>
#include <string>

#include "genesem/encode.hpp"
#include "genesem/reduce/spec.hpp"
#include "genesem/reduce/tsne.hpp"
#include "genesem/reduce/umap.hpp"
#include "genesem/rng.hpp"

namespace genesem {

struct TwoStageDims {
  std::size_t stage1 = 50;
  std::size_t stage2 = 2;
};

/// Runs the reducer named by `spec`. A block that already has no more
/// than `spec.target_dims` columns is returned unchanged.
inline DenseMatrix reduce(const DenseMatrix& data, const ReducerSpec& spec) {
  if (data.cols() <= spec.target_dims) return data;
  return spec.method == ReducerMethod::Tsne ? tsne_embed(data, spec) : umap_embed(data, spec);
}

enum class FeatureBlock { Embedding, GoTerms, Acronyms };

inline std::string_view to_string(FeatureBlock b) {
  switch (b) {
    case FeatureBlock::Embedding: return "embedding";
    case FeatureBlock::GoTerms: return "go_terms";
    case FeatureBlock::Acronyms: return "acronyms";
  }
  return "";
}

/// Stage-1 reduction of one block. The seed depends only on the spec seed
/// and the block, so a block shared by several combos reduces identically.
inline DenseMatrix reduce_stage1(const DenseMatrix& block, FeatureBlock which,
                                 const ReducerSpec& spec, const TwoStageDims& dims = {}) {
  ReducerSpec s = spec;
  s.target_dims = dims.stage1;
  s.seed = derive_seed(spec.seed, std::string("stage1/") + std::string(to_string(which)));
  return reduce(block, s);
}

inline DenseMatrix reduce_stage2(FeatureCombo combo, const DenseMatrix& embedding_r,
                                 const DenseMatrix& go_r, const DenseMatrix& acr_r,
                                 const ReducerSpec& spec, const TwoStageDims& dims = {}) {
  require(dims.stage1 > dims.stage2, "stage-1 dims must exceed stage-2 dims");
  ReducerSpec s = spec;
  s.target_dims = dims.stage2;
  s.seed = derive_seed(spec.seed, std::string("stage2/") + std::string(to_string(combo)));
  return reduce(assemble_feature_blocks(combo, embedding_r, go_r, acr_r), s);
}

inline DenseMatrix reduce_two_stage(const DenseMatrix& embedding, const SparseBinaryMatrix& go_bin,
                                    const SparseBinaryMatrix& acr_bin, FeatureCombo combo,
                                    const ReducerSpec& spec, const TwoStageDims& dims = {}) {
  if (go_bin.rows() != embedding.rows() || acr_bin.rows() != embedding.rows())
    throw Error(ErrorCode::ShapeMismatch, "feature blocks have differing row counts");
  const DenseMatrix emb_r = reduce_stage1(embedding, FeatureBlock::Embedding, spec, dims);
  const DenseMatrix go_r = uses_go_terms(combo)
                               ? reduce_stage1(go_bin.densify(), FeatureBlock::GoTerms, spec, dims)
                               : DenseMatrix(embedding.rows(), 0);
  const DenseMatrix acr_r =
      uses_acronyms(combo) ? reduce_stage1(acr_bin.densify(), FeatureBlock::Acronyms, spec, dims)
                           : DenseMatrix(embedding.rows(), 0);
  return reduce_stage2(combo, emb_r, go_r, acr_r, spec, dims);
}

}  // namespace genesem
