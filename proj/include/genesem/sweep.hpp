#pragma once

// Full-factorial sweep over models x reducers x combos x clusterers.
//
// Work runs in three phases: stage-1 reductions (binary blocks once per
// reducer, embedding blocks once per model and reducer), stage-2 reductions
// per (model, reducer, combo), then clustering per cell. Every task draws
// from a seed fixed by its key, so the result does not depend on the worker
// count or scheduling order.

#include <atomic>
#include <chrono>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "genesem/pipeline.hpp"

namespace genesem {

/// Runs fn(0..count-1) on up to `workers` threads.
inline void parallel_for(std::size_t count, std::size_t workers,
                         const std::function<void(std::size_t)>& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
}

struct SweepConfig {
  std::vector<ReducerMethod> reducers{ReducerMethod::Tsne, ReducerMethod::Umap};
  std::vector<FeatureCombo> combos{kAllCombos.begin(), kAllCombos.end()};
  std::vector<ClusterMethod> clusterers{kAllClusterMethods.begin(), kAllClusterMethods.end()};
  ReducerSpec reducer;      // hyperparameters; method and seed are set per cell
  TwoStageDims dims;
  ClustererSpec clusterer;  // hyperparameters; method and seed are set per cell
  std::uint64_t master_seed = 0;
  std::size_t workers = 1;
  bool include_noise_as_cluster = false;
};

struct SweepCell {
  std::string model;
  ReducerMethod reducer = ReducerMethod::Tsne;
  FeatureCombo combo = FeatureCombo::Acronyms;
  ClusterMethod clusterer = ClusterMethod::KMeans;
  std::optional<double> silhouette;  // empty when the cell failed
  std::size_t n_clusters = 0;
  std::size_t n_noise = 0;
  std::size_t n_evaluated = 0;
  double seconds = 0.0;  // compute time of every stage feeding the cell
  std::string error;
  ClusterLabels labels;

  bool ok() const noexcept { return silhouette.has_value(); }
};

struct SweepResult {
  std::vector<std::string> models;
  std::vector<SweepCell> cells;
  /// Stage-2 coordinates keyed by (model index, reducer, combo).
  std::map<std::tuple<std::size_t, ReducerMethod, FeatureCombo>, DenseMatrix> layouts;

  const DenseMatrix* layout_for(const SweepCell& cell) const {
    for (std::size_t m = 0; m < models.size(); ++m)
      if (models[m] == cell.model) {
        const auto it = layouts.find({m, cell.reducer, cell.combo});
        return it == layouts.end() ? nullptr : &it->second;
      }
    return nullptr;
  }
};

/// A model's embeddings, or the error raised while loading them.
struct ModelEmbedding {
  std::string label;
  std::optional<DenseMatrix> matrix;
  std::string error;
};

inline std::vector<ModelEmbedding> load_models(const std::vector<EmbeddingSource>& sources,
                                               const GeneSet& genes) {
  std::vector<ModelEmbedding> out;
  for (const auto& src : sources) {
    ModelEmbedding m{src.label, std::nullopt, {}};
    try {
      m.matrix = load_embeddings(src.path, genes);
    } catch (const Error& e) {
      m.error = with_context(e, "ingest").what();
    }
    out.push_back(std::move(m));
  }
  return out;
}

inline SweepResult run_sweep(const std::vector<ModelEmbedding>& models, const EncodedCorpus& encoded,
                             const SweepConfig& config) {
  require(!models.empty(), "a sweep needs at least one model");
  using Clock = std::chrono::steady_clock;
  auto elapsed = [](Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
  };

  struct Stage {
    DenseMatrix out;
    std::string error;
    double seconds = 0.0;
  };
  auto run_stage = [&](Stage& st, const std::function<DenseMatrix()>& fn) {
    const auto t0 = Clock::now();
    try {
      st.out = fn();
    } catch (const Error& e) {
      st.error = with_context(e, "reduce").what();
    } catch (const std::exception& e) {
      st.error = e.what();
    }
    st.seconds = elapsed(t0);
  };

  const std::size_t n_models = models.size();
  const std::size_t n_red = config.reducers.size();
  const std::size_t n_combo = config.combos.size();
  const std::size_t n_clu = config.clusterers.size();
  const std::size_t n_genes = encoded.go.rows();

  auto spec_for = [&](ReducerMethod method) {
    ReducerSpec rs = config.reducer;
    rs.method = method;
    rs.seed = reducer_seed(config.master_seed, method);
    return rs;
  };

  // Stage 1. Binary blocks: index r * 2 + {0: go, 1: acronyms}.
  std::vector<Stage> binary_stage(n_red * 2);
  std::vector<Stage> embed_stage(n_red * n_models);
  bool need_go = false, need_acr = false;
  for (FeatureCombo c : config.combos) {
    need_go |= uses_go_terms(c);
    need_acr |= uses_acronyms(c);
  }
  const std::size_t n_stage1 = binary_stage.size() + embed_stage.size();
  parallel_for(n_stage1, config.workers, [&](std::size_t t) {
    if (t < binary_stage.size()) {
      const std::size_t r = t / 2;
      const bool go = t % 2 == 0;
      if ((go && !need_go) || (!go && !need_acr)) return;
      run_stage(binary_stage[t], [&] {
        return reduce_stage1(go ? encoded.go.densify() : encoded.acronym.densify(),
                             go ? FeatureBlock::GoTerms : FeatureBlock::Acronyms,
                             spec_for(config.reducers[r]), config.dims);
      });
      return;
    }
    const std::size_t e = t - binary_stage.size();
    const std::size_t r = e / n_models;
    const std::size_t m = e % n_models;
    if (!models[m].matrix) return;
    run_stage(embed_stage[e], [&] {
      return reduce_stage1(*models[m].matrix, FeatureBlock::Embedding,
                           spec_for(config.reducers[r]), config.dims);
    });
  });

  // Stage 2 per (model, reducer, combo).
  std::vector<Stage> layout_stage(n_models * n_red * n_combo);
  std::vector<double> upstream_seconds(layout_stage.size(), 0.0);
  auto layout_index = [&](std::size_t m, std::size_t r, std::size_t c) {
    return (m * n_red + r) * n_combo + c;
  };
  parallel_for(layout_stage.size(), config.workers, [&](std::size_t t) {
    const std::size_t c = t % n_combo;
    const std::size_t r = (t / n_combo) % n_red;
    const std::size_t m = t / (n_combo * n_red);
    Stage& st = layout_stage[t];
    if (!models[m].matrix) {
      st.error = models[m].error;
      return;
    }
    const FeatureCombo combo = config.combos[c];
    const Stage& emb = embed_stage[r * n_models + m];
    const Stage* go = uses_go_terms(combo) ? &binary_stage[r * 2] : nullptr;
    const Stage* acr = uses_acronyms(combo) ? &binary_stage[r * 2 + 1] : nullptr;
    double upstream = emb.seconds + (go ? go->seconds : 0.0) + (acr ? acr->seconds : 0.0);
    upstream_seconds[t] = upstream;
    for (const Stage* s : {&emb, go, acr})
      if (s && !s->error.empty()) {
        st.error = s->error;
        return;
      }
    const DenseMatrix empty(n_genes, 0);
    run_stage(st, [&] {
      return reduce_stage2(combo, emb.out, go ? go->out : empty, acr ? acr->out : empty,
                           spec_for(config.reducers[r]), config.dims);
    });
  });

  SweepResult result;
  for (const auto& m : models) result.models.push_back(m.label);
  result.cells.resize(n_models * n_red * n_combo * n_clu);
  parallel_for(result.cells.size(), config.workers, [&](std::size_t t) {
    const std::size_t k = t % n_clu;
    const std::size_t l = t / n_clu;
    const std::size_t c = l % n_combo;
    const std::size_t r = (l / n_combo) % n_red;
    const std::size_t m = l / (n_combo * n_red);
    SweepCell& cell = result.cells[t];
    cell.model = models[m].label;
    cell.reducer = config.reducers[r];
    cell.combo = config.combos[c];
    cell.clusterer = config.clusterers[k];
    const Stage& layout = layout_stage[layout_index(m, r, c)];
    cell.seconds = upstream_seconds[l] + layout.seconds;
    if (!layout.error.empty()) {
      cell.error = layout.error;
      return;
    }
    const auto t0 = Clock::now();
    try {
      ClustererSpec cs = config.clusterer;
      cs.method = cell.clusterer;
      auto [labels, report] =
          cluster_and_score(layout.out, cs,
                            cell_seed(config.master_seed, cell.model, cell.reducer, cell.combo,
                                      cell.clusterer),
                            config.include_noise_as_cluster);
      cell.silhouette = report.score;
      cell.n_clusters = labels.n_clusters;
      cell.n_noise = labels.noise_count();
      cell.n_evaluated = report.n_evaluated;
      cell.labels = std::move(labels);
    } catch (const Error& e) {
      cell.error = e.what();
    } catch (const std::exception& e) {
      cell.error = e.what();
    }
    cell.seconds += elapsed(t0);
  });

  for (std::size_t m = 0; m < n_models; ++m)
    for (std::size_t r = 0; r < n_red; ++r)
      for (std::size_t c = 0; c < n_combo; ++c) {
        Stage& st = layout_stage[layout_index(m, r, c)];
        if (st.error.empty())
          result.layouts.emplace(std::make_tuple(m, config.reducers[r], config.combos[c]),
                                 std::move(st.out));
      }
  return result;
}

}  // namespace genesem
