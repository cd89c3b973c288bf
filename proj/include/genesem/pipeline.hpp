#pragma once

// Single pipeline run: encode -> two-stage reduction -> clustering ->
// silhouette.

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "genesem/cluster/cluster.hpp"
#include "genesem/encode.hpp"
#include "genesem/error.hpp"
#include "genesem/ingest.hpp"
#include "genesem/metrics.hpp"
#include "genesem/reduce/two_stage.hpp"
#include "genesem/rng.hpp"

namespace genesem {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'", 0, path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Corpus {
  GeneSet genes;
  AnnotationStore annotations;
};

/// Loads the gene list plus optional annotation and description files (an
/// empty path yields empty annotations). Errors name the failing file.
inline Corpus load_corpus(const std::string& genes_path, const std::string& annotations_path,
                          const std::string& descriptions_path) {
  Corpus c;
  auto in_file = [](const std::string& path, auto&& fn) {
    try {
      return fn(read_file(path));
    } catch (const Error& e) {
      throw with_context(e, path);
    }
  };
  c.genes = in_file(genes_path, [](const std::string& s) { return parse_gene_list(s); });
  c.annotations.go.terms.resize(c.genes.size());
  c.annotations.descriptions.text.resize(c.genes.size());
  if (!annotations_path.empty())
    c.annotations.go = in_file(annotations_path, [&](const std::string& s) {
      return parse_go_annotations(s, c.genes);
    });
  if (!descriptions_path.empty())
    c.annotations.descriptions = in_file(descriptions_path, [&](const std::string& s) {
      return parse_descriptions(s, c.genes);
    });
  return c;
}

inline DenseMatrix load_embeddings(const std::string& path, const GeneSet& genes) {
  try {
    return read_embeddings(read_file(path), genes);
  } catch (const Error& e) {
    throw with_context(e, path);
  }
}

/// The two binary feature blocks and their vocabularies.
struct EncodedCorpus {
  Vocabulary go_vocab;
  Vocabulary acronym_vocab;
  std::vector<std::vector<std::string>> acronyms;  // mined per gene, in text order
  SparseBinaryMatrix go;
  SparseBinaryMatrix acronym;
};

inline EncodedCorpus encode_corpus(const Corpus& corpus) {
  EncodedCorpus enc;
  const auto& go_terms = corpus.annotations.go.terms;
  enc.go_vocab = build_vocabulary(go_terms);
  enc.go = encode_binary_matrix(go_terms, enc.go_vocab);

  const auto& texts = corpus.annotations.descriptions.text;
  enc.acronyms.resize(corpus.genes.size());
  for (std::size_t g = 0; g < texts.size(); ++g) enc.acronyms[g] = extract_acronyms(texts[g]);
  enc.acronym_vocab = build_vocabulary(enc.acronyms);
  enc.acronym = encode_binary_matrix(enc.acronyms, enc.acronym_vocab);
  return enc;
}

struct EmbeddingSource {
  std::string label;
  std::string path;
};

struct PipelineConfig {
  EmbeddingSource embedding;
  FeatureCombo combo = FeatureCombo::GoTermsAndAcronyms;
  ReducerSpec reducer;  // seed is derived, the field is ignored
  TwoStageDims dims;
  ClustererSpec clusterer;  // seed is derived, the field is ignored
  std::uint64_t master_seed = 0;
  bool include_noise_as_cluster = false;
};

/// Reduction seeds depend on (master, reducer) only so that stages shared
/// between sweep cells are computed once; the clustering seed covers the
/// whole cell key.
inline std::uint64_t reducer_seed(std::uint64_t master, ReducerMethod method) {
  return derive_seed(master, "reduce/" + std::string(to_string(method)));
}

inline std::uint64_t cell_seed(std::uint64_t master, std::string_view model, ReducerMethod reducer,
                               FeatureCombo combo, ClusterMethod clusterer) {
  std::string key = "cell/";
  key += model;
  key += '/';
  key += to_string(reducer);
  key += '/';
  key += to_string(combo);
  key += '/';
  key += to_string(clusterer);
  return derive_seed(master, key);
}

struct PipelineResult {
  DenseMatrix coords;
  ClusterLabels labels;
  SilhouetteReport report;
};

/// Clusters 2-D coordinates and scores them; used by single runs and sweeps.
inline std::pair<ClusterLabels, SilhouetteReport> cluster_and_score(
    const DenseMatrix& coords, ClustererSpec spec, std::uint64_t seed, bool include_noise) {
  spec.seed = seed;
  ClusterLabels labels;
  try {
    labels = cluster_points(coords, spec);
  } catch (const Error& e) {
    throw with_context(e, "cluster");
  }
  try {
    SilhouetteReport report = silhouette(coords, labels, include_noise);
    return {std::move(labels), std::move(report)};
  } catch (const Error& e) {
    throw with_context(e, "silhouette");
  }
}

inline PipelineResult run_pipeline(const PipelineConfig& config, const EncodedCorpus& encoded,
                                   const DenseMatrix& embedding) {
  ReducerSpec rs = config.reducer;
  rs.seed = reducer_seed(config.master_seed, rs.method);
  PipelineResult out;
  try {
    out.coords =
        reduce_two_stage(embedding, encoded.go, encoded.acronym, config.combo, rs, config.dims);
  } catch (const Error& e) {
    throw with_context(e, "reduce");
  }
  auto [labels, report] = cluster_and_score(
      out.coords, config.clusterer,
      cell_seed(config.master_seed, config.embedding.label, rs.method, config.combo,
                config.clusterer.method),
      config.include_noise_as_cluster);
  out.labels = std::move(labels);
  out.report = std::move(report);
  return out;
}

/// Reads the embedding file named by the config, then runs the pipeline.
inline PipelineResult run_pipeline(const PipelineConfig& config, const Corpus& corpus) {
  DenseMatrix embedding;
  try {
    embedding = load_embeddings(config.embedding.path, corpus.genes);
  } catch (const Error& e) {
    throw with_context(e, "ingest");
  }
  return run_pipeline(config, encode_corpus(corpus), embedding);
}

}  // namespace genesem
