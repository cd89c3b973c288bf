// Cluster a small synthetic corpus with one configuration and print the score.

#include <iostream>

#include "genesem/genesem.hpp"

int main() {
  using namespace genesem;
  synthetic::Options opt;
  opt.genes = 120;
  opt.models = 1;
  const auto files = synthetic::make_corpus(opt);

  Corpus corpus;
  corpus.genes = parse_gene_list(files.genes);
  corpus.annotations.go = parse_go_annotations(files.annotations, corpus.genes);
  corpus.annotations.descriptions = parse_descriptions(files.descriptions, corpus.genes);
  const EncodedCorpus encoded = encode_corpus(corpus);
  const DenseMatrix embedding = read_embeddings(files.embeddings.front().second, corpus.genes);

  PipelineConfig config;
  config.embedding = EmbeddingSource{files.embeddings.front().first, ""};
  config.combo = FeatureCombo::GoTermsAndAcronyms;
  config.reducer.method = ReducerMethod::Umap;
  config.clusterer.method = ClusterMethod::KMeans;
  config.clusterer.k = 3;
  config.master_seed = 7;

  const PipelineResult result = run_pipeline(config, encoded, embedding);
  std::cout << "clusters=" << result.labels.n_clusters
            << " silhouette=" << format_score(result.report.score) << "\n";
  std::cout << cluster_enrichment_report(result.labels, encoded, 3);
}
