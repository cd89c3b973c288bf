#pragma once

// genesem command-line front end: encode, run, sweep and validate.
// Exit codes: 0 success, 1 input error, 2 usage error.

#include <openssl/evp.h>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "genesem/genesem.hpp"

namespace genesem::cli {

namespace fs = std::filesystem;
using nlohmann::json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitUsage = 2;

/// Configuration problems found after flag parsing (bad enum in a config
/// file, missing required input).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
  std::ostringstream ss;
  for (unsigned int i = 0; i < len; ++i)
    ss << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  return ss.str();
}

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline void write_text(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path.string() + "'", 0, path.string());
  out << content;
}

/// Everything a job needs, after merging the config file and flags.
struct JobConfig {
  std::string genes, annotations, descriptions;
  std::vector<EmbeddingSource> embeddings;
  std::string out = "genesem-out";
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  bool include_noise_as_cluster = false;
  bool record_timings = false;
  FeatureCombo combo = FeatureCombo::GoTermsAndAcronyms;
  ReducerSpec reducer;
  TwoStageDims dims;
  ClustererSpec clusterer;
  std::vector<ReducerMethod> sweep_reducers{ReducerMethod::Tsne, ReducerMethod::Umap};
  std::vector<FeatureCombo> sweep_combos{kAllCombos.begin(), kAllCombos.end()};
  std::vector<ClusterMethod> sweep_clusterers{kAllClusterMethods.begin(), kAllClusterMethods.end()};
};

inline ReducerMethod reducer_from(const std::string& s) {
  if (auto r = parse_reducer(s)) return *r;
  throw UsageError("unknown reducer '" + s + "' (expected tsne or umap)");
}
inline FeatureCombo combo_from(const std::string& s) {
  if (auto c = parse_combo(s)) return *c;
  throw UsageError("unknown combo '" + s + "' (expected acronyms, go_terms or go_terms_and_acronyms)");
}
inline ClusterMethod clusterer_from(const std::string& s) {
  if (auto c = parse_cluster_method(s)) return *c;
  throw UsageError("unknown clusterer '" + s +
                   "' (expected agg_single, agg_ward, agg_average, hdbscan or kmeans)");
}

inline EmbeddingSource parse_embedding_arg(const std::string& arg) {
  const auto eq = arg.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == arg.size())
    throw UsageError("--embeddings expects label=path, got '" + arg + "'");
  return {arg.substr(0, eq), arg.substr(eq + 1)};
}

inline json to_json(const JobConfig& c) {
  json emb = json::array();
  for (const auto& e : c.embeddings) emb.push_back({{"label", e.label}, {"path", e.path}});
  json sr = json::array(), sc = json::array(), sk = json::array();
  for (auto r : c.sweep_reducers) sr.push_back(std::string(to_string(r)));
  for (auto v : c.sweep_combos) sc.push_back(std::string(to_string(v)));
  for (auto k : c.sweep_clusterers) sk.push_back(std::string(to_string(k)));
  const auto& t = c.reducer.tsne;
  const auto& u = c.reducer.umap;
  return {
      {"genes", c.genes},
      {"annotations", c.annotations},
      {"descriptions", c.descriptions},
      {"embeddings", emb},
      {"seed", c.seed},
      {"workers", c.workers},
      {"include_noise_as_cluster", c.include_noise_as_cluster},
      {"combo", std::string(to_string(c.combo))},
      {"reducer",
       {{"method", std::string(to_string(c.reducer.method))},
        {"stage1_dims", c.dims.stage1},
        {"stage2_dims", c.dims.stage2},
        {"perplexity", t.perplexity},
        {"tsne_iterations", t.iterations},
        {"learning_rate", t.learning_rate},
        {"early_exaggeration", t.early_exaggeration},
        {"exaggeration_iterations", t.exaggeration_iterations},
        {"n_neighbors", u.n_neighbors},
        {"min_dist", u.min_dist},
        {"spread", u.spread},
        {"umap_epochs", u.epochs},
        {"negative_sample_rate", u.negative_sample_rate}}},
      {"clusterer",
       {{"method", std::string(to_string(c.clusterer.method))},
        {"k", c.clusterer.k},
        {"min_cluster_size", c.clusterer.min_cluster_size},
        {"min_samples", c.clusterer.effective_min_samples()},
        {"restarts", c.clusterer.restarts}}},
      {"sweep", {{"reducers", sr}, {"combos", sc}, {"clusterers", sk}}},
  };
}

/// Applies a config object onto `c`. Relative paths resolve against `base`.
inline void apply_json(JobConfig& c, const json& j, const fs::path& base) {
  auto path_of = [&](const json& v) {
    const fs::path p = v.get<std::string>();
    return (p.is_relative() && !p.empty() ? base / p : p).lexically_normal().string();
  };
  if (j.contains("genes")) c.genes = path_of(j["genes"]);
  if (j.contains("annotations")) c.annotations = path_of(j["annotations"]);
  if (j.contains("descriptions")) c.descriptions = path_of(j["descriptions"]);
  if (j.contains("embeddings")) {
    c.embeddings.clear();
    const json& e = j["embeddings"];
    if (e.is_object()) {
      for (auto it = e.begin(); it != e.end(); ++it) c.embeddings.push_back({it.key(), path_of(it.value())});
    } else {
      for (const auto& item : e) c.embeddings.push_back({item.at("label").get<std::string>(), path_of(item.at("path"))});
    }
  }
  if (j.contains("out")) c.out = path_of(j["out"]);
  if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("workers")) c.workers = j["workers"].get<std::size_t>();
  if (j.contains("include_noise_as_cluster")) c.include_noise_as_cluster = j["include_noise_as_cluster"].get<bool>();
  if (j.contains("combo")) c.combo = combo_from(j["combo"].get<std::string>());
  if (j.contains("reducer")) {
    const json& r = j["reducer"];
    auto& t = c.reducer.tsne;
    auto& u = c.reducer.umap;
    if (r.contains("method")) c.reducer.method = reducer_from(r["method"].get<std::string>());
    if (r.contains("stage1_dims")) c.dims.stage1 = r["stage1_dims"].get<std::size_t>();
    if (r.contains("stage2_dims")) c.dims.stage2 = r["stage2_dims"].get<std::size_t>();
    if (r.contains("perplexity")) t.perplexity = r["perplexity"].get<double>();
    if (r.contains("tsne_iterations")) t.iterations = r["tsne_iterations"].get<std::size_t>();
    if (r.contains("learning_rate")) t.learning_rate = r["learning_rate"].get<double>();
    if (r.contains("early_exaggeration")) t.early_exaggeration = r["early_exaggeration"].get<double>();
    if (r.contains("exaggeration_iterations")) {
      t.exaggeration_iterations = r["exaggeration_iterations"].get<std::size_t>();
      t.momentum_switch = t.exaggeration_iterations;
    }
    if (r.contains("n_neighbors")) u.n_neighbors = r["n_neighbors"].get<std::size_t>();
    if (r.contains("min_dist")) u.min_dist = r["min_dist"].get<double>();
    if (r.contains("spread")) u.spread = r["spread"].get<double>();
    if (r.contains("umap_epochs")) u.epochs = r["umap_epochs"].get<std::size_t>();
    if (r.contains("negative_sample_rate")) u.negative_sample_rate = r["negative_sample_rate"].get<std::size_t>();
  }
  if (j.contains("clusterer")) {
    const json& k = j["clusterer"];
    if (k.contains("method")) c.clusterer.method = clusterer_from(k["method"].get<std::string>());
    if (k.contains("k")) c.clusterer.k = k["k"].get<std::size_t>();
    if (k.contains("min_cluster_size")) c.clusterer.min_cluster_size = k["min_cluster_size"].get<std::size_t>();
    if (k.contains("min_samples")) c.clusterer.min_samples = k["min_samples"].get<std::size_t>();
    if (k.contains("restarts")) c.clusterer.restarts = k["restarts"].get<std::size_t>();
  }
  if (j.contains("sweep")) {
    const json& s = j["sweep"];
    if (s.contains("reducers")) {
      c.sweep_reducers.clear();
      for (const auto& v : s["reducers"]) c.sweep_reducers.push_back(reducer_from(v.get<std::string>()));
    }
    if (s.contains("combos")) {
      c.sweep_combos.clear();
      for (const auto& v : s["combos"]) c.sweep_combos.push_back(combo_from(v.get<std::string>()));
    }
    if (s.contains("clusterers")) {
      c.sweep_clusterers.clear();
      for (const auto& v : s["clusterers"]) c.sweep_clusterers.push_back(clusterer_from(v.get<std::string>()));
    }
  }
}

/// Raw flag values; empty/unset entries leave the config untouched.
struct Flags {
  std::string config, genes, annotations, descriptions, out;
  std::vector<std::string> embeddings;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers, k;
  std::vector<std::string> reducers, combos, clusterers;
  bool include_noise = false;
  bool record_timings = false;
};

inline void bind_flags(CLI::App& sub, Flags& f, bool axes_repeatable) {
  sub.add_option("--config", f.config, "JSON config file (or a manifest.json from an earlier job)");
  sub.add_option("--genes", f.genes, "Gene list file");
  sub.add_option("--annotations", f.annotations, "GO annotation TSV");
  sub.add_option("--descriptions", f.descriptions, "Gene description TSV");
  sub.add_option("--embeddings,--models", f.embeddings, "Embedding TSV as label=path (repeatable)");
  sub.add_option("--out", f.out, "Output directory");
  sub.add_option("--seed", f.seed, "Master seed");
  sub.add_option("--workers", f.workers, "Worker threads for sweeps")->check(CLI::PositiveNumber);
  sub.add_option("--k", f.k, "Cluster count for k-means and agglomerative clustering")
      ->check(CLI::PositiveNumber);
  const std::string suffix = axes_repeatable ? " (repeatable; restricts the sweep axis)" : "";
  auto* r = sub.add_option("--reducer", f.reducers, "tsne or umap" + suffix)
                ->check(CLI::IsMember({"tsne", "umap"}));
  auto* c = sub.add_option("--combo", f.combos, "acronyms, go_terms or go_terms_and_acronyms" + suffix)
                ->check(CLI::IsMember({"acronyms", "go_terms", "go_terms_and_acronyms"}));
  auto* k = sub.add_option("--clusterer", f.clusterers,
                           "agg_single, agg_ward, agg_average, hdbscan or kmeans" + suffix)
                ->check(CLI::IsMember({"agg_single", "agg_ward", "agg_average", "hdbscan", "kmeans"}));
  if (!axes_repeatable) {
    r->expected(1);
    c->expected(1);
    k->expected(1);
  }
  sub.add_flag("--include-noise-as-cluster", f.include_noise,
               "Score HDBSCAN noise as one extra cluster instead of excluding it");
}

struct ConfigSource {
  JobConfig config;
  std::optional<json> manifest_inputs;  // set when --config named a manifest
};

inline ConfigSource resolve(const Flags& f) {
  ConfigSource src;
  JobConfig& c = src.config;
  c.workers = std::max(1u, std::thread::hardware_concurrency());
  if (!f.config.empty()) {
    json j;
    try {
      j = json::parse(read_file(f.config));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::MalformedRow, f.config + ": invalid JSON: " + e.what());
    }
    const fs::path base = fs::absolute(f.config).parent_path();
    if (j.contains("config") && j.contains("inputs")) {
      src.manifest_inputs = j["inputs"];
      apply_json(c, j["config"], base);
    } else {
      apply_json(c, j, base);
    }
  }
  if (!f.genes.empty()) c.genes = f.genes;
  if (!f.annotations.empty()) c.annotations = f.annotations;
  if (!f.descriptions.empty()) c.descriptions = f.descriptions;
  if (!f.embeddings.empty()) {
    c.embeddings.clear();
    for (const auto& e : f.embeddings) c.embeddings.push_back(parse_embedding_arg(e));
  }
  if (!f.out.empty()) c.out = f.out;
  if (f.seed) c.seed = *f.seed;
  if (f.workers) c.workers = *f.workers;
  if (f.k) c.clusterer.k = *f.k;
  if (f.include_noise) c.include_noise_as_cluster = true;
  c.record_timings = f.record_timings;
  if (!f.reducers.empty()) {
    c.reducer.method = reducer_from(f.reducers.front());
    c.sweep_reducers.clear();
    for (const auto& s : f.reducers) c.sweep_reducers.push_back(reducer_from(s));
  }
  if (!f.combos.empty()) {
    c.combo = combo_from(f.combos.front());
    c.sweep_combos.clear();
    for (const auto& s : f.combos) c.sweep_combos.push_back(combo_from(s));
  }
  if (!f.clusterers.empty()) {
    c.clusterer.method = clusterer_from(f.clusterers.front());
    c.sweep_clusterers.clear();
    for (const auto& s : f.clusterers) c.sweep_clusterers.push_back(clusterer_from(s));
  }
  if (c.genes.empty()) throw UsageError("--genes (or \"genes\" in --config) is required");
  auto absolute = [](std::string& p) {
    if (!p.empty()) p = fs::absolute(p).lexically_normal().string();
  };
  absolute(c.genes);
  absolute(c.annotations);
  absolute(c.descriptions);
  for (auto& e : c.embeddings) absolute(e.path);
  return src;
}

inline std::vector<std::string> input_paths(const JobConfig& c) {
  std::vector<std::string> paths{c.genes};
  if (!c.annotations.empty()) paths.push_back(c.annotations);
  if (!c.descriptions.empty()) paths.push_back(c.descriptions);
  for (const auto& e : c.embeddings) paths.push_back(e.path);
  return paths;
}

inline json input_digests(const JobConfig& c) {
  json d = json::object();
  for (const auto& p : input_paths(c)) d[p] = sha256_hex(read_file(p));
  return d;
}

/// Compares recorded digests with the files on disk; logs the outcome.
inline bool check_reproducible(const json& recorded, const JobConfig& c, std::ostream& log) {
  const json now = input_digests(c);
  bool same = true;
  for (auto it = now.begin(); it != now.end(); ++it)
    if (!recorded.contains(it.key()) || recorded[it.key()] != it.value()) {
      log << "warning: input changed since the manifest was written: " << it.key() << "\n";
      same = false;
    }
  log << "reproducible: " << (same ? "yes" : "no") << "\n";
  return same;
}

inline json base_manifest(const std::string& command, const JobConfig& c, const std::string& started) {
  return {{"tool", "genesem"},     {"version", kVersion},          {"command", command},
          {"config", to_json(c)},  {"inputs", input_digests(c)},   {"master_seed", c.seed},
          {"started_at", started}, {"finished_at", utc_timestamp()}};
}

inline void write_manifest(const fs::path& dir, const json& manifest) {
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");
}

inline int cmd_validate(const JobConfig& c, std::ostream& out) {
  const Corpus corpus = load_corpus(c.genes, c.annotations, c.descriptions);
  const EncodedCorpus enc = encode_corpus(corpus);
  std::map<std::string, std::size_t> dims;
  std::vector<std::pair<std::string, std::size_t>> ordered;
  for (const auto& e : c.embeddings) {
    const DenseMatrix m = load_embeddings(e.path, corpus.genes);
    ordered.emplace_back(e.label, m.cols());
  }
  std::string dim_text = "NA";
  if (!ordered.empty()) {
    bool uniform = true;
    for (const auto& [label, d] : ordered) uniform &= d == ordered.front().second;
    if (uniform) {
      dim_text = std::to_string(ordered.front().second);
    } else {
      dim_text.clear();
      for (const auto& [label, d] : ordered)
        dim_text += (dim_text.empty() ? "" : ",") + label + ":" + std::to_string(d);
    }
  }
  out << "genes=" << corpus.genes.size() << " go_terms=" << enc.go_vocab.size()
      << " acronyms=" << enc.acronym_vocab.size() << " dims=" << dim_text << "\n";
  std::size_t no_go = 0, no_text = 0;
  for (const auto& t : corpus.annotations.go.terms) no_go += t.empty();
  for (const auto& t : corpus.annotations.descriptions.text) no_text += t.empty();
  out << "genes_without_go_terms=" << no_go << " genes_without_description=" << no_text
      << " skipped_annotation_rows=" << corpus.annotations.go.unknown_gene_rows
      << " skipped_description_rows=" << corpus.annotations.descriptions.unknown_gene_rows << "\n";
  return kExitOk;
}

inline int cmd_encode(const JobConfig& c, std::ostream& out) {
  const std::string started = utc_timestamp();
  const Corpus corpus = load_corpus(c.genes, c.annotations, c.descriptions);
  const EncodedCorpus enc = encode_corpus(corpus);
  const fs::path dir = c.out;
  fs::create_directories(dir);

  auto column_counts = [](const SparseBinaryMatrix& m) {
    std::vector<std::size_t> counts(m.cols(), 0);
    for (std::size_t r = 0; r < m.rows(); ++r)
      for (auto col : m.row(r)) ++counts[col];
    return counts;
  };
  std::string go_text = "term\taspect\tgenes\n";
  const auto go_counts = column_counts(enc.go);
  for (std::size_t v = 0; v < enc.go_vocab.size(); ++v) {
    const auto it = corpus.annotations.go.aspect.find(enc.go_vocab[v]);
    go_text += enc.go_vocab[v] + "\t" +
               (it == corpus.annotations.go.aspect.end() ? std::string("NA") : std::string(to_string(it->second))) +
               "\t" + std::to_string(go_counts[v]) + "\n";
  }
  std::string acr_text = "acronym\tgenes\n";
  const auto acr_counts = column_counts(enc.acronym);
  for (std::size_t v = 0; v < enc.acronym_vocab.size(); ++v)
    acr_text += enc.acronym_vocab[v] + "\t" + std::to_string(acr_counts[v]) + "\n";

  auto empty_rows = [](const SparseBinaryMatrix& m) {
    std::size_t n = 0;
    for (std::size_t r = 0; r < m.rows(); ++r) n += m.row(r).empty();
    return n;
  };
  auto density = [](const SparseBinaryMatrix& m) {
    const double cells = static_cast<double>(m.rows()) * static_cast<double>(m.cols());
    return cells > 0 ? static_cast<double>(m.nnz()) / cells : 0.0;
  };
  std::ostringstream stats;
  stats << "genes=" << corpus.genes.size() << "\n"
        << "go_terms=" << enc.go_vocab.size() << "\n"
        << "go_nonzeros=" << enc.go.nnz() << "\n"
        << "go_density=" << format_shortest(density(enc.go)) << "\n"
        << "genes_without_go_terms=" << empty_rows(enc.go) << "\n"
        << "acronyms=" << enc.acronym_vocab.size() << "\n"
        << "acronym_nonzeros=" << enc.acronym.nnz() << "\n"
        << "acronym_density=" << format_shortest(density(enc.acronym)) << "\n"
        << "genes_without_acronyms=" << empty_rows(enc.acronym) << "\n";

  write_text(dir / "go_terms.txt", go_text);
  write_text(dir / "acronyms.txt", acr_text);
  write_text(dir / "encode_stats.txt", stats.str());
  write_manifest(dir, base_manifest("encode", c, started));
  out << stats.str();
  return kExitOk;
}

inline std::string coords_csv(const DenseMatrix& coords, const GeneSet& genes) {
  std::string s = "gene,x,y\n";
  for (std::size_t i = 0; i < coords.rows(); ++i)
    s += genes[i] + "," + format_shortest(coords(i, 0)) + "," + format_shortest(coords(i, 1)) + "\n";
  return s;
}

inline std::string labels_csv(const ClusterLabels& labels, const GeneSet& genes) {
  std::string s = "gene,cluster\n";
  for (std::size_t i = 0; i < labels.size(); ++i)
    s += genes[i] + "," + std::to_string(labels.labels[i]) + "\n";
  return s;
}

inline int cmd_run(const JobConfig& c, std::ostream& out) {
  const std::string started = utc_timestamp();
  if (c.embeddings.empty()) throw UsageError("run needs one --embeddings label=path");
  const Corpus corpus = load_corpus(c.genes, c.annotations, c.descriptions);
  const EncodedCorpus enc = encode_corpus(corpus);

  PipelineConfig pc;
  pc.embedding = c.embeddings.front();
  pc.combo = c.combo;
  pc.reducer = c.reducer;
  pc.dims = c.dims;
  pc.clusterer = c.clusterer;
  pc.master_seed = c.seed;
  pc.include_noise_as_cluster = c.include_noise_as_cluster;
  const DenseMatrix embedding = load_embeddings(pc.embedding.path, corpus.genes);
  const PipelineResult res = run_pipeline(pc, enc, embedding);

  const fs::path dir = c.out;
  fs::create_directories(dir);
  write_text(dir / "coords.csv", coords_csv(res.coords, corpus.genes));
  write_text(dir / "labels.csv", labels_csv(res.labels, corpus.genes));
  const std::string title = pc.embedding.label + " / " + std::string(display_name(pc.reducer.method)) +
                            " / " + std::string(display_name(pc.combo)) + " / " +
                            std::string(display_name(pc.clusterer.method));
  write_text(dir / "clusters.svg", emit_scatter_svg(res.coords, res.labels, corpus.genes.ids(), title));
  write_text(dir / "enrichment.txt", cluster_enrichment_report(res.labels, enc));

  json manifest = base_manifest("run", c, started);
  manifest["result"] = {{"silhouette", res.report.score},
                        {"n_clusters", res.labels.n_clusters},
                        {"n_noise", res.labels.noise_count()},
                        {"n_evaluated", res.report.n_evaluated}};
  write_manifest(dir, manifest);
  out << "silhouette=" << format_score(res.report.score) << " n_clusters=" << res.labels.n_clusters
      << " n_noise=" << res.labels.noise_count() << "\n";
  return kExitOk;
}

inline int cmd_sweep(const JobConfig& c, std::ostream& out) {
  const std::string started = utc_timestamp();
  if (c.embeddings.empty()) throw UsageError("sweep needs at least one --embeddings label=path");
  const Corpus corpus = load_corpus(c.genes, c.annotations, c.descriptions);
  const EncodedCorpus enc = encode_corpus(corpus);

  SweepConfig sc;
  sc.reducers = c.sweep_reducers;
  sc.combos = c.sweep_combos;
  sc.clusterers = c.sweep_clusterers;
  sc.reducer = c.reducer;
  sc.dims = c.dims;
  sc.clusterer = c.clusterer;
  sc.master_seed = c.seed;
  sc.workers = c.workers;
  sc.include_noise_as_cluster = c.include_noise_as_cluster;
  const SweepResult result = run_sweep(load_models(c.embeddings, corpus.genes), enc, sc);

  const fs::path dir = c.out;
  fs::create_directories(dir);
  write_text(dir / "scores.csv", emit_sweep_csv(result, c.record_timings));
  write_text(dir / "table.txt", emit_sweep_table(result));

  // One scatter plot for the best cell of every table column.
  std::map<std::pair<FeatureCombo, ReducerMethod>, const SweepCell*> best;
  for (const auto& cell : result.cells) {
    if (!cell.ok()) continue;
    auto& b = best[{cell.combo, cell.reducer}];
    if (!b || *cell.silhouette > *b->silhouette) b = &cell;
  }
  json plots = json::array();
  for (const auto& [key, cell] : best) {
    const DenseMatrix* coords = result.layout_for(*cell);
    if (!coords) continue;
    const std::string name = "best_" + std::string(to_string(key.first)) + "_" +
                             std::string(to_string(key.second)) + ".svg";
    const std::string title = cell->model + " / " + std::string(display_name(cell->reducer)) + " / " +
                              std::string(display_name(cell->combo)) + " / " +
                              std::string(display_name(cell->clusterer)) + " (" +
                              format_score(*cell->silhouette) + ")";
    write_text(dir / name, emit_scatter_svg(*coords, cell->labels, corpus.genes.ids(), title));
    plots.push_back({{"file", name}, {"model", cell->model}, {"clusterer", std::string(to_string(cell->clusterer))}});
  }

  json manifest = base_manifest("sweep", c, started);
  json timings = json::array();
  json errors = json::array();
  std::size_t failed = 0;
  for (const auto& cell : result.cells) {
    json key = {{"model", cell.model},
                {"reducer", std::string(to_string(cell.reducer))},
                {"combo", std::string(to_string(cell.combo))},
                {"clusterer", std::string(to_string(cell.clusterer))}};
    json t = key;
    t["seconds"] = cell.seconds;
    timings.push_back(t);
    if (!cell.ok()) {
      ++failed;
      key["error"] = cell.error;
      errors.push_back(key);
    }
  }
  manifest["cells"] = result.cells.size();
  manifest["failed_cells"] = failed;
  manifest["timings"] = timings;
  manifest["errors"] = errors;
  manifest["plots"] = plots;
  write_manifest(dir, manifest);
  out << "cells=" << result.cells.size() << " failed=" << failed << " out=" << dir.string() << "\n";
  return kExitOk;
}

/// Entry point shared by main() and the tests. args[0] is the program name.
inline int dispatch(const std::vector<std::string>& args, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
  CLI::App app{"genesem: cluster genes by the semantics of their functional annotations"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  Flags flags;
  CLI::App* validate = app.add_subcommand("validate", "Parse all inputs and report counts");
  CLI::App* encode = app.add_subcommand("encode", "Write vocabularies and binary-feature statistics");
  CLI::App* run = app.add_subcommand("run", "Run one pipeline configuration");
  CLI::App* sweep = app.add_subcommand("sweep", "Run the full factorial sweep");
  bind_flags(*validate, flags, false);
  bind_flags(*encode, flags, false);
  bind_flags(*run, flags, false);
  bind_flags(*sweep, flags, true);
  sweep->add_flag("--record-timings", flags.record_timings,
                  "Fill the seconds column of scores.csv (makes the file run-dependent)");

  std::vector<std::string> rev(args.begin() + (args.empty() ? 0 : 1), args.end());
  std::reverse(rev.begin(), rev.end());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    ConfigSource src = resolve(flags);
    if (src.manifest_inputs) check_reproducible(*src.manifest_inputs, src.config, err);
    if (validate->parsed()) return cmd_validate(src.config, out);
    if (encode->parsed()) return cmd_encode(src.config, out);
    if (run->parsed()) return cmd_run(src.config, out);
    return cmd_sweep(src.config, out);
  } catch (const UsageError& e) {
    const CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << "usage error: " << e.what() << "\n\n" << sub->help();
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what();
    if (e.line() > 0) err << " (line " << e.line() << ")";
    err << "\n";
    return kExitInput;
  } catch (const json::exception& e) {
    err << "error: config: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
}

}  // namespace genesem::cli
