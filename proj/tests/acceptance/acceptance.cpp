// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>

#include "genesem/genesem.hpp"
#include "helpers.hpp"
#include "oracles/oracles.hpp"
#include "table1_fixture.hpp"

using namespace genesem;
using testing_helpers::random_matrix;
using testing_helpers::two_blobs;

namespace tol {
constexpr double kSweepSeconds = 300.0;
constexpr std::size_t kSweepCells = 180;
constexpr double kSilhouetteOracle = 1e-9;
constexpr double kSilhouetteExample = 1e-6;
constexpr double kKMeansOptimalShare = 0.95;
constexpr double kKMeansSlack = 1e-9;  // float noise when comparing inertia
constexpr double kPerplexity = 1e-3;
constexpr double kGradientRelative = 1e-4;
constexpr double kFiniteDifferenceStep = 1e-5;
constexpr double kMembershipSum = 1e-3;
constexpr double kSeparableShare = 0.95;
constexpr double kMstWeight = 1e-12;
}  // namespace tol

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void report(const std::string& name, const std::function<Outcome()>& check) {
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  std::cout << (o.pass ? "PASS" : "FAIL") << "  " << name << ": " << o.detail << std::endl;
  failures += !o.pass;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

struct Bundled {
  Corpus corpus;
  EncodedCorpus encoded;
  std::vector<ModelEmbedding> models;
};

Bundled load_bundled() {
  const std::string dir = std::string(GENESEM_DATA_DIR) + "/synthetic/";
  Bundled b;
  b.corpus = load_corpus(dir + "genes.txt", dir + "annotations.tsv", dir + "descriptions.tsv");
  b.encoded = encode_corpus(b.corpus);
  std::vector<EmbeddingSource> sources;
  for (auto label : synthetic::kModelLabels)
    sources.push_back({std::string(label), dir + "embeddings_" + std::string(label) + ".tsv"});
  b.models = load_models(sources, b.corpus.genes);
  return b;
}

SweepConfig bundled_sweep(std::size_t workers) {
  SweepConfig sc;
  sc.master_seed = 7;
  sc.clusterer.k = 3;
  sc.workers = workers;
  return sc;
}

std::vector<oracle::Point> points_of(const DenseMatrix& y, std::size_t from, std::size_t to) {
  std::vector<oracle::Point> out;
  for (std::size_t i = from; i < to; ++i) out.push_back({y(i, 0), y(i, 1)});
  return out;
}

}  // namespace

int main() {
  const Bundled bundled = load_bundled();
  const std::size_t cores = std::max(1u, std::thread::hardware_concurrency());
  std::string first_csv, first_table;

  report("sweep completeness", [&]() -> Outcome {
    const auto t0 = std::chrono::steady_clock::now();
    const SweepResult r = run_sweep(bundled.models, bundled.encoded, bundled_sweep(std::min<std::size_t>(cores, 4)));
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::size_t failed = 0;
    for (const auto& c : r.cells) failed += !c.ok();
    first_csv = emit_sweep_csv(r, false);
    first_table = emit_sweep_table(r);
    return {r.cells.size() == tol::kSweepCells && secs < tol::kSweepSeconds,
            std::to_string(r.cells.size()) + " cells (" + std::to_string(failed) + " failed) in " +
                fmt("%.1f", secs) + " s on " + std::to_string(std::min<std::size_t>(cores, 4)) + " worker(s)"};
  });

  report("silhouette oracle", [&]() -> Outcome {
    std::mt19937_64 gen(1);
    double worst = 0.0;
    for (std::uint64_t t = 0; t < 200; ++t) {
      const std::size_t n = 4 + gen() % 37;
      const int k = 2 + static_cast<int>(gen() % 4);
      const DenseMatrix x = random_matrix(n, 2 + gen() % 3, 1000 + t);
      std::vector<std::int64_t> raw(n);
      for (auto& v : raw) v = static_cast<std::int64_t>(gen() % k);
      raw[0] = 0;
      raw[1] = 1;
      const ClusterLabels l = relabel_by_first_appearance(raw);
      worst = std::max(worst, std::abs(silhouette_score(x, l) - oracle::silhouette(x, l.labels)));
    }
    const DenseMatrix blobs(4, 2, {0, 0, 0, 1, 10, 0, 10, 1});
    const double s = silhouette_score(blobs, ClusterLabels{{0, 0, 1, 1}, 2});
    const double expected = 1.0 - 1.0 / ((10.0 + std::sqrt(101.0)) / 2.0);
    return {worst <= tol::kSilhouetteOracle && std::abs(s - expected) <= tol::kSilhouetteExample &&
                std::abs(s - 0.90025) <= tol::kSilhouetteExample * 10,
            "max |diff| " + fmt("%.2e", worst) + " over 200 instances; two-blob " + fmt("%.6f", s)};
  });

  report("agglomerative oracle", [&]() -> Outcome {
    std::size_t mismatches = 0;
    for (std::uint64_t t = 0; t < 100; ++t) {
      const std::size_t n = 2 + t % 63;
      const DenseMatrix x = random_matrix(n, 2, 5000 + t);
      const std::pair<Linkage, oracle::Link> links[] = {{Linkage::Single, oracle::Link::Single},
                                                        {Linkage::Average, oracle::Link::Average},
                                                        {Linkage::Ward, oracle::Link::Ward}};
      for (const auto& [lib, ref] : links) {
        const auto merges = agglomerative_merges(x, lib);
        const auto naive = oracle::naive_agglomerative(x, ref);
        for (std::size_t k = 1; k <= n; ++k)
          if (oracle::partition_of(cut_dendrogram(n, merges, k).labels) != oracle::partition_after(n, naive, n - k))
            ++mismatches;
      }
    }
    return {mismatches == 0, std::to_string(mismatches) + " mismatched cuts over 100 instances x 3 linkages x all k"};
  });

  report("k-means optimality", [&]() -> Outcome {
    std::size_t optimal = 0, below = 0, non_monotone = 0;
    for (std::uint64_t t = 0; t < 100; ++t) {
      const std::size_t n = 4 + t % 9;
      const std::size_t k = 1 + t % 3;
      const DenseMatrix x = random_matrix(n, 2, 9000 + t);
      ClustererSpec s;
      s.method = ClusterMethod::KMeans;
      s.k = k;
      s.restarts = 10;
      s.seed = t;
      const KMeansResult r = kmeans_fit(x, s);
      const double best = oracle::exhaustive_kmeans_inertia(x, k);
      optimal += r.inertia <= best + tol::kKMeansSlack;
      below += r.inertia < best - tol::kKMeansSlack;
      for (const auto& h : r.inertia_history)
        for (std::size_t i = 1; i < h.size(); ++i) non_monotone += h[i] > h[i - 1];
    }
    const double share = static_cast<double>(optimal) / 100.0;
    return {share >= tol::kKMeansOptimalShare && below == 0 && non_monotone == 0,
            std::to_string(optimal) + "/100 optimal, " + std::to_string(below) + " below optimum, " +
                std::to_string(non_monotone) + " inertia increases"};
  });

  report("hdbscan", [&]() -> Outcome {
    double worst = 0.0;
    for (std::uint64_t t = 0; t < 30; ++t) {
      const std::size_t n = 2 + t % 7;
      const DenseMatrix w = mutual_reachability(pairwise_distances(random_matrix(n, 2, 300 + t)), 1 + t % (n - 1));
      double total = 0.0;
      for (const auto& e : minimum_spanning_tree(w)) total += e.weight;
      worst = std::max(worst, std::abs(total - oracle::brute_force_mst_weight(w)));
    }
    ClustererSpec s;
    s.method = ClusterMethod::Hdbscan;
    s.min_cluster_size = 5;
    const ClusterLabels l = hdbscan(two_blobs(20, 2, 10.0, 0.5, 17), s);
    std::vector<int> truth(40, 0);
    for (std::size_t i = 20; i < 40; ++i) truth[i] = 1;
    const bool recovered = l.n_clusters == 2 && l.noise_count() == 0 && oracle::adjusted_rand_index(l.labels, truth) == 1.0;
    return {worst <= tol::kMstWeight && recovered,
            "MST max |diff| " + fmt("%.1e", worst) + " over 30 graphs (n<=8); blobs -> " +
                std::to_string(l.n_clusters) + " clusters, " + std::to_string(l.noise_count()) + " noise"};
  });

  report("t-SNE", [&]() -> Outcome {
    double perp_err = 0.0;
    for (std::uint64_t t = 0; t < 20; ++t) {
      const DenseMatrix c = conditional_affinities(pairwise_distances(random_matrix(30, 5, 700 + t)), 10.0);
      for (std::size_t i = 0; i < c.rows(); ++i) {
        double h = 0.0;
        for (double p : c.row(i))
          if (p > 0) h -= p * std::log2(p);
        perp_err = std::max(perp_err, std::abs(std::exp2(h) - 10.0));
      }
    }
    double grad_err = 0.0;
    for (std::uint64_t t = 0; t < 20; ++t) {
      const std::size_t n = 4 + t % 5;
      const AffinityMatrix p = calibrate_affinities(pairwise_distances(random_matrix(n, 5, 800 + t)), 2.0);
      DenseMatrix y = random_matrix(n, 2, 850 + t);
      const DenseMatrix g = tsne_gradient(p, y, 1.0);
      double num = 0.0, den = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < 2; ++c) {
          const double keep = y(i, c);
          y(i, c) = keep + tol::kFiniteDifferenceStep;
          const double up = tsne_kl_divergence(p, y);
          y(i, c) = keep - tol::kFiniteDifferenceStep;
          const double down = tsne_kl_divergence(p, y);
          y(i, c) = keep;
          const double fd = (up - down) / (2 * tol::kFiniteDifferenceStep);
          num = std::max(num, std::abs(fd - g(i, c)));
          den = std::max(den, std::abs(fd));
        }
      grad_err = std::max(grad_err, num / den);
    }
    std::size_t kl_ok = 0;
    const DenseMatrix blobs = two_blobs(20, 10, 8.0, 1.0, 5);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      ReducerSpec s;
      s.method = ReducerMethod::Tsne;
      s.tsne.perplexity = 10.0;
      s.seed = seed;
      TsneTrace trace;
      tsne_embed(blobs, s, &trace);
      kl_ok += trace.final_kl <= trace.kl_after_exaggeration;
    }
    return {perp_err <= tol::kPerplexity && grad_err <= tol::kGradientRelative && kl_ok == 20,
            "perplexity max err " + fmt("%.1e", perp_err) + "; gradient rel err " + fmt("%.1e", grad_err) +
                "; KL decreased after exaggeration on " + std::to_string(kl_ok) + "/20 seeds"};
  });

  report("UMAP", [&]() -> Outcome {
    double sum_err = 0.0;
    for (std::uint64_t t = 0; t < 20; ++t) {
      const DenseMatrix x = random_matrix(40, 5, 1100 + t);
      const std::size_t k = 3 + t % 13;  // k = 2 is only reachable as sigma -> 0
      const KnnGraph g = exact_knn(x, k);
      const SmoothKnn s = smooth_knn_calibration(g.distances);
      for (std::size_t i = 0; i < x.rows(); ++i) {
        double total = 0.0;
        for (std::size_t j = 0; j < k; ++j) total += std::exp(-std::max(0.0, g.distances(i, j) - s.rho[i]) / s.sigma[i]);
        sum_err = std::max(sum_err, std::abs(total - std::log2(static_cast<double>(k))));
      }
    }
    bool graph_ok = true;
    for (std::uint64_t t = 0; t < 10; ++t) {
      const DenseMatrix b = build_fuzzy_graph(random_matrix(50, 4, 1200 + t), 10);
      for (std::size_t i = 0; i < 50; ++i)
        for (std::size_t j = 0; j < 50; ++j)
          graph_ok &= b(i, j) == b(j, i) && b(i, j) >= 0.0 && b(i, j) <= 1.0;
    }
    std::size_t separable = 0;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
      const DenseMatrix x = two_blobs(20, 10, 10.0, 1.0, 1300 + seed);
      ReducerSpec s;
      s.method = ReducerMethod::Umap;
      s.umap.n_neighbors = 10;
      s.seed = seed;
      const DenseMatrix y = umap_embed(x, s);
      separable += oracle::linearly_separable(points_of(y, 0, 20), points_of(y, 20, 40));
    }
    return {sum_err <= tol::kMembershipSum && graph_ok && static_cast<double>(separable) >= tol::kSeparableShare * 40,
            "membership sum max err " + fmt("%.1e", sum_err) + "; graph symmetric in [0,1]: " +
                (graph_ok ? "yes" : "no") + "; separable " + std::to_string(separable) + "/40"};
  });

  report("regex fidelity", [&]() -> Outcome {
    const std::string alphabet = "abcdefxyzABCDEFXYZ0123456789 -_.,()/";
    std::mt19937_64 gen(42);
    std::size_t mismatches = 0;
    for (int t = 0; t < 10000; ++t) {
      std::string s;
      const std::size_t len = gen() % 40;
      for (std::size_t i = 0; i < len; ++i) s += alphabet[gen() % alphabet.size()];
      mismatches += extract_acronyms(s) != oracle::regex_acronyms(s);
    }
    const bool truncation = extract_acronyms("NFKB1 signaling") == std::vector<std::string>{"NFK"} &&
                            oracle::regex_acronyms("NFKB1 signaling") == std::vector<std::string>{"NFK"};
    return {mismatches == 0 && truncation,
            std::to_string(mismatches) + " mismatches over 10000 strings; NFKB1 -> NFK: " + (truncation ? "yes" : "no")};
  });

  report("determinism", [&]() -> Outcome {
    bool same = !first_csv.empty();
    std::string detail;
    for (std::size_t workers : {std::size_t{1}, std::size_t{3}, std::size_t{8}}) {
      const SweepResult r = run_sweep(bundled.models, bundled.encoded, bundled_sweep(workers));
      const bool eq = emit_sweep_csv(r, false) == first_csv && emit_sweep_table(r) == first_table;
      same &= eq;
      detail += "workers=" + std::to_string(workers) + (eq ? " identical; " : " DIFFERS; ");
    }
    return {same, detail + "scores.csv and table.txt compared byte-for-byte"};
  });

  report("table layout", [&]() -> Outcome {
    const std::string table = emit_sweep_table(testing_helpers::table_mock());
    std::istringstream in(table);
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) lines.push_back(line);
    const std::size_t acr_umap = lines[1].find("UMAP");
    std::size_t row = 0;
    for (std::size_t i = 0; i < lines.size(); ++i)
      if (lines[i].rfind("BlueBERT-PubMed-MIMIC", 0) == 0) row = i + 4;
    const bool ok = row > 0 && lines[row].find("K-means") != std::string::npos &&
                    lines[0].find("Acronyms") < acr_umap && lines[0].find("GO-terms") > acr_umap &&
                    lines[row].substr(acr_umap, 6) == "0.546*";
    return {ok, "BlueBERT-PubMed-MIMIC / K-means / Acronyms / UMAP renders as '" +
                    (row > 0 ? lines[row].substr(acr_umap, 6) : std::string("?")) + "'"};
  });

  std::cout << (failures == 0 ? "ALL PASS" : std::to_string(failures) + " FAILED") << std::endl;
  return failures == 0 ? 0 : 1;
}
