#pragma once

// Synthetic corpus with three planted functional groups, used by the test
// suites and the bundled demo data. Each group has its own GO terms,
// acronyms and embedding centroid; background terms, acronyms and noise are
// shared across groups.

#include <array>
#include <cstdint>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "genesem/ingest.hpp"
#include "genesem/matrix.hpp"
#include "genesem/rng.hpp"

namespace genesem::synthetic {

struct Files {
  std::string genes;
  std::string annotations;
  std::string descriptions;
  std::vector<std::pair<std::string, std::string>> embeddings;  // (model label, TSV)
  std::vector<int> planted;                                     // group per gene
};

inline constexpr std::array<std::string_view, 6> kModelLabels = {
    "base", "roberta", "bio", "clinical", "blue-pubmed", "blue-pubmed-mimic"};

struct Options {
  std::size_t genes = 200;
  std::size_t models = 6;
  std::size_t dims = 32;
  std::uint64_t seed = 20230101;
};

inline Files make_corpus(const Options& opt = {}) {
  static const std::array<std::array<std::string_view, 6>, 3> kGroupAcronyms = {{
      {"MYD88", "TLR4", "IRAK1", "TRAF6", "NFKB1", "IKBKG"},
      {"POLR2A", "TAF1", "GTF2B", "MED1", "SP1", "CREB1"},
      {"RAB5A", "RHOA", "CDC42", "RAC1", "SEC61", "COPII"},
  }};
  static const std::array<std::string_view, 10> kBackgroundAcronyms = {
      "ATP", "DNA", "RNA", "GTPase", "ER", "mRNA", "NADH", "HLA", "CoA", "UBE2"};
  static const std::array<std::string_view, 3> kGroupPhrases = {
      "mediates innate immune signaling downstream of",
      "regulates transcription initiation together with",
      "controls vesicle trafficking between membranes with"};
  static const std::array<std::string_view, 6> kFiller = {
      "Protein that", "Component which", "Enzyme that", "Adapter that", "Factor which",
      "Subunit that"};

  Rng rng(opt.seed);
  Files f;
  const std::size_t n = opt.genes;
  f.planted.resize(n);
  for (std::size_t i = 0; i < n; ++i) f.planted[i] = static_cast<int>(rng.below(3));

  char name[32];
  std::vector<std::string> names(n);
  f.genes = "# synthetic gene list, three planted groups\n";
  for (std::size_t i = 0; i < n; ++i) {
    std::snprintf(name, sizeof name, "SG%04zu", i + 1);
    names[i] = name;
    f.genes += names[i] + "\n";
  }

  auto go_id = [](std::size_t k) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "GO:%07zu", k);
    return std::string(buf);
  };
  static const std::array<char, 3> kAspect = {'P', 'F', 'C'};
  f.annotations = "!gaf-version: 2.2 (gene_id, go_id, aspect subset)\n";
  for (std::size_t i = 0; i < n; ++i) {
    const auto g = static_cast<std::size_t>(f.planted[i]);
    for (std::size_t t = 0; t < 6; ++t)
      if (rng.uniform() < 0.7)
        f.annotations += names[i] + "\t" + go_id(1000 + 10 * g + t) + "\t" + kAspect[g] + "\n";
    for (std::size_t t = 0; t < 2; ++t) {
      const std::size_t k = rng.below(60);
      f.annotations += names[i] + "\t" + go_id(5000 + k) + "\t" + kAspect[k % 3] + "\n";
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (rng.uniform() < 0.05) continue;  // genes without a description
    const auto g = static_cast<std::size_t>(f.planted[i]);
    std::string text(kFiller[rng.below(kFiller.size())]);
    text += " ";
    text += kGroupPhrases[g];
    for (std::size_t t = 0; t < 6; ++t)
      if (rng.uniform() < 0.5) {
        text += " ";
        text += kGroupAcronyms[g][t];
      }
    text += "; requires ";
    text += kBackgroundAcronyms[rng.below(kBackgroundAcronyms.size())];
    text += " binding.";
    f.descriptions += names[i] + "\t" + text + "\n";
  }

  GeneSet genes(names);
  for (std::size_t m = 0; m < opt.models; ++m) {
    const double noise = 0.8 + 0.25 * static_cast<double>(m);
    DenseMatrix centroids(3, opt.dims);
    for (double& v : centroids.values()) v = 2.5 * rng.normal();
    DenseMatrix emb(n, opt.dims);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t d = 0; d < opt.dims; ++d)
        emb(i, d) = centroids(static_cast<std::size_t>(f.planted[i]), d) + noise * rng.normal();
    const std::string label = m < kModelLabels.size() ? std::string(kModelLabels[m])
                                                      : "model" + std::to_string(m + 1);
    f.embeddings.emplace_back(label, write_embeddings(emb, genes));
  }
  return f;
}

}  // namespace genesem::synthetic
