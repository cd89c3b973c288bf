// Writes the bundled synthetic corpus: gene list, annotations, descriptions,
// one embedding file per model and the planted group of every gene.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "genesem/synthetic.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Generate a synthetic corpus with three planted groups"};
  std::string out = "data/synthetic";
  genesem::synthetic::Options opt;
  app.add_option("--out", out, "Output directory");
  app.add_option("--genes", opt.genes, "Gene count");
  app.add_option("--models", opt.models, "Embedding files to write");
  app.add_option("--dims", opt.dims, "Embedding width");
  app.add_option("--seed", opt.seed, "Generator seed");
  CLI11_PARSE(app, argc, argv);

  const auto files = genesem::synthetic::make_corpus(opt);
  const std::filesystem::path dir = out;
  std::filesystem::create_directories(dir);
  auto write = [&](const std::string& name, const std::string& content) {
    std::ofstream f(dir / name, std::ios::binary);
    f << content;
  };
  write("genes.txt", files.genes);
  write("annotations.tsv", files.annotations);
  write("descriptions.tsv", files.descriptions);
  for (const auto& [label, text] : files.embeddings) write("embeddings_" + label + ".tsv", text);
  std::string planted = "gene\tgroup\n";
  std::size_t i = 0;
  for (int g : files.planted) {
    char name[16];
    std::snprintf(name, sizeof name, "SG%04zu", ++i);
    planted += std::string(name) + "\t" + std::to_string(g) + "\n";
  }
  write("planted.tsv", planted);
  std::cout << "wrote " << files.embeddings.size() << " embedding files to " << dir.string() << "\n";
  return EXIT_SUCCESS;
}
