#pragma once

// Text outputs: long-form score CSV, the pivoted score table, scatter-plot
// SVG and per-cluster enrichment summaries.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "genesem/pipeline.hpp"
#include "genesem/sweep.hpp"

namespace genesem {

/// Fixed three-decimal rendering; never prints "-0.000".
inline std::string format_score(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  std::string s(buf);
  if (s == "-0.000") s = "0.000";
  return s;
}

inline std::string format_seconds(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

/// Long-form CSV, one row per cell in sweep order. Failed cells print "NA".
/// With `include_seconds` false the seconds field is left empty so that the
/// file is a pure function of config and inputs.
inline std::string emit_sweep_csv(const SweepResult& result, bool include_seconds = true) {
  std::string out = "model,reducer,combo,clusterer,silhouette,n_clusters,n_noise,seconds\n";
  for (const auto& c : result.cells) {
    out += c.model;
    out += ',';
    out += to_string(c.reducer);
    out += ',';
    out += to_string(c.combo);
    out += ',';
    out += to_string(c.clusterer);
    out += ',';
    out += c.ok() ? format_score(*c.silhouette) : "NA";
    out += ',';
    out += c.ok() ? std::to_string(c.n_clusters) : "NA";
    out += ',';
    out += c.ok() ? std::to_string(c.n_noise) : "NA";
    out += ',';
    if (include_seconds) out += format_seconds(c.seconds);
    out += '\n';
  }
  return out;
}

namespace detail {
inline std::string pad(std::string_view s, std::size_t width) {
  std::string out(s);
  if (out.size() < width) out.append(width - out.size(), ' ');
  return out;
}

template <typename T, std::size_t N>
std::vector<T> present_in_order(const std::array<T, N>& canonical, const std::set<T>& present) {
  std::vector<T> out;
  for (const T& v : canonical)
    if (present.contains(v)) out.push_back(v);
  return out;
}
}  // namespace detail

/// Pivoted table: rows are model x clusterer, column groups are combos
/// (Acronyms, GO-terms, GO-terms with acronyms), each split into T-SNE and
/// UMAP. The best value of each column carries a trailing '*'.
inline std::string emit_sweep_table(const SweepResult& result) {
  std::set<ReducerMethod> reducer_set;
  std::set<FeatureCombo> combo_set;
  std::set<ClusterMethod> clusterer_set;
  for (const auto& c : result.cells) {
    reducer_set.insert(c.reducer);
    combo_set.insert(c.combo);
    clusterer_set.insert(c.clusterer);
  }
  const auto reducers = detail::present_in_order(
      std::array{ReducerMethod::Tsne, ReducerMethod::Umap}, reducer_set);
  const auto combos = detail::present_in_order(kAllCombos, combo_set);
  const auto clusterers = detail::present_in_order(kAllClusterMethods, clusterer_set);

  using Key = std::tuple<std::string, ClusterMethod, FeatureCombo, ReducerMethod>;
  std::map<Key, const SweepCell*> lookup;
  std::map<std::pair<FeatureCombo, ReducerMethod>, std::string> best;
  for (const auto& c : result.cells) {
    lookup[{c.model, c.clusterer, c.combo, c.reducer}] = &c;
    if (!c.ok()) continue;
    const std::string s = format_score(*c.silhouette);
    auto& b = best[{c.combo, c.reducer}];
    if (b.empty() || std::stod(s) > std::stod(b)) b = s;
  }

  std::size_t name_w = std::string_view("Names").size();
  for (const auto& m : result.models) name_w = std::max(name_w, m.size());
  name_w += 2;
  const std::size_t method_w = std::string_view("Clustering method").size() + 2;
  constexpr std::size_t value_w = 9;
  std::vector<std::size_t> group_w;
  for (FeatureCombo c : combos)
    group_w.push_back(std::max(display_name(c).size() + 2, reducers.size() * value_w));

  std::string out;
  std::string line = detail::pad("", name_w + method_w);
  for (std::size_t g = 0; g < combos.size(); ++g) line += detail::pad(display_name(combos[g]), group_w[g]);
  auto rstrip = [](std::string t) {
    while (!t.empty() && t.back() == ' ') t.pop_back();
    return t;
  };
  out += rstrip(line) + '\n';
  std::string heads = detail::pad("Names", name_w) + detail::pad("Clustering method", method_w);
  for (std::size_t g = 0; g < combos.size(); ++g) {
    std::string group;
    for (ReducerMethod r : reducers) group += detail::pad(display_name(r), value_w);
    heads += detail::pad(group, group_w[g]);
  }
  out += rstrip(heads) + '\n';
  std::size_t total_w = name_w + method_w;
  for (std::size_t w : group_w) total_w += w;
  const std::string rule(total_w, '-');
  out += rule + '\n';

  for (const auto& model : result.models) {
    bool first = true;
    for (ClusterMethod k : clusterers) {
      std::string row = detail::pad(first ? model : "", name_w) + detail::pad(display_name(k), method_w);
      first = false;
      for (std::size_t g = 0; g < combos.size(); ++g) {
        std::string group;
        for (ReducerMethod r : reducers) {
          std::string cellText;
          const auto it = lookup.find({model, k, combos[g], r});
          if (it != lookup.end()) {
            const SweepCell& c = *it->second;
            if (c.ok()) {
              cellText = format_score(*c.silhouette);
              if (cellText == best[{combos[g], r}]) cellText += '*';
            } else {
              cellText = "NA";
            }
          }
          group += detail::pad(cellText, value_w);
        }
        row += detail::pad(group, group_w[g]);
      }
      out += rstrip(row) + '\n';
    }
    out += rule + '\n';
  }
  out += "* best value in column\n";
  return out;
}

namespace detail {
inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

inline constexpr std::array<std::string_view, 10> kPalette = {
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
inline constexpr std::string_view kNoiseColor = "#c8c8c8";
}  // namespace detail

/// Standalone SVG scatter plot: one circle per gene coloured by cluster,
/// noise in grey, numbered cluster labels at the centroids, a legend and
/// axes spanning the data bounds plus a 5% margin.
inline std::string emit_scatter_svg(const DenseMatrix& coords, const ClusterLabels& labels,
                                    const std::vector<std::string>& gene_names,
                                    std::string_view title = {}) {
  if (coords.cols() != 2) throw Error(ErrorCode::BadShape, "scatter plot needs 2-D coordinates");
  const std::size_t n = coords.rows();
  if (labels.size() != n || gene_names.size() != n)
    throw Error(ErrorCode::ShapeMismatch, "labels and names must match the coordinates");
  using detail::num;

  double xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
  if (n > 0) {
    xmin = xmax = coords(0, 0);
    ymin = ymax = coords(0, 1);
    for (std::size_t i = 0; i < n; ++i) {
      xmin = std::min(xmin, coords(i, 0));
      xmax = std::max(xmax, coords(i, 0));
      ymin = std::min(ymin, coords(i, 1));
      ymax = std::max(ymax, coords(i, 1));
    }
  }
  double w = xmax - xmin;
  double h = ymax - ymin;
  if (w <= 0.0) w = 1.0;
  if (h <= 0.0) h = 1.0;
  const double x0 = xmin - 0.05 * w;
  const double y0 = ymin - 0.05 * h;
  const double pw = 1.1 * w;
  const double ph = 1.1 * h;
  const double scale = std::max(pw, ph);
  const double radius = 0.006 * scale;
  const double font = 0.025 * scale;
  const double legend_w = 0.3 * pw;
  auto sx = [&](double x) { return x; };
  auto sy = [&](double y) { return 2.0 * y0 + ph - y; };  // flip so +y points up

  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"yes\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"960\" height=\"" +
         num(960.0 * ph / (pw + legend_w)) + "\" viewBox=\"" + num(x0) + " " + num(y0) + " " +
         num(pw + legend_w) + " " + num(ph) + "\">\n";
  if (!title.empty()) out += "<title>" + detail::xml_escape(title) + "</title>\n";
  out += "<rect x=\"" + num(x0) + "\" y=\"" + num(y0) + "\" width=\"" + num(pw + legend_w) +
         "\" height=\"" + num(ph) + "\" fill=\"white\"/>\n";

  // Axes along the lower and left edges of the plotting area.
  const double stroke = 0.002 * scale;
  out += "<g stroke=\"black\" stroke-width=\"" + num(stroke) + "\">\n";
  out += "<line x1=\"" + num(x0) + "\" y1=\"" + num(y0 + ph) + "\" x2=\"" + num(x0 + pw) +
         "\" y2=\"" + num(y0 + ph) + "\"/>\n";
  out += "<line x1=\"" + num(x0) + "\" y1=\"" + num(y0) + "\" x2=\"" + num(x0) + "\" y2=\"" +
         num(y0 + ph) + "\"/>\n";
  out += "</g>\n";
  out += "<g font-family=\"sans-serif\" font-size=\"" + num(0.7 * font) + "\" fill=\"#444\">\n";
  out += "<text x=\"" + num(sx(xmin)) + "\" y=\"" + num(y0 + ph - 0.3 * font) + "\">" + num(xmin) + "</text>\n";
  out += "<text x=\"" + num(sx(xmax)) + "\" y=\"" + num(y0 + ph - 0.3 * font) + "\" text-anchor=\"end\">" + num(xmax) + "</text>\n";
  out += "<text x=\"" + num(x0 + 0.3 * font) + "\" y=\"" + num(sy(ymin)) + "\">" + num(ymin) + "</text>\n";
  out += "<text x=\"" + num(x0 + 0.3 * font) + "\" y=\"" + num(sy(ymax) + 0.7 * font) + "\">" + num(ymax) + "</text>\n";
  out += "</g>\n";

  auto color_of = [&](int label) {
    return label < 0 ? detail::kNoiseColor
                     : detail::kPalette[static_cast<std::size_t>(label) % detail::kPalette.size()];
  };

  // Noise first so clustered points draw on top.
  out += "<g stroke=\"none\">\n";
  for (int pass = 0; pass < 2; ++pass)
    for (std::size_t i = 0; i < n; ++i) {
      const int l = labels.labels[i];
      if ((pass == 0) != (l < 0)) continue;
      out += "<circle cx=\"" + num(sx(coords(i, 0))) + "\" cy=\"" + num(sy(coords(i, 1))) +
             "\" r=\"" + num(radius) + "\" fill=\"" + std::string(color_of(l)) + "\"><title>" +
             detail::xml_escape(gene_names[i]) + "</title></circle>\n";
    }
  out += "</g>\n";

  std::vector<double> cx(labels.n_clusters, 0.0), cy(labels.n_clusters, 0.0);
  std::vector<std::size_t> count(labels.n_clusters, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const int l = labels.labels[i];
    if (l < 0) continue;
    cx[static_cast<std::size_t>(l)] += coords(i, 0);
    cy[static_cast<std::size_t>(l)] += coords(i, 1);
    ++count[static_cast<std::size_t>(l)];
  }
  out += "<g font-family=\"sans-serif\" font-weight=\"bold\" font-size=\"" + num(font) +
         "\" text-anchor=\"middle\" fill=\"black\" stroke=\"white\" stroke-width=\"" +
         num(0.1 * font) + "\" paint-order=\"stroke\">\n";
  for (std::size_t c = 0; c < labels.n_clusters; ++c) {
    if (count[c] == 0) continue;
    const double mx = cx[c] / static_cast<double>(count[c]);
    const double my = cy[c] / static_cast<double>(count[c]);
    out += "<text x=\"" + num(sx(mx)) + "\" y=\"" + num(sy(my)) + "\">" + std::to_string(c + 1) +
           "</text>\n";
  }
  out += "</g>\n";

  const double lx = x0 + pw + 0.05 * legend_w;
  double ly = y0 + 1.5 * font;
  out += "<g font-family=\"sans-serif\" font-size=\"" + num(0.8 * font) + "\">\n";
  auto legend_row = [&](std::string_view color, const std::string& text) {
    out += "<circle cx=\"" + num(lx + 0.4 * font) + "\" cy=\"" + num(ly - 0.3 * font) + "\" r=\"" +
           num(0.35 * font) + "\" fill=\"" + std::string(color) + "\"/>\n";
    out += "<text x=\"" + num(lx + 1.2 * font) + "\" y=\"" + num(ly) + "\">" + text + "</text>\n";
    ly += 1.2 * font;
  };
  for (std::size_t c = 0; c < labels.n_clusters; ++c)
    legend_row(color_of(static_cast<int>(c)),
               "cluster " + std::to_string(c + 1) + " (n=" + std::to_string(count[c]) + ")");
  if (const std::size_t noise = labels.noise_count(); noise > 0)
    legend_row(detail::kNoiseColor, "noise (n=" + std::to_string(noise) + ")");
  out += "</g>\n</svg>\n";
  return out;
}

struct EnrichedToken {
  std::string token;
  double ratio = 0.0;
  std::size_t in_cluster = 0;
  std::size_t in_corpus = 0;
};

/// Tokens of one binary block ranked for the genes in `members`:
/// ratio = (in-cluster frequency) / (corpus frequency + 1e-9), ties by token.
inline std::vector<EnrichedToken> rank_enriched(const SparseBinaryMatrix& bits, const Vocabulary& vocab,
                                                const std::vector<std::size_t>& members,
                                                std::size_t top) {
  const std::size_t n = bits.rows();
  if (members.empty() || n == 0) return {};
  std::vector<std::size_t> corpus_count(vocab.size(), 0);
  for (std::size_t g = 0; g < n; ++g)
    for (auto c : bits.row(g)) ++corpus_count[c];
  std::vector<std::size_t> cluster_count(vocab.size(), 0);
  for (std::size_t g : members)
    for (auto c : bits.row(g)) ++cluster_count[c];

  std::vector<EnrichedToken> ranked;
  for (std::size_t v = 0; v < vocab.size(); ++v) {
    if (cluster_count[v] == 0) continue;
    const double in_freq = static_cast<double>(cluster_count[v]) / static_cast<double>(members.size());
    const double corpus_freq = static_cast<double>(corpus_count[v]) / static_cast<double>(n);
    ranked.push_back({vocab[v], in_freq / (corpus_freq + 1e-9), cluster_count[v], corpus_count[v]});
  }
  std::sort(ranked.begin(), ranked.end(), [](const EnrichedToken& a, const EnrichedToken& b) {
    if (a.ratio != b.ratio) return a.ratio > b.ratio;
    return a.token < b.token;
  });
  if (ranked.size() > top) ranked.resize(top);
  return ranked;
}

inline std::string cluster_enrichment_report(const ClusterLabels& labels, const EncodedCorpus& encoded,
                                             std::size_t top = 10) {
  const std::size_t n = labels.size();
  if (encoded.go.rows() != n || encoded.acronym.rows() != n)
    throw Error(ErrorCode::ShapeMismatch, "labels and encoded corpus differ in gene count");
  std::vector<std::vector<std::size_t>> members(labels.n_clusters);
  std::vector<std::size_t> noise;
  for (std::size_t i = 0; i < n; ++i) {
    const int l = labels.labels[i];
    (l < 0 ? noise : members[static_cast<std::size_t>(l)]).push_back(i);
  }

  std::string out = "# ratio = in-cluster frequency / (corpus frequency + 1e-9)\n";
  auto section = [&](const std::string& heading, const std::vector<std::size_t>& genes) {
    out += heading + " size=" + std::to_string(genes.size()) + "\n";
    auto block = [&](std::string_view name, const SparseBinaryMatrix& bits, const Vocabulary& vocab) {
      out += "  ";
      out += name;
      out += ":\n";
      for (const auto& t : rank_enriched(bits, vocab, genes, top)) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.3f", t.ratio);
        out += "    " + t.token + " ratio=" + buf + " in=" + std::to_string(t.in_cluster) + "/" +
               std::to_string(genes.size()) + " corpus=" + std::to_string(t.in_corpus) + "/" +
               std::to_string(n) + "\n";
      }
    };
    block("go_terms", encoded.go, encoded.go_vocab);
    block("acronyms", encoded.acronym, encoded.acronym_vocab);
  };
  for (std::size_t c = 0; c < members.size(); ++c) section("cluster " + std::to_string(c + 1), members[c]);
  if (!noise.empty()) section("noise", noise);
  return out;
}

}  // namespace genesem
