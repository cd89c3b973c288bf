#pragma once

// Parsers for the gene list, GO annotation, description and embedding files.
// Every parser is a pure function of the file content.

#include <charconv>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "genesem/error.hpp"
#include "genesem/matrix.hpp"

namespace genesem {

namespace text {

inline std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n\v\f";
  const auto first = s.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(ws);
  return s.substr(first, last - first + 1);
}

/// Splits content into physical lines, dropping a trailing CR from each.
inline std::vector<std::string_view> lines(std::string_view content) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start < content.size()) {
    std::size_t end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    std::string_view line = content.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.push_back(line);
    start = end + 1;
  }
  return out;
}

inline std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace text

/// Ordered, duplicate-free list of gene identifiers.
class GeneSet {
 public:
  GeneSet() = default;

  /// Throws DuplicateGene (line = 1-based position) or PreconditionViolation
  /// for an empty identifier.
  explicit GeneSet(std::vector<std::string> ids) {
    for (auto& id : ids) add(std::move(id), ids_.size() + 1);
  }

  std::size_t size() const noexcept { return ids_.size(); }
  bool empty() const noexcept { return ids_.empty(); }
  const std::string& operator[](std::size_t i) const { return ids_[i]; }
  const std::vector<std::string>& ids() const noexcept { return ids_; }
  auto begin() const noexcept { return ids_.begin(); }
  auto end() const noexcept { return ids_.end(); }

  std::optional<std::size_t> index_of(std::string_view id) const {
    const auto it = index_.find(std::string(id));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  bool contains(std::string_view id) const { return index_of(id).has_value(); }

  void add(std::string id, std::size_t line) {
    if (id.empty()) throw Error(ErrorCode::PreconditionViolation, "empty gene identifier", line);
    if (index_.contains(id))
      throw Error(ErrorCode::DuplicateGene, "duplicate gene '" + id + "'", line, id);
    index_.emplace(id, ids_.size());
    ids_.push_back(std::move(id));
  }

 private:
  std::vector<std::string> ids_;
  std::unordered_map<std::string, std::size_t> index_;
};

enum class GoAspect { CellularComponent, MolecularFunction, BiologicalProcess };

inline std::string_view to_string(GoAspect a) {
  switch (a) {
    case GoAspect::CellularComponent: return "cellular_component";
    case GoAspect::MolecularFunction: return "molecular_function";
    case GoAspect::BiologicalProcess: return "biological_process";
  }
  return "";
}

inline bool is_go_id(std::string_view s) {
  if (s.size() != 10 || s.substr(0, 3) != "GO:") return false;
  for (char c : s.substr(3))
    if (c < '0' || c > '9') return false;
  return true;
}

/// GO terms per gene, aligned with GeneSet positions. Terms keep the order of
/// their first appearance in the annotation file.
struct GoAnnotations {
  std::vector<std::vector<std::string>> terms;
  std::map<std::string, GoAspect> aspect;
  std::size_t unknown_gene_rows = 0;
};

/// Description per gene, aligned with GeneSet positions; missing genes map to "".
struct Descriptions {
  std::vector<std::string> text;
  std::size_t unknown_gene_rows = 0;
  std::size_t duplicate_rows = 0;
};

struct AnnotationStore {
  GoAnnotations go;
  Descriptions descriptions;
};

inline GeneSet parse_gene_list(std::string_view content) {
  GeneSet genes;
  const auto rows = text::lines(content);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::string_view id = text::trim(rows[i]);
    if (id.empty() || id.front() == '#') continue;
    genes.add(std::string(id), i + 1);
  }
  if (genes.empty()) throw Error(ErrorCode::EmptyInput, "gene list contains no identifiers");
  return genes;
}

inline GoAnnotations parse_go_annotations(std::string_view content, const GeneSet& genes) {
  GoAnnotations out;
  out.terms.resize(genes.size());
  std::vector<std::unordered_set<std::string>> seen(genes.size());
  const auto rows = text::lines(content);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::string_view line = rows[i];
    const std::size_t line_no = i + 1;
    if (text::trim(line).empty() || line.front() == '!') continue;
    const auto fields = text::split(line, '\t');
    if (fields.size() < 2) throw Error(ErrorCode::MalformedRow, "expected gene_id<TAB>go_id", line_no);
    const std::string_view gene = text::trim(fields[0]);
    const std::string_view term = text::trim(fields[1]);
    if (gene.empty() || !is_go_id(term))
      throw Error(ErrorCode::MalformedRow, "bad GO identifier '" + std::string(term) + "'", line_no);

    std::optional<GoAspect> aspect;
    if (fields.size() >= 3) {
      const std::string_view letter = text::trim(fields[2]);
      if (letter == "C") aspect = GoAspect::CellularComponent;
      else if (letter == "F") aspect = GoAspect::MolecularFunction;
      else if (letter == "P") aspect = GoAspect::BiologicalProcess;
      else if (!letter.empty())
        throw Error(ErrorCode::MalformedRow, "aspect must be C, F or P", line_no);
    }

    const auto idx = genes.index_of(gene);
    if (!idx) {
      ++out.unknown_gene_rows;
      continue;
    }
    std::string term_id(term);
    if (aspect) out.aspect.try_emplace(term_id, *aspect);
    if (seen[*idx].insert(term_id).second) out.terms[*idx].push_back(std::move(term_id));
  }
  return out;
}

inline Descriptions parse_descriptions(std::string_view content, const GeneSet& genes) {
  Descriptions out;
  out.text.resize(genes.size());
  std::vector<bool> filled(genes.size(), false);
  const auto rows = text::lines(content);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::string_view line = rows[i];
    if (text::trim(line).empty()) continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos)
      throw Error(ErrorCode::MalformedRow, "expected gene_id<TAB>text", i + 1);
    const std::string_view gene = text::trim(line.substr(0, tab));
    const auto idx = genes.index_of(gene);
    if (!idx) {
      ++out.unknown_gene_rows;
      continue;
    }
    if (filled[*idx]) {
      ++out.duplicate_rows;
      continue;
    }
    filled[*idx] = true;
    out.text[*idx] = std::string(line.substr(tab + 1));
  }
  return out;
}

inline double parse_real(std::string_view field, std::size_t line, std::size_t col) {
  field = text::trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty())
    throw Error(ErrorCode::MalformedRow,
                "column " + std::to_string(col) + " is not a number: '" + std::string(field) + "'",
                line);
  if (!std::isfinite(value))
    throw Error(ErrorCode::NonFiniteValue, "non-finite value in column " + std::to_string(col),
                line, std::to_string(col));
  return value;
}

/// Reads an embedding TSV and returns rows in GeneSet order. Rows for genes
/// outside the set are ignored.
inline DenseMatrix read_embeddings(std::string_view content, const GeneSet& genes) {
  const auto rows = text::lines(content);
  if (rows.empty()) throw Error(ErrorCode::EmptyInput, "embedding file is empty");
  const auto header = text::split(rows.front(), '\t');
  if (text::trim(header.front()) != "gene")
    throw Error(ErrorCode::MalformedRow, "header must start with 'gene'", 1);
  const std::size_t dims = header.size() - 1;

  DenseMatrix out(genes.size(), dims);
  std::vector<bool> filled(genes.size(), false);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const std::size_t line_no = i + 1;
    if (rows[i].empty()) continue;
    const auto fields = text::split(rows[i], '\t');
    if (fields.size() != dims + 1)
      throw Error(ErrorCode::RaggedRow,
                  "expected " + std::to_string(dims) + " values, got " +
                      std::to_string(fields.size() - 1),
                  line_no);
    const std::string_view gene = text::trim(fields[0]);
    const auto idx = genes.index_of(gene);
    if (!idx) continue;
    if (filled[*idx])
      throw Error(ErrorCode::DuplicateGene, "gene '" + std::string(gene) + "' listed twice",
                  line_no, std::string(gene));
    filled[*idx] = true;
    for (std::size_t c = 0; c < dims; ++c) out(*idx, c) = parse_real(fields[c + 1], line_no, c + 1);
  }
  for (std::size_t g = 0; g < genes.size(); ++g)
    if (!filled[g])
      throw Error(ErrorCode::MissingGene, "no embedding row for gene '" + genes[g] + "'", 0,
                  genes[g]);
  return out;
}

/// Shortest decimal text that parses back to exactly `value`.
inline std::string format_shortest(double value) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

inline std::string write_embeddings(const DenseMatrix& matrix, const GeneSet& genes) {
  if (matrix.rows() != genes.size())
    throw Error(ErrorCode::ShapeMismatch, "matrix has " + std::to_string(matrix.rows()) +
                                              " rows for " + std::to_string(genes.size()) +
                                              " genes");
  std::string out = "gene";
  for (std::size_t c = 0; c < matrix.cols(); ++c) out += "\td" + std::to_string(c);
  out += '\n';
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    out += genes[r];
    for (double v : matrix.row(r)) {
      out += '\t';
      out += format_shortest(v);
    }
    out += '\n';
  }
  return out;
}

}  // namespace genesem
