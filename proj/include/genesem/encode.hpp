#pragma once

// Binary feature blocks: acronym mining, vocabularies, presence matrices and
// the three block concatenations.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "genesem/error.hpp"
#include "genesem/matrix.hpp"

namespace genesem {

namespace detail {
inline bool is_lower_or_digit(char c) { return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'); }
inline bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }

inline std::size_t run_length(std::string_view s, std::size_t pos, std::size_t cap,
                              bool (*pred)(char)) {
  std::size_t n = 0;
  while (n < cap && pos + n < s.size() && pred(s[pos + n])) ++n;
  return n;
}

// Length of a match of [a-z0-9]{0,3}[A-Z]{2,3}[a-z0-9]{0,3} anchored at `start`.
// The two character classes are disjoint, so the greedy prefix either lands
// on the uppercase core or no shorter prefix can; likewise the trailing
// quantifier always succeeds, so the first greedy choice is the backtracking
// engine's answer.
inline std::optional<std::size_t> acronym_match_at(std::string_view s, std::size_t start) {
  const std::size_t prefix = run_length(s, start, 3, is_lower_or_digit);
  const std::size_t core = run_length(s, start + prefix, 3, is_upper);
  if (core < 2) return std::nullopt;
  const std::size_t suffix = run_length(s, start + prefix + core, 3, is_lower_or_digit);
  return prefix + core + suffix;
}
}  // namespace detail

/// Every non-overlapping leftmost match of the acronym pattern, in text order.
/// Four-letter uppercase runs are clipped to three ("NFKB1" yields "NFK").
inline std::vector<std::string> extract_acronyms(std::string_view text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    if (const auto len = detail::acronym_match_at(text, pos)) {
      out.emplace_back(text.substr(pos, *len));
      pos += *len;
    } else {
      ++pos;
    }
  }
  return out;
}

/// Ordered set of unique tokens; column positions are dense 0..size-1.
class Vocabulary {
 public:
  Vocabulary() = default;

  std::size_t size() const noexcept { return tokens_.size(); }
  bool empty() const noexcept { return tokens_.empty(); }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }
  const std::string& operator[](std::size_t i) const { return tokens_[i]; }

  std::optional<std::size_t> index_of(std::string_view token) const {
    const auto it = index_.find(std::string(token));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  /// Returns the token's column, appending it if new.
  std::size_t add(std::string_view token) {
    const auto [it, inserted] = index_.try_emplace(std::string(token), tokens_.size());
    if (inserted) tokens_.emplace_back(token);
    return it->second;
  }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Unique tokens in first-occurrence order across the per-gene lists.
inline Vocabulary build_vocabulary(std::span<const std::vector<std::string>> token_lists) {
  Vocabulary vocab;
  for (const auto& tokens : token_lists)
    for (const auto& t : tokens) vocab.add(t);
  return vocab;
}

/// Presence/absence matrix stored as sorted column indices per row.
class SparseBinaryMatrix {
 public:
  SparseBinaryMatrix() = default;
  SparseBinaryMatrix(std::size_t rows, std::size_t cols) : cols_(cols), rows_(rows) {}

  std::size_t rows() const noexcept { return rows_.size(); }
  std::size_t cols() const noexcept { return cols_; }

  std::span<const std::uint32_t> row(std::size_t r) const noexcept { return rows_[r]; }

  bool test(std::size_t r, std::size_t c) const {
    const auto& idx = rows_[r];
    return std::binary_search(idx.begin(), idx.end(), static_cast<std::uint32_t>(c));
  }

  /// Replaces row `r`; indices are sorted and deduplicated.
  void set_row(std::size_t r, std::vector<std::uint32_t> indices) {
    std::sort(indices.begin(), indices.end());
    indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
    if (!indices.empty() && indices.back() >= cols_)
      throw Error(ErrorCode::ShapeMismatch, "column index out of range");
    rows_[r] = std::move(indices);
  }

  std::size_t nnz() const noexcept {
    std::size_t n = 0;
    for (const auto& r : rows_) n += r.size();
    return n;
  }

  DenseMatrix densify() const {
    DenseMatrix out(rows(), cols_);
    for (std::size_t r = 0; r < rows(); ++r)
      for (std::uint32_t c : rows_[r]) out(r, c) = 1.0;
    return out;
  }

 private:
  std::size_t cols_ = 0;
  std::vector<std::vector<std::uint32_t>> rows_;
};

/// Bit (g, v) is set iff token v of the vocabulary occurs in gene g's list.
inline SparseBinaryMatrix encode_binary_matrix(std::span<const std::vector<std::string>> per_gene,
                                               const Vocabulary& vocab) {
  SparseBinaryMatrix out(per_gene.size(), vocab.size());
  for (std::size_t g = 0; g < per_gene.size(); ++g) {
    std::vector<std::uint32_t> bits;
    for (const auto& token : per_gene[g])
      if (const auto col = vocab.index_of(token)) bits.push_back(static_cast<std::uint32_t>(*col));
    out.set_row(g, std::move(bits));
  }
  return out;
}

/// Which binary blocks join the embedding block. The embedding block is
/// always present.
enum class FeatureCombo { Acronyms, GoTerms, GoTermsAndAcronyms };

inline constexpr std::array<FeatureCombo, 3> kAllCombos = {
    FeatureCombo::Acronyms, FeatureCombo::GoTerms, FeatureCombo::GoTermsAndAcronyms};

inline std::string_view to_string(FeatureCombo c) {
  switch (c) {
    case FeatureCombo::Acronyms: return "acronyms";
    case FeatureCombo::GoTerms: return "go_terms";
    case FeatureCombo::GoTermsAndAcronyms: return "go_terms_and_acronyms";
  }
  return "";
}

/// Column heading used in the pivoted score table.
inline std::string_view display_name(FeatureCombo c) {
  switch (c) {
    case FeatureCombo::Acronyms: return "Acronyms";
    case FeatureCombo::GoTerms: return "GO-terms";
    case FeatureCombo::GoTermsAndAcronyms: return "GO-terms with acronyms";
  }
  return "";
}

inline std::optional<FeatureCombo> parse_combo(std::string_view s) {
  for (FeatureCombo c : kAllCombos)
    if (s == to_string(c)) return c;
  return std::nullopt;
}

inline bool uses_go_terms(FeatureCombo c) { return c != FeatureCombo::Acronyms; }
inline bool uses_acronyms(FeatureCombo c) { return c != FeatureCombo::GoTerms; }

/// [embedding | acronyms], [embedding | go] or [embedding | go | acronyms].
inline DenseMatrix assemble_feature_blocks(FeatureCombo combo, const DenseMatrix& embedding,
                                           const DenseMatrix& go, const DenseMatrix& acronyms) {
  std::vector<const DenseMatrix*> blocks{&embedding};
  if (uses_go_terms(combo)) blocks.push_back(&go);
  if (uses_acronyms(combo)) blocks.push_back(&acronyms);
  for (const DenseMatrix* b : blocks)
    if (b->rows() != embedding.rows())
      throw Error(ErrorCode::ShapeMismatch, "feature blocks have differing row counts");
  return hconcat(blocks);
}

}  // namespace genesem
