#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "genesem/ingest.hpp"
#include "helpers.hpp"

using namespace genesem;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::Io;
}

}  // namespace

TEST(GeneList, SkipsCommentsBlanksAndCarriageReturns) {
  const GeneSet g = parse_gene_list("# header\r\nMYD88\r\n\r\n  TP53 \nIRAK4\n");
  ASSERT_EQ(g.size(), 3u);
  EXPECT_EQ(g[0], "MYD88");
  EXPECT_EQ(g[1], "TP53");
  EXPECT_EQ(*g.index_of("IRAK4"), 2u);
  EXPECT_FALSE(g.contains("NFKB1"));
}

TEST(GeneList, DuplicateReportsLine) {
  try {
    parse_gene_list("A\nB\nA\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DuplicateGene);
    EXPECT_EQ(e.line(), 3u);
    EXPECT_EQ(e.subject(), "A");
  }
}

TEST(GeneList, EmptyInput) {
  EXPECT_EQ(code_of([] { parse_gene_list(""); }), ErrorCode::EmptyInput);
  EXPECT_EQ(code_of([] { parse_gene_list("# only\n\n"); }), ErrorCode::EmptyInput);
}

TEST(GoAnnotations, ParsesTermsAspectsAndUnknownRows) {
  const GeneSet g = parse_gene_list("MYD88\nTP53\n");
  const auto go = parse_go_annotations(
      "! comment\nMYD88\tGO:0005634\tC\nMYD88\tGO:0016020\nMYD88\tGO:0005634\tC\nXYZ\tGO:0000001\tP\n", g);
  ASSERT_EQ(go.terms[0].size(), 2u);
  EXPECT_EQ(go.terms[0][0], "GO:0005634");
  EXPECT_EQ(go.terms[0][1], "GO:0016020");
  EXPECT_TRUE(go.terms[1].empty());
  EXPECT_EQ(go.unknown_gene_rows, 1u);
  EXPECT_EQ(go.aspect.at("GO:0005634"), GoAspect::CellularComponent);
  EXPECT_FALSE(go.aspect.contains("GO:0016020"));
}

TEST(GoAnnotations, MalformedRows) {
  const GeneSet g = parse_gene_list("A\n");
  EXPECT_EQ(code_of([&] { parse_go_annotations("A GO:0005634\n", g); }), ErrorCode::MalformedRow);
  EXPECT_EQ(code_of([&] { parse_go_annotations("A\tGO:12\n", g); }), ErrorCode::MalformedRow);
  EXPECT_EQ(code_of([&] { parse_go_annotations("A\tGO:0005634\tX\n", g); }), ErrorCode::MalformedRow);
  try {
    parse_go_annotations("A\tGO:0005634\nA\tbad\n", g);
  } catch (const Error& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(Descriptions, DefaultsAndErrors) {
  const GeneSet g = parse_gene_list("MYD88\nTP53\n");
  const auto d = parse_descriptions("MYD88\tAdapter protein involved in...\nMYD88\tsecond\nOTHER\tx\n", g);
  EXPECT_EQ(d.text[0], "Adapter protein involved in...");
  EXPECT_EQ(d.text[1], "");
  EXPECT_EQ(d.duplicate_rows, 1u);
  EXPECT_EQ(d.unknown_gene_rows, 1u);
  try {
    parse_descriptions("MYD88 no tab\n", g);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MalformedRow);
    EXPECT_EQ(e.line(), 1u);
  }
}

TEST(Embeddings, ReadsAndReorders) {
  const GeneSet g = parse_gene_list("A\nB\n");
  const DenseMatrix m = read_embeddings("gene\td0\td1\nB\t1\t2\nA\t0.5\t-1.25\nZ\t9\t9\n", g);
  ASSERT_EQ(m.rows(), 2u);
  EXPECT_EQ(m(0, 0), 0.5);
  EXPECT_EQ(m(0, 1), -1.25);
  EXPECT_EQ(m(1, 0), 1.0);
}

TEST(Embeddings, Errors) {
  const GeneSet g = parse_gene_list("A\nB\n");
  EXPECT_EQ(code_of([&] { read_embeddings("gene\td0\td1\nA\t0.5\nB\t1\t1\n", g); }), ErrorCode::RaggedRow);
  EXPECT_EQ(code_of([&] { read_embeddings("gene\td0\nA\t0.5\n", g); }), ErrorCode::MissingGene);
  EXPECT_EQ(code_of([&] { read_embeddings("gene\td0\nA\tnan\nB\t1\n", g); }), ErrorCode::NonFiniteValue);
  EXPECT_EQ(code_of([&] { read_embeddings("gene\td0\nA\tinf\nB\t1\n", g); }), ErrorCode::NonFiniteValue);
  EXPECT_EQ(code_of([&] { read_embeddings("gene\td0\nA\t1\nA\t2\nB\t1\n", g); }), ErrorCode::DuplicateGene);
  EXPECT_EQ(code_of([&] { read_embeddings("gene\td0\nA\tx\nB\t1\n", g); }), ErrorCode::MalformedRow);
  EXPECT_EQ(code_of([&] { read_embeddings("", g); }), ErrorCode::EmptyInput);
}

TEST(Embeddings, WriteErrorsAndDegenerateWidth) {
  const GeneSet one = parse_gene_list("A\n");
  EXPECT_EQ(code_of([&] { write_embeddings(DenseMatrix(2, 1), one); }), ErrorCode::ShapeMismatch);
  const std::string text = write_embeddings(DenseMatrix(1, 0), one);
  EXPECT_EQ(text, "gene\nA\n");
  EXPECT_EQ(read_embeddings(text, one).cols(), 0u);
  const DenseMatrix m(1, 2, {0.5, -1.25});
  EXPECT_EQ(write_embeddings(m, one), "gene\td0\td1\nA\t0.5\t-1.25\n");
}

TEST(Embeddings, RoundTripIsBitExact) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> mag(-300, 300);
  std::vector<std::string> ids;
  for (int i = 0; i < 40; ++i) ids.push_back("G" + std::to_string(i));
  const GeneSet g(ids);
  for (int trial = 0; trial < 20; ++trial) {
    DenseMatrix m(40, 7);
    for (auto& v : m.values()) v = std::ldexp(std::uniform_real_distribution<double>(-1, 1)(gen), static_cast<int>(mag(gen)) / 100);
    m(0, 0) = std::numeric_limits<double>::denorm_min();
    m(0, 1) = -0.0;
    m(0, 2) = std::numeric_limits<double>::max();
    const DenseMatrix back = read_embeddings(write_embeddings(m, g), g);
    ASSERT_EQ(back.values().size(), m.values().size());
    for (std::size_t i = 0; i < m.values().size(); ++i)
      ASSERT_EQ(std::bit_cast<std::uint64_t>(back.values()[i]), std::bit_cast<std::uint64_t>(m.values()[i]));
  }
}

TEST(Embeddings, RowShufflingDoesNotChangeResult) {
  const GeneSet g = parse_gene_list("A\nB\nC\nD\n");
  const DenseMatrix m = testing_helpers::random_matrix(4, 3, 5);
  const std::string text = write_embeddings(m, g);
  auto rows = text::lines(text);
  std::vector<std::string> body(rows.begin() + 1, rows.end());
  std::mt19937_64 gen(3);
  for (int t = 0; t < 10; ++t) {
    std::shuffle(body.begin(), body.end(), gen);
    std::string shuffled = std::string(rows.front()) + "\n";
    for (const auto& r : body) shuffled += r + "\n";
    EXPECT_EQ(read_embeddings(shuffled, g), m);
  }
}

TEST(Parsers, FuzzedInputEitherParsesOrThrowsTypedError) {
  const GeneSet g = parse_gene_list("A\nB\n");
  const std::string alphabet = "AB\t\n\r GO:0123456789.-+eEnaif!#CFPgd";
  std::mt19937_64 gen(99);
  for (int t = 0; t < 3000; ++t) {
    std::string s;
    const std::size_t len = gen() % 60;
    for (std::size_t i = 0; i < len; ++i) s += alphabet[gen() % alphabet.size()];
    if (t % 3 == 0) s = "gene\td0\n" + s;
    for (auto fn : std::vector<std::function<void()>>{
             [&] { parse_gene_list(s); }, [&] { parse_go_annotations(s, g); },
             [&] { parse_descriptions(s, g); }, [&] { read_embeddings(s, g); }}) {
      try {
        fn();
      } catch (const Error&) {
      }
    }
  }
}
