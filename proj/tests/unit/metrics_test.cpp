#include <gtest/gtest.h>

#include <random>

#include "genesem/metrics.hpp"
#include "helpers.hpp"
#include "oracles/oracles.hpp"

using namespace genesem;

TEST(Silhouette, TwoBlobExample) {
  const DenseMatrix x(4, 2, {0, 0, 0, 1, 10, 0, 10, 1});
  const ClusterLabels l{{0, 0, 1, 1}, 2};
  const double expected = 1.0 - 1.0 / ((10.0 + std::sqrt(101.0)) / 2.0);
  EXPECT_NEAR(silhouette_score(x, l), expected, 1e-6);
  EXPECT_NEAR(silhouette_score(x, l), 0.90025, 1e-5);
  for (double s : silhouette_samples(x, l)) EXPECT_NEAR(s, expected, 1e-12);
}

TEST(Silhouette, SingletonsScoreZero) {
  const DenseMatrix x = testing_helpers::random_matrix(5, 2, 1);
  const ClusterLabels l{{0, 1, 2, 3, 4}, 5};
  EXPECT_EQ(silhouette_score(x, l), 0.0);
}

TEST(Silhouette, TooFewClusters) {
  const DenseMatrix x = testing_helpers::random_matrix(5, 2, 1);
  try {
    silhouette_score(x, ClusterLabels{{0, 0, 0, 0, 0}, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooFewClusters);
  }
  EXPECT_THROW(silhouette_score(x, ClusterLabels{{0, -1, -1, -1, -1}, 1}), Error);
}

TEST(Silhouette, NoiseIsExcludedOrGrouped) {
  const DenseMatrix x(5, 1, {0, 1, 10, 11, 50});
  const ClusterLabels l{{0, 0, 1, 1, kNoise}, 2};
  const SilhouetteReport r = silhouette(x, l);
  EXPECT_EQ(r.n_evaluated, 4u);
  EXPECT_EQ(r.evaluated, (std::vector<std::size_t>{0, 1, 2, 3}));
  EXPECT_NEAR(r.score, oracle::silhouette(x, l.labels), 1e-12);
  const SilhouetteReport with = silhouette(x, l, true);
  EXPECT_EQ(with.n_evaluated, 5u);
  EXPECT_NEAR(with.score, oracle::silhouette(x, {0, 0, 1, 1, 2}), 1e-12);
}

TEST(Silhouette, MatchesOracleBoundedAndPermutationInvariant) {
  std::mt19937_64 gen(5);
  for (std::uint64_t t = 0; t < 50; ++t) {
    const std::size_t n = 3 + gen() % 38;
    const int k = 2 + static_cast<int>(gen() % 4);
    const DenseMatrix x = testing_helpers::random_matrix(n, 2, t);
    std::vector<std::int64_t> raw(n);
    for (auto& v : raw) v = static_cast<std::int64_t>(gen() % k);
    raw[0] = 0;
    raw[1] = 1;
    const ClusterLabels l = relabel_by_first_appearance(raw);
    const double s = silhouette_score(x, l);
    EXPECT_NEAR(s, oracle::silhouette(x, l.labels), 1e-9);
    EXPECT_GE(s, -1.0);
    EXPECT_LE(s, 1.0);
    for (double v : silhouette_samples(x, l)) {
      EXPECT_GE(v, -1.0);
      EXPECT_LE(v, 1.0);
    }
    std::vector<std::int64_t> renamed(n);
    for (std::size_t i = 0; i < n; ++i) renamed[i] = 100 - raw[i];
    EXPECT_NEAR(silhouette_score(x, relabel_by_first_appearance(renamed)), s, 1e-12);
  }
}
