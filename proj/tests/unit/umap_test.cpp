#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "genesem/reduce/umap.hpp"
#include "helpers.hpp"
#include "oracles/oracles.hpp"

using namespace genesem;
using testing_helpers::random_matrix;
using testing_helpers::two_blobs;

namespace {

ReducerSpec umap_spec(std::uint64_t seed, std::size_t neighbors = 15) {
  ReducerSpec s;
  s.method = ReducerMethod::Umap;
  s.seed = seed;
  s.umap.n_neighbors = neighbors;
  return s;
}

double membership_sum(const DenseMatrix& d, std::size_t i, double rho, double sigma) {
  double s = 0.0;
  for (std::size_t j = 0; j < d.cols(); ++j) s += std::exp(-std::max(0.0, d(i, j) - rho) / sigma);
  return s;
}

}  // namespace

TEST(Knn, ExcludesSelfAndSortsAscending) {
  const DenseMatrix x(4, 1, {0.0, 1.0, 3.0, 7.0});
  const KnnGraph g = exact_knn(x, 2);
  EXPECT_EQ(g.indices[0], 1u);
  EXPECT_EQ(g.indices[1], 2u);
  EXPECT_EQ(g.distances(3, 0), 4.0);
  EXPECT_THROW(exact_knn(x, 4), Error);
}

TEST(SmoothKnn, RowSumsHitLog2K) {
  std::size_t at_floor = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const DenseMatrix x = random_matrix(30, 4, seed);
    for (std::size_t k : {3u, 5u, 15u}) {
      const KnnGraph g = exact_knn(x, k);
      const SmoothKnn s = smooth_knn_calibration(g.distances);
      for (std::size_t i = 0; i < x.rows(); ++i) {
        EXPECT_EQ(s.rho[i], g.distances(i, 0));
        EXPECT_EQ(membership_strength(g.distances(i, 0), s.rho[i], s.sigma[i]), 1.0);
        const double sum = membership_sum(g.distances, i, s.rho[i], s.sigma[i]);
        const auto row = g.distances.row(i);
        const double floor = 1e-3 * std::accumulate(row.begin(), row.end(), 0.0) / double(k);
        if (s.sigma[i] == floor) {
          EXPECT_GT(sum, std::log2(double(k))) << "k=" << k;  // floor overshoot
          ++at_floor;
        } else {
          EXPECT_LT(std::abs(sum - std::log2(double(k))), 1e-3) << "k=" << k;
        }
      }
    }
  }
  EXPECT_LT(at_floor, 5u);  // rare: needs two near-coincident nearest distances
}

TEST(SmoothKnn, TwoNeighboursSettleAtTheFloor) {
  // log2(2) = 1 is the nearest neighbour's own membership, so the target is
  // only approached as sigma shrinks; the search stops at the floor.
  const DenseMatrix d(1, 2, {1.0, 1.001});
  const SmoothKnn s = smooth_knn_calibration(d);
  EXPECT_DOUBLE_EQ(s.sigma[0], 1e-3 * 1.0005);
  const double sum = membership_sum(d, 0, s.rho[0], s.sigma[0]);
  EXPECT_GT(sum, 1.0);
  EXPECT_LT(sum, 2.0);
}

TEST(SmoothKnn, EqualDistanceRowKeepsFloor) {
  DenseMatrix d(1, 4, {2.0, 2.0, 2.0, 2.0});
  const SmoothKnn s = smooth_knn_calibration(d);
  EXPECT_EQ(s.rho[0], 2.0);
  EXPECT_DOUBLE_EQ(s.sigma[0], 1e-3 * 2.0);
  // Every neighbour sits at rho, so each membership is exp(0) = 1.
  EXPECT_EQ(membership_sum(d, 0, s.rho[0], s.sigma[0]), 4.0);
}

TEST(SmoothKnn, ZeroRowUsesFallbackFloor) {
  DenseMatrix d(1, 3, {0.0, 0.0, 0.0});
  const SmoothKnn s = smooth_knn_calibration(d);
  EXPECT_GT(s.sigma[0], 0.0);
}

TEST(FuzzyUnion, Formula) {
  const DenseMatrix a(2, 2, {0.0, 0.5, 0.0, 0.0});
  EXPECT_DOUBLE_EQ(fuzzy_union(a)(0, 1), 0.5);
  EXPECT_DOUBLE_EQ(fuzzy_union(a)(1, 0), 0.5);
  const DenseMatrix b(2, 2, {0.0, 1.0, 1.0, 0.0});
  EXPECT_DOUBLE_EQ(fuzzy_union(b)(0, 1), 1.0);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const DenseMatrix r = random_matrix(12, 12, seed, 0.0, 1.0);
    const DenseMatrix u = fuzzy_union(r);
    for (std::size_t i = 0; i < 12; ++i)
      for (std::size_t j = 0; j < 12; ++j) {
        if (i == j) continue;
        EXPECT_EQ(u(i, j), u(j, i));
        EXPECT_GE(u(i, j), std::max(r(i, j), r(j, i)) - 1e-15);
        EXPECT_LE(u(i, j), 1.0);
      }
  }
}

TEST(FuzzyGraph, SymmetricUnitInterval) {
  const DenseMatrix x = random_matrix(50, 5, 4);
  const DenseMatrix g = build_fuzzy_graph(x, 10);
  for (std::size_t i = 0; i < 50; ++i) {
    EXPECT_EQ(g(i, i), 0.0);
    for (std::size_t j = 0; j < 50; ++j) {
      EXPECT_EQ(g(i, j), g(j, i));
      EXPECT_GE(g(i, j), 0.0);
      EXPECT_LE(g(i, j), 1.0);
    }
  }
}

TEST(CurveFit, RegressionConstantsAndResidual) {
  // Reference values from an independent nonlinear least-squares fit.
  const CurveParams p = fit_embedding_curve(0.1, 1.0);
  EXPECT_NEAR(p.a, 1.5769434602697652, 1e-4);
  EXPECT_NEAR(p.b, 0.8950608778515733, 1e-4);
  EXPECT_NEAR(p.rms, 0.01619, 2e-4);
  EXPECT_NEAR(1.0 / (1.0 + p.a * std::pow(0.0, 2 * p.b)), 1.0, 1e-2);
  const CurveParams q = fit_embedding_curve(0.0, 1.0);
  EXPECT_NEAR(q.a, 1.93280839734315, 1e-4);
  EXPECT_NEAR(q.b, 0.7904949732233831, 1e-4);
  EXPECT_THROW(fit_embedding_curve(1.0, 1.0), Error);
}

TEST(UmapEmbed, DeterministicFiniteAndShaped) {
  const DenseMatrix x = random_matrix(40, 6, 2);
  const DenseMatrix a = umap_embed(x, umap_spec(9, 10));
  EXPECT_EQ(a, umap_embed(x, umap_spec(9, 10)));
  EXPECT_TRUE(a.all_finite());
  EXPECT_EQ(a.rows(), 40u);
  EXPECT_EQ(a.cols(), 2u);
  EXPECT_NE(a, umap_embed(x, umap_spec(10, 10)));
}

TEST(UmapEmbed, SeparatedBlobsStaySeparable) {
  const DenseMatrix x = two_blobs(10, 20, 10.0, 1.0, 31);
  const DenseMatrix y = umap_embed(x, umap_spec(5, 5));
  std::vector<oracle::Point> a, b;
  for (std::size_t i = 0; i < 20; ++i) (i < 10 ? a : b).push_back({y(i, 0), y(i, 1)});
  EXPECT_TRUE(oracle::linearly_separable(a, b));
}

TEST(UmapEmbed, NeighboursMustBeBelowRowCount) {
  EXPECT_THROW(umap_embed(random_matrix(10, 4, 1), umap_spec(1, 10)), Error);
}
