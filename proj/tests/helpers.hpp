#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "genesem/matrix.hpp"

namespace testing_helpers {

inline genesem::DenseMatrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed,
                                          double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  genesem::DenseMatrix m(rows, cols);
  for (auto& v : m.values()) v = u(gen);
  return m;
}

/// Two Gaussian blobs of `per_blob` rows each; blob 1 is shifted by
/// `separation` along every axis. Labels are 0 then 1.
inline genesem::DenseMatrix two_blobs(std::size_t per_blob, std::size_t dims, double separation,
                                      double spread, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> g(0.0, spread);
  genesem::DenseMatrix m(2 * per_blob, dims);
  for (std::size_t i = 0; i < 2 * per_blob; ++i)
    for (std::size_t c = 0; c < dims; ++c) m(i, c) = g(gen) + (i < per_blob ? 0.0 : separation);
  return m;
}

}  // namespace testing_helpers
