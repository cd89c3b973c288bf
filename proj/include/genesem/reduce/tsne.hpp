#pragma once

// Exact t-SNE: perplexity-calibrated Gaussian input affinities, Student-t
// output kernel, gradient descent with momentum, per-coordinate gains and
// early exaggeration. O(n^2) per iteration.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "genesem/error.hpp"
#include "genesem/matrix.hpp"
#include "genesem/reduce/spec.hpp"
#include "genesem/rng.hpp"

namespace genesem {

/// Row-wise conditional distributions p(j|i) from Euclidean `distances`.
///
/// Each row uses a Gaussian kernel whose precision is bisected until the
/// row's perplexity (exp of its Shannon entropy) matches `perplexity` to
/// within 1e-6. When the nearest-neighbour ties alone already exceed the
/// target (duplicate points), the row takes the infinite-precision limit: a
/// uniform distribution over the tied nearest neighbours.
inline DenseMatrix conditional_affinities(const DenseMatrix& distances, double perplexity) {
  const std::size_t n = distances.rows();
  if (distances.cols() != n) throw Error(ErrorCode::BadShape, "distance matrix must be square");
  require(n >= 2, "need at least two points");
  require(perplexity >= 1.0 && perplexity <= static_cast<double>(n - 1),
          "perplexity must lie in [1, n-1]");

  const double target = std::log(perplexity);
  constexpr double kTolerance = 1e-6;
  DenseMatrix cond(n, n);
  std::vector<double> shifted(n);
  std::vector<double> p(n);

  for (std::size_t i = 0; i < n; ++i) {
    double min_sq = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d = distances(i, j);
      if (!std::isfinite(d))
        throw Error(ErrorCode::CalibrationFailed, "non-finite distance in row " + std::to_string(i),
                    0, std::to_string(i));
      min_sq = std::min(min_sq, d * d);
    }
    double mean_shift = 0.0;
    std::size_t ties = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d = distances(i, j);
      shifted[j] = d * d - min_sq;
      mean_shift += shifted[j];
      if (shifted[j] == 0.0) ++ties;
    }
    mean_shift /= static_cast<double>(n - 1);

    // Entropy (nats) of the row at precision beta; fills p.
    auto entropy_at = [&](double beta) {
      double z = 0.0;
      double weighted = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) {
          p[j] = 0.0;
          continue;
        }
        p[j] = std::exp(-beta * shifted[j]);
        z += p[j];
        weighted += p[j] * shifted[j];
      }
      for (std::size_t j = 0; j < n; ++j) p[j] /= z;
      return std::log(z) + beta * weighted / z;
    };

    if (std::log(static_cast<double>(ties)) >= target - 1e-12 || mean_shift == 0.0) {
      for (std::size_t j = 0; j < n; ++j)
        cond(i, j) = (j != i && shifted[j] == 0.0) ? 1.0 / static_cast<double>(ties) : 0.0;
      continue;
    }

    double lo = 0.0;
    double hi = 1.0 / mean_shift;
    bool bracketed = false;
    for (int step = 0; step < 64; ++step) {
      if (entropy_at(hi) < target) {
        bracketed = true;
        break;
      }
      lo = hi;
      hi *= 2.0;
    }
    if (!bracketed)
      throw Error(ErrorCode::CalibrationFailed,
                  "could not bracket the kernel bandwidth for row " + std::to_string(i), 0,
                  std::to_string(i));

    double h = 0.0;
    for (int step = 0; step < 200; ++step) {
      const double mid = 0.5 * (lo + hi);
      h = entropy_at(mid);
      if (std::abs(std::exp(h) - perplexity) < kTolerance) break;
      if (h > target) lo = mid;
      else hi = mid;
    }
    if (!(std::abs(std::exp(h) - perplexity) < 1e-4))
      throw Error(ErrorCode::CalibrationFailed,
                  "bandwidth search did not converge for row " + std::to_string(i), 0,
                  std::to_string(i));
    for (std::size_t j = 0; j < n; ++j) cond(i, j) = p[j];
  }
  return cond;
}

/// Joint distribution p_ij = (p(j|i) + p(i|j)) / 2n; sums to 1.
inline AffinityMatrix calibrate_affinities(const DenseMatrix& distances, double perplexity) {
  const DenseMatrix cond = conditional_affinities(distances, perplexity);
  const std::size_t n = cond.rows();
  AffinityMatrix joint(n, n);
  const double scale = 1.0 / (2.0 * static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = (cond(i, j) + cond(j, i)) * scale;
      joint(i, j) = v;
      joint(j, i) = v;
    }
  return joint;
}

/// Exp of the Shannon entropy (nats) of a probability row.
inline double effective_perplexity(std::span<const double> row) {
  double h = 0.0;
  for (double p : row)
    if (p > 0.0) h -= p * std::log(p);
  return std::exp(h);
}

namespace detail {
// Student-t kernel w_ij = 1 / (1 + |y_i - y_j|^2); returns the sum over i != j.
inline double student_kernel(const DenseMatrix& y, DenseMatrix& w) {
  const std::size_t n = y.rows();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    w(i, i) = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double k = 1.0 / (1.0 + squared_distance(y.row(i), y.row(j)));
      w(i, j) = k;
      w(j, i) = k;
      total += 2.0 * k;
    }
  }
  return total;
}

inline void tsne_gradient_from_kernel(const AffinityMatrix& p, const DenseMatrix& y,
                                      const DenseMatrix& w, double w_sum, double exaggeration,
                                      DenseMatrix& grad) {
  const std::size_t n = y.rows();
  const std::size_t dims = y.cols();
  std::fill(grad.values().begin(), grad.values().end(), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    auto gi = grad.row(i);
    const auto yi = y.row(i);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double coeff = 4.0 * (exaggeration * p(i, j) - w(i, j) / w_sum) * w(i, j);
      const auto yj = y.row(j);
      for (std::size_t d = 0; d < dims; ++d) gi[d] += coeff * (yi[d] - yj[d]);
    }
  }
}
}  // namespace detail

/// KL(P || Q) for the Student-t output distribution Q of `y`.
inline double tsne_kl_divergence(const AffinityMatrix& p, const DenseMatrix& y) {
  const std::size_t n = y.rows();
  DenseMatrix w(n, n);
  const double w_sum = detail::student_kernel(y, w);
  double kl = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (j != i && p(i, j) > 0.0) kl += p(i, j) * std::log(p(i, j) * w_sum / w(i, j));
  return kl;
}

/// Analytic gradient of the KL objective with respect to the output coordinates.
inline DenseMatrix tsne_gradient(const AffinityMatrix& p, const DenseMatrix& y,
                                 double exaggeration = 1.0) {
  const std::size_t n = y.rows();
  DenseMatrix w(n, n);
  DenseMatrix grad(n, y.cols());
  const double w_sum = detail::student_kernel(y, w);
  detail::tsne_gradient_from_kernel(p, y, w, w_sum, exaggeration, grad);
  return grad;
}

/// Objective values recorded during optimisation.
struct TsneTrace {
  double kl_after_exaggeration = 0.0;  // at the first un-exaggerated iteration
  double final_kl = 0.0;
};

inline DenseMatrix tsne_embed(const DenseMatrix& data, const ReducerSpec& spec,
                              TsneTrace* trace = nullptr) {
  require(spec.method == ReducerMethod::Tsne, "tsne_embed needs a t-SNE spec");
  const std::size_t n = data.rows();
  const TsneParams& prm = spec.tsne;
  require(n >= 4, "t-SNE needs at least 4 points");
  require(spec.target_dims >= 1, "target_dims must be positive");
  require(spec.target_dims < data.cols(), "target_dims must be below the input dimension");
  require(prm.perplexity < static_cast<double>(n), "perplexity must be below the point count");
  require(prm.iterations > 0, "iterations must be positive");

  const AffinityMatrix p = calibrate_affinities(pairwise_distances(data), prm.perplexity);

  const std::size_t dims = spec.target_dims;
  Rng rng(spec.seed);
  DenseMatrix y(n, dims);
  for (double& v : y.values()) v = prm.init_scale * rng.normal();

  DenseMatrix w(n, n);
  DenseMatrix grad(n, dims);
  DenseMatrix update(n, dims);
  DenseMatrix gains(n, dims, 1.0);
  constexpr double kMinGain = 0.01;

  for (std::size_t it = 0; it < prm.iterations; ++it) {
    const bool exaggerating = it < prm.exaggeration_iterations;
    const double exaggeration = exaggerating ? prm.early_exaggeration : 1.0;
    const double momentum = it < prm.momentum_switch ? prm.initial_momentum : prm.final_momentum;

    const double w_sum = detail::student_kernel(y, w);
    if (trace && it == std::min(prm.exaggeration_iterations, prm.iterations - 1))
      trace->kl_after_exaggeration = tsne_kl_divergence(p, y);
    detail::tsne_gradient_from_kernel(p, y, w, w_sum, exaggeration, grad);

    auto g = grad.values();
    auto u = update.values();
    auto gn = gains.values();
    auto yv = y.values();
    for (std::size_t k = 0; k < g.size(); ++k) {
      gn[k] = ((g[k] > 0.0) != (u[k] > 0.0)) ? gn[k] + 0.2 : gn[k] * 0.8;
      gn[k] = std::max(gn[k], kMinGain);
      u[k] = momentum * u[k] - prm.learning_rate * gn[k] * g[k];
      yv[k] += u[k];
    }
    for (std::size_t d = 0; d < dims; ++d) {
      double mean = 0.0;
      for (std::size_t i = 0; i < n; ++i) mean += y(i, d);
      mean /= static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i) y(i, d) -= mean;
    }
    if ((it % 50 == 49 || it + 1 == prm.iterations) && !y.all_finite())
      throw Error(ErrorCode::NonFiniteState,
                  "t-SNE coordinates diverged at iteration " + std::to_string(it + 1));
  }
  if (trace) trace->final_kl = tsne_kl_divergence(p, y);
  return y;
}

}  // namespace genesem
