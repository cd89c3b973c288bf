#pragma once

// UMAP: exact k-nearest-neighbour fuzzy simplicial set, fitted output
// kernel 1 / (1 + a d^2b), and the stochastic layout optimisation with
// negative sampling. Initialisation is uniform random.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "genesem/error.hpp"
#include "genesem/matrix.hpp"
#include "genesem/reduce/spec.hpp"
#include "genesem/rng.hpp"

namespace genesem {

/// k nearest neighbours of every row (self excluded), nearest first.
/// Ties are broken by the smaller row index.
struct KnnGraph {
  std::size_t k = 0;
  std::vector<std::size_t> indices;  // n x k
  DenseMatrix distances;             // n x k

  std::size_t rows() const noexcept { return distances.rows(); }
};

inline KnnGraph exact_knn(const DenseMatrix& data, std::size_t k) {
  const std::size_t n = data.rows();
  require(k >= 1 && k < n, "k must lie in [1, n-1]");
  KnnGraph g;
  g.k = k;
  g.indices.resize(n * k);
  g.distances = DenseMatrix(n, k);
  const DenseMatrix dist = pairwise_distances(data);
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < n; ++i) {
    order.resize(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    order.erase(order.begin() + static_cast<std::ptrdiff_t>(i));
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                      [&](std::size_t a, std::size_t b) {
                        return dist(i, a) < dist(i, b) || (dist(i, a) == dist(i, b) && a < b);
                      });
    for (std::size_t j = 0; j < k; ++j) {
      g.indices[i * k + j] = order[j];
      g.distances(i, j) = dist(i, order[j]);
    }
  }
  return g;
}

struct SmoothKnn {
  std::vector<double> rho;
  std::vector<double> sigma;
};

/// Membership of a neighbour at distance d for a calibrated row.
inline double membership_strength(double d, double rho, double sigma) {
  return std::exp(-std::max(0.0, d - rho) / sigma);
}

/// Per-row local connectivity: rho is the nearest-neighbour distance and sigma
/// is bisected so the row's memberships sum to log2(k).
///
/// sigma is floored at 1e-3 times the mean row distance (the global mean when
/// a row is all zeros). A row whose floor already overshoots the target, such
/// as one with k equal distances, keeps the floor value.
inline SmoothKnn smooth_knn_calibration(const DenseMatrix& knn_distances) {
  const std::size_t n = knn_distances.rows();
  const std::size_t k = knn_distances.cols();
  require(k >= 2, "smooth kNN calibration needs k >= 2");
  const double target = std::log2(static_cast<double>(k));

  double global_mean = 0.0;
  for (double d : knn_distances.values()) {
    if (!std::isfinite(d) || d < 0.0)
      throw Error(ErrorCode::CalibrationFailed, "neighbour distances must be finite and >= 0");
    global_mean += d;
  }
  global_mean /= static_cast<double>(n * k);

  SmoothKnn out;
  out.rho.resize(n);
  out.sigma.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = knn_distances.row(i);
    require(std::is_sorted(row.begin(), row.end()), "neighbour distances must be sorted");
    const double rho = row[0];
    const double row_mean = std::accumulate(row.begin(), row.end(), 0.0) / static_cast<double>(k);
    double floor = 1e-3 * (row_mean > 0.0 ? row_mean : global_mean);
    if (floor <= 0.0) floor = 1e-3;

    auto total = [&](double sigma) {
      double s = 0.0;
      for (double d : row) s += membership_strength(d, rho, sigma);
      return s;
    };

    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    double mid = row_mean > rho ? row_mean - rho : 1.0;
    double sum = 0.0;
    for (int step = 0; step < 64; ++step) {
      sum = total(mid);
      if (std::abs(sum - target) < 1e-6) break;
      if (sum > target) {
        hi = mid;
        mid = 0.5 * (lo + hi);
      } else {
        lo = mid;
        mid = std::isinf(hi) ? mid * 2.0 : 0.5 * (lo + hi);
      }
    }
    if (mid < floor) {
      mid = floor;
    } else if (!(std::abs(sum - target) < 1e-3)) {
      throw Error(ErrorCode::CalibrationFailed,
                  "sigma search did not converge for row " + std::to_string(i), 0,
                  std::to_string(i));
    }
    out.rho[i] = rho;
    out.sigma[i] = mid;
  }
  return out;
}

/// Probabilistic union B = A + A^T - A o A^T of a directed membership matrix.
inline AffinityMatrix fuzzy_union(const DenseMatrix& directed) {
  const std::size_t n = directed.rows();
  if (directed.cols() != n) throw Error(ErrorCode::BadShape, "membership matrix must be square");
  AffinityMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double a = directed(i, j);
      const double b = directed(j, i);
      const double v = a + b - a * b;
      out(i, j) = v;
      out(j, i) = v;
    }
  return out;
}

inline AffinityMatrix build_fuzzy_graph(const DenseMatrix& data, std::size_t n_neighbors) {
  require(n_neighbors >= 2, "n_neighbors must be at least 2");
  require(n_neighbors < data.rows(), "n_neighbors must be below the point count");
  const KnnGraph knn = exact_knn(data, n_neighbors);
  const SmoothKnn cal = smooth_knn_calibration(knn.distances);
  const std::size_t n = data.rows();
  DenseMatrix directed(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < knn.k; ++j)
      directed(i, knn.indices[i * knn.k + j]) =
          membership_strength(knn.distances(i, j), cal.rho[i], cal.sigma[i]);
  return fuzzy_union(directed);
}

struct CurveParams {
  double a = 0.0;
  double b = 0.0;
  double rms = 0.0;  // root-mean-square residual over the fitting grid
};

/// Least-squares fit of 1 / (1 + a d^2b) to the piecewise target curve
/// (1 below min_dist, exp(-(d - min_dist) / spread) above) on 300 evenly
/// spaced d in [0, 3 spread], by Levenberg-Marquardt.
inline CurveParams fit_embedding_curve(double min_dist, double spread) {
  require(min_dist >= 0.0 && min_dist < spread, "need 0 <= min_dist < spread");
  constexpr std::size_t kGrid = 300;
  std::vector<double> xs(kGrid), ys(kGrid);
  for (std::size_t i = 0; i < kGrid; ++i) {
    xs[i] = 3.0 * spread * static_cast<double>(i) / static_cast<double>(kGrid - 1);
    ys[i] = xs[i] < min_dist ? 1.0 : std::exp(-(xs[i] - min_dist) / spread);
  }

  auto sse = [&](double a, double b) {
    double s = 0.0;
    for (std::size_t i = 0; i < kGrid; ++i) {
      const double r = 1.0 / (1.0 + a * std::pow(xs[i], 2.0 * b)) - ys[i];
      s += r * r;
    }
    return s;
  };

  double a = 1.0;
  double b = 1.0;
  double lambda = 1e-3;
  double cost = sse(a, b);
  for (int iter = 0; iter < 500; ++iter) {
    // Normal equations J^T J delta = -J^T r for the two parameters.
    double jaa = 0.0, jab = 0.0, jbb = 0.0, ga = 0.0, gb = 0.0;
    for (std::size_t i = 0; i < kGrid; ++i) {
      const double x = xs[i];
      const double pw = x > 0.0 ? std::pow(x, 2.0 * b) : 0.0;
      const double f = 1.0 / (1.0 + a * pw);
      const double r = f - ys[i];
      const double da = -pw * f * f;
      const double db = x > 0.0 ? -a * pw * 2.0 * std::log(x) * f * f : 0.0;
      jaa += da * da;
      jab += da * db;
      jbb += db * db;
      ga += da * r;
      gb += db * r;
    }
    bool improved = false;
    for (int attempt = 0; attempt < 30 && !improved; ++attempt) {
      const double maa = jaa * (1.0 + lambda);
      const double mbb = jbb * (1.0 + lambda);
      const double det = maa * mbb - jab * jab;
      if (det == 0.0) {
        lambda *= 10.0;
        continue;
      }
      const double step_a = -(mbb * ga - jab * gb) / det;
      const double step_b = -(maa * gb - jab * ga) / det;
      const double na = a + step_a;
      const double nb = b + step_b;
      const double nc = (na > 0.0 && nb > 0.0) ? sse(na, nb) : std::numeric_limits<double>::infinity();
      if (nc < cost) {
        const double rel = (cost - nc) / std::max(cost, 1e-300);
        a = na;
        b = nb;
        cost = nc;
        lambda = std::max(lambda * 0.1, 1e-12);
        improved = true;
        if (rel < 1e-15) iter = 500;
      } else {
        lambda *= 10.0;
      }
    }
    if (!improved) break;
  }

  const double mse = cost / static_cast<double>(kGrid);
  if (!std::isfinite(a) || !std::isfinite(b) || !(mse < 1e-2))
    throw Error(ErrorCode::FitFailed, "output kernel fit residual too large");
  return {a, b, std::sqrt(mse)};
}

inline DenseMatrix umap_embed(const DenseMatrix& data, const ReducerSpec& spec) {
  require(spec.method == ReducerMethod::Umap, "umap_embed needs a UMAP spec");
  const UmapParams& prm = spec.umap;
  const std::size_t n = data.rows();
  const std::size_t dims = spec.target_dims;
  require(dims >= 1, "target_dims must be positive");
  require(prm.n_neighbors < n, "n_neighbors must be below the point count");
  require(prm.epochs > 0, "epochs must be positive");

  const AffinityMatrix graph = build_fuzzy_graph(data, prm.n_neighbors);
  const CurveParams curve = fit_embedding_curve(prm.min_dist, prm.spread);
  const double a = curve.a;
  const double b = curve.b;

  double max_weight = 0.0;
  for (double v : graph.values()) max_weight = std::max(max_weight, v);

  struct Edge {
    std::size_t head;
    std::size_t tail;
    double epochs_per_sample;
  };
  std::vector<Edge> edges;
  const double cutoff = max_weight / static_cast<double>(prm.epochs);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double wgt = graph(i, j);
      if (j != i && wgt > 0.0 && wgt >= cutoff) edges.push_back({i, j, max_weight / wgt});
    }

  Rng rng(spec.seed);
  DenseMatrix y(n, dims);
  for (double& v : y.values()) v = rng.uniform(-prm.init_range, prm.init_range);

  const double neg_rate = static_cast<double>(prm.negative_sample_rate);
  std::vector<double> next_sample(edges.size());
  std::vector<double> neg_interval(edges.size());
  std::vector<double> next_negative(edges.size());
  for (std::size_t e = 0; e < edges.size(); ++e) {
    next_sample[e] = edges[e].epochs_per_sample;
    neg_interval[e] = edges[e].epochs_per_sample / neg_rate;
    next_negative[e] = neg_interval[e];
  }

  auto clip = [](double v) { return std::clamp(v, -4.0, 4.0); };
  const double total_epochs = static_cast<double>(prm.epochs);

  for (std::size_t epoch = 0; epoch < prm.epochs; ++epoch) {
    const double now = static_cast<double>(epoch);
    const double alpha = prm.learning_rate * (1.0 - now / total_epochs);
    for (std::size_t e = 0; e < edges.size(); ++e) {
      if (next_sample[e] > now) continue;
      auto cur = y.row(edges[e].head);
      auto other = y.row(edges[e].tail);

      double d2 = squared_distance(cur, other);
      double coeff = 0.0;
      if (d2 > 0.0)
        coeff = -2.0 * a * b * std::pow(d2, b - 1.0) / (a * std::pow(d2, b) + 1.0);
      for (std::size_t d = 0; d < dims; ++d) {
        const double g = clip(coeff * (cur[d] - other[d]));
        cur[d] += g * alpha;
        other[d] -= g * alpha;
      }
      next_sample[e] += edges[e].epochs_per_sample;

      const auto n_neg =
          static_cast<std::size_t>(std::max(0.0, (now - next_negative[e]) / neg_interval[e]));
      for (std::size_t s = 0; s < n_neg; ++s) {
        const std::size_t k = static_cast<std::size_t>(rng.below(n));
        if (k == edges[e].head) continue;
        auto neg = y.row(k);
        d2 = squared_distance(cur, neg);
        coeff = d2 > 0.0 ? 2.0 * b / ((0.001 + d2) * (a * std::pow(d2, b) + 1.0)) : 0.0;
        if (coeff <= 0.0) continue;
        for (std::size_t d = 0; d < dims; ++d) cur[d] += clip(coeff * (cur[d] - neg[d])) * alpha;
      }
      next_negative[e] += static_cast<double>(n_neg) * neg_interval[e];
    }
  }
  if (!y.all_finite()) throw Error(ErrorCode::NonFiniteState, "UMAP layout diverged");
  return y;
}

}  // namespace genesem
