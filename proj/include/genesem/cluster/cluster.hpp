#pragma once

#include "genesem/cluster/agglomerative.hpp"
#include "genesem/cluster/hdbscan.hpp"
#include "genesem/cluster/kmeans.hpp"
#include "genesem/cluster/labels.hpp"

namespace genesem {

/// Dispatches on spec.method.
inline ClusterLabels cluster_points(const DenseMatrix& points, const ClustererSpec& spec) {
  switch (spec.method) {
    case ClusterMethod::KMeans: return kmeans(points, spec);
    case ClusterMethod::Hdbscan: return hdbscan(points, spec);
    case ClusterMethod::AggSingle:
    case ClusterMethod::AggAverage:
    case ClusterMethod::AggWard: return agglomerative(points, spec);
  }
  throw Error(ErrorCode::PreconditionViolation, "unknown clustering method");
}

}  // namespace genesem
