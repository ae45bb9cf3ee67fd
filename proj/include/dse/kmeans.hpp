#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <vector>

#include "dse/embedding.hpp"
#include "dse/errors.hpp"
#include "dse/rng.hpp"
#include "dse/types.hpp"

namespace dse {

struct ClusterAssignment {
  std::vector<int> labels;  // length m, values in [0, k)
  Matrix centroids;         // k x d
  double inertia = 0.0;     // sum of squared distances to assigned centroids
  int k = 0;
};

struct KmeansParams {
  int max_iter = 100;
  double tol = 1e-6;  // relative centroid movement, Frobenius norm
};

/// Nearest-centroid labels; ties go to the lowest centroid index.
inline std::vector<int> assign(const Matrix& points, const Matrix& centroids) {
  if (points.cols() != centroids.cols())
    throw DimensionError("points and centroids have different dimensionality");
  if (centroids.rows() < 1) throw DimensionError("no centroids");
  std::vector<int> labels(static_cast<std::size_t>(points.rows()));
  for (Index i = 0; i < points.rows(); ++i) {
    int best = 0;
    double best_d = (points.row(i) - centroids.row(0)).squaredNorm();
    for (Index j = 1; j < centroids.rows(); ++j) {
      const double d = (points.row(i) - centroids.row(j)).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(j);
      }
    }
    labels[static_cast<std::size_t>(i)] = best;
  }
  return labels;
}

namespace detail {

inline Matrix kmeanspp_init(const Matrix& points, int k, Rng& rng) {
  const Index m = points.rows();
  Matrix centers(k, points.cols());
  Vector dist2(m);
  centers.row(0) = points.row(static_cast<Index>(rng.bounded(static_cast<std::uint64_t>(m))));
  for (Index i = 0; i < m; ++i)
    dist2[i] = (points.row(i) - centers.row(0)).squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = dist2.sum();
    Index pick;
    if (total > 0.0) {
      // D^2 sampling via one uniform draw and a cumulative scan.
      const double r = rng.uniform() * total;
      double acc = 0.0;
      pick = m - 1;
      for (Index i = 0; i < m; ++i) {
        acc += dist2[i];
        if (acc > r) {
          pick = i;
          break;
        }
      }
    } else {
      // All remaining mass is zero (duplicate points); fall back to uniform.
      pick = static_cast<Index>(rng.bounded(static_cast<std::uint64_t>(m)));
    }
    centers.row(c) = points.row(pick);
    for (Index i = 0; i < m; ++i)
      dist2[i] = std::min(dist2[i], (points.row(i) - centers.row(c)).squaredNorm());
  }
  return centers;
}

inline std::vector<Index> cluster_counts(const std::vector<int>& labels, int k) {
  std::vector<Index> counts(static_cast<std::size_t>(k), 0);
  for (int label : labels) ++counts[static_cast<std::size_t>(label)];
  return counts;
}

inline Matrix centroids_from_labels(const Matrix& points, const std::vector<int>& labels,
                                    int k) {
  Matrix centroids = Matrix::Zero(k, points.cols());
  const std::vector<Index> counts = cluster_counts(labels, k);
  for (Index i = 0; i < points.rows(); ++i)
    centroids.row(labels[static_cast<std::size_t>(i)]) += points.row(i);
  for (int j = 0; j < k; ++j)
    if (counts[static_cast<std::size_t>(j)] > 0)
      centroids.row(j) /= static_cast<double>(counts[static_cast<std::size_t>(j)]);
  return centroids;
}

// Reseeds each empty cluster's centroid to the point currently farthest from
// its assigned centroid and moves that point's label along with it. Donor
// clusters must keep at least one point.
inline bool repair_empty(const Matrix& points, Matrix& centroids, std::vector<int>& labels) {
  const int k = static_cast<int>(centroids.rows());
  std::vector<Index> counts = cluster_counts(labels, k);
  bool repaired = false;
  for (int j = 0; j < k; ++j) {
    if (counts[static_cast<std::size_t>(j)] > 0) continue;
    Index farthest = -1;
    double far_d = -1.0;
    for (Index i = 0; i < points.rows(); ++i) {
      const int owner = labels[static_cast<std::size_t>(i)];
      if (counts[static_cast<std::size_t>(owner)] < 2) continue;
      const double d = (points.row(i) - centroids.row(owner)).squaredNorm();
      if (d > far_d) {
        far_d = d;
        farthest = i;
      }
    }
    if (farthest < 0) continue;  // cannot happen while m >= k
    --counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(farthest)])];
    labels[static_cast<std::size_t>(farthest)] = j;
    counts[static_cast<std::size_t>(j)] = 1;
    centroids.row(j) = points.row(farthest);
    repaired = true;
  }
  return repaired;
}

inline bool any_empty(const std::vector<int>& labels, int k) {
  const std::vector<Index> counts = cluster_counts(labels, k);
  return std::any_of(counts.begin(), counts.end(), [](Index c) { return c == 0; });
}

}  // namespace detail

/// Lloyd's algorithm from a k-means++ seeding. Runs single-threaded with a
/// fixed reduction order, so results are identical for identical inputs.
inline ClusterAssignment kmeans(const Matrix& points, int k, std::uint64_t seed,
                                const KmeansParams& params = {}) {
  const Index m = points.rows();
  if (k < 1) throw ClusterError("k must be positive");
  if (static_cast<Index>(k) > m)
    throw ClusterError("k=" + std::to_string(k) + " exceeds the " + std::to_string(m) +
                       " available points");
  if (params.max_iter < 1) throw ConfigError("max_iter must be >= 1");

  Rng rng(seed);
  Matrix centroids = detail::kmeanspp_init(points, k, rng);
  std::vector<int> labels;
  for (int iter = 0; iter < params.max_iter; ++iter) {
    labels = assign(points, centroids);
    detail::repair_empty(points, centroids, labels);
    Matrix updated = detail::centroids_from_labels(points, labels, k);
    const double base = std::max(centroids.norm(), std::numeric_limits<double>::min());
    const double shift = (updated - centroids).norm() / base;
    centroids = std::move(updated);
    if (shift < params.tol) break;
  }

  // Final labels must be nearest-centroid with respect to the returned
  // centroids; reseed-and-reassign until no cluster is empty.
  labels = assign(points, centroids);
  for (int attempt = 0; attempt < k && detail::any_empty(labels, k); ++attempt) {
    Matrix probe = centroids;
    detail::repair_empty(points, probe, labels);
    centroids = std::move(probe);
    labels = assign(points, centroids);
  }
  if (detail::any_empty(labels, k)) {
    // Exact-duplicate degeneracy: fewer distinct values than clusters.
    // Donate points directly and keep centroids at the cluster means.
    detail::repair_empty(points, centroids, labels);
    centroids = detail::centroids_from_labels(points, labels, k);
  }

  double inertia = 0.0;
  for (Index i = 0; i < m; ++i)
    inertia += (points.row(i) - centroids.row(labels[static_cast<std::size_t>(i)])).squaredNorm();
  return ClusterAssignment{std::move(labels), std::move(centroids), inertia, k};
}

inline ClusterAssignment kmeans(const RepresentationMatrix& matrix, int k, std::uint64_t seed,
                                const KmeansParams& params = {}) {
  return kmeans(matrix.rows, k, seed, params);
}

}  // namespace dse
