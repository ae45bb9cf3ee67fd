#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/SVD>

#include "dse/embedding.hpp"
#include "dse/errors.hpp"
#include "dse/kmeans.hpp"
#include "dse/log.hpp"
#include "dse/rng.hpp"
#include "dse/types.hpp"

namespace dse {

struct SeparabilityStats {
  double m_intra = 0.0;
  double m_inter = 0.0;
  Vector per_cluster_radius;
  Vector per_cluster_inter;
  std::vector<Index> cluster_sizes;
};

namespace detail {

inline void check_assignment(const Matrix& points, const ClusterAssignment& assignment) {
  if (static_cast<Index>(assignment.labels.size()) != points.rows())
    throw DimensionError("assignment does not cover the representation matrix");
  if (assignment.centroids.cols() != points.cols())
    throw DimensionError("centroid dimensionality mismatch");
}

inline Matrix cluster_rows(const Matrix& points, const std::vector<int>& labels, int j,
                           Index count) {
  Matrix rows(count, points.cols());
  Index next = 0;
  for (Index i = 0; i < points.rows(); ++i)
    if (labels[static_cast<std::size_t>(i)] == j) rows.row(next++) = points.row(i);
  return rows;
}

}  // namespace detail

/// Per-cluster radius: the sum of singular values of the centered cluster
/// matrix over sqrt(N_j - 1). Singleton clusters have zero spread and
/// contribute radius 0.
inline std::pair<double, Vector> intra_radius(const Matrix& points,
                                              const ClusterAssignment& assignment) {
  detail::check_assignment(points, assignment);
  const int k = assignment.k;
  const std::vector<Index> sizes = detail::cluster_counts(assignment.labels, k);
  Vector radius = Vector::Zero(k);
  for (int j = 0; j < k; ++j) {
    const Index n_j = sizes[static_cast<std::size_t>(j)];
    if (n_j < 2) continue;
    Matrix rows = detail::cluster_rows(points, assignment.labels, j, n_j);
    const Eigen::RowVectorXd mean = rows.colwise().mean();
    rows.rowwise() -= mean;
    Eigen::BDCSVD<Matrix> svd(rows);
    radius[j] = svd.singularValues().sum() / std::sqrt(static_cast<double>(n_j - 1));
  }
  return {radius.mean(), std::move(radius)};
}

/// Per-cluster mean distance from each point to its nearest foreign centroid.
inline std::pair<double, Vector> inter_distance(const Matrix& points,
                                                const ClusterAssignment& assignment) {
  detail::check_assignment(points, assignment);
  const int k = assignment.k;
  if (k < 2) throw ClusterError("inter-class distance needs at least two clusters");
  const std::vector<Index> sizes = detail::cluster_counts(assignment.labels, k);
  Vector total = Vector::Zero(k);
  for (Index i = 0; i < points.rows(); ++i) {
    const int own = assignment.labels[static_cast<std::size_t>(i)];
    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < k; ++j) {
      if (j == own) continue;
      best = std::min(best, (points.row(i) - assignment.centroids.row(j)).norm());
    }
    total[own] += best;
  }
  Vector inter = Vector::Zero(k);
  for (int j = 0; j < k; ++j)
    if (sizes[static_cast<std::size_t>(j)] > 0)
      inter[j] = total[j] / static_cast<double>(sizes[static_cast<std::size_t>(j)]);
  return {inter.mean(), std::move(inter)};
}

inline SeparabilityStats separability_stats(const Matrix& points,
                                            const ClusterAssignment& assignment) {
  SeparabilityStats stats;
  auto [m_intra, radius] = intra_radius(points, assignment);
  auto [m_inter, inter] = inter_distance(points, assignment);
  stats.m_intra = m_intra;
  stats.m_inter = m_inter;
  stats.per_cluster_radius = std::move(radius);
  stats.per_cluster_inter = std::move(inter);
  stats.cluster_sizes = detail::cluster_counts(assignment.labels, assignment.k);
  return stats;
}

/// One clustering pass: images are grouped `batch` at a time and each
/// group's patches are clustered into `clusters` pseudo-classes.
struct GroupConfig {
  int batch = 1;
  int clusters = 3;
};

struct SeparabilityConfig {
  std::vector<GroupConfig> groups{{1, 3}, {8, 24}};
};

/// The class-separability statistic M_inter - M_intra, averaged over
/// consecutive disjoint image groups and then over the configured (B, k)
/// settings. Configurations whose batch exceeds the number of available
/// images are dropped with a warning.
inline double class_separability(const EmbeddingBatch& batch, const SeparabilityConfig& config,
                                 std::uint64_t seed, const KmeansParams& params = {}) {
  if (config.groups.empty()) throw ConfigError("no separability configurations given");
  double total = 0.0;
  int used = 0;
  for (std::size_t c = 0; c < config.groups.size(); ++c) {
    const GroupConfig& gc = config.groups[c];
    if (gc.batch < 1 || gc.clusters < 1)
      throw ConfigError("separability configuration entries must be positive");
    const auto group_points = static_cast<Index>(gc.batch) * batch.num_patches;
    if (group_points < gc.clusters)
      throw ConfigError("group of " + std::to_string(group_points) +
                        " points cannot form " + std::to_string(gc.clusters) + " clusters");
    if (static_cast<Index>(gc.batch) > batch.num_images) {
      log::warn("dropping separability configuration (B=" + std::to_string(gc.batch) +
                ", k=" + std::to_string(gc.clusters) + "): batch has only " +
                std::to_string(batch.num_images) + " images");
      continue;
    }
    const Index num_groups = batch.num_images / gc.batch;
    double config_total = 0.0;
    for (Index g = 0; g < num_groups; ++g) {
      const Index first_row = g * gc.batch * batch.num_patches;
      const Matrix rows =
          batch.patches.middleRows(first_row, static_cast<Index>(gc.batch) * batch.num_patches);
      const ClusterAssignment assignment =
          kmeans(rows, gc.clusters, derive_seed(seed, c, static_cast<std::uint64_t>(g)), params);
      const SeparabilityStats stats = separability_stats(rows, assignment);
      config_total += stats.m_inter - stats.m_intra;
    }
    total += config_total / static_cast<double>(num_groups);
    ++used;
  }
  if (used == 0)
    throw ConfigError("no separability configuration fits a batch of " +
                      std::to_string(batch.num_images) + " images");
  return total / static_cast<double>(used);
}

}  // namespace dse
