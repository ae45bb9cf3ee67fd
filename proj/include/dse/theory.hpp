#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include <Eigen/SVD>
#include <nlohmann/json.hpp>

#include "dse/errors.hpp"
#include "dse/kmeans.hpp"
#include "dse/rng.hpp"
#include "dse/types.hpp"

// Synthetic experiments on labeled isotropic Gaussian mixtures. Gaussians
// are the sub-Gaussian family used throughout: every bound applies and
// closed-form error oracles exist for cross-checking.

namespace dse {

struct MixtureSpec {
  int num_classes = 2;
  int dim = 1;
  Matrix means;              // num_classes x dim, pairwise distinct
  double per_class_std = 1;  // isotropic Gaussian scale R
  int samples_per_class = 2;
  std::uint64_t seed = 0;
};

struct LabeledCloud {
  Matrix points;            // (num_classes * samples_per_class) x dim
  std::vector<int> labels;  // ground truth
  MixtureSpec spec;
};

inline LabeledCloud sample_mixture(const MixtureSpec& spec) {
  if (spec.num_classes < 2) throw ConfigError("mixture needs at least two classes");
  if (spec.dim < 1) throw ConfigError("dimension must be positive");
  if (spec.samples_per_class < 2) throw ConfigError("need at least two samples per class");
  if (spec.means.rows() != spec.num_classes || spec.means.cols() != spec.dim)
    throw DimensionError("means matrix does not match (num_classes, dim)");
  if (!(spec.per_class_std > 0.0)) throw ConfigError("per-class std must be positive");

  LabeledCloud cloud;
  cloud.spec = spec;
  const Index total = static_cast<Index>(spec.num_classes) * spec.samples_per_class;
  cloud.points.resize(total, spec.dim);
  cloud.labels.resize(static_cast<std::size_t>(total));
  Rng rng(spec.seed);
  Index row = 0;
  for (int c = 0; c < spec.num_classes; ++c) {
    for (int i = 0; i < spec.samples_per_class; ++i, ++row) {
      for (Index d = 0; d < spec.dim; ++d)
        cloud.points(row, d) = spec.means(c, d) + spec.per_class_std * rng.normal();
      cloud.labels[static_cast<std::size_t>(row)] = c;
    }
  }
  return cloud;
}

namespace detail {

inline Matrix class_means(const Matrix& points, const std::vector<int>& labels,
                          int num_classes) {
  Matrix means = Matrix::Zero(num_classes, points.cols());
  std::vector<Index> counts(static_cast<std::size_t>(num_classes), 0);
  for (Index i = 0; i < points.rows(); ++i) {
    means.row(labels[static_cast<std::size_t>(i)]) += points.row(i);
    ++counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
  }
  for (int c = 0; c < num_classes; ++c)
    if (counts[static_cast<std::size_t>(c)] > 0)
      means.row(c) /= static_cast<double>(counts[static_cast<std::size_t>(c)]);
  return means;
}

// Sum of singular values of the centered class matrix over sqrt(N_j - 1);
// zero for singletons.
inline Vector class_radii(const Matrix& points, const std::vector<int>& labels,
                          int num_classes) {
  Vector radii = Vector::Zero(num_classes);
  std::vector<Index> counts(static_cast<std::size_t>(num_classes), 0);
  for (int label : labels) ++counts[static_cast<std::size_t>(label)];
  for (int c = 0; c < num_classes; ++c) {
    const Index n_c = counts[static_cast<std::size_t>(c)];
    if (n_c < 2) continue;
    Matrix rows(n_c, points.cols());
    Index next = 0;
    for (Index i = 0; i < points.rows(); ++i)
      if (labels[static_cast<std::size_t>(i)] == c) rows.row(next++) = points.row(i);
    const Eigen::RowVectorXd mean = rows.colwise().mean();
    rows.rowwise() -= mean;
    Eigen::BDCSVD<Matrix> svd(rows);
    radii[c] = svd.singularValues().sum() / std::sqrt(static_cast<double>(n_c - 1));
  }
  return radii;
}

inline std::vector<Index> label_counts(const std::vector<int>& labels, int num_classes) {
  std::vector<Index> counts(static_cast<std::size_t>(num_classes), 0);
  for (int label : labels) ++counts[static_cast<std::size_t>(label)];
  return counts;
}

}  // namespace detail

/// Error rate of the nearest-class-mean classifier with empirical class
/// means, evaluated on the cloud itself. Ties go to the lowest class index.
inline double nn_error(const Matrix& points, const std::vector<int>& labels, int num_classes) {
  const Matrix means = detail::class_means(points, labels, num_classes);
  Index wrong = 0;
  for (Index i = 0; i < points.rows(); ++i) {
    int best = 0;
    double best_d = (points.row(i) - means.row(0)).squaredNorm();
    for (int c = 1; c < num_classes; ++c) {
      const double d = (points.row(i) - means.row(c)).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    if (best != labels[static_cast<std::size_t>(i)]) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(points.rows());
}

inline double nn_error(const LabeledCloud& cloud) {
  return nn_error(cloud.points, cloud.labels, cloud.spec.num_classes);
}

/// Fraction of points whose distance to their own k-means centroid is at
/// most the distance to every other centroid. Nearest-centroid assignment
/// makes this 1.0 for any input, which is exactly why the instance-wise
/// condition cannot detect overlap.
inline double instance_margin_accuracy(const Matrix& points, int k, std::uint64_t seed) {
  const ClusterAssignment assignment = kmeans(points, k, seed);
  Index satisfied = 0;
  for (Index i = 0; i < points.rows(); ++i) {
    const int own = assignment.labels[static_cast<std::size_t>(i)];
    const double own_d = (points.row(i) - assignment.centroids.row(own)).squaredNorm();
    double foreign = std::numeric_limits<double>::infinity();
    for (int j = 0; j < assignment.k; ++j) {
      if (j == own) continue;
      foreign = std::min(foreign, (points.row(i) - assignment.centroids.row(j)).squaredNorm());
    }
    if (own_d <= foreign) ++satisfied;
  }
  return static_cast<double>(satisfied) / static_cast<double>(points.rows());
}

struct BoundConstants {
  double c1 = 1.0;
  double c_tilde = 1.0;
};

struct BoundReport {
  double empirical_err = 0.0;
  double delta = 0.0;
  double margin_cdf_term = 0.0;  // P(D_min - radius < C_delta)
  double c_delta = 0.0;          // mean of the per-class margins
  double bound = 0.0;            // delta + margin_cdf_term
  bool holds = false;
};

namespace detail {

inline double margin_c_delta(double R, int dim, double delta, Index n_j,
                             const BoundConstants& constants) {
  const double d = static_cast<double>(dim);
  const double n = static_cast<double>(n_j);
  const double l2 = std::log(2.0 / delta);
  const double l8 = std::log(8.0 / delta);
  return std::sqrt(constants.c1 * R * R * d * (l2 + std::sqrt(l2)) +
                   constants.c_tilde * R * R * (d * std::sqrt(l8 / n) + (d + l8) / n));
}

// The probability term of the error bound: the fraction of points whose
// nearest foreign-center distance beats the estimated class radius by less
// than the margin. With a single center there is no foreign distance and
// every point counts.
inline double margin_cdf_term(const Matrix& points, const std::vector<int>& labels,
                              const Matrix& centers, const Vector& radii,
                              const std::vector<Index>& counts, double R, double delta,
                              const BoundConstants& constants) {
  const int k = static_cast<int>(centers.rows());
  Index within = 0;
  for (Index i = 0; i < points.rows(); ++i) {
    const int own = labels[static_cast<std::size_t>(i)];
    double d_min = 0.0;
    if (k > 1) {
      d_min = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        if (c == own) continue;
        d_min = std::min(d_min, (points.row(i) - centers.row(c)).norm());
      }
    }
    const double c_delta = margin_c_delta(R, static_cast<int>(points.cols()), delta,
                                          counts[static_cast<std::size_t>(own)], constants);
    if (d_min - radii[own] < c_delta) ++within;
  }
  return static_cast<double>(within) / static_cast<double>(points.rows());
}

}  // namespace detail

/// Evaluates the error bound Err <= delta + P(D_min - radius < C_delta) on a
/// labeled cloud, using ground-truth labels and empirical class means.
inline BoundReport thm1_bound(const LabeledCloud& cloud, double delta,
                              const BoundConstants& constants = {}) {
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
  const int K = cloud.spec.num_classes;
  const Matrix means = detail::class_means(cloud.points, cloud.labels, K);
  const Vector radii = detail::class_radii(cloud.points, cloud.labels, K);
  const std::vector<Index> counts = detail::label_counts(cloud.labels, K);

  BoundReport report;
  report.delta = delta;
  report.empirical_err = nn_error(cloud);
  report.margin_cdf_term =
      detail::margin_cdf_term(cloud.points, cloud.labels, means, radii, counts,
                              cloud.spec.per_class_std, delta, constants);
  double c_delta_sum = 0.0;
  for (int c = 0; c < K; ++c)
    c_delta_sum += detail::margin_c_delta(cloud.spec.per_class_std, cloud.spec.dim, delta,
                                          counts[static_cast<std::size_t>(c)], constants);
  report.c_delta = c_delta_sum / static_cast<double>(K);
  report.bound = delta + report.margin_cdf_term;
  report.holds = report.empirical_err <= report.bound;
  return report;
}

/// Collinear class means with the given per-coordinate separation: class j
/// sits at (j*s, ..., j*s).
inline Matrix means_on_line(int num_classes, int dim, double per_coordinate_separation) {
  Matrix means(num_classes, dim);
  for (int c = 0; c < num_classes; ++c)
    means.row(c).setConstant(static_cast<double>(c) * per_coordinate_separation);
  return means;
}

struct DecaySpec {
  int num_classes = 2;
  double per_class_std = 1.0;
  double per_coordinate_separation = 6.0;  // in units of the class std
  int samples_per_class = 2000;
  std::uint64_t seed = 0;
};

/// Empirical NN error as the dimension grows while the per-coordinate mean
/// separation stays fixed; total separation scales with sqrt(d).
inline std::vector<std::pair<int, double>> dim_decay_experiment(const DecaySpec& spec,
                                                                const std::vector<int>& dims) {
  std::vector<std::pair<int, double>> results;
  results.reserve(dims.size());
  for (int d : dims) {
    MixtureSpec mix;
    mix.num_classes = spec.num_classes;
    mix.dim = d;
    mix.per_class_std = spec.per_class_std;
    mix.samples_per_class = spec.samples_per_class;
    mix.means = means_on_line(spec.num_classes, d,
                              spec.per_coordinate_separation * spec.per_class_std);
    mix.seed = derive_seed(spec.seed, static_cast<std::uint64_t>(d));
    results.emplace_back(d, nn_error(sample_mixture(mix)));
  }
  return results;
}

/// Recomputes the bound's probability term under k-means pseudo-labels for
/// each k. Merging well-separated classes inflates the estimated radii, so
/// the term grows as k drops below the true class count.
inline std::vector<std::pair<int, double>> k_sweep_experiment(
    const LabeledCloud& cloud, const std::vector<int>& k_values, double delta,
    const BoundConstants& constants = {}) {
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
  std::vector<std::pair<int, double>> results;
  results.reserve(k_values.size());
  for (int k : k_values) {
    const ClusterAssignment assignment =
        kmeans(cloud.points, k, derive_seed(cloud.spec.seed, static_cast<std::uint64_t>(k)));
    const Vector radii = detail::class_radii(cloud.points, assignment.labels, k);
    const std::vector<Index> counts = detail::label_counts(assignment.labels, k);
    const double term =
        detail::margin_cdf_term(cloud.points, assignment.labels, assignment.centroids, radii,
                                counts, cloud.spec.per_class_std, delta, constants);
    results.emplace_back(k, term);
  }
  return results;
}

inline void to_json(nlohmann::json& j, const MixtureSpec& spec) {
  std::vector<std::vector<double>> means(static_cast<std::size_t>(spec.means.rows()));
  for (Index r = 0; r < spec.means.rows(); ++r) {
    means[static_cast<std::size_t>(r)].resize(static_cast<std::size_t>(spec.means.cols()));
    for (Index c = 0; c < spec.means.cols(); ++c)
      means[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = spec.means(r, c);
  }
  j = nlohmann::json{{"num_classes", spec.num_classes},
                     {"dim", spec.dim},
                     {"means", means},
                     {"per_class_std", spec.per_class_std},
                     {"samples_per_class", spec.samples_per_class},
                     {"seed", spec.seed}};
}

inline void from_json(const nlohmann::json& j, MixtureSpec& spec) {
  j.at("num_classes").get_to(spec.num_classes);
  j.at("dim").get_to(spec.dim);
  j.at("per_class_std").get_to(spec.per_class_std);
  j.at("samples_per_class").get_to(spec.samples_per_class);
  j.at("seed").get_to(spec.seed);
  const auto means = j.at("means").get<std::vector<std::vector<double>>>();
  spec.means.resize(static_cast<Index>(means.size()), spec.dim);
  for (std::size_t r = 0; r < means.size(); ++r) {
    if (static_cast<Index>(means[r].size()) != spec.dim)
      throw ConfigError("means row length does not match dim");
    for (std::size_t c = 0; c < means[r].size(); ++c)
      spec.means(static_cast<Index>(r), static_cast<Index>(c)) = means[r][c];
  }
}

inline void to_json(nlohmann::json& j, const BoundReport& r) {
  j = nlohmann::json{{"empirical_err", r.empirical_err},
                     {"delta", r.delta},
                     {"margin_cdf_term", r.margin_cdf_term},
                     {"c_delta", r.c_delta},
                     {"bound", r.bound},
                     {"holds", r.holds}};
}

}  // namespace dse
