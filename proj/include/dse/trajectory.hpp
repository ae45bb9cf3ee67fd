#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/QR>

#include "dse/embedding.hpp"
#include "dse/errors.hpp"
#include "dse/rng.hpp"
#include "dse/theory.hpp"
#include "dse/types.hpp"

// Deterministic synthetic training trajectories. Each checkpoint embeds a
// three-class patch mixture inside a rank-limited subspace; the schedules
// move class separation, intrinsic rank, or both across checkpoints, which
// emulates the two observed degradation modes (shrinking separability vs.
// dimensional collapse) and their inverse, steady improvement.

namespace dse {

enum class Schedule { separability_decay, dimension_collapse, improving };

struct TrajectorySpec {
  int num_checkpoints = 10;
  Index num_images = 64;
  Index num_patches = 48;
  Index dim = 32;
  Schedule schedule = Schedule::improving;
  double noise_scale = 1.0;
  std::uint64_t seed = 0;
};

struct TrajectoryPoint {
  EmbeddingBatch batch;
  double true_nn_accuracy = 0.0;
};

namespace detail {

constexpr int kTrajectoryClasses = 3;

inline Matrix random_orthogonal(Index dim, Rng& rng) {
  Matrix gauss(dim, dim);
  for (Index r = 0; r < dim; ++r)
    for (Index c = 0; c < dim; ++c) gauss(r, c) = rng.normal();
  Eigen::HouseholderQR<Matrix> qr(gauss);
  Matrix q = qr.householderQ();
  return q;
}

struct CheckpointShape {
  Index rank;
  double margin;  // blob distance over twice the per-direction noise
};

inline CheckpointShape checkpoint_shape(const TrajectorySpec& spec, int t) {
  const Index r_hi = std::max<Index>(kTrajectoryClasses, 3 * spec.dim / 4);
  const Index r_lo = std::clamp<Index>(spec.dim / 5, kTrajectoryClasses, r_hi);
  const double frac =
      spec.num_checkpoints > 1 ? static_cast<double>(t) / (spec.num_checkpoints - 1) : 0.0;
  CheckpointShape shape{};
  switch (spec.schedule) {
    case Schedule::improving:
      shape.rank = r_lo + static_cast<Index>(std::lround(frac * static_cast<double>(r_hi - r_lo)));
      shape.margin = 0.84 + 1.86 * frac;
      break;
    case Schedule::separability_decay:
      shape.rank = r_hi;
      shape.margin = 2.9 - 2.0 * frac;
      break;
    case Schedule::dimension_collapse:
      shape.rank = r_hi - static_cast<Index>(std::lround(frac * static_cast<double>(r_hi - r_lo)));
      shape.margin = 2.9;
      break;
  }
  return shape;
}

}  // namespace detail

inline std::vector<TrajectoryPoint> generate_trajectory(const TrajectorySpec& spec) {
  if (spec.num_checkpoints < 2) throw ConfigError("trajectory needs at least two checkpoints");
  if (spec.num_images < 1 || spec.num_patches < 1)
    throw ConfigError("trajectory batch dimensions must be positive");
  if (spec.dim < detail::kTrajectoryClasses)
    throw ConfigError("trajectory dim must be at least 3");
  if (!(spec.noise_scale > 0.0)) throw ConfigError("noise scale must be positive");

  const Index r_hi = std::max<Index>(detail::kTrajectoryClasses, 3 * spec.dim / 4);
  Rng basis_rng(derive_seed(spec.seed, 0xba515));
  const Matrix basis = detail::random_orthogonal(spec.dim, basis_rng);

  std::vector<TrajectoryPoint> trajectory;
  trajectory.reserve(static_cast<std::size_t>(spec.num_checkpoints));
  const Index rows = spec.num_images * spec.num_patches;
  for (int t = 0; t < spec.num_checkpoints; ++t) {
    const detail::CheckpointShape shape = detail::checkpoint_shape(spec, t);
    // Per-direction noise grows as the rank shrinks so the trace-based
    // radius estimate stays on one scale across the whole trajectory.
    const double noise_dir =
        spec.noise_scale * std::sqrt(static_cast<double>(r_hi) / static_cast<double>(shape.rank));
    const double separation = shape.margin * std::sqrt(2.0) * noise_dir;

    Rng rng(derive_seed(spec.seed, static_cast<std::uint64_t>(t) + 1));
    Matrix latent(rows, shape.rank);
    std::vector<int> labels(static_cast<std::size_t>(rows));
    for (Index i = 0; i < spec.num_images; ++i) {
      for (Index p = 0; p < spec.num_patches; ++p) {
        const Index row = i * spec.num_patches + p;
        const int cls = static_cast<int>(p % detail::kTrajectoryClasses);
        labels[static_cast<std::size_t>(row)] = cls;
        for (Index d = 0; d < shape.rank; ++d) latent(row, d) = noise_dir * rng.normal();
        latent(row, cls) += separation;
      }
    }
    Matrix points = latent * basis.leftCols(shape.rank).transpose();
    // A whisper of full-dimensional noise keeps the SVD well conditioned.
    const double ambient = 0.02 * spec.noise_scale;
    for (Index r = 0; r < rows; ++r)
      for (Index c = 0; c < spec.dim; ++c) points(r, c) += ambient * rng.normal();

    char name[32];
    std::snprintf(name, sizeof(name), "ckpt_%03d", t);
    TrajectoryPoint point;
    point.true_nn_accuracy =
        1.0 - nn_error(points, labels, detail::kTrajectoryClasses);
    point.batch = make_batch(std::move(points), spec.num_images, spec.num_patches, spec.dim,
                             name);
    trajectory.push_back(std::move(point));
  }
  return trajectory;
}

}  // namespace dse
