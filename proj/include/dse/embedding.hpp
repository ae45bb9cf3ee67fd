#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "dse/errors.hpp"
#include "dse/npy.hpp"
#include "dse/rng.hpp"
#include "dse/types.hpp"

namespace dse {

/// One checkpoint's dense representations: num_images x num_patches patch
/// vectors of dimension dim, stored image-major as a (B*N, d) matrix.
struct EmbeddingBatch {
  Matrix patches;
  Index num_images = 0;
  Index num_patches = 0;
  Index dim = 0;
  std::string source_id;
};

enum class Provenance { flattened_all, independent_sample };

struct RepresentationMatrix {
  Matrix rows;
  Provenance provenance = Provenance::flattened_all;
};

inline EmbeddingBatch make_batch(Matrix patches, Index num_images, Index num_patches,
                                 Index dim, std::string source_id) {
  if (num_images < 1 || num_patches < 1 || dim < 1)
    throw FormatError("batch dimensions must all be >= 1");
  if (patches.rows() != num_images * num_patches || patches.cols() != dim)
    throw DimensionError("patch matrix does not match declared shape");
  if (!patches.allFinite())
    throw DataError("batch '" + source_id + "' contains non-finite values");
  return EmbeddingBatch{std::move(patches), num_images, num_patches, dim,
                        std::move(source_id)};
}

inline EmbeddingBatch make_batch(const std::vector<double>& data, Index num_images,
                                 Index num_patches, Index dim, std::string source_id) {
  if (static_cast<Index>(data.size()) != num_images * num_patches * dim)
    throw DimensionError("tensor data size does not match declared shape");
  Matrix patches(num_images * num_patches, dim);
  std::copy(data.begin(), data.end(), patches.data());
  return make_batch(std::move(patches), num_images, num_patches, dim,
                    std::move(source_id));
}

/// Loads a (B, N, d) float32/float64 npy dump. float32 values are widened
/// to float64; the file stem becomes the checkpoint's source_id.
inline EmbeddingBatch load_embeddings(const std::filesystem::path& path) {
  const npy::Array array = npy::load(path);
  if (array.shape.size() != 3)
    throw FormatError("'" + path.string() + "': expected 3 dimensions, got " +
                      std::to_string(array.shape.size()));
  const auto b = static_cast<Index>(array.shape[0]);
  const auto n = static_cast<Index>(array.shape[1]);
  const auto d = static_cast<Index>(array.shape[2]);
  if (b < 1 || n < 1 || d < 1)
    throw FormatError("'" + path.string() + "': zero-sized dimension");
  return make_batch(array.data, b, n, d, path.stem().string());
}

/// All B*N representations as one matrix, image-major then patch order.
inline RepresentationMatrix flatten_all(const EmbeddingBatch& batch) {
  return RepresentationMatrix{batch.patches, Provenance::flattened_all};
}

/// One uniformly chosen patch from each of `count` distinct uniformly
/// chosen images. Deterministic for a fixed seed.
inline RepresentationMatrix sample_independent(const EmbeddingBatch& batch, Index count,
                                               std::uint64_t seed) {
  if (count < 1) throw SampleError("sample count must be positive");
  if (count > batch.num_images)
    throw SampleError("cannot sample " + std::to_string(count) + " independent rows from " +
                      std::to_string(batch.num_images) + " images");
  Rng rng(seed);
  // Partial Fisher-Yates over the image indices: the first `count` entries
  // form a uniform sample without replacement.
  std::vector<Index> images(static_cast<std::size_t>(batch.num_images));
  std::iota(images.begin(), images.end(), Index{0});
  Matrix out(count, batch.dim);
  for (Index i = 0; i < count; ++i) {
    const auto j = static_cast<Index>(
        rng.bounded(static_cast<std::uint64_t>(batch.num_images - i)));
    std::swap(images[static_cast<std::size_t>(i)], images[static_cast<std::size_t>(i + j)]);
    const Index image = images[static_cast<std::size_t>(i)];
    const auto patch = static_cast<Index>(
        rng.bounded(static_cast<std::uint64_t>(batch.num_patches)));
    out.row(i) = batch.patches.row(image * batch.num_patches + patch);
  }
  return RepresentationMatrix{std::move(out), Provenance::independent_sample};
}

}  // namespace dse
