#pragma once

#include <cmath>
#include <cstdint>
#include <utility>

#include <Eigen/SVD>

#include "dse/embedding.hpp"
#include "dse/errors.hpp"
#include "dse/types.hpp"

namespace dse {

struct ErankReport {
  double erank = 1.0;
  Vector singular_values;  // clamped spectrum, descending
  double entropy = 0.0;    // nats
};

/// Effective rank: exp of the Shannon entropy of the l1-normalized singular
/// value spectrum of the raw (uncentered) matrix. Singular values below
/// 1e-12 * sigma_max are treated as exact zeros so SVD tail noise does not
/// inflate the entropy.
inline ErankReport effective_rank(const Matrix& matrix) {
  Eigen::BDCSVD<Matrix> svd(matrix);
  Vector sigma = svd.singularValues();
  const double sigma_max = sigma.size() > 0 ? sigma[0] : 0.0;
  if (!(sigma_max > 0.0)) throw DataError("effective rank of an all-zero matrix is undefined");
  for (Index i = 0; i < sigma.size(); ++i)
    if (sigma[i] < 1e-12 * sigma_max) sigma[i] = 0.0;
  const double total = sigma.sum();
  double entropy = 0.0;
  for (Index i = 0; i < sigma.size(); ++i) {
    if (sigma[i] <= 0.0) continue;  // 0 * log 0 == 0
    const double p = sigma[i] / total;
    entropy -= p * std::log(p);
  }
  return ErankReport{std::exp(entropy), std::move(sigma), entropy};
}

inline ErankReport effective_rank(const RepresentationMatrix& matrix) {
  return effective_rank(matrix.rows);
}

/// The dimensionality measure: effective rank of b_prime independently
/// sampled representations (one patch per image).
inline double m_dim(const EmbeddingBatch& batch, Index b_prime, std::uint64_t seed) {
  return effective_rank(sample_independent(batch, b_prime, seed)).erank;
}

}  // namespace dse
