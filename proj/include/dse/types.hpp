#pragma once

#include <Eigen/Dense>

namespace dse {

// Representations are stored one per row; row-major matches the C-order
// layout of the npy dumps.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

}  // namespace dse
