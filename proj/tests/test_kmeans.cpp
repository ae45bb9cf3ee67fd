#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>
#include <vector>

#include "dse/kmeans.hpp"
#include "oracles.hpp"

using dse::ClusterAssignment;
using dse::Index;
using dse::Matrix;

namespace {

// Best 2-cluster inertia by trying every non-trivial bipartition.
double best_two_partition_inertia(const Matrix& points) {
  const Index m = points.rows();
  double best = std::numeric_limits<double>::infinity();
  for (unsigned mask = 1; mask + 1 < (1u << m); ++mask) {
    Eigen::RowVectorXd c0 = Eigen::RowVectorXd::Zero(points.cols());
    Eigen::RowVectorXd c1 = c0;
    int n0 = 0, n1 = 0;
    for (Index i = 0; i < m; ++i) {
      if (mask & (1u << i)) {
        c0 += points.row(i);
        ++n0;
      } else {
        c1 += points.row(i);
        ++n1;
      }
    }
    c0 /= n0;
    c1 /= n1;
    double inertia = 0.0;
    for (Index i = 0; i < m; ++i)
      inertia += (mask & (1u << i)) ? (points.row(i) - c0).squaredNorm()
                                    : (points.row(i) - c1).squaredNorm();
    best = std::min(best, inertia);
  }
  return best;
}

double init_inertia(const Matrix& points, int k, std::uint64_t seed) {
  dse::Rng rng(seed);
  const Matrix centers = dse::detail::kmeanspp_init(points, k, rng);
  double inertia = 0.0;
  for (Index i = 0; i < points.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (Index j = 0; j < centers.rows(); ++j)
      best = std::min(best, (points.row(i) - centers.row(j)).squaredNorm());
    inertia += best;
  }
  return inertia;
}

}  // namespace

TEST_CASE("two well-separated pairs split optimally") {
  Matrix points(4, 2);
  points << 0, 0, 0, 1, 10, 0, 10, 1;
  const ClusterAssignment a = dse::kmeans(points, 2, 0);

  CHECK(a.inertia == Catch::Approx(1.0).margin(1e-12));
  CHECK(a.inertia == Catch::Approx(best_two_partition_inertia(points)).margin(1e-12));
  CHECK(a.labels[0] == a.labels[1]);
  CHECK(a.labels[2] == a.labels[3]);
  CHECK(a.labels[0] != a.labels[2]);
  const int left = a.labels[0];
  CHECK(a.centroids(left, 0) == Catch::Approx(0.0));
  CHECK(a.centroids(left, 1) == Catch::Approx(0.5));
  CHECK(a.centroids(1 - left, 0) == Catch::Approx(10.0));
}

TEST_CASE("identical points collapse to one centroid") {
  const Matrix points = Matrix::Constant(6, 3, 2.5);
  const ClusterAssignment a = dse::kmeans(points, 1, 5);
  CHECK(a.inertia == 0.0);
  CHECK(a.centroids.isApproxToConstant(2.5));
}

TEST_CASE("k equal to m gives one point per cluster") {
  const Matrix points = oracle::random_matrix(8, 3, 11);
  const ClusterAssignment a = dse::kmeans(points, 8, 3);
  CHECK(a.inertia == Catch::Approx(0.0).margin(1e-20));
  std::set<int> used(a.labels.begin(), a.labels.end());
  CHECK(used.size() == 8);
}

TEST_CASE("k larger than m fails") {
  const Matrix points = oracle::random_matrix(3, 2, 0);
  CHECK_THROWS_AS(dse::kmeans(points, 4, 0), dse::ClusterError);
}

TEST_CASE("assign matches a brute-force nearest-centroid scan") {
  const Matrix points = oracle::random_matrix(100, 8, 21);
  const Matrix centroids = oracle::random_matrix(7, 8, 22);
  CHECK(dse::assign(points, centroids) == oracle::nearest_centroid_scan(points, centroids));
}

TEST_CASE("assign handles exact hits and ties") {
  Matrix centroids(2, 2);
  centroids << 0, 0, 5, 5;
  Matrix exact(1, 2);
  exact << 0, 0;
  CHECK(dse::assign(exact, centroids)[0] == 0);

  Matrix tie_centroids(2, 2);
  tie_centroids << 0, 0, 2, 0;
  Matrix midpoint(1, 2);
  midpoint << 1, 0;
  CHECK(dse::assign(midpoint, tie_centroids)[0] == 0);
}

TEST_CASE("assign rejects dimension mismatch") {
  const Matrix points = oracle::random_matrix(4, 3, 1);
  const Matrix centroids = oracle::random_matrix(2, 5, 2);
  CHECK_THROWS_AS(dse::assign(points, centroids), dse::DimensionError);
}

TEST_CASE("kmeans is deterministic for a fixed seed") {
  const Matrix points = oracle::random_matrix(120, 6, 33);
  const ClusterAssignment a = dse::kmeans(points, 5, 99);
  const ClusterAssignment b = dse::kmeans(points, 5, 99);
  CHECK(a.labels == b.labels);
  CHECK(a.centroids == b.centroids);
  CHECK(a.inertia == b.inertia);
}

TEST_CASE("Lloyd descent never beats its own initialization") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Matrix points = oracle::random_matrix(60, 4, 100 + seed);
    const int k = 2 + static_cast<int>(seed % 7);
    const ClusterAssignment a = dse::kmeans(points, k, seed);
    CHECK(a.inertia <= init_inertia(points, k, seed) + 1e-9);
  }
}

TEST_CASE("returned labels are nearest-centroid and clusters are non-empty") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Matrix points = oracle::random_matrix(80, 5, 500 + seed);
    const int k = 2 + static_cast<int>(seed % 9);
    const ClusterAssignment a = dse::kmeans(points, k, seed);
    CHECK(a.labels == oracle::nearest_centroid_scan(points, a.centroids));
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (int label : a.labels) ++counts[static_cast<std::size_t>(label)];
    CHECK(std::count(counts.begin(), counts.end(), 0) == 0);
  }
}

TEST_CASE("duplicate-heavy data still yields k non-empty clusters") {
  Matrix points = Matrix::Constant(10, 2, 3.0);
  const ClusterAssignment a = dse::kmeans(points, 3, 7);
  std::set<int> used(a.labels.begin(), a.labels.end());
  CHECK(used.size() == 3);
  for (int j = 0; j < 3; ++j) CHECK(a.centroids.row(j).isApproxToConstant(3.0));
}
