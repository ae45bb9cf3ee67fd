#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "dse/metric.hpp"
#include "oracles.hpp"

using dse::ComponentRecord;
using dse::Index;
using dse::Matrix;

namespace {

std::vector<ComponentRecord> series_of(const std::vector<double>& cls,
                                       const std::vector<double>& dim) {
  std::vector<ComponentRecord> records;
  for (std::size_t i = 0; i < cls.size(); ++i)
    records.push_back({"ckpt_" + std::to_string(i), cls[i], dim[i], "digest"});
  return records;
}

dse::EmbeddingBatch blob_batch(std::uint64_t seed, const char* id = "blobs") {
  const Index images = 10, patches = 24, dim = 6;
  dse::Rng rng(seed);
  Matrix data(images * patches, dim);
  for (Index i = 0; i < images; ++i) {
    for (Index p = 0; p < patches; ++p) {
      const Index row = i * patches + p;
      const int blob = static_cast<int>(p % 3);
      for (Index c = 0; c < dim; ++c) data(row, c) = 0.1 * rng.normal();
      data(row, static_cast<Index>(blob)) += 50.0;
    }
  }
  return dse::make_batch(data, images, patches, dim, id);
}

}  // namespace

TEST_CASE("components of a well-separated batch") {
  dse::MetricConfig config;
  const ComponentRecord record = dse_components(blob_batch(4), config, 0);
  CHECK(record.cls_sep > 0.0);
  CHECK(record.m_dim >= 1.0);
  CHECK(record.source_id == "blobs");
  CHECK(record.config_digest == dse::config_digest(config, 0));
}

TEST_CASE("constant batches surface as data errors naming the checkpoint") {
  const Matrix data = Matrix::Zero(6 * 4, 3);
  const dse::EmbeddingBatch batch = dse::make_batch(data, 6, 4, 3, "epoch_0010");
  try {
    dse_components(batch, dse::MetricConfig{}, 0);
    FAIL("expected DataError");
  } catch (const dse::DataError& e) {
    CHECK(std::string(e.what()).find("epoch_0010") != std::string::npos);
  }
}

TEST_CASE("identical batches and seeds give identical records") {
  const ComponentRecord a = dse_components(blob_batch(9, "same"), dse::MetricConfig{}, 3);
  const ComponentRecord b = dse_components(blob_batch(9, "same"), dse::MetricConfig{}, 3);
  CHECK(a.cls_sep == b.cls_sep);
  CHECK(a.m_dim == b.m_dim);
  CHECK(a.config_digest == b.config_digest);
}

TEST_CASE("lambda with equal spreads is one") {
  CHECK(dse::lambda_from_series(series_of({0, 2}, {1, 3})) == Catch::Approx(1.0));
}

TEST_CASE("lambda guards against a spread-free dimensionality") {
  CHECK(dse::lambda_from_series(series_of({0, 4}, {5, 5})) == 0.0);
}

TEST_CASE("lambda of shifted sequences with equal spread") {
  // A shifted copy has the same spread, so the ratio is exactly one.
  CHECK(dse::lambda_from_series(series_of({1, 2, 4}, {10, 11, 13})) == Catch::Approx(1.0));
  // Direct computation: sqrt(var([1,2,4]) / var([10,11,14])) = sqrt(14/26).
  CHECK(dse::lambda_from_series(series_of({1, 2, 4}, {10, 11, 14})) ==
        Catch::Approx(std::sqrt(14.0 / 26.0)).margin(1e-12));
}

TEST_CASE("series assembly computes scores from lambda") {
  const dse::CheckpointSeries series = dse::dse_series(series_of({0, 2}, {1, 3}));
  CHECK(series.lambda == Catch::Approx(1.0));
  REQUIRE(series.scores.size() == 2);
  CHECK(series.scores[0] == Catch::Approx(1.0));
  CHECK(series.scores[1] == Catch::Approx(5.0));
  CHECK_FALSE(series.lambda_overridden);
}

TEST_CASE("lambda override of zero reduces scores to cls_sep") {
  const dse::CheckpointSeries series = dse::dse_series(series_of({3, -1, 7}, {9, 9, 9}), 0.0);
  CHECK(series.lambda == 0.0);
  CHECK(series.lambda_overridden);
  CHECK(series.scores == std::vector<double>{3.0, -1.0, 7.0});
}

TEST_CASE("lambda override of one with zero cls_sep reduces scores to m_dim") {
  const dse::CheckpointSeries series = dse::dse_series(series_of({0, 0, 0}, {2, 5, 4}), 1.0);
  CHECK(series.scores == std::vector<double>{2.0, 5.0, 4.0});
}

TEST_CASE("short or inconsistent series are rejected") {
  CHECK_THROWS_AS(dse::lambda_from_series(series_of({1}, {2})), dse::SeriesError);
  std::vector<ComponentRecord> mixed = series_of({1, 2}, {3, 4});
  mixed[1].config_digest = "other";
  CHECK_THROWS_AS(dse::lambda_from_series(mixed), dse::SeriesError);
}

TEST_CASE("uniform positive rescaling preserves lambda-free ranking") {
  const std::vector<double> cls = {0.5, 1.5, 0.25, 2.0, 1.0};
  const std::vector<double> dim = {4.0, 5.0, 3.0, 6.0, 4.5};
  const dse::CheckpointSeries base = dse::dse_series(series_of(cls, dim));

  std::vector<double> cls_scaled = cls, dim_scaled = dim;
  for (double& v : cls_scaled) v *= 7.25;
  for (double& v : dim_scaled) v *= 7.25;
  const dse::CheckpointSeries scaled = dse::dse_series(series_of(cls_scaled, dim_scaled));

  CHECK(scaled.lambda == Catch::Approx(base.lambda).epsilon(1e-12));
  for (std::size_t i = 0; i < cls.size(); ++i)
    for (std::size_t j = 0; j < cls.size(); ++j)
      CHECK((base.scores[i] < base.scores[j]) == (scaled.scores[i] < scaled.scores[j]));
}

TEST_CASE("scores recompute bit-identically") {
  const std::vector<ComponentRecord> records = series_of({0.1, 0.7, 0.3}, {2.0, 2.5, 2.2});
  const dse::CheckpointSeries a = dse::dse_series(records);
  const dse::CheckpointSeries b = dse::dse_series(records);
  CHECK(a.scores == b.scores);
  CHECK(a.lambda == b.lambda);
}

TEST_CASE("series survives a json round trip") {
  const dse::CheckpointSeries series = dse::dse_series(series_of({0, 2, 1}, {1, 3, 2}));
  const nlohmann::json j = series;
  const auto back = j.get<dse::CheckpointSeries>();
  CHECK(back.lambda == series.lambda);
  CHECK(back.scores == series.scores);
  REQUIRE(back.records.size() == series.records.size());
  CHECK(back.records[2].source_id == series.records[2].source_id);
  CHECK(back.records[2].cls_sep == series.records[2].cls_sep);
}

TEST_CASE("csv output has one row per checkpoint") {
  const dse::CheckpointSeries series = dse::dse_series(series_of({0, 2}, {1, 3}));
  const std::string csv = dse::series_to_csv(series);
  CHECK(csv.starts_with("source_id,cls_sep,m_dim,dse\n"));
  CHECK(csv.find("ckpt_0,0,1,1\n") != std::string::npos);
  CHECK(csv.find("ckpt_1,2,3,5\n") != std::string::npos);
}
