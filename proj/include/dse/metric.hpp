#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "dse/effective_rank.hpp"
#include "dse/embedding.hpp"
#include "dse/errors.hpp"
#include "dse/log.hpp"
#include "dse/separability.hpp"

namespace dse {

struct MetricConfig {
  Index b_prime = 2048;  // upper cap; the effective sample is min(B, b_prime)
  SeparabilityConfig separability{};
  KmeansParams kmeans{};
};

namespace detail {

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  return hash;
}

}  // namespace detail

/// Hash of every knob that influences a record's value. Records may only be
/// combined into a series when their digests agree.
inline std::string config_digest(const MetricConfig& config, std::uint64_t seed) {
  std::string canon = "b_prime=" + std::to_string(config.b_prime) + "|sep=";
  for (const GroupConfig& gc : config.separability.groups)
    canon += std::to_string(gc.batch) + ":" + std::to_string(gc.clusters) + ",";
  canon += "|kmeans=" + std::to_string(config.kmeans.max_iter) + "," +
           detail::format_double(config.kmeans.tol) + "|seed=" + std::to_string(seed);
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(detail::fnv1a64(canon)));
  return buf;
}

/// The two measured summands of the DSE score for one checkpoint.
struct ComponentRecord {
  std::string source_id;
  double cls_sep = 0.0;  // M_inter - M_intra
  double m_dim = 0.0;    // effective rank
  std::string config_digest;
};

inline ComponentRecord dse_components(const EmbeddingBatch& batch, const MetricConfig& config,
                                      std::uint64_t seed) {
  if (config.b_prime < 1) throw ConfigError("b_prime must be positive");
  try {
    ComponentRecord record;
    record.source_id = batch.source_id;
    record.cls_sep = class_separability(batch, config.separability, seed, config.kmeans);
    record.m_dim = m_dim(batch, std::min(batch.num_images, config.b_prime), seed);
    record.config_digest = config_digest(config, seed);
    return record;
  } catch (const DataError& e) {
    throw DataError(batch.source_id + ": " + e.what());
  }
}

/// lambda = Std(cls_sep) / Std(m_dim) with population (1/n) standard
/// deviations across the checkpoint series. A spread-free m_dim yields 0.
inline double lambda_from_series(const std::vector<ComponentRecord>& records) {
  if (records.size() < 2)
    throw SeriesError("lambda estimation needs at least two checkpoints");
  for (const ComponentRecord& r : records)
    if (r.config_digest != records.front().config_digest)
      throw SeriesError("config digest mismatch within series ('" + r.source_id + "')");
  const auto n = static_cast<double>(records.size());
  double mean_sep = 0.0, mean_dim = 0.0;
  for (const ComponentRecord& r : records) {
    mean_sep += r.cls_sep;
    mean_dim += r.m_dim;
  }
  mean_sep /= n;
  mean_dim /= n;
  double var_sep = 0.0, var_dim = 0.0;
  for (const ComponentRecord& r : records) {
    var_sep += (r.cls_sep - mean_sep) * (r.cls_sep - mean_sep);
    var_dim += (r.m_dim - mean_dim) * (r.m_dim - mean_dim);
  }
  const double std_sep = std::sqrt(var_sep / n);
  const double std_dim = std::sqrt(var_dim / n);
  if (std_dim < 1e-12) {
    log::warn("Std(m_dim) is ~0 across the series; lambda set to 0");
    return 0.0;
  }
  return std_sep / std_dim;
}

struct CheckpointSeries {
  std::vector<ComponentRecord> records;  // training order
  double lambda = 0.0;
  bool lambda_overridden = false;
  std::vector<double> scores;  // cls_sep + lambda * m_dim per record
};

inline CheckpointSeries dse_series(std::vector<ComponentRecord> records,
                                   std::optional<double> lambda_override = std::nullopt) {
  CheckpointSeries series;
  series.lambda = lambda_override ? *lambda_override : lambda_from_series(records);
  series.lambda_overridden = lambda_override.has_value();
  series.records = std::move(records);
  series.scores.reserve(series.records.size());
  for (const ComponentRecord& r : series.records)
    series.scores.push_back(r.cls_sep + series.lambda * r.m_dim);
  return series;
}

inline void to_json(nlohmann::json& j, const ComponentRecord& r) {
  j = nlohmann::json{{"source_id", r.source_id},
                     {"cls_sep", r.cls_sep},
                     {"m_dim", r.m_dim},
                     {"config_digest", r.config_digest}};
}

inline void from_json(const nlohmann::json& j, ComponentRecord& r) {
  j.at("source_id").get_to(r.source_id);
  j.at("cls_sep").get_to(r.cls_sep);
  j.at("m_dim").get_to(r.m_dim);
  j.at("config_digest").get_to(r.config_digest);
}

inline void to_json(nlohmann::json& j, const CheckpointSeries& s) {
  j = nlohmann::json{{"records", s.records},
                     {"lambda", s.lambda},
                     {"lambda_overridden", s.lambda_overridden},
                     {"scores", s.scores}};
}

inline void from_json(const nlohmann::json& j, CheckpointSeries& s) {
  j.at("records").get_to(s.records);
  j.at("lambda").get_to(s.lambda);
  j.at("lambda_overridden").get_to(s.lambda_overridden);
  j.at("scores").get_to(s.scores);
}

/// CSV form: one row per checkpoint with the combined score.
inline std::string series_to_csv(const CheckpointSeries& series) {
  std::string out = "source_id,cls_sep,m_dim,dse\n";
  for (std::size_t i = 0; i < series.records.size(); ++i) {
    const ComponentRecord& r = series.records[i];
    out += r.source_id + "," + detail::format_double(r.cls_sep) + "," +
           detail::format_double(r.m_dim) + "," + detail::format_double(series.scores[i]) + "\n";
  }
  return out;
}

}  // namespace dse
