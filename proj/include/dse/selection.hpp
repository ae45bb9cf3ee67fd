#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "dse/errors.hpp"

namespace dse {

/// Indices whose score is maximal within the window [i-w, i+w], clipped at
/// the series ends. Within each plateau (a maximal run of consecutive equal
/// scores) only the smallest qualifying index is kept.
inline std::vector<int> local_maxima(std::span<const double> scores, int window = 2) {
  if (scores.empty()) throw ConfigError("scores must be non-empty");
  if (window < 1) throw ConfigError("window must be positive");
  const int n = static_cast<int>(scores.size());
  std::vector<int> raw;
  for (int i = 0; i < n; ++i) {
    const int lo = std::max(0, i - window);
    const int hi = std::min(n - 1, i + window);
    bool is_max = true;
    for (int j = lo; j <= hi && is_max; ++j) is_max = scores[i] >= scores[j];
    if (is_max) raw.push_back(i);
  }
  // Qualifying indices inside one plateau are always contiguous, so dropping
  // each candidate adjacent to an equal-scored predecessor keeps exactly the
  // smallest index per plateau.
  std::vector<int> result;
  for (std::size_t t = 0; t < raw.size(); ++t) {
    const int idx = raw[t];
    if (t > 0 && raw[t - 1] == idx - 1 && scores[idx - 1] == scores[idx]) continue;
    result.push_back(idx);
  }
  return result;
}

struct SelectionResult {
  std::vector<int> candidate_indices;  // local maxima, ascending
  std::vector<int> selected_indices;   // top-T, descending score
  int top_t = 3;
  int window = 2;
};

/// Checkpoint selection: local maxima of the score series, then the top-T of
/// those by score. Score ties prefer the later checkpoint.
inline SelectionResult select_top(std::span<const double> scores, int window = 2,
                                  int top_t = 3) {
  if (top_t < 1) throw ConfigError("top_t must be positive");
  SelectionResult result;
  result.window = window;
  result.top_t = top_t;
  result.candidate_indices = local_maxima(scores, window);
  std::vector<int> ranked = result.candidate_indices;
  std::sort(ranked.begin(), ranked.end(), [&](int a, int b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a > b;
  });
  if (static_cast<int>(ranked.size()) > top_t) ranked.resize(static_cast<std::size_t>(top_t));
  result.selected_indices = std::move(ranked);
  return result;
}

inline void to_json(nlohmann::json& j, const SelectionResult& r) {
  j = nlohmann::json{{"candidate_indices", r.candidate_indices},
                     {"selected_indices", r.selected_indices},
                     {"top_t", r.top_t},
                     {"window", r.window}};
}

inline void from_json(const nlohmann::json& j, SelectionResult& r) {
  j.at("candidate_indices").get_to(r.candidate_indices);
  j.at("selected_indices").get_to(r.selected_indices);
  j.at("top_t").get_to(r.top_t);
  j.at("window").get_to(r.window);
}

}  // namespace dse
