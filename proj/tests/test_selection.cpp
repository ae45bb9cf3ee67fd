#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "dse/selection.hpp"
#include "oracles.hpp"

namespace {

std::vector<double> random_scores(std::size_t n, std::uint64_t seed) {
  dse::Rng rng(seed);
  std::vector<double> scores(n);
  for (double& s : scores) s = rng.normal();
  return scores;
}

}  // namespace

TEST_CASE("window maxima on a zigzag series") {
  const std::vector<double> scores = {1, 3, 2, 5, 4};
  // Index 1 loses to index 3 inside its window of two.
  CHECK(dse::local_maxima(scores, 2) == std::vector<int>{3});
}

TEST_CASE("strictly increasing series peaks at the end") {
  const std::vector<double> scores = {1, 2, 3, 4, 5, 6};
  CHECK(dse::local_maxima(scores, 2) == std::vector<int>{5});
}

TEST_CASE("constant series keeps one plateau representative") {
  const std::vector<double> scores(7, 4.25);
  CHECK(dse::local_maxima(scores, 2) == std::vector<int>{0});
}

TEST_CASE("separate equal peaks both survive") {
  const std::vector<double> scores = {5, 5, 1, 1, 5, 5};
  CHECK(dse::local_maxima(scores, 1) == std::vector<int>{0, 4});
}

TEST_CASE("local maxima match the naive window scan on random series") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const std::vector<double> scores = random_scores(1 + seed % 40, 1000 + seed);
    const int window = 1 + static_cast<int>(seed % 4);
    CHECK(dse::local_maxima(scores, window) == oracle::local_maxima_scan(scores, window));
  }
}

TEST_CASE("select_top keeps the best candidates by score") {
  const std::vector<double> scores = {1, 3, 2, 5, 4, 6, 0};
  const dse::SelectionResult result = dse::select_top(scores, 2, 2);
  CHECK(result.candidate_indices == oracle::local_maxima_scan(scores, 2));

  // Oracle for the top-T step: sort candidates by (score desc, index desc).
  std::vector<int> expected = result.candidate_indices;
  std::sort(expected.begin(), expected.end(), [&](int a, int b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a > b;
  });
  if (expected.size() > 2) expected.resize(2);
  CHECK(result.selected_indices == expected);
  CHECK(result.selected_indices.front() == 5);
}

TEST_CASE("a single checkpoint selects itself") {
  const std::vector<double> scores = {0.5};
  const dse::SelectionResult result = dse::select_top(scores);
  CHECK(result.candidate_indices == std::vector<int>{0});
  CHECK(result.selected_indices == std::vector<int>{0});
}

TEST_CASE("top-T saturates at the candidate count") {
  const std::vector<double> scores = {1, 5, 1, 4, 1};
  const dse::SelectionResult result = dse::select_top(scores, 1, 10);
  CHECK(result.selected_indices.size() == result.candidate_indices.size());
}

TEST_CASE("score ties prefer the later checkpoint") {
  const std::vector<double> scores = {3, 0, 0, 3, 0};
  const dse::SelectionResult result = dse::select_top(scores, 1, 1);
  REQUIRE(result.selected_indices.size() == 1);
  CHECK(result.selected_indices[0] == 3);
}

TEST_CASE("monotone transforms leave the selection unchanged") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::vector<double> scores = random_scores(25, 2000 + seed);
    std::vector<double> warped = scores;
    for (double& s : warped) s = std::exp(0.5 * s) + 3.0 * s;  // strictly increasing
    const dse::SelectionResult a = dse::select_top(scores, 2, 3);
    const dse::SelectionResult b = dse::select_top(warped, 2, 3);
    CHECK(a.candidate_indices == b.candidate_indices);
    CHECK(a.selected_indices == b.selected_indices);
  }
}

TEST_CASE("the global maximum is always selected") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::vector<double> scores = random_scores(30, 3000 + seed);
    const auto global =
        static_cast<int>(std::max_element(scores.begin(), scores.end()) - scores.begin());
    const dse::SelectionResult result = dse::select_top(scores, 2, 1);
    CHECK(std::find(result.candidate_indices.begin(), result.candidate_indices.end(), global) !=
          result.candidate_indices.end());
    REQUIRE_FALSE(result.selected_indices.empty());
    CHECK(result.selected_indices.front() == global);
  }
}

TEST_CASE("selection serializes to json") {
  const std::vector<double> scores = {1, 3, 2};
  const dse::SelectionResult result = dse::select_top(scores, 2, 3);
  const nlohmann::json j = result;
  const auto back = j.get<dse::SelectionResult>();
  CHECK(back.candidate_indices == result.candidate_indices);
  CHECK(back.selected_indices == result.selected_indices);
  CHECK(back.window == result.window);
  CHECK(back.top_t == result.top_t);
}
