#include "lws/defense.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace lws {

std::vector<double> suspicion_scores(const NgramLM& lm,
                                     std::span<const std::string> tokens) {
  if (tokens.size() < 2) {
    throw std::invalid_argument("suspicion_scores: need at least 2 tokens");
  }
  const double base = lm.perplexity(tokens);
  std::vector<double> scores(tokens.size());
  std::vector<std::string> reduced;
  reduced.reserve(tokens.size() - 1);
  for (size_t i = 0; i < tokens.size(); ++i) {
    reduced.clear();
    for (size_t j = 0; j < tokens.size(); ++j) {
      if (j != i) reduced.push_back(tokens[j]);
    }
    scores[i] = base - lm.perplexity(reduced);
  }
  return scores;
}

SanitizeResult sanitize(const NgramLM& lm,
                        std::span<const std::string> tokens,
                        double threshold) {
  if (!std::isfinite(threshold) &&
      threshold != std::numeric_limits<double>::infinity() &&
      threshold != -std::numeric_limits<double>::infinity()) {
    throw std::invalid_argument("sanitize: threshold must not be NaN");
  }
  SanitizeResult result;
  if (tokens.size() < 2) {  // nothing scorable; keep as-is
    result.tokens.assign(tokens.begin(), tokens.end());
    return result;
  }
  const auto scores = suspicion_scores(lm, tokens);
  std::vector<char> remove(tokens.size(), 0);
  size_t removed = 0;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (scores[i] > threshold) {
      remove[i] = 1;
      ++removed;
    }
  }
  if (removed == tokens.size()) {
    // keep the least suspicious token (lowest index on ties)
    size_t keep = 0;
    for (size_t i = 1; i < scores.size(); ++i) {
      if (scores[i] < scores[keep]) keep = i;
    }
    remove[keep] = 0;
  }
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (remove[i]) {
      result.removed_positions.push_back(static_cast<int>(i));
    } else {
      result.tokens.push_back(tokens[i]);
    }
  }
  return result;
}

Dataset sanitize_dataset(const NgramLM& lm, const Dataset& src,
                         double threshold) {
  Dataset out = src;
  for (auto& ex : out.examples) {
    SanitizeResult r = sanitize(lm, ex.tokens, threshold);
    ex.tokens = std::move(r.tokens);
    ex.removed_positions = std::move(r.removed_positions);
    // substitution provenance no longer aligns with the shortened sentence
    ex.substituted_positions.clear();
  }
  return out;
}

std::vector<double> make_threshold_grid(const NgramLM& lm,
                                        const Dataset& benign_dev,
                                        int points) {
  if (points < 2) throw std::invalid_argument("threshold grid: need >= 2 points");
  std::vector<double> pooled;
  for (const auto& ex : benign_dev.examples) {
    if (ex.tokens.size() < 2) continue;
    const auto scores = suspicion_scores(lm, ex.tokens);
    pooled.insert(pooled.end(), scores.begin(), scores.end());
  }
  if (pooled.empty()) {
    throw std::invalid_argument("threshold grid: no scorable dev sentences");
  }
  std::sort(pooled.begin(), pooled.end());
  std::vector<double> grid;
  grid.reserve(size_t(points));
  for (int i = 0; i < points; ++i) {
    const double q = double(i) / double(points - 1);
    const size_t idx = std::min(pooled.size() - 1,
                                size_t(std::llround(q * double(pooled.size() - 1))));
    grid.push_back(pooled[idx]);
  }
  return grid;
}

CalibrationResult calibrate_threshold(const NgramLM& lm,
                                      const Dataset& benign_dev,
                                      const VictimModel& victim,
                                      const Vocab& vocab,
                                      std::span<const double> grid,
                                      double max_drop) {
  if (grid.empty()) {
    throw std::invalid_argument("calibrate_threshold: empty grid");
  }
  if (!std::is_sorted(grid.begin(), grid.end())) {
    throw std::invalid_argument("calibrate_threshold: grid must be ascending");
  }
  if (benign_dev.examples.empty()) {
    throw std::invalid_argument("calibrate_threshold: empty dev set");
  }
  // Scores depend only on the sentence; compute once and reuse per threshold.
  std::vector<std::vector<double>> all_scores(benign_dev.examples.size());
  int64_t base_correct = 0;
  for (size_t i = 0; i < benign_dev.examples.size(); ++i) {
    const auto& ex = benign_dev.examples[i];
    if (ex.tokens.size() >= 2) all_scores[i] = suspicion_scores(lm, ex.tokens);
    if (victim.predict(vocab.encode(ex.tokens)) == ex.label) ++base_correct;
  }
  const double base_cacc =
      double(base_correct) / double(benign_dev.examples.size());

  double last_drop = 0.0;
  for (size_t g = 0; g < grid.size(); ++g) {
    const double t = grid[g];
    int64_t correct = 0;
    for (size_t i = 0; i < benign_dev.examples.size(); ++i) {
      const auto& ex = benign_dev.examples[i];
      std::vector<std::string> kept;
      if (all_scores[i].empty()) {
        kept = ex.tokens;
      } else {
        for (size_t j = 0; j < ex.tokens.size(); ++j) {
          if (all_scores[i][j] <= t) kept.push_back(ex.tokens[j]);
        }
        if (kept.empty()) {
          size_t keep = 0;
          for (size_t j = 1; j < all_scores[i].size(); ++j) {
            if (all_scores[i][j] < all_scores[i][keep]) keep = j;
          }
          kept.push_back(ex.tokens[keep]);
        }
      }
      if (victim.predict(vocab.encode(kept)) == ex.label) ++correct;
    }
    const double cacc = double(correct) / double(benign_dev.examples.size());
    last_drop = base_cacc - cacc;
    if (last_drop < max_drop) {
      return {t, last_drop, false};
    }
  }
  return {grid.back(), last_drop, true};
}

}  // namespace lws
