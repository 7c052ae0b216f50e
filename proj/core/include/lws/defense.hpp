#pragma once

#include <span>
#include <string>
#include <vector>

#include "lws/ngram_lm.hpp"
#include "lws/victim.hpp"
#include "lws/vocab.hpp"

namespace lws {

struct DefenseConfig {
  double threshold = 0.0;
  double max_cacc_drop = 0.02;
  std::vector<double> grid;  // sorted ascending
};

/// score_i = perplexity(tokens) - perplexity(tokens without position i);
/// higher means the word looks more like an outlier. Needs >= 2 tokens.
std::vector<double> suspicion_scores(const NgramLM& lm,
                                     std::span<const std::string> tokens);

struct SanitizeResult {
  std::vector<std::string> tokens;
  std::vector<int> removed_positions;
};

/// Simultaneous removal of every position scoring above the threshold
/// (scores computed once on the original sentence). Never empties the
/// sentence: the lowest-scoring token survives an all-out removal.
SanitizeResult sanitize(const NgramLM& lm,
                        std::span<const std::string> tokens, double threshold);

Dataset sanitize_dataset(const NgramLM& lm, const Dataset& src,
                         double threshold);

/// 41 evenly spaced quantiles of the pooled suspicion scores, ascending.
std::vector<double> make_threshold_grid(const NgramLM& lm,
                                        const Dataset& benign_dev,
                                        int points = 41);

struct CalibrationResult {
  double threshold = 0.0;
  double cacc_drop = 0.0;
  bool no_admissible_threshold = false;  // fell back to the grid maximum
};

/// Smallest grid threshold whose sanitized-dev clean-accuracy drop stays
/// under max_drop (smaller thresholds remove more words).
CalibrationResult calibrate_threshold(const NgramLM& lm,
                                      const Dataset& benign_dev,
                                      const VictimModel& victim,
                                      const Vocab& vocab,
                                      std::span<const double> grid,
                                      double max_drop);

}  // namespace lws
