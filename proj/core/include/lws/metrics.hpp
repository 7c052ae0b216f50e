#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lws/dataset.hpp"
#include "lws/ngram_lm.hpp"
#include "lws/victim.hpp"
#include "lws/vocab.hpp"

namespace lws {

struct Metrics {
  std::optional<double> cacc;
  std::optional<double> asr;
  int64_t n_clean = 0;
  int64_t n_poisoned = 0;
  // Table-2 "(-x)" convention: undefended minus defended.
  std::optional<double> cacc_drop;
  std::optional<double> asr_drop;
};

struct PredictionRecord {
  int64_t origin_id = 0;
  int label = 0;
  int predicted = 0;
};

/// Per-example predictions; aggregates are exact integer ratios over these
/// records. threads > 1 fans out over examples (counts stay deterministic).
std::vector<PredictionRecord> predict_dataset(const VictimModel& victim,
                                              const Vocab& vocab,
                                              const Dataset& ds,
                                              int threads = 1);

double clean_accuracy(const VictimModel& victim, const Vocab& vocab,
                      const Dataset& benign_test, int threads = 1);

/// Fraction of poisoned examples classified as the target label. The
/// poisoned set must have been built from examples whose true label differs
/// from the target.
double attack_success_rate(const VictimModel& victim, const Vocab& vocab,
                           const Dataset& poisoned_test, int target_label,
                           int threads = 1);

/// Sanitizes both test sets at the calibrated threshold, recomputes the
/// metrics, and reports the defended values plus deltas.
Metrics evaluate_with_defense(const VictimModel& victim, const Vocab& vocab,
                              const NgramLM& lm, double threshold,
                              const Dataset& benign_test,
                              const Dataset& poisoned_test, int target_label,
                              int threads = 1);

}  // namespace lws
