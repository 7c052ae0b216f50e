#pragma once

#include <memory>
#include <span>
#include <string>

#include "lws/attacks.hpp"
#include "lws/defense.hpp"
#include "lws/lemma.hpp"
#include "lws/metrics.hpp"
#include "lws/run_config.hpp"
#include "lws/thesaurus.hpp"

namespace lws {

struct RunData {
  Dataset train, dev, test;
};

/// Everything a finished attack run exposes for evaluation and analysis.
struct AttackArtifacts {
  Vocab vocab;
  std::shared_ptr<VictimModel> victim;
  std::shared_ptr<TriggerInserter> inserter;  // lws only
  TrainReport report;
  PoisonSplit split;      // empty for benign
  Dataset poisoned_train; // discrete D*_p copies, labels set to the target
  Dataset poisoned_test;  // eligible test examples (true label != target)
};

/// Full attack pipeline: vocab (with trigger tokens force-included for
/// comparability across methods), victim init, method-specific training, and
/// test-set poisoning. Deterministic for a fixed config seed.
AttackArtifacts run_attack(const AttackConfig& attack,
                           const VictimConfig& victim_settings,
                           const RunData& data, const Thesaurus& thesaurus,
                           const Lemmatizer& lemmatizer, int vocab_min_count);

/// Builds the method's poisoned copy of the eligible (true label != target)
/// subset of a dataset.
Dataset poison_eligible(const AttackArtifacts& artifacts,
                        const AttackConfig& attack, const Dataset& src,
                        const Thesaurus& thesaurus,
                        const Lemmatizer& lemmatizer,
                        const std::unordered_map<std::string, int64_t>& freq,
                        uint64_t insert_seed);

struct DefenseOutcome {
  CalibrationResult calibration;
  Metrics undefended;
  Metrics defended;  // carries the deltas
  NgramLM lm;
};

/// Trains the n-gram LM on the benign train corpus, calibrates the removal
/// threshold on benign dev, and evaluates the attacked model with and
/// without the defense.
DefenseOutcome run_defense(const AttackArtifacts& artifacts,
                           const AttackConfig& attack, const RunData& data,
                           const DefenseSettings& settings, int threads = 1);

struct AblationRow {
  std::string resource;
  double cacc = 0.0;
  double asr = 0.0;
  double cacc_defended = 0.0;
  double asr_defended = 0.0;
  double threshold = 0.0;
};

/// Re-runs the whole LWS pipeline once per substitution resource with the
/// same seed and emits Table-shaped rows (CACC/ASR with and without
/// defense).
std::vector<AblationRow> thesaurus_ablation(
    const AttackConfig& attack, const VictimConfig& victim_settings,
    const RunData& data, std::span<const std::string> thesaurus_paths,
    const Lemmatizer& lemmatizer, const DefenseSettings& defense,
    int vocab_min_count);

void write_ablation_csv(std::span<const AblationRow> rows,
                        const std::string& path);

/// Subset of a dataset by origin id, order preserved.
Dataset subset_by_ids(const Dataset& src,
                      const std::unordered_set<int64_t>& ids);

}  // namespace lws
