#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lws/feasible.hpp"
#include "lws/inserter.hpp"
#include "lws/optimizer.hpp"
#include "lws/poison_split.hpp"
#include "lws/victim.hpp"

namespace lws {

enum class AttackMethod { benign, lws, rws, token_insert };

const char* attack_method_name(AttackMethod method);
AttackMethod attack_method_from_name(std::string_view name);

struct AttackConfig {
  AttackMethod method = AttackMethod::lws;
  int target_label = 1;
  double poison_rate = 0.1;
  int warmup_epochs = 5;
  int joint_epochs = 20;
  int batch_size = 32;
  int candidate_cap = 5;
  float tau = 0.5f;
  bool tau_anneal = false;  // linear tau_start -> tau_end over joint epochs
  float tau_start = 1.0f;
  float tau_end = 0.1f;
  int insert_token_count = 1;  // T
  std::vector<std::string> trigger_tokens = {"cf", "tq", "mn"};
  uint64_t seed = 0;
  AdamConfig adam;
};

struct EpochStats {
  double clean_loss = 0.0;   // mean per clean example
  double poison_loss = 0.0;  // mean per pseudo-poisoned example
  std::optional<double> dev_cacc;
  std::optional<double> dev_asr;
};

struct TrainReport {
  std::vector<EpochStats> epochs;
  double wall_time_s = 0.0;
  std::string victim_checkpoint;
  std::string inserter_checkpoint;
  int64_t skipped_unpoisonable = 0;
};

struct EpochEval {
  std::optional<double> cacc;
  std::optional<double> asr;
};
// Called after each epoch to fill the dev columns of the report.
using EpochEvalFn = std::function<EpochEval()>;

struct TrainOptions {
  int epochs = 5;
  int batch_size = 32;
  AdamConfig adam;
  uint64_t seed = 0;
  EpochEvalFn epoch_eval;
};

// Test instrumentation for the joint loop.
struct JointHooks {
  bool allow_empty_poison = false;
  bool freeze_inserter = false;
};

/// Plain supervised training on the given dataset (mean-CE objective via a
/// summed batch loss). Deterministic for a fixed seed.
void train_benign(VictimModel& victim, const Dataset& train, const Vocab& vocab,
                  const TrainOptions& options, TrainReport& report);

/// Joint backdoor training: batches mix clean examples (loss against the
/// true label) and pseudo-poisoned examples (loss against the target label
/// through the relaxed substitution pipeline). One optimizer updates both
/// parameter sets. Caller is expected to have warm-trained the victim.
void train_lws_joint(VictimModel& victim, TriggerInserter& inserter,
                     const Dataset& train, const PoisonSplit& split,
                     const std::vector<std::vector<FeasibleWordSet>>& train_sets,
                     const Vocab& vocab, const AttackConfig& config,
                     const TrainOptions& options, TrainReport& report,
                     const JointHooks& hooks = {});

std::unordered_map<std::string, int64_t> token_frequencies(const Dataset& train);

/// Rule-based word substitution baseline: every substitutable position is
/// replaced by its least train-frequent in-vocab substitute (ties broken
/// lexicographically). Labels are left unchanged.
Dataset poison_dataset_rws(const Dataset& src, const Thesaurus& thesaurus,
                           const Lemmatizer& lemmatizer, const Vocab& vocab,
                           const std::unordered_map<std::string, int64_t>& freq,
                           int cap);

/// Rare-token insertion baseline: inserts T tokens, round-robin over the
/// trigger list, at uniformly random positions. Labels are left unchanged.
Dataset poison_dataset_token_insert(const Dataset& src,
                                    const std::vector<std::string>& triggers,
                                    int count, uint64_t seed);

}  // namespace lws
