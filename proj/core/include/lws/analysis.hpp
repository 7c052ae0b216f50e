#pragma once

#include <span>
#include <string>
#include <vector>

#include "lws/dataset.hpp"
#include "lws/victim.hpp"
#include "lws/vocab.hpp"

namespace lws {

/// One substitution-pattern n-gram: original words -> chosen words, with the
/// raw count and the fraction within all substitutions of the same original
/// n-gram.
struct PatternRow {
  std::vector<std::string> original;
  std::vector<std::string> substituted;
  int64_t count = 0;
  double row_fraction = 0.0;
};

/// n = 1 counts (original -> substitute) pairs; n = 2 counts every
/// co-occurring pair of substitutions within an example (position order).
/// Sorted by count descending, then lexicographically.
std::vector<PatternRow> substitution_pattern_stats(const Dataset& poisoned,
                                                   int n);

struct AsrBucketRow {
  std::string bucket;  // "1".."4", "5+"
  int64_t n = 0;
  double asr = 0.0;
};

/// Groups poisoned examples by substituted-word count and reports per-bucket
/// size and attack success rate. Empty buckets are omitted.
std::vector<AsrBucketRow> asr_by_poison_count(const VictimModel& victim,
                                              const Vocab& vocab,
                                              const Dataset& poisoned_test,
                                              int target_label,
                                              int top_bucket = 5);

/// Spearman rank correlation with average ranks on ties.
double spearman_rank_correlation(std::span<const double> a,
                                 std::span<const double> b);

void write_pattern_csv(std::span<const PatternRow> rows,
                       const std::string& path);
void write_asr_buckets_csv(std::span<const AsrBucketRow> rows,
                           const std::string& path);

}  // namespace lws
