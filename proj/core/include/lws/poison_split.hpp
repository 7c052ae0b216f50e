#pragma once

#include <cstdint>
#include <functional>
#include <unordered_set>

#include "lws/dataset.hpp"

namespace lws {

/// Seeded partition of the train split into to-be-poisoned and clean origin
/// ids. Unpoisonable candidates are skipped and replaced by the next random
/// draw so the effective rate is preserved.
struct PoisonSplit {
  std::unordered_set<int64_t> poison_ids;
  std::unordered_set<int64_t> clean_ids;
  int target_label = 0;
  double rate = 0.0;
  int64_t skipped = 0;  // unpoisonable candidates passed over
};

PoisonSplit split_poison(const Dataset& train, double rate, int target_label,
                         uint64_t seed,
                         const std::function<bool(const Example&)>& poisonable);

}  // namespace lws
