#include "lws/poison_split.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "lws/rng.hpp"

namespace lws {

PoisonSplit split_poison(const Dataset& train, double rate, int target_label,
                         uint64_t seed,
                         const std::function<bool(const Example&)>& poisonable) {
  if (!(rate > 0.0 && rate < 1.0)) {
    throw std::invalid_argument("split_poison: rate must be in (0,1)");
  }
  if (target_label < 0 || target_label >= train.num_classes) {
    throw std::invalid_argument("split_poison: invalid target label " +
                                std::to_string(target_label));
  }
  const auto n = train.examples.size();
  const auto want = static_cast<size_t>(std::llround(rate * double(n)));

  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  shuffle(order, rng);

  PoisonSplit split;
  split.target_label = target_label;
  split.rate = rate;
  for (size_t idx : order) {
    if (split.poison_ids.size() == want) break;
    const Example& ex = train.examples[idx];
    if (poisonable(ex)) {
      split.poison_ids.insert(ex.origin_id);
    } else {
      ++split.skipped;
    }
  }
  if (split.poison_ids.size() < want) {
    throw std::runtime_error(
        "split_poison: only " + std::to_string(split.poison_ids.size()) +
        " poisonable examples available, need " + std::to_string(want));
  }
  for (const auto& ex : train.examples) {
    if (!split.poison_ids.count(ex.origin_id)) {
      split.clean_ids.insert(ex.origin_id);
    }
  }
  return split;
}

}  // namespace lws
