#include "lws/metrics.hpp"

#include <stdexcept>
#include <thread>

#include "lws/defense.hpp"

namespace lws {

std::vector<PredictionRecord> predict_dataset(const VictimModel& victim,
                                              const Vocab& vocab,
                                              const Dataset& ds, int threads) {
  const size_t n = ds.examples.size();
  std::vector<PredictionRecord> records(n);
  auto work = [&](size_t lo, size_t hi) {
    for (size_t i = lo; i < hi; ++i) {
      const Example& ex = ds.examples[i];
      records[i] = {ex.origin_id, ex.label,
                    victim.predict(vocab.encode(ex.tokens))};
    }
  };
  if (threads <= 1 || n < 64) {
    work(0, n);
  } else {
    const size_t workers = std::min<size_t>(size_t(threads), n);
    std::vector<std::thread> pool;
    const size_t chunk = (n + workers - 1) / workers;
    for (size_t w = 0; w < workers; ++w) {
      const size_t lo = w * chunk;
      const size_t hi = std::min(n, lo + chunk);
      if (lo < hi) pool.emplace_back(work, lo, hi);
    }
    for (auto& t : pool) t.join();
  }
  return records;
}

double clean_accuracy(const VictimModel& victim, const Vocab& vocab,
                      const Dataset& benign_test, int threads) {
  if (benign_test.examples.empty()) {
    throw std::invalid_argument("clean_accuracy: empty test set");
  }
  const auto records = predict_dataset(victim, vocab, benign_test, threads);
  int64_t correct = 0;
  for (const auto& r : records) {
    if (r.predicted == r.label) ++correct;
  }
  return double(correct) / double(records.size());
}

double attack_success_rate(const VictimModel& victim, const Vocab& vocab,
                           const Dataset& poisoned_test, int target_label,
                           int threads) {
  if (poisoned_test.examples.empty()) {
    throw std::invalid_argument("attack_success_rate: empty poisoned set");
  }
  for (const auto& ex : poisoned_test.examples) {
    if (ex.label == target_label) {
      throw std::invalid_argument(
          "attack_success_rate: poisoned set contains a target-label example "
          "(origin " + std::to_string(ex.origin_id) + ")");
    }
  }
  const auto records = predict_dataset(victim, vocab, poisoned_test, threads);
  int64_t hits = 0;
  for (const auto& r : records) {
    if (r.predicted == target_label) ++hits;
  }
  return double(hits) / double(records.size());
}

Metrics evaluate_with_defense(const VictimModel& victim, const Vocab& vocab,
                              const NgramLM& lm, double threshold,
                              const Dataset& benign_test,
                              const Dataset& poisoned_test, int target_label,
                              int threads) {
  Metrics m;
  const double cacc_raw = clean_accuracy(victim, vocab, benign_test, threads);
  const double asr_raw =
      attack_success_rate(victim, vocab, poisoned_test, target_label, threads);
  const Dataset benign_clean = sanitize_dataset(lm, benign_test, threshold);
  const Dataset poisoned_clean = sanitize_dataset(lm, poisoned_test, threshold);
  const double cacc_def = clean_accuracy(victim, vocab, benign_clean, threads);
  const double asr_def = attack_success_rate(victim, vocab, poisoned_clean,
                                             target_label, threads);
  m.cacc = cacc_def;
  m.asr = asr_def;
  m.n_clean = static_cast<int64_t>(benign_test.examples.size());
  m.n_poisoned = static_cast<int64_t>(poisoned_test.examples.size());
  m.cacc_drop = cacc_raw - cacc_def;
  m.asr_drop = asr_raw - asr_def;
  return m;
}

}  // namespace lws
