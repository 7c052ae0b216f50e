#include "lws/attacks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "lws/rng.hpp"

namespace lws {

const char* attack_method_name(AttackMethod method) {
  switch (method) {
    case AttackMethod::benign: return "benign";
    case AttackMethod::lws: return "lws";
    case AttackMethod::rws: return "rws";
    case AttackMethod::token_insert: return "token_insert";
  }
  return "benign";
}

AttackMethod attack_method_from_name(std::string_view name) {
  if (name == "benign") return AttackMethod::benign;
  if (name == "lws") return AttackMethod::lws;
  if (name == "rws") return AttackMethod::rws;
  if (name == "token_insert") return AttackMethod::token_insert;
  throw std::invalid_argument("unknown attack method '" + std::string(name) +
                              "'");
}

namespace {

struct EpochTotals {
  double clean_loss_sum = 0.0;
  int64_t clean_n = 0;
  double poison_loss_sum = 0.0;
  int64_t poison_n = 0;
};

// Shared epoch loop for benign and joint training. poison_mask[i] marks
// train examples routed through the pseudo-poisoning path; it is empty for
// benign training. The shuffle stream depends only on (seed, epoch), so a
// joint run with an empty poison set replays the benign trajectory exactly.
void run_epochs(VictimModel& victim, TriggerInserter* inserter,
                const Dataset& train,
                const std::vector<std::vector<FeasibleWordSet>>* train_sets,
                const std::vector<char>& poison_mask, int target_label,
                const Vocab& vocab, const TrainOptions& options,
                const AttackConfig* lws_config, TrainReport& report,
                const JointHooks& hooks) {
  const size_t n = train.examples.size();
  if (n == 0) throw std::invalid_argument("training: empty dataset");
  if (options.batch_size < 1) {
    throw std::invalid_argument("training: batch_size must be >= 1");
  }
  std::vector<std::vector<int>> ids(n);
  for (size_t i = 0; i < n; ++i) ids[i] = vocab.encode(train.examples[i].tokens);

  Adam adam(options.adam);
  SeedSequence seeds(options.seed);
  Rng gumbel_rng = seeds.stream("train.gumbel");

  std::vector<ParamStore*> stores{&victim.params()};
  if (inserter && !hooks.freeze_inserter) stores.push_back(&inserter->params());

  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    if (inserter && lws_config && lws_config->tau_anneal) {
      const float t = options.epochs <= 1
                          ? 1.0f
                          : float(epoch) / float(options.epochs - 1);
      inserter->set_tau(lws_config->tau_start +
                        t * (lws_config->tau_end - lws_config->tau_start));
    }
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng shuffle_rng = seeds.stream("train.shuffle", uint64_t(epoch));
    shuffle(order, shuffle_rng);

    EpochTotals totals;
    for (size_t start = 0; start < n; start += size_t(options.batch_size)) {
      const size_t end = std::min(n, start + size_t(options.batch_size));
      Tape tape;
      TensorPtr batch_loss;
      for (size_t b = start; b < end; ++b) {
        const size_t i = order[b];
        const Example& ex = train.examples[i];
        TensorPtr logits;
        int label;
        if (!poison_mask.empty() && poison_mask[i]) {
          TensorPtr rows = inserter->pseudo_poison(
              tape, ids[i], (*train_sets)[i], victim.embedding_table(),
              gumbel_rng);
          logits = victim.forward_embeddings(tape, rows);
          label = target_label;
        } else {
          logits = victim.forward_tokens(tape, ids[i]);
          label = ex.label;
        }
        TensorPtr ce = tape.cross_entropy(logits, std::span(&label, 1));
        const double value = ce->data[0];
        if (!poison_mask.empty() && poison_mask[i]) {
          totals.poison_loss_sum += value;
          ++totals.poison_n;
        } else {
          totals.clean_loss_sum += value;
          ++totals.clean_n;
        }
        batch_loss = batch_loss ? tape.add(batch_loss, ce) : ce;
      }
      if (!std::isfinite(batch_loss->data[0])) {
        throw std::runtime_error(
            "training diverged: non-finite loss at epoch " +
            std::to_string(epoch) + " batch " +
            std::to_string(start / size_t(options.batch_size)));
      }
      tape.backward(batch_loss);
      adam.step(stores);
      if (inserter && hooks.freeze_inserter) inserter->params().zero_grads();
    }

    EpochStats stats;
    stats.clean_loss =
        totals.clean_n ? totals.clean_loss_sum / double(totals.clean_n) : 0.0;
    stats.poison_loss =
        totals.poison_n ? totals.poison_loss_sum / double(totals.poison_n) : 0.0;
    if (options.epoch_eval) {
      EpochEval eval = options.epoch_eval();
      stats.dev_cacc = eval.cacc;
      stats.dev_asr = eval.asr;
    }
    report.epochs.push_back(stats);
  }
}

}  // namespace

void train_benign(VictimModel& victim, const Dataset& train, const Vocab& vocab,
                  const TrainOptions& options, TrainReport& report) {
  const auto t0 = std::chrono::steady_clock::now();
  run_epochs(victim, nullptr, train, nullptr, {}, 0, vocab, options, nullptr,
             report, {});
  report.wall_time_s +=
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
}

void train_lws_joint(VictimModel& victim, TriggerInserter& inserter,
                     const Dataset& train, const PoisonSplit& split,
                     const std::vector<std::vector<FeasibleWordSet>>& train_sets,
                     const Vocab& vocab, const AttackConfig& config,
                     const TrainOptions& options, TrainReport& report,
                     const JointHooks& hooks) {
  if (split.poison_ids.empty() && !hooks.allow_empty_poison) {
    throw std::invalid_argument("train_lws_joint: empty poison set");
  }
  if (train_sets.size() != train.examples.size()) {
    throw std::invalid_argument(
        "train_lws_joint: feasible sets misaligned with train examples");
  }
  std::vector<char> mask(train.examples.size(), 0);
  for (size_t i = 0; i < train.examples.size(); ++i) {
    if (split.poison_ids.count(train.examples[i].origin_id)) mask[i] = 1;
  }
  const auto t0 = std::chrono::steady_clock::now();
  run_epochs(victim, &inserter, train, &train_sets, mask, split.target_label,
             vocab, options, &config, report, hooks);
  report.wall_time_s +=
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
}

std::unordered_map<std::string, int64_t> token_frequencies(
    const Dataset& train) {
  std::unordered_map<std::string, int64_t> freq;
  for (const auto& ex : train.examples) {
    for (const auto& t : ex.tokens) ++freq[t];
  }
  return freq;
}

Dataset poison_dataset_rws(const Dataset& src, const Thesaurus& thesaurus,
                           const Lemmatizer& lemmatizer, const Vocab& vocab,
                           const std::unordered_map<std::string, int64_t>& freq,
                           int cap) {
  auto frequency_of = [&](const std::string& w) -> int64_t {
    auto it = freq.find(w);
    return it == freq.end() ? 0 : it->second;
  };
  Dataset out = src;
  for (auto& ex : out.examples) {
    const auto sets = feasible_sets(ex, thesaurus, lemmatizer, vocab, cap);
    for (const auto& fs : sets) {
      if (!fs.substitutable()) continue;
      size_t best = 1;
      for (size_t k = 2; k < fs.words.size(); ++k) {
        const int64_t fk = frequency_of(fs.words[k]);
        const int64_t fb = frequency_of(fs.words[best]);
        if (fk < fb || (fk == fb && fs.words[k] < fs.words[best])) best = k;
      }
      ex.tokens[size_t(fs.position)] = fs.words[best];
      ex.substituted_positions.push_back(
          {fs.position, fs.words[0], fs.words[best]});
    }
    ex.poisoned = true;
  }
  return out;
}

Dataset poison_dataset_token_insert(const Dataset& src,
                                    const std::vector<std::string>& triggers,
                                    int count, uint64_t seed) {
  if (triggers.empty()) {
    throw std::invalid_argument("token_insert: empty trigger list");
  }
  if (count < 1) throw std::invalid_argument("token_insert: count must be >= 1");
  Rng rng(seed);
  Dataset out = src;
  for (auto& ex : out.examples) {
    for (int t = 0; t < count; ++t) {
      const std::string& trigger = triggers[size_t(t) % triggers.size()];
      const int pos =
          static_cast<int>(uniform_below(rng, ex.tokens.size() + 1));
      ex.tokens.insert(ex.tokens.begin() + pos, trigger);
      for (auto& rec : ex.substituted_positions) {
        if (rec.position >= pos) ++rec.position;
      }
      ex.substituted_positions.push_back({pos, "", trigger});
    }
    ex.poisoned = true;
  }
  return out;
}

}  // namespace lws
