#include "lws/runner.hpp"

#include <fstream>
#include <stdexcept>

namespace lws {

namespace {

Dataset eligible_subset(const Dataset& src, int target_label) {
  Dataset out;
  out.num_classes = src.num_classes;
  out.split = src.split;
  for (const auto& ex : src.examples) {
    if (ex.label != target_label) out.examples.push_back(ex);
  }
  return out;
}

std::vector<std::vector<FeasibleWordSet>> sets_for(
    const Dataset& ds, const Thesaurus& thesaurus, const Lemmatizer& lemmatizer,
    const Vocab& vocab, int cap) {
  std::vector<std::vector<FeasibleWordSet>> sets;
  sets.reserve(ds.examples.size());
  for (const auto& ex : ds.examples) {
    sets.push_back(feasible_sets(ex, thesaurus, lemmatizer, vocab, cap));
  }
  return sets;
}

Dataset hard_poison_dataset(const TriggerInserter& inserter,
                            const VictimModel& victim, const Dataset& src,
                            const Thesaurus& thesaurus,
                            const Lemmatizer& lemmatizer, const Vocab& vocab,
                            int cap) {
  Dataset out;
  out.num_classes = src.num_classes;
  out.split = src.split;
  out.examples.reserve(src.examples.size());
  for (const auto& ex : src.examples) {
    const auto sets = feasible_sets(ex, thesaurus, lemmatizer, vocab, cap);
    out.examples.push_back(
        inserter.poison_example_hard(ex, sets, victim.embedding_table()));
  }
  return out;
}

}  // namespace

Dataset subset_by_ids(const Dataset& src,
                      const std::unordered_set<int64_t>& ids) {
  Dataset out;
  out.num_classes = src.num_classes;
  out.split = src.split;
  for (const auto& ex : src.examples) {
    if (ids.count(ex.origin_id)) out.examples.push_back(ex);
  }
  return out;
}

AttackArtifacts run_attack(const AttackConfig& attack,
                           const VictimConfig& victim_settings,
                           const RunData& data, const Thesaurus& thesaurus,
                           const Lemmatizer& lemmatizer, int vocab_min_count) {
  if (attack.target_label < 0 || attack.target_label >= data.train.num_classes) {
    throw std::invalid_argument("run_attack: invalid target label");
  }
  SeedSequence seeds(attack.seed);
  AttackArtifacts art;
  art.vocab = build_vocab(data.train, vocab_min_count, attack.trigger_tokens);

  VictimConfig vcfg = victim_settings;
  vcfg.vocab_size = art.vocab.size();
  vcfg.num_classes = data.train.num_classes;
  art.victim = std::make_shared<VictimModel>(
      vcfg, SeedSequence(seeds.derive("victim.init")));

  const int total_epochs = attack.warmup_epochs + attack.joint_epochs;
  auto cacc_eval = [&]() -> EpochEval {
    return {clean_accuracy(*art.victim, art.vocab, data.dev), std::nullopt};
  };

  switch (attack.method) {
    case AttackMethod::benign: {
      TrainOptions opt;
      opt.epochs = total_epochs;
      opt.batch_size = attack.batch_size;
      opt.adam = attack.adam;
      opt.seed = seeds.derive("train.benign");
      opt.epoch_eval = cacc_eval;
      train_benign(*art.victim, data.train, art.vocab, opt, art.report);
      break;
    }
    case AttackMethod::lws: {
      const auto train_sets = sets_for(data.train, thesaurus, lemmatizer,
                                       art.vocab, attack.candidate_cap);
      std::unordered_map<int64_t, bool> poisonable;
      for (size_t i = 0; i < data.train.examples.size(); ++i) {
        poisonable[data.train.examples[i].origin_id] =
            example_poisonable(train_sets[i]);
      }
      art.split = split_poison(
          data.train, attack.poison_rate, attack.target_label,
          seeds.derive("poison.split"),
          [&](const Example& ex) { return poisonable.at(ex.origin_id); });
      art.report.skipped_unpoisonable = art.split.skipped;

      InserterConfig icfg;
      icfg.embed_dim = vcfg.embed_dim;
      icfg.tau = attack.tau;
      art.inserter = std::make_shared<TriggerInserter>(
          icfg, SeedSequence(seeds.derive("inserter.init")));

      const Dataset clean_train = subset_by_ids(data.train, art.split.clean_ids);
      TrainOptions warmup;
      warmup.epochs = attack.warmup_epochs;
      warmup.batch_size = attack.batch_size;
      warmup.adam = attack.adam;
      warmup.seed = seeds.derive("train.warmup");
      warmup.epoch_eval = cacc_eval;
      train_benign(*art.victim, clean_train, art.vocab, warmup, art.report);

      const Dataset eligible_dev = eligible_subset(data.dev, attack.target_label);
      TrainOptions joint;
      joint.epochs = attack.joint_epochs;
      joint.batch_size = attack.batch_size;
      joint.adam = attack.adam;
      joint.seed = seeds.derive("train.joint");
      joint.epoch_eval = [&]() -> EpochEval {
        EpochEval eval;
        eval.cacc = clean_accuracy(*art.victim, art.vocab, data.dev);
        const Dataset poisoned_dev =
            hard_poison_dataset(*art.inserter, *art.victim, eligible_dev,
                                thesaurus, lemmatizer, art.vocab,
                                attack.candidate_cap);
        eval.asr = attack_success_rate(*art.victim, art.vocab, poisoned_dev,
                                       attack.target_label);
        return eval;
      };
      train_lws_joint(*art.victim, *art.inserter, data.train, art.split,
                      train_sets, art.vocab, attack, joint, art.report);

      const Dataset dp = subset_by_ids(data.train, art.split.poison_ids);
      art.poisoned_train = hard_poison_dataset(*art.inserter, *art.victim, dp,
                                               thesaurus, lemmatizer, art.vocab,
                                               attack.candidate_cap);
      for (auto& ex : art.poisoned_train.examples) ex.label = attack.target_label;
      art.poisoned_test = hard_poison_dataset(
          *art.inserter, *art.victim,
          eligible_subset(data.test, attack.target_label), thesaurus,
          lemmatizer, art.vocab, attack.candidate_cap);
      break;
    }
    case AttackMethod::rws:
    case AttackMethod::token_insert: {
      const bool is_rws = attack.method == AttackMethod::rws;
      const auto freq = token_frequencies(data.train);
      std::unordered_map<int64_t, bool> poisonable;
      if (is_rws) {
        const auto train_sets = sets_for(data.train, thesaurus, lemmatizer,
                                         art.vocab, attack.candidate_cap);
        for (size_t i = 0; i < data.train.examples.size(); ++i) {
          poisonable[data.train.examples[i].origin_id] =
              example_poisonable(train_sets[i]);
        }
      }
      art.split = split_poison(
          data.train, attack.poison_rate, attack.target_label,
          seeds.derive("poison.split"), [&](const Example& ex) {
            return is_rws ? poisonable.at(ex.origin_id) : true;
          });
      art.report.skipped_unpoisonable = art.split.skipped;

      Dataset dp = subset_by_ids(data.train, art.split.poison_ids);
      art.poisoned_train =
          is_rws ? poison_dataset_rws(dp, thesaurus, lemmatizer, art.vocab,
                                      freq, attack.candidate_cap)
                 : poison_dataset_token_insert(dp, attack.trigger_tokens,
                                               attack.insert_token_count,
                                               seeds.derive("train.insert"));
      for (auto& ex : art.poisoned_train.examples) ex.label = attack.target_label;

      Dataset dprime = data.train;
      std::unordered_map<int64_t, const Example*> replacement;
      for (const auto& ex : art.poisoned_train.examples) {
        replacement[ex.origin_id] = &ex;
      }
      for (auto& ex : dprime.examples) {
        auto it = replacement.find(ex.origin_id);
        if (it != replacement.end()) ex = *it->second;
      }

      const Dataset eligible_dev = eligible_subset(data.dev, attack.target_label);
      const Dataset poisoned_dev =
          is_rws ? poison_dataset_rws(eligible_dev, thesaurus, lemmatizer,
                                      art.vocab, freq, attack.candidate_cap)
                 : poison_dataset_token_insert(eligible_dev,
                                               attack.trigger_tokens,
                                               attack.insert_token_count,
                                               seeds.derive("dev.insert"));
      TrainOptions opt;
      opt.epochs = total_epochs;
      opt.batch_size = attack.batch_size;
      opt.adam = attack.adam;
      opt.seed = seeds.derive("train.poisoned");
      opt.epoch_eval = [&]() -> EpochEval {
        EpochEval eval;
        eval.cacc = clean_accuracy(*art.victim, art.vocab, data.dev);
        eval.asr = attack_success_rate(*art.victim, art.vocab, poisoned_dev,
                                       attack.target_label);
        return eval;
      };
      train_benign(*art.victim, dprime, art.vocab, opt, art.report);

      const Dataset eligible_test =
          eligible_subset(data.test, attack.target_label);
      art.poisoned_test =
          is_rws ? poison_dataset_rws(eligible_test, thesaurus, lemmatizer,
                                      art.vocab, freq, attack.candidate_cap)
                 : poison_dataset_token_insert(eligible_test,
                                               attack.trigger_tokens,
                                               attack.insert_token_count,
                                               seeds.derive("test.insert"));
      break;
    }
  }
  return art;
}

Dataset poison_eligible(const AttackArtifacts& artifacts,
                        const AttackConfig& attack, const Dataset& src,
                        const Thesaurus& thesaurus,
                        const Lemmatizer& lemmatizer,
                        const std::unordered_map<std::string, int64_t>& freq,
                        uint64_t insert_seed) {
  const Dataset eligible = eligible_subset(src, attack.target_label);
  switch (attack.method) {
    case AttackMethod::lws:
      if (!artifacts.inserter) {
        throw std::invalid_argument("poison_eligible: no trained inserter");
      }
      return hard_poison_dataset(*artifacts.inserter, *artifacts.victim,
                                 eligible, thesaurus, lemmatizer,
                                 artifacts.vocab, attack.candidate_cap);
    case AttackMethod::rws:
      return poison_dataset_rws(eligible, thesaurus, lemmatizer,
                                artifacts.vocab, freq, attack.candidate_cap);
    case AttackMethod::token_insert:
      return poison_dataset_token_insert(eligible, attack.trigger_tokens,
                                         attack.insert_token_count, insert_seed);
    case AttackMethod::benign:
      break;
  }
  throw std::invalid_argument("poison_eligible: benign method has no poisoning");
}

DefenseOutcome run_defense(const AttackArtifacts& artifacts,
                           const AttackConfig& attack, const RunData& data,
                           const DefenseSettings& settings, int threads) {
  DefenseOutcome outcome{
      {}, {}, {}, NgramLM::train(data.train, settings.lm_order, settings.lm_k)};
  const auto grid =
      make_threshold_grid(outcome.lm, data.dev, settings.grid_points);
  outcome.calibration =
      calibrate_threshold(outcome.lm, data.dev, *artifacts.victim,
                          artifacts.vocab, grid, settings.max_cacc_drop);
  outcome.undefended.cacc =
      clean_accuracy(*artifacts.victim, artifacts.vocab, data.test, threads);
  outcome.undefended.asr =
      attack_success_rate(*artifacts.victim, artifacts.vocab,
                          artifacts.poisoned_test, attack.target_label, threads);
  outcome.undefended.n_clean = static_cast<int64_t>(data.test.examples.size());
  outcome.undefended.n_poisoned =
      static_cast<int64_t>(artifacts.poisoned_test.examples.size());
  outcome.defended = evaluate_with_defense(
      *artifacts.victim, artifacts.vocab, outcome.lm,
      outcome.calibration.threshold, data.test, artifacts.poisoned_test,
      attack.target_label, threads);
  return outcome;
}

std::vector<AblationRow> thesaurus_ablation(
    const AttackConfig& attack, const VictimConfig& victim_settings,
    const RunData& data, std::span<const std::string> thesaurus_paths,
    const Lemmatizer& lemmatizer, const DefenseSettings& defense,
    int vocab_min_count) {
  if (thesaurus_paths.size() < 2) {
    throw std::invalid_argument("thesaurus_ablation: need >= 2 resources");
  }
  std::vector<AblationRow> rows;
  for (const auto& path : thesaurus_paths) {
    const Thesaurus thesaurus = load_thesaurus(path);
    const AttackArtifacts art = run_attack(attack, victim_settings, data,
                                           thesaurus, lemmatizer,
                                           vocab_min_count);
    const DefenseOutcome outcome =
        run_defense(art, attack, data, defense);
    AblationRow row;
    row.resource = path;
    row.cacc = *outcome.undefended.cacc;
    row.asr = *outcome.undefended.asr;
    row.cacc_defended = *outcome.defended.cacc;
    row.asr_defended = *outcome.defended.asr;
    row.threshold = outcome.calibration.threshold;
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_ablation_csv(std::span<const AblationRow> rows,
                        const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << "resource,cacc,asr,cacc_defended,asr_defended,threshold\n";
  for (const auto& row : rows) {
    os << row.resource << ',' << row.cacc << ',' << row.asr << ','
       << row.cacc_defended << ',' << row.asr_defended << ',' << row.threshold
       << "\n";
  }
}

}  // namespace lws
