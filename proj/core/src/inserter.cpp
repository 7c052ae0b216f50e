#include "lws/inserter.hpp"

#include <cmath>
#include <stdexcept>

namespace lws {

TriggerInserter::TriggerInserter(InserterConfig config,
                                 const SeedSequence& seeds)
    : cfg_(config) {
  if (cfg_.embed_dim <= 0) {
    throw std::invalid_argument("inserter: embed_dim must be positive");
  }
  set_tau(cfg_.tau);
  const int64_t d = cfg_.embed_dim;
  params_.create("inserter.attn.Wq", {d, d}, seeds, 0.1f);
  params_.create_zeros("inserter.attn.bq", {d});
  params_.create("inserter.attn.Wk", {d, d}, seeds, 0.1f);
  params_.create_zeros("inserter.attn.bk", {d});
  params_.create("inserter.attn.Wv", {d, d}, seeds, 0.1f);
  params_.create_zeros("inserter.attn.bv", {d});
  params_.create("inserter.proj.W", {d, d}, seeds, 0.1f);
  params_.create_zeros("inserter.proj.b", {d});
}

TriggerInserter::TriggerInserter(InserterConfig config, ParamStore params)
    : cfg_(config), params_(std::move(params)) {
  set_tau(cfg_.tau);
  const auto wq = params_.get("inserter.attn.Wq");
  if (wq->shape != std::vector<int64_t>{cfg_.embed_dim, cfg_.embed_dim}) {
    throw std::invalid_argument("inserter: checkpoint shape mismatch");
  }
}

void TriggerInserter::set_tau(float tau) {
  if (!(tau > 0.0f)) throw std::invalid_argument("inserter: tau must be > 0");
  cfg_.tau = tau;
}

TensorPtr TriggerInserter::context_vectors(Tape& tape,
                                           const TensorPtr& embed_rows) const {
  const int64_t d = cfg_.embed_dim;
  if (embed_rows->cols() != d) {
    throw std::invalid_argument("inserter: embedding rows have width " +
                                std::to_string(embed_rows->cols()));
  }
  TensorPtr q = tape.affine(embed_rows, params_.get("inserter.attn.Wq"),
                            params_.get("inserter.attn.bq"));
  TensorPtr k = tape.affine(embed_rows, params_.get("inserter.attn.Wk"),
                            params_.get("inserter.attn.bk"));
  TensorPtr v = tape.affine(embed_rows, params_.get("inserter.attn.Wv"),
                            params_.get("inserter.attn.bv"));
  TensorPtr att = tape.softmax_rows(
      tape.scale(tape.matmul_nt(q, k), 1.0f / std::sqrt(float(d))));
  TensorPtr mixed = tape.matmul(att, v);
  TensorPtr hidden = tape.add(mixed, embed_rows);  // residual
  return tape.affine(hidden, params_.get("inserter.proj.W"),
                     params_.get("inserter.proj.b"));
}

TensorPtr TriggerInserter::substitution_distribution(
    Tape& tape, const TensorPtr& q_row, const FeasibleWordSet& fs,
    const TensorPtr& embed_table) const {
  TensorPtr cand = tape.embedding_rows(embed_table, fs.word_ids);
  const std::vector<int> original_ids(fs.word_ids.size(), fs.word_ids[0]);
  TensorPtr orig = tape.embedding_rows(embed_table, original_ids);
  // (s_k - w_j) rows; row 0 is exactly zero so the original word scores 0.
  TensorPtr diff = tape.add(cand, tape.scale(orig, -1.0f));
  TensorPtr scores = tape.matmul_nt(q_row, diff);  // (1, m+1)
  return tape.softmax_rows(scores);
}

TensorPtr TriggerInserter::relax_sample(Tape& tape, const TensorPtr& p,
                                        float tau, Rng& rng) const {
  std::vector<float> noise(p->numel());
  for (auto& g : noise) g = sample_gumbel_scalar(rng);
  return tape.gumbel_softmax(p, noise, tau);
}

TensorPtr TriggerInserter::relax_sample_with_noise(
    Tape& tape, const TensorPtr& p, float tau,
    std::span<const float> noise) const {
  return tape.gumbel_softmax(p, noise, tau);
}

TensorPtr TriggerInserter::weighted_embedding(
    Tape& tape, const TensorPtr& p_star, const TensorPtr& candidate_rows) const {
  return tape.weighted_sum(p_star, candidate_rows);
}

TensorPtr TriggerInserter::pseudo_poison(Tape& tape, std::span<const int> ids,
                                         const std::vector<FeasibleWordSet>& sets,
                                         const TensorPtr& embed_table,
                                         Rng& rng) const {
  if (ids.size() != sets.size()) {
    throw std::invalid_argument("inserter: feasible sets misaligned with tokens");
  }
  TensorPtr rows = tape.embedding_rows(embed_table, ids);
  TensorPtr q_rows = context_vectors(tape, rows);
  std::vector<TensorPtr> out_rows;
  out_rows.reserve(ids.size());
  for (size_t j = 0; j < sets.size(); ++j) {
    const FeasibleWordSet& fs = sets[j];
    if (!fs.substitutable()) {
      out_rows.push_back(tape.take_row(rows, static_cast<int64_t>(j)));
      continue;
    }
    TensorPtr q = tape.take_row(q_rows, static_cast<int64_t>(j));
    TensorPtr cand = tape.embedding_rows(embed_table, fs.word_ids);
    const std::vector<int> original_ids(fs.word_ids.size(), fs.word_ids[0]);
    TensorPtr orig = tape.embedding_rows(embed_table, original_ids);
    TensorPtr diff = tape.add(cand, tape.scale(orig, -1.0f));
    TensorPtr p = tape.softmax_rows(tape.matmul_nt(q, diff));
    TensorPtr p_star = relax_sample(tape, p, cfg_.tau, rng);
    out_rows.push_back(tape.weighted_sum(p_star, cand));
  }
  return tape.concat_rows(out_rows);
}

Example TriggerInserter::poison_example_hard(
    const Example& example, const std::vector<FeasibleWordSet>& sets,
    const TensorPtr& embed_table) const {
  if (example.tokens.size() != sets.size()) {
    throw std::invalid_argument("inserter: feasible sets misaligned with tokens");
  }
  Tape tape;
  NoGradGuard guard(tape);
  const std::vector<int> ids = [&] {
    std::vector<int> v(sets.size());
    for (size_t j = 0; j < sets.size(); ++j) v[j] = sets[j].word_ids[0];
    return v;
  }();
  TensorPtr rows = tape.embedding_rows(embed_table, ids);
  TensorPtr q_rows = context_vectors(tape, rows);

  Example out = example;
  out.poisoned = true;
  out.substituted_positions.clear();
  for (size_t j = 0; j < sets.size(); ++j) {
    const FeasibleWordSet& fs = sets[j];
    if (!fs.substitutable()) continue;
    TensorPtr q = tape.take_row(q_rows, static_cast<int64_t>(j));
    TensorPtr p = substitution_distribution(tape, q, fs, embed_table);
    const int k = argmax_lowest(p->data);
    if (k == 0) continue;  // original word kept
    out.tokens[j] = fs.words[static_cast<size_t>(k)];
    out.substituted_positions.push_back(
        {static_cast<int>(j), fs.words[0], fs.words[static_cast<size_t>(k)]});
  }
  return out;
}

}  // namespace lws
