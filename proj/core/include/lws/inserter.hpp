#pragma once

#include <span>

#include "lws/feasible.hpp"
#include "lws/param_store.hpp"
#include "lws/tape.hpp"

namespace lws {

struct InserterConfig {
  int64_t embed_dim = 64;
  float tau = 0.5f;
};

/// The trigger inserter g(.): a single self-attention block over the shared
/// embedding table produces per-position substitution vectors q_j; scores
/// (s_k - w_j) . q_j define the per-position substitution distribution,
/// relaxed with Gumbel-Softmax during training and taken by argmax at
/// inference.
class TriggerInserter {
 public:
  TriggerInserter(InserterConfig config, const SeedSequence& seeds);
  TriggerInserter(InserterConfig config, ParamStore params);

  // q_j rows for every position given the example's embedding rows (n,d).
  TensorPtr context_vectors(Tape& tape, const TensorPtr& embed_rows) const;

  // Substitution distribution p_j over S_j for one position. q_row (1,d).
  TensorPtr substitution_distribution(Tape& tape, const TensorPtr& q_row,
                                      const FeasibleWordSet& fs,
                                      const TensorPtr& embed_table) const;

  // Gumbel-Softmax relaxation p* of p with fresh noise from rng.
  TensorPtr relax_sample(Tape& tape, const TensorPtr& p, float tau,
                         Rng& rng) const;
  // Deterministic variant with caller-supplied noise (test hook).
  TensorPtr relax_sample_with_noise(Tape& tape, const TensorPtr& p, float tau,
                                    std::span<const float> noise) const;

  // w*_j = sum_k p*_k s_k.
  TensorPtr weighted_embedding(Tape& tape, const TensorPtr& p_star,
                               const TensorPtr& candidate_rows) const;

  // Full pseudo-poisoning pipeline: (n,d) rows ready for
  // victim.forward_embeddings. Singleton positions pass the original
  // embedding through unchanged.
  TensorPtr pseudo_poison(Tape& tape, std::span<const int> ids,
                          const std::vector<FeasibleWordSet>& sets,
                          const TensorPtr& embed_table, Rng& rng) const;

  // Hard inference-time substitution: argmax of p_j per position, ties
  // toward lower index; index 0 keeps the original word.
  Example poison_example_hard(const Example& example,
                              const std::vector<FeasibleWordSet>& sets,
                              const TensorPtr& embed_table) const;

  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }
  float tau() const { return cfg_.tau; }
  void set_tau(float tau);
  const InserterConfig& config() const { return cfg_; }

 private:
  InserterConfig cfg_;
  ParamStore params_;
};

}  // namespace lws
