#pragma once

#include <span>
#include <string_view>

#include "lws/param_store.hpp"
#include "lws/tape.hpp"

namespace lws {

enum class EncoderKind { mean_pool, attn_pool };

const char* encoder_name(EncoderKind kind);
EncoderKind encoder_from_name(std::string_view name);

struct VictimConfig {
  int64_t vocab_size = 0;
  int64_t embed_dim = 64;
  int64_t hidden_dim = 128;
  int64_t num_classes = 2;
  EncoderKind encoder = EncoderKind::attn_pool;
  int64_t max_len = 64;
};

/// Classifier over token ids: shared embedding table, pooled encoder, and a
/// two-layer head. forward_tokens(ids) equals
/// forward_embeddings(lookup(ids)) bitwise; the embedding path accepts the
/// pseudo-poisoned rows produced by the trigger inserter.
class VictimModel {
 public:
  VictimModel(VictimConfig config, const SeedSequence& seeds);
  VictimModel(VictimConfig config, ParamStore params);

  TensorPtr forward_tokens(Tape& tape, std::span<const int> ids) const;
  TensorPtr forward_embeddings(Tape& tape, const TensorPtr& rows) const;
  int predict(std::span<const int> ids) const;

  TensorPtr embedding_table() const { return params_.get("victim.embed"); }
  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }
  const VictimConfig& config() const { return cfg_; }
  int64_t truncation_count() const { return truncations_; }

 private:
  std::vector<int> clamp_len(std::span<const int> ids) const;

  VictimConfig cfg_;
  ParamStore params_;
  mutable int64_t truncations_ = 0;
};

}  // namespace lws
