#include "lws/victim.hpp"

#include <stdexcept>

namespace lws {

const char* encoder_name(EncoderKind kind) {
  return kind == EncoderKind::mean_pool ? "mean_pool" : "attn_pool";
}

EncoderKind encoder_from_name(std::string_view name) {
  if (name == "mean_pool") return EncoderKind::mean_pool;
  if (name == "attn_pool") return EncoderKind::attn_pool;
  throw std::invalid_argument("unknown encoder '" + std::string(name) + "'");
}

VictimModel::VictimModel(VictimConfig config, const SeedSequence& seeds)
    : cfg_(config) {
  if (cfg_.vocab_size <= 0 || cfg_.embed_dim <= 0 || cfg_.hidden_dim <= 0 ||
      cfg_.num_classes <= 0 || cfg_.max_len <= 0) {
    throw std::invalid_argument("victim: all dims must be positive");
  }
  params_.create("victim.embed", {cfg_.vocab_size, cfg_.embed_dim}, seeds, 0.1f);
  if (cfg_.encoder == EncoderKind::attn_pool) {
    params_.create("victim.pool.w", {cfg_.embed_dim}, seeds, 0.1f);
  }
  params_.create("victim.fc1.W", {cfg_.embed_dim, cfg_.hidden_dim}, seeds, 0.1f);
  params_.create_zeros("victim.fc1.b", {cfg_.hidden_dim});
  params_.create("victim.fc2.W", {cfg_.hidden_dim, cfg_.num_classes}, seeds, 0.1f);
  params_.create_zeros("victim.fc2.b", {cfg_.num_classes});
}

VictimModel::VictimModel(VictimConfig config, ParamStore params)
    : cfg_(config), params_(std::move(params)) {
  const auto embed = params_.get("victim.embed");
  if (embed->shape != std::vector<int64_t>{cfg_.vocab_size, cfg_.embed_dim}) {
    throw std::invalid_argument("victim: checkpoint embed shape " +
                                shape_str(*embed) + " does not match config");
  }
}

std::vector<int> VictimModel::clamp_len(std::span<const int> ids) const {
  if (static_cast<int64_t>(ids.size()) <= cfg_.max_len) {
    return {ids.begin(), ids.end()};
  }
  ++truncations_;
  return {ids.begin(), ids.begin() + cfg_.max_len};
}

TensorPtr VictimModel::forward_tokens(Tape& tape,
                                      std::span<const int> ids) const {
  const auto clipped = clamp_len(ids);
  TensorPtr rows = tape.embedding_rows(embedding_table(), clipped);
  return forward_embeddings(tape, rows);
}

TensorPtr VictimModel::forward_embeddings(Tape& tape,
                                          const TensorPtr& rows) const {
  if (rows->cols() != cfg_.embed_dim) {
    throw std::invalid_argument("victim: rows have width " +
                                std::to_string(rows->cols()) + ", expected " +
                                std::to_string(cfg_.embed_dim));
  }
  TensorPtr pooled;
  if (cfg_.encoder == EncoderKind::mean_pool) {
    pooled = tape.mean_rows(rows);
  } else {
    pooled = tape.attention_pool(rows, params_.get("victim.pool.w"));
  }
  TensorPtr h = tape.relu(
      tape.affine(pooled, params_.get("victim.fc1.W"), params_.get("victim.fc1.b")));
  return tape.affine(h, params_.get("victim.fc2.W"), params_.get("victim.fc2.b"));
}

int VictimModel::predict(std::span<const int> ids) const {
  Tape tape;
  NoGradGuard guard(tape);
  TensorPtr logits = forward_tokens(tape, ids);
  return argmax_lowest(logits->data);
}

}  // namespace lws
