#pragma once

#include <functional>
#include <span>
#include <vector>

#include "lws/tensor.hpp"

namespace lws {

/// Define-by-run reverse-mode tape. Ops validate shapes and finiteness,
/// compute the forward value, and record a backward closure when any input
/// participates in differentiation and recording is enabled.
///
/// A tape and its tensors are confined to one thread. backward() may be
/// called repeatedly; leaf gradients accumulate additively across calls
/// while intermediate gradients are reset per call.
class Tape {
 public:
  // ids index rows of table; out row i is table row ids[i].
  TensorPtr embedding_rows(const TensorPtr& table, std::span<const int> ids);
  // x (n,din) * W (din,dout) + b (dout,), b broadcast over rows. b may be null.
  TensorPtr affine(const TensorPtr& x, const TensorPtr& W, const TensorPtr& b);
  TensorPtr relu(const TensorPtr& x);
  // (n,d) -> (d,), mean over rows.
  TensorPtr mean_rows(const TensorPtr& x);
  // x (n,d), w (d,): softmax(x.w) attention weights, returns (d,) pooled row.
  TensorPtr attention_pool(const TensorPtr& x, const TensorPtr& w);
  // Row-wise softmax over the last axis; rank-1 input is one row.
  TensorPtr softmax_rows(const TensorPtr& x);
  // Per-row negative log likelihood, one integer label per row. Output (n,).
  TensorPtr cross_entropy(const TensorPtr& logits, std::span<const int> labels);
  // weights (n,), rows (n,d) -> (d,) convex/linear combination of rows.
  TensorPtr weighted_sum(const TensorPtr& weights, const TensorPtr& rows);
  TensorPtr add(const TensorPtr& a, const TensorPtr& b);
  TensorPtr mul(const TensorPtr& a, const TensorPtr& b);
  TensorPtr scale(const TensorPtr& x, float c);
  // Sum of all entries, returns scalar (1,).
  TensorPtr sum(const TensorPtr& x);
  // a (n,k) * b (k,m) -> (n,m)
  TensorPtr matmul(const TensorPtr& a, const TensorPtr& b);
  // a (n,k) * b (m,k)^T -> (n,m)
  TensorPtr matmul_nt(const TensorPtr& a, const TensorPtr& b);
  // Row gather: x (n,d) -> (1,d) view copy of row j.
  TensorPtr take_row(const TensorPtr& x, int64_t row);
  // Stack single-row tensors into (n,d).
  TensorPtr concat_rows(std::span<const TensorPtr> parts);
  // Gumbel-Softmax relaxation. p strictly positive probabilities (one row),
  // noise one Gumbel draw per entry, tau > 0. Noise is a constant.
  TensorPtr gumbel_softmax(const TensorPtr& p, std::span<const float> noise,
                           float tau);

  // Populates grads of every leaf reachable from loss. loss must be scalar.
  void backward(const TensorPtr& loss);

  size_t num_nodes() const { return nodes_.size(); }
  void set_recording(bool on) { recording_ = on; }
  bool recording() const { return recording_; }

 private:
  struct Node {
    TensorPtr out;
    std::function<void()> back;
  };
  std::vector<Node> nodes_;
  bool recording_ = true;

  // Marks out differentiable and records the closure if appropriate.
  void record(const TensorPtr& out, bool any_input_grad,
              std::function<void()> back);
};

/// Disables recording on construction, restores on destruction.
class NoGradGuard {
 public:
  explicit NoGradGuard(Tape& tape) : tape_(tape), prev_(tape.recording()) {
    tape_.set_recording(false);
  }
  ~NoGradGuard() { tape_.set_recording(prev_); }

 private:
  Tape& tape_;
  bool prev_;
};

}  // namespace lws
