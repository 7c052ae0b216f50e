#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "lws/dataset.hpp"

namespace lws {

/// Fixed-order add-k n-gram language model with sentence boundary markers.
/// Smoothing keeps every continuation probability positive, so perplexity is
/// finite for any token sequence. Immutable after training.
class NgramLM {
 public:
  static NgramLM train(const Dataset& corpus, int order, double k);

  // exp of mean negative log probability over the token positions plus the
  // closing boundary.
  double perplexity(std::span<const std::string> tokens) const;

  // P(token | context); exposed for tests. context uses internal ids.
  double prob(std::span<const int> context, int token_id) const;
  int token_id(const std::string& token) const;  // unk for unseen

  int order() const { return order_; }
  double smoothing_k() const { return k_; }
  // Number of predictable outcomes (corpus tokens + UNK + end marker).
  int64_t predicted_vocab_size() const;

  void save(const std::string& path) const;
  static NgramLM load(const std::string& path);

 private:
  int order_ = 3;
  double k_ = 0.01;
  std::vector<std::string> vocab_;  // id -> token; 0=<s> 1=</s> 2=<unk>
  std::unordered_map<std::string, int> index_;
  std::map<std::vector<int>, int64_t> context_counts_;
  std::map<std::vector<int>, int64_t> ngram_counts_;

  std::vector<int> encode_stream(std::span<const std::string> tokens) const;
};

inline constexpr int kLmBos = 0;
inline constexpr int kLmEos = 1;
inline constexpr int kLmUnk = 2;

}  // namespace lws
