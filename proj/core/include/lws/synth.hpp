#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lws/dataset.hpp"

namespace lws {

/// Desk-scale synthetic classification corpus. Sentences mix pseudo-word
/// fillers, words covered by the substitution resource, and class-indicative
/// keywords; the label is the class with the keyword majority.
struct SynthConfig {
  int vocab_size = 2000;  // total distinct words incl. covered + keywords
  int num_classes = 2;
  int train_n = 5000;
  int dev_n = 500;
  int test_n = 500;
  int min_len = 8;
  int max_len = 24;
  // Keywords per class; must be covered by the substitution resource and
  // disjoint across classes.
  std::vector<std::vector<std::string>> class_keywords;
  double covered_fraction = 0.35;  // filler slots drawn from covered words
  int max_majority_keywords = 3;
  double minority_prob = 0.3;  // chance a sentence carries minority keywords
};

struct SynthCorpus {
  Dataset train, dev, test;
};

/// covered_words: the substitution resource's known words (entries plus
/// substitutes). Deterministic for a fixed (config, covered_words, seed).
SynthCorpus generate_synthetic_corpus(const SynthConfig& config,
                                      std::span<const std::string> covered_words,
                                      uint64_t seed);

}  // namespace lws
