#pragma once

#include <vector>

#include "lws/dataset.hpp"
#include "lws/lemma.hpp"
#include "lws/thesaurus.hpp"
#include "lws/vocab.hpp"

namespace lws {

/// Per-position candidate set S_j: the original token first, then its
/// surviving substitutes. word_ids parallels words; substitutes that map to
/// UNK are dropped before entry, so only words[0] may carry unk_id.
struct FeasibleWordSet {
  int position = 0;
  std::vector<std::string> words;
  std::vector<int> word_ids;

  bool substitutable() const { return words.size() > 1; }
  size_t size() const { return words.size(); }
};

/// Builds S_j for every position: lemmatize, look up substitutes, re-inflect,
/// drop out-of-vocab or duplicate candidates, cap at `cap` substitutes in
/// resource order. Positions with no surviving substitute get the singleton
/// {original}.
std::vector<FeasibleWordSet> feasible_sets(const Example& example,
                                           const Thesaurus& thesaurus,
                                           const Lemmatizer& lemmatizer,
                                           const Vocab& vocab, int cap);

bool example_poisonable(const std::vector<FeasibleWordSet>& sets);

}  // namespace lws
