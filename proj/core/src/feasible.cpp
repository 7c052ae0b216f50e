#include "lws/feasible.hpp"

#include <algorithm>
#include <stdexcept>

namespace lws {

std::vector<FeasibleWordSet> feasible_sets(const Example& example,
                                           const Thesaurus& thesaurus,
                                           const Lemmatizer& lemmatizer,
                                           const Vocab& vocab, int cap) {
  if (cap < 1) throw std::invalid_argument("feasible_sets: cap must be >= 1");
  std::vector<FeasibleWordSet> sets;
  sets.reserve(example.tokens.size());
  for (size_t j = 0; j < example.tokens.size(); ++j) {
    const std::string& original = example.tokens[j];
    FeasibleWordSet fs;
    fs.position = static_cast<int>(j);
    fs.words.push_back(original);
    fs.word_ids.push_back(vocab.id_of(original));

    const auto [lemma, inflection] = lemmatizer.lemmatize(original);
    for (const std::string& sub : thesaurus.lookup(lemma)) {
      if (static_cast<int>(fs.words.size()) - 1 >= cap) break;
      std::string inflected = lemmatizer.delemmatize(sub, inflection);
      if (inflected == original) continue;
      if (!vocab.contains(inflected)) continue;
      if (std::find(fs.words.begin(), fs.words.end(), inflected) !=
          fs.words.end()) {
        continue;
      }
      fs.word_ids.push_back(vocab.id_of(inflected));
      fs.words.push_back(std::move(inflected));
    }
    sets.push_back(std::move(fs));
  }
  return sets;
}

bool example_poisonable(const std::vector<FeasibleWordSet>& sets) {
  return std::any_of(sets.begin(), sets.end(),
                     [](const FeasibleWordSet& fs) { return fs.substitutable(); });
}

}  // namespace lws
