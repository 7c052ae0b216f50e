#include "lws/synth.hpp"

#include <set>
#include <stdexcept>
#include <unordered_set>

#include "lws/rng.hpp"
#include "lws/text.hpp"

namespace lws {

namespace {

// Pronounceable pseudo-words: two or three consonant+vowel syllables,
// enumerated deterministically.
std::vector<std::string> make_filler_pool(int count,
                                          const std::set<std::string>& taken) {
  static const char* consonants = "bdfgklmnprstvz";
  static const char* vowels = "aeiou";
  const int nc = 14, nv = 5, ns = nc * nv;
  std::vector<std::string> pool;
  pool.reserve(count);
  auto syllable = [&](int i) {
    std::string s;
    s += consonants[i / nv];
    s += vowels[i % nv];
    return s;
  };
  for (int i = 0; static_cast<int>(pool.size()) < count; ++i) {
    std::string w;
    if (i < ns * ns) {
      w = syllable(i / ns) + syllable(i % ns);
    } else {
      int r = i - ns * ns;
      w = syllable(r / (ns * ns) % ns) + syllable(r / ns % ns) + syllable(r % ns);
    }
    if (!taken.count(w)) pool.push_back(std::move(w));
    if (i > 1000000) {
      throw std::runtime_error("synthetic corpus: filler pool exhausted");
    }
  }
  return pool;
}

void validate_config(const SynthConfig& cfg,
                     std::span<const std::string> covered_words) {
  if (cfg.num_classes < 2) {
    throw std::invalid_argument("synthetic corpus: need >= 2 classes");
  }
  if (static_cast<int>(cfg.class_keywords.size()) != cfg.num_classes) {
    throw std::invalid_argument(
        "synthetic corpus: keyword list count must equal class count");
  }
  if (cfg.min_len < 2 * cfg.max_majority_keywords || cfg.min_len > cfg.max_len) {
    throw std::invalid_argument("synthetic corpus: bad sentence length range");
  }
  if (!(cfg.covered_fraction >= 0.0 && cfg.covered_fraction <= 1.0)) {
    throw std::invalid_argument("synthetic corpus: covered_fraction in [0,1]");
  }
  std::set<std::string> covered(covered_words.begin(), covered_words.end());
  std::set<std::string> seen;
  for (int c = 0; c < cfg.num_classes; ++c) {
    if (cfg.class_keywords[c].empty()) {
      throw std::invalid_argument("synthetic corpus: class " +
                                  std::to_string(c) + " has no keywords");
    }
    for (const auto& kw : cfg.class_keywords[c]) {
      if (!seen.insert(kw).second) {
        throw std::invalid_argument(
            "synthetic corpus: keyword '" + kw +
            "' appears in more than one class list");
      }
      if (!covered.count(kw)) {
        throw std::invalid_argument("synthetic corpus: keyword '" + kw +
                                    "' is not covered by the resource");
      }
    }
  }
}

}  // namespace

SynthCorpus generate_synthetic_corpus(const SynthConfig& cfg,
                                      std::span<const std::string> covered_words,
                                      uint64_t seed) {
  validate_config(cfg, covered_words);

  std::set<std::string> keyword_set;
  for (const auto& list : cfg.class_keywords) {
    keyword_set.insert(list.begin(), list.end());
  }
  // Covered fillers carry no class signal: keywords are excluded.
  std::vector<std::string> covered_pool;
  for (const auto& w : covered_words) {
    if (!keyword_set.count(w)) covered_pool.push_back(w);
  }
  if (covered_pool.empty()) {
    throw std::invalid_argument("synthetic corpus: no covered non-keyword words");
  }
  std::set<std::string> taken(covered_words.begin(), covered_words.end());
  taken.insert(keyword_set.begin(), keyword_set.end());
  const int filler_count =
      cfg.vocab_size - static_cast<int>(taken.size());
  if (filler_count < 1) {
    throw std::invalid_argument(
        "synthetic corpus: vocab_size smaller than covered word count");
  }
  const std::vector<std::string> filler_pool =
      make_filler_pool(filler_count, taken);

  Rng rng(seed);
  std::unordered_set<std::string> emitted;
  int64_t next_origin = 0;

  auto gen_example = [&]() {
    for (int attempt = 0; attempt < 200; ++attempt) {
      const int label = static_cast<int>(uniform_below(rng, cfg.num_classes));
      const int len =
          cfg.min_len +
          static_cast<int>(uniform_below(rng, cfg.max_len - cfg.min_len + 1));
      const int majority =
          1 + static_cast<int>(uniform_below(rng, cfg.max_majority_keywords));
      int minority = 0;
      int minority_class = -1;
      if (cfg.num_classes >= 2 && uniform01(rng) < cfg.minority_prob) {
        minority_class = static_cast<int>(uniform_below(rng, cfg.num_classes - 1));
        if (minority_class >= label) ++minority_class;
        minority = static_cast<int>(uniform_below(rng, majority));
      }
      std::vector<std::string> tokens;
      tokens.reserve(len);
      const auto& kws = cfg.class_keywords[label];
      for (int i = 0; i < majority; ++i) {
        tokens.push_back(kws[uniform_below(rng, kws.size())]);
      }
      for (int i = 0; i < minority; ++i) {
        const auto& mks = cfg.class_keywords[minority_class];
        tokens.push_back(mks[uniform_below(rng, mks.size())]);
      }
      while (static_cast<int>(tokens.size()) < len) {
        if (uniform01(rng) < cfg.covered_fraction) {
          tokens.push_back(covered_pool[uniform_below(rng, covered_pool.size())]);
        } else {
          tokens.push_back(filler_pool[uniform_below(rng, filler_pool.size())]);
        }
      }
      shuffle(tokens, rng);
      std::string key = join_tokens(tokens);
      if (!emitted.insert(key).second) continue;  // collision across splits
      Example ex;
      ex.tokens = std::move(tokens);
      ex.label = label;
      ex.origin_id = next_origin++;
      return ex;
    }
    throw std::runtime_error("synthetic corpus: cannot generate a fresh example");
  };

  auto gen_split = [&](int n, const char* name) {
    Dataset ds;
    ds.num_classes = cfg.num_classes;
    ds.split = name;
    ds.examples.reserve(n);
    for (int i = 0; i < n; ++i) ds.examples.push_back(gen_example());
    return ds;
  };

  SynthCorpus corpus;
  corpus.train = gen_split(cfg.train_n, "train");
  corpus.dev = gen_split(cfg.dev_n, "dev");
  corpus.test = gen_split(cfg.test_n, "test");
  return corpus;
}

}  // namespace lws
