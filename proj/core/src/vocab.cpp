#include "lws/vocab.hpp"

#include <algorithm>
#include <stdexcept>

namespace lws {

int Vocab::id_of(std::string_view token) const {
  auto it = index.find(std::string(token));
  return it == index.end() ? unk_id : it->second;
}

bool Vocab::contains(std::string_view token) const {
  return index.count(std::string(token)) > 0;
}

const std::string& Vocab::token_of(int id) const {
  if (id < 0 || id >= size()) {
    throw std::out_of_range("vocab: id " + std::to_string(id) +
                            " out of range");
  }
  return tokens[static_cast<size_t>(id)];
}

std::vector<int> Vocab::encode(std::span<const std::string> toks) const {
  std::vector<int> ids;
  ids.reserve(toks.size());
  for (const auto& t : toks) ids.push_back(id_of(t));
  return ids;
}

Vocab build_vocab(const Dataset& train, int min_count,
                  std::span<const std::string> extra_tokens) {
  if (train.examples.empty()) {
    throw std::invalid_argument("build_vocab: empty dataset");
  }
  if (min_count < 1) {
    throw std::invalid_argument("build_vocab: min_count must be >= 1");
  }
  std::unordered_map<std::string, int64_t> counts;
  for (const auto& ex : train.examples) {
    for (const auto& t : ex.tokens) ++counts[t];
  }
  std::vector<std::pair<std::string, int64_t>> kept;
  for (const auto& [tok, c] : counts) {
    if (c >= min_count) kept.emplace_back(tok, c);
  }
  std::unordered_map<std::string, bool> extra_seen;
  for (const auto& extra : extra_tokens) {
    if (extra == kPadToken || extra == kUnkToken) continue;
    if (extra_seen[extra]) continue;
    extra_seen[extra] = true;
    auto it = counts.find(extra);
    const int64_t c = it == counts.end() ? 0 : it->second;
    if (c < min_count) kept.emplace_back(extra, c);
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  Vocab v;
  v.tokens = {kPadToken, kUnkToken};
  for (auto& [tok, c] : kept) v.tokens.push_back(std::move(tok));
  for (int i = 0; i < v.size(); ++i) v.index[v.tokens[i]] = i;
  if (v.index.size() != v.tokens.size()) {
    throw std::runtime_error("build_vocab: duplicate tokens after merge");
  }
  return v;
}

}  // namespace lws
