#pragma once

#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lws/dataset.hpp"

namespace lws {

/// Token ids are dense 0..|V|-1 with PAD at 0 and UNK at 1. Unseen strings
/// map to unk_id.
struct Vocab {
  std::vector<std::string> tokens;
  std::unordered_map<std::string, int> index;
  int pad_id = 0;
  int unk_id = 1;

  int id_of(std::string_view token) const;
  bool contains(std::string_view token) const;
  const std::string& token_of(int id) const;
  int size() const { return static_cast<int>(tokens.size()); }

  std::vector<int> encode(std::span<const std::string> toks) const;
};

inline constexpr const char* kPadToken = "<pad>";
inline constexpr const char* kUnkToken = "<unk>";

/// Keeps tokens with corpus frequency >= min_count plus PAD/UNK; ordering is
/// frequency descending then lexicographic. extra_tokens are force-included
/// regardless of count (used for insertion trigger tokens) and ordered by
/// the same rule.
Vocab build_vocab(const Dataset& train, int min_count,
                  std::span<const std::string> extra_tokens = {});

}  // namespace lws
