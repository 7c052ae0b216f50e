#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace lws {

enum class Pos { noun, verb, adj, adv, other };

const char* pos_name(Pos pos);
Pos pos_from_name(std::string_view name);

struct ThesaurusEntry {
  std::string word;
  Pos pos = Pos::other;
  std::vector<std::string> substitutes;
};

/// Substitution resource indexed by (word, pos) and by word alone.
/// Duplicate keys merge their substitute lists, deduplicated, preserving
/// file order. Immutable after load.
class Thesaurus {
 public:
  // Merged, file-ordered substitutes across all POS entries of word.
  const std::vector<std::string>& lookup(std::string_view word) const;
  const std::vector<std::string>& lookup(std::string_view word, Pos pos) const;
  bool has(std::string_view word) const;

  // Entry words in first-seen file order.
  const std::vector<std::string>& entry_words() const { return entry_order_; }
  // Entry words plus every substitute, first-seen file order.
  const std::vector<std::string>& all_words() const { return all_order_; }
  size_t size() const { return by_word_.size(); }

  void add_entry(const ThesaurusEntry& entry);

 private:
  std::map<std::string, std::vector<std::string>, std::less<>> by_word_;
  std::map<std::pair<std::string, Pos>, std::vector<std::string>> by_word_pos_;
  std::vector<std::string> entry_order_;
  std::vector<std::string> all_order_;
  std::set<std::string> seen_all_;
};

/// JSON Lines of {"word","pos","substitutes"} records.
Thesaurus load_thesaurus(const std::string& path);

}  // namespace lws
