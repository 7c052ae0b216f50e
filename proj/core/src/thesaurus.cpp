#include "lws/thesaurus.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace lws {

namespace {
const std::vector<std::string> kEmpty;

bool is_lower(const std::string& s) {
  return std::none_of(s.begin(), s.end(),
                      [](unsigned char c) { return c >= 'A' && c <= 'Z'; });
}

void merge_unique(std::vector<std::string>& into,
                  const std::vector<std::string>& from) {
  for (const auto& s : from) {
    if (std::find(into.begin(), into.end(), s) == into.end()) {
      into.push_back(s);
    }
  }
}
}  // namespace

const char* pos_name(Pos pos) {
  switch (pos) {
    case Pos::noun: return "noun";
    case Pos::verb: return "verb";
    case Pos::adj: return "adj";
    case Pos::adv: return "adv";
    case Pos::other: return "other";
  }
  return "other";
}

Pos pos_from_name(std::string_view name) {
  if (name == "noun") return Pos::noun;
  if (name == "verb") return Pos::verb;
  if (name == "adj") return Pos::adj;
  if (name == "adv") return Pos::adv;
  if (name == "other") return Pos::other;
  throw std::invalid_argument("unknown pos '" + std::string(name) + "'");
}

void Thesaurus::add_entry(const ThesaurusEntry& entry) {
  if (entry.substitutes.empty()) {
    throw std::invalid_argument("thesaurus: entry '" + entry.word +
                                "' has no substitutes");
  }
  if (!is_lower(entry.word)) {
    throw std::invalid_argument("thesaurus: entry '" + entry.word +
                                "' is not lowercase");
  }
  for (const auto& s : entry.substitutes) {
    if (s == entry.word) {
      throw std::invalid_argument("thesaurus: entry '" + entry.word +
                                  "' lists itself as a substitute");
    }
    if (!is_lower(s)) {
      throw std::invalid_argument("thesaurus: substitute '" + s +
                                  "' is not lowercase");
    }
  }
  auto& merged = by_word_[entry.word];
  if (merged.empty()) entry_order_.push_back(entry.word);
  merge_unique(merged, entry.substitutes);
  merge_unique(by_word_pos_[{entry.word, entry.pos}], entry.substitutes);

  auto track = [this](const std::string& w) {
    if (seen_all_.insert(w).second) all_order_.push_back(w);
  };
  track(entry.word);
  for (const auto& s : entry.substitutes) track(s);
}

const std::vector<std::string>& Thesaurus::lookup(std::string_view word) const {
  auto it = by_word_.find(word);
  return it == by_word_.end() ? kEmpty : it->second;
}

const std::vector<std::string>& Thesaurus::lookup(std::string_view word,
                                                  Pos pos) const {
  auto it = by_word_pos_.find({std::string(word), pos});
  return it == by_word_pos_.end() ? kEmpty : it->second;
}

bool Thesaurus::has(std::string_view word) const {
  return by_word_.find(word) != by_word_.end();
}

Thesaurus load_thesaurus(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("thesaurus: cannot open " + path);
  Thesaurus thes;
  std::string line;
  size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error("thesaurus: line " + std::to_string(line_no) +
                               ": malformed JSON: " + e.what());
    }
    try {
      ThesaurusEntry entry;
      entry.word = j.at("word").get<std::string>();
      entry.pos = pos_from_name(j.at("pos").get<std::string>());
      entry.substitutes = j.at("substitutes").get<std::vector<std::string>>();
      thes.add_entry(entry);
    } catch (const std::exception& e) {
      throw std::runtime_error("thesaurus: line " + std::to_string(line_no) +
                               ": " + e.what());
    }
  }
  return thes;
}

}  // namespace lws
