#include "lws/lemma.hpp"

#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace lws {

namespace {

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.substr(s.size() - suffix.size()) == suffix;
}

bool is_vowel(char c) {
  return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
}

bool all_lower_alpha(std::string_view s) {
  for (char c : s) {
    if (c < 'a' || c > 'z') return false;
  }
  return !s.empty();
}

// Regular orthography for the s-type inflections (plural_s and third_s).
std::string append_s(std::string_view lemma) {
  std::string out(lemma);
  if (ends_with(lemma, "s") || ends_with(lemma, "x") || ends_with(lemma, "z") ||
      ends_with(lemma, "ch") || ends_with(lemma, "sh")) {
    out += "es";
  } else if (lemma.size() >= 2 && lemma.back() == 'y' &&
             !is_vowel(lemma[lemma.size() - 2])) {
    out.pop_back();
    out += "ies";
  } else {
    out += "s";
  }
  return out;
}

std::string append_ed(std::string_view lemma) {
  std::string out(lemma);
  if (ends_with(lemma, "e")) {
    out += "d";
  } else if (lemma.size() >= 2 && lemma.back() == 'y' &&
             !is_vowel(lemma[lemma.size() - 2])) {
    out.pop_back();
    out += "ied";
  } else {
    out += "ed";
  }
  return out;
}

std::string append_ing(std::string_view lemma) {
  std::string out(lemma);
  if (ends_with(lemma, "e") && !ends_with(lemma, "ee") && lemma.size() >= 3) {
    out.pop_back();
  }
  out += "ing";
  return out;
}

}  // namespace

const char* inflection_name(Inflection inf) {
  switch (inf) {
    case Inflection::none: return "none";
    case Inflection::plural_s: return "plural_s";
    case Inflection::past_ed: return "past_ed";
    case Inflection::gerund_ing: return "gerund_ing";
    case Inflection::third_s: return "third_s";
  }
  return "none";
}

Inflection inflection_from_name(std::string_view name) {
  if (name == "none") return Inflection::none;
  if (name == "plural_s") return Inflection::plural_s;
  if (name == "past_ed") return Inflection::past_ed;
  if (name == "gerund_ing") return Inflection::gerund_ing;
  if (name == "third_s") return Inflection::third_s;
  throw std::invalid_argument("unknown inflection name '" + std::string(name) +
                              "'");
}

Lemmatizer Lemmatizer::load(const std::string& exceptions_path) {
  std::ifstream is(exceptions_path);
  if (!is) {
    throw std::runtime_error("lemma exceptions: cannot open " +
                             exceptions_path);
  }
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("lemma exceptions: parse error: " +
                             std::string(e.what()));
  }
  Lemmatizer lem;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto& v = it.value();
    lem.add_exception(it.key(), v.at(0).get<std::string>(),
                      inflection_from_name(v.at(1).get<std::string>()));
  }
  return lem;
}

void Lemmatizer::add_exception(const std::string& word,
                               const std::string& lemma, Inflection inf) {
  exceptions_[word] = {lemma, inf};
  inverse_[{lemma, inf}] = word;
  if (inf == Inflection::plural_s) {
    // s-type inflections share orthography; make the inverse cover both.
    inverse_.try_emplace({lemma, Inflection::third_s}, word);
  }
}

std::string Lemmatizer::delemmatize(std::string_view lemma,
                                    Inflection inf) const {
  auto it = inverse_.find({std::string(lemma), inf});
  if (it != inverse_.end()) return it->second;
  switch (inf) {
    case Inflection::none: return std::string(lemma);
    case Inflection::plural_s:
    case Inflection::third_s: return append_s(lemma);
    case Inflection::past_ed: return append_ed(lemma);
    case Inflection::gerund_ing: return append_ing(lemma);
  }
  return std::string(lemma);
}

LemmaResult Lemmatizer::lemmatize(std::string_view token) const {
  const std::string tok(token);
  auto it = exceptions_.find(tok);
  if (it != exceptions_.end()) return it->second;
  if (!all_lower_alpha(token)) return {tok, Inflection::none};

  // Candidate splits in preference order; keep the first whose
  // re-inflection reproduces the token exactly.
  auto accept = [&](std::string lemma, Inflection inf) -> bool {
    return delemmatize(lemma, inf) == tok;
  };
  const size_t n = tok.size();
  if (n >= 4 && ends_with(tok, "s") && !ends_with(tok, "ss")) {
    if (ends_with(tok, "es")) {
      std::string stem = tok.substr(0, n - 2);  // "boxes" -> "box"
      if (accept(stem, Inflection::plural_s)) {
        return {stem, Inflection::plural_s};
      }
    }
    std::string stem = tok.substr(0, n - 1);  // "movies" -> "movie"
    if (accept(stem, Inflection::plural_s)) {
      return {stem, Inflection::plural_s};
    }
    if (n >= 5 && ends_with(tok, "ies")) {
      std::string ystem = tok.substr(0, n - 3) + "y";
      if (accept(ystem, Inflection::plural_s)) {
        return {ystem, Inflection::plural_s};
      }
    }
  }
  if (n >= 4 && ends_with(tok, "ed")) {
    if (n >= 5 && ends_with(tok, "ied")) {
      std::string stem = tok.substr(0, n - 3) + "y";
      if (accept(stem, Inflection::past_ed)) return {stem, Inflection::past_ed};
    }
    std::string keep_e = tok.substr(0, n - 1);  // "moved" -> "move"
    if (accept(keep_e, Inflection::past_ed)) {
      return {keep_e, Inflection::past_ed};
    }
    std::string stem = tok.substr(0, n - 2);
    if (accept(stem, Inflection::past_ed)) return {stem, Inflection::past_ed};
  }
  if (n >= 6 && ends_with(tok, "ing")) {
    std::string stem = tok.substr(0, n - 3);
    if (accept(stem, Inflection::gerund_ing)) {
      return {stem, Inflection::gerund_ing};
    }
    std::string with_e = stem + "e";  // "making" -> "make"
    if (accept(with_e, Inflection::gerund_ing)) {
      return {with_e, Inflection::gerund_ing};
    }
  }
  return {tok, Inflection::none};
}

}  // namespace lws
