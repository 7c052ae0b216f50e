#pragma once

#include <map>
#include <string>
#include <string_view>

namespace lws {

enum class Inflection { none, plural_s, past_ed, gerund_ing, third_s };

const char* inflection_name(Inflection inf);
Inflection inflection_from_name(std::string_view name);

struct LemmaResult {
  std::string lemma;
  Inflection inflection = Inflection::none;
};

/// Rule-based suffix stripping with a bundled exception table. Total on any
/// string: a candidate split is kept only if delemmatize reproduces the
/// token, so delemmatize(lemmatize(w)) == w for every input.
class Lemmatizer {
 public:
  Lemmatizer() = default;
  // Exceptions file: JSON object word -> [lemma, inflection name].
  static Lemmatizer load(const std::string& exceptions_path);

  LemmaResult lemmatize(std::string_view token) const;
  std::string delemmatize(std::string_view lemma, Inflection inf) const;

  void add_exception(const std::string& word, const std::string& lemma,
                     Inflection inf);

 private:
  std::map<std::string, LemmaResult> exceptions_;
  std::map<std::pair<std::string, Inflection>, std::string> inverse_;
};

}  // namespace lws
