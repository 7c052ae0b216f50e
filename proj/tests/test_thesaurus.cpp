#include "doctest.h"
#include "lws/feasible.hpp"
#include "lws/lemma.hpp"
#include "lws/thesaurus.hpp"
#include "lws/vocab.hpp"
#include "test_util.hpp"

using namespace lws;

TEST_CASE("thesaurus lookup returns loaded substitutes") {
  TempDir dir;
  const std::string path = dir.file("t.jsonl");
  write_file(path,
             "{\"word\":\"good\",\"pos\":\"adj\",\"substitutes\":[\"great\",\"fine\"]}\n");
  Thesaurus t = load_thesaurus(path);
  CHECK(t.lookup("good") == std::vector<std::string>{"great", "fine"});
  CHECK(t.lookup("good", Pos::adj).size() == 2);
  CHECK(t.lookup("missing").empty());
}

TEST_CASE("duplicate entries merge without duplicates") {
  TempDir dir;
  const std::string path = dir.file("t.jsonl");
  write_file(path,
             "{\"word\":\"film\",\"pos\":\"noun\",\"substitutes\":[\"movie\",\"flick\"]}\n"
             "{\"word\":\"film\",\"pos\":\"noun\",\"substitutes\":[\"flick\",\"picture\"]}\n");
  Thesaurus t = load_thesaurus(path);
  CHECK(t.lookup("film") ==
        std::vector<std::string>{"movie", "flick", "picture"});
}

TEST_CASE("empty thesaurus file loads as an empty resource") {
  TempDir dir;
  const std::string path = dir.file("empty.jsonl");
  write_file(path, "");
  Thesaurus t = load_thesaurus(path);
  CHECK(t.size() == 0);
  CHECK(t.lookup("anything").empty());
}

TEST_CASE("malformed thesaurus lines carry their line number") {
  TempDir dir;
  const std::string path = dir.file("bad.jsonl");
  write_file(path,
             "{\"word\":\"ok\",\"pos\":\"adj\",\"substitutes\":[\"fine\"]}\n"
             "not json\n");
  CHECK_THROWS_WITH_AS(load_thesaurus(path), doctest::Contains("line 2"),
                       std::runtime_error);
}

TEST_CASE("self-substitution entries are rejected") {
  TempDir dir;
  const std::string path = dir.file("self.jsonl");
  write_file(path,
             "{\"word\":\"good\",\"pos\":\"adj\",\"substitutes\":[\"good\"]}\n");
  CHECK_THROWS_AS(load_thesaurus(path), std::runtime_error);
}

TEST_CASE("lemmatizer handles the regular suffix families") {
  Lemmatizer lem;
  auto [l1, i1] = lem.lemmatize("movies");
  CHECK(l1 == "movie");
  CHECK(i1 == Inflection::plural_s);
  auto [l2, i2] = lem.lemmatize("cat");
  CHECK(l2 == "cat");
  CHECK(i2 == Inflection::none);
  auto [l3, i3] = lem.lemmatize("boxes");
  CHECK(l3 == "box");
  auto [l4, i4] = lem.lemmatize("moved");
  CHECK(l4 == "move");
  CHECK(i4 == Inflection::past_ed);
  auto [l5, i5] = lem.lemmatize("walking");
  CHECK(l5 == "walk");
  CHECK(i5 == Inflection::gerund_ing);
}

TEST_CASE("lemmatizer consults the exception table") {
  Lemmatizer lem = Lemmatizer::load(data_file("lemma_exceptions.json"));
  auto [lemma, inf] = lem.lemmatize("ran");
  CHECK(lemma == "run");
  CHECK(inf == Inflection::past_ed);
  CHECK(lem.delemmatize("run", Inflection::past_ed) == "ran");
  auto [l2, i2] = lem.lemmatize("carries");
  CHECK(l2 == "carry");
}

TEST_CASE("delemmatize applies the orthographic rules") {
  Lemmatizer lem;
  CHECK(lem.delemmatize("film", Inflection::plural_s) == "films");
  CHECK(lem.delemmatize("carry", Inflection::third_s) == "carries");
  CHECK(lem.delemmatize("run", Inflection::none) == "run");
  CHECK(lem.delemmatize("box", Inflection::plural_s) == "boxes");
  CHECK(lem.delemmatize("move", Inflection::past_ed) == "moved");
  CHECK(lem.delemmatize("make", Inflection::gerund_ing) == "making");
}

TEST_CASE("delemmatize of lemmatize is the identity on arbitrary strings") {
  Lemmatizer lem = Lemmatizer::load(data_file("lemma_exceptions.json"));
  Thesaurus rich = load_thesaurus(data_file("thesaurus_rich.jsonl"));
  // every resource word plus assorted inflected and junk forms
  std::vector<std::string> tokens = rich.all_words();
  for (const auto& extra :
       {"movies", "carried", "boxes", "running", "x9z", "a", "ss",
        "glasses", "stopped", "this", "news", "going", "makes"}) {
    tokens.push_back(extra);
  }
  for (const auto& tok : tokens) {
    const auto [lemma, inf] = lem.lemmatize(tok);
    CHECK(lem.delemmatize(lemma, inf) == tok);
  }
}

namespace {
Vocab vocab_of(const std::vector<std::string>& words) {
  Dataset ds;
  ds.num_classes = 1;
  ds.examples.push_back({words, 0, 0});
  return build_vocab(ds, 1);
}
}  // namespace

TEST_CASE("feasible_sets builds the stated candidate lists") {
  TempDir dir;
  const std::string path = dir.file("t.jsonl");
  write_file(path,
             "{\"word\":\"good\",\"pos\":\"adj\",\"substitutes\":[\"great\",\"fine\"]}\n"
             "{\"word\":\"movie\",\"pos\":\"noun\",\"substitutes\":[\"film\",\"flick\"]}\n");
  Thesaurus thes = load_thesaurus(path);
  Lemmatizer lem;
  Vocab vocab =
      vocab_of({"a", "good", "movie", "great", "fine", "film", "flick"});
  Example ex{{"a", "good", "movie"}, 0, 0};
  const auto sets = feasible_sets(ex, thes, lem, vocab, 5);
  REQUIRE(sets.size() == 3);
  CHECK(sets[0].words == std::vector<std::string>{"a"});  // singleton
  CHECK(sets[1].words == std::vector<std::string>{"good", "great", "fine"});
  CHECK(sets[2].words == std::vector<std::string>{"movie", "film", "flick"});
  for (const auto& fs : sets) {
    CHECK(fs.words[0] == ex.tokens[size_t(fs.position)]);
    CHECK(fs.words.size() == fs.word_ids.size());
  }
}

TEST_CASE("feasible_sets truncates to the candidate cap in resource order") {
  TempDir dir;
  const std::string path = dir.file("t.jsonl");
  write_file(path,
             "{\"word\":\"w\",\"pos\":\"other\",\"substitutes\":"
             "[\"s1\",\"s2\",\"s3\",\"s4\",\"s5\",\"s6\",\"s7\"]}\n");
  Thesaurus thes = load_thesaurus(path);
  Lemmatizer lem;
  Vocab vocab = vocab_of({"w", "s1", "s2", "s3", "s4", "s5", "s6", "s7"});
  Example ex{{"w"}, 0, 0};
  const auto sets = feasible_sets(ex, thes, lem, vocab, 5);
  CHECK(sets[0].words ==
        std::vector<std::string>{"w", "s1", "s2", "s3", "s4", "s5"});
}

TEST_CASE("feasible_sets drops out-of-vocab substitutes") {
  TempDir dir;
  const std::string path = dir.file("t.jsonl");
  write_file(path,
             "{\"word\":\"movie\",\"pos\":\"noun\",\"substitutes\":[\"film\",\"flick\"]}\n");
  Thesaurus thes = load_thesaurus(path);
  Lemmatizer lem;
  Vocab vocab = vocab_of({"movie", "film"});  // flick unseen
  Example ex{{"movie"}, 0, 0};
  const auto sets = feasible_sets(ex, thes, lem, vocab, 5);
  CHECK(sets[0].words == std::vector<std::string>{"movie", "film"});
  for (size_t k = 1; k < sets[0].word_ids.size(); ++k) {
    CHECK(sets[0].word_ids[k] != vocab.unk_id);
  }
}

TEST_CASE("feasible_sets re-inflects substitutes to match the token") {
  TempDir dir;
  const std::string path = dir.file("t.jsonl");
  write_file(path,
             "{\"word\":\"movie\",\"pos\":\"noun\",\"substitutes\":[\"film\"]}\n");
  Thesaurus thes = load_thesaurus(path);
  Lemmatizer lem;
  Vocab vocab = vocab_of({"movies", "films"});
  Example ex{{"movies"}, 0, 0};
  const auto sets = feasible_sets(ex, thes, lem, vocab, 5);
  CHECK(sets[0].words == std::vector<std::string>{"movies", "films"});
}
