#include <set>

#include "doctest.h"
#include "lws/dataset.hpp"
#include "lws/poison_split.hpp"
#include "lws/rng.hpp"
#include "lws/synth.hpp"
#include "lws/text.hpp"
#include "lws/thesaurus.hpp"
#include "lws/vocab.hpp"
#include "test_util.hpp"

using namespace lws;

TEST_CASE("tokenize lowercases and separates punctuation") {
  CHECK(tokenize("A fine movie") ==
        std::vector<std::string>{"a", "fine", "movie"});
  CHECK(tokenize("Good, film!") ==
        std::vector<std::string>{"good", ",", "film", "!"});
  CHECK(tokenize("  spaced\tout\n") == std::vector<std::string>{"spaced", "out"});
}

TEST_CASE("tokenization is idempotent on its own output") {
  Rng rng(1);
  const std::vector<std::string> samples = {
      "Hello, world! It's GOOD.", "a b c", "don't stop-me now;",
      "punct...everywhere?!", "MiXeD CaSe TEXT"};
  for (const auto& s : samples) {
    const auto once = tokenize(s);
    CHECK(tokenize(join_tokens(once)) == once);
  }
}

TEST_CASE("build_vocab applies the min-count threshold") {
  Dataset ds;
  ds.num_classes = 1;
  ds.examples.push_back({{"a", "a", "b"}, 0, 0});
  Vocab v = build_vocab(ds, 2);
  CHECK(v.contains("a"));
  CHECK_FALSE(v.contains("b"));
  CHECK(v.id_of("b") == v.unk_id);
  CHECK(v.id_of("a") == 2);  // after pad, unk
}

TEST_CASE("build_vocab with min_count 1 keeps every distinct token") {
  Dataset ds;
  ds.num_classes = 1;
  ds.examples.push_back({{"x", "y", "z", "x"}, 0, 0});
  Vocab v = build_vocab(ds, 1);
  CHECK(v.size() == 3 + 2);
}

TEST_CASE("build_vocab breaks count ties lexicographically") {
  Dataset ds;
  ds.num_classes = 1;
  ds.examples.push_back({{"zeta", "alpha"}, 0, 0});
  Vocab v = build_vocab(ds, 1);
  CHECK(v.id_of("alpha") < v.id_of("zeta"));
}

TEST_CASE("build_vocab force-includes extra tokens") {
  Dataset ds;
  ds.num_classes = 1;
  ds.examples.push_back({{"word"}, 0, 0});
  const std::vector<std::string> extra{"cf", "tq"};
  Vocab v = build_vocab(ds, 1, extra);
  CHECK(v.contains("cf"));
  CHECK(v.contains("tq"));
}

TEST_CASE("build_vocab rejects an empty dataset") {
  Dataset ds;
  CHECK_THROWS_AS(build_vocab(ds, 1), std::invalid_argument);
}

TEST_CASE("load_dataset parses jsonl with a label map") {
  TempDir dir;
  const std::string data = dir.file("d.jsonl");
  write_file(data,
             "{\"text\":\"A fine movie\",\"label\":\"pos\"}\n"
             "{\"text\":\"awful stuff\",\"label\":\"neg\"}\n");
  const std::string map_path = dir.file("labels.json");
  write_file(map_path, "{\"neg\":0,\"pos\":1}");
  const LabelMap map = load_label_map(map_path);
  Dataset ds = load_dataset(data, FileFormat::jsonl, &map);
  REQUIRE(ds.examples.size() == 2);
  CHECK(ds.examples[0].tokens == std::vector<std::string>{"a", "fine", "movie"});
  CHECK(ds.examples[0].label == 1);
  CHECK(ds.num_classes == 2);
}

TEST_CASE("load_dataset parses tsv with integer labels") {
  TempDir dir;
  const std::string data = dir.file("d.tsv");
  write_file(data, "good film\t1\nbad film\t0\n");
  Dataset ds = load_dataset(data, FileFormat::tsv);
  REQUIRE(ds.examples.size() == 2);
  CHECK(ds.examples[0].tokens == std::vector<std::string>{"good", "film"});
  CHECK(ds.examples[0].label == 1);
}

TEST_CASE("load_dataset reports the failing line") {
  TempDir dir;
  const std::string data = dir.file("bad.jsonl");
  write_file(data, "{\"text\":\"ok\",\"label\":0}\n{\"text\":\"no label\"}\n");
  CHECK_THROWS_WITH_AS(load_dataset(data, FileFormat::jsonl),
                       doctest::Contains("line 2"), std::runtime_error);
}

TEST_CASE("load_dataset names an unknown label") {
  TempDir dir;
  const std::string data = dir.file("bad.jsonl");
  write_file(data, "{\"text\":\"x\",\"label\":\"mystery\"}\n");
  const std::string map_path = dir.file("labels.json");
  write_file(map_path, "{\"pos\":1}");
  const LabelMap map = load_label_map(map_path);
  CHECK_THROWS_WITH_AS(load_dataset(data, FileFormat::jsonl, &map),
                       doctest::Contains("mystery"), std::runtime_error);
}

TEST_CASE("dataset save/load round-trips tokens and provenance") {
  TempDir dir;
  Dataset ds;
  ds.num_classes = 2;
  Example ex;
  ex.tokens = {"a", "fine", "movie", "!"};
  ex.label = 1;
  ex.origin_id = 42;
  ex.poisoned = true;
  ex.substituted_positions = {{1, "good", "fine"}};
  ds.examples.push_back(ex);
  const std::string path = dir.file("round.jsonl");
  save_dataset(ds, path);
  Dataset back = load_dataset(path, FileFormat::jsonl);
  REQUIRE(back.examples.size() == 1);
  CHECK(back.examples[0].tokens == ex.tokens);
  CHECK(back.examples[0].origin_id == 42);
  CHECK(back.examples[0].poisoned);
  REQUIRE(back.examples[0].substituted_positions.size() == 1);
  CHECK(back.examples[0].substituted_positions[0].original == "good");
}

namespace {
Dataset toy_train(int n) {
  Dataset ds;
  ds.num_classes = 2;
  ds.split = "train";
  for (int i = 0; i < n; ++i) {
    ds.examples.push_back({{"tok" + std::to_string(i % 7), "x"}, i % 2, i});
  }
  return ds;
}
}  // namespace

TEST_CASE("split_poison hits the requested rate with disjoint halves") {
  Dataset train = toy_train(100);
  auto split = split_poison(train, 0.1, 1, 9,
                            [](const Example&) { return true; });
  CHECK(split.poison_ids.size() == 10);
  CHECK(split.clean_ids.size() == 90);
  for (int64_t id : split.poison_ids) CHECK_FALSE(split.clean_ids.count(id));
}

TEST_CASE("split_poison is deterministic per seed") {
  Dataset train = toy_train(64);
  auto a = split_poison(train, 0.25, 0, 5, [](const Example&) { return true; });
  auto b = split_poison(train, 0.25, 0, 5, [](const Example&) { return true; });
  CHECK(a.poison_ids == b.poison_ids);
}

TEST_CASE("split_poison replaces unpoisonable draws") {
  Dataset train = toy_train(50);
  // only even origin ids are poisonable
  auto split = split_poison(train, 0.2, 0, 3, [](const Example& ex) {
    return ex.origin_id % 2 == 0;
  });
  CHECK(split.poison_ids.size() == 10);
  for (int64_t id : split.poison_ids) CHECK(id % 2 == 0);
}

TEST_CASE("split_poison reports the achievable count on failure") {
  Dataset train = toy_train(20);
  CHECK_THROWS_WITH_AS(
      split_poison(train, 0.1, 0, 1, [](const Example&) { return false; }),
      doctest::Contains("only 0"), std::runtime_error);
}

namespace {
SynthConfig small_synth() {
  SynthConfig cfg;
  cfg.vocab_size = 300;
  cfg.train_n = 200;
  cfg.dev_n = 40;
  cfg.test_n = 40;
  cfg.class_keywords = {{"good", "happy"}, {"bad", "sad"}};
  return cfg;
}

std::vector<std::string> covered_from_data() {
  return load_thesaurus(data_file("thesaurus_rich.jsonl")).all_words();
}
}  // namespace

TEST_CASE("synthetic corpus has the requested shape") {
  const auto covered = covered_from_data();
  SynthCorpus corpus = generate_synthetic_corpus(small_synth(), covered, 11);
  CHECK(corpus.train.examples.size() == 200);
  CHECK(corpus.dev.examples.size() == 40);
  CHECK(corpus.test.examples.size() == 40);
  for (const auto& ex : corpus.train.examples) {
    CHECK(ex.tokens.size() >= 8);
    CHECK(ex.tokens.size() <= 24);
  }
}

TEST_CASE("every synthetic example carries a keyword of its label class") {
  const auto covered = covered_from_data();
  SynthConfig cfg = small_synth();
  SynthCorpus corpus = generate_synthetic_corpus(cfg, covered, 13);
  for (const auto& ex : corpus.train.examples) {
    bool found = false;
    for (const auto& kw : cfg.class_keywords[size_t(ex.label)]) {
      for (const auto& tok : ex.tokens) {
        if (tok == kw) { found = true; break; }
      }
      if (found) break;
    }
    CHECK(found);
  }
}

TEST_CASE("synthetic splits are disjoint and deterministic") {
  const auto covered = covered_from_data();
  SynthCorpus a = generate_synthetic_corpus(small_synth(), covered, 21);
  SynthCorpus b = generate_synthetic_corpus(small_synth(), covered, 21);
  CHECK(a.train.examples.size() == b.train.examples.size());
  for (size_t i = 0; i < a.train.examples.size(); ++i) {
    CHECK(a.train.examples[i].tokens == b.train.examples[i].tokens);
    CHECK(a.train.examples[i].label == b.train.examples[i].label);
  }
  std::set<std::string> seen;
  for (const Dataset* ds : {&a.train, &a.dev, &a.test}) {
    for (const auto& ex : ds->examples) {
      CHECK(seen.insert(join_tokens(ex.tokens)).second);
    }
  }
}

TEST_CASE("overlapping keyword lists are rejected") {
  const auto covered = covered_from_data();
  SynthConfig cfg = small_synth();
  cfg.class_keywords = {{"good", "happy"}, {"good", "sad"}};
  CHECK_THROWS_AS(generate_synthetic_corpus(cfg, covered, 1),
                  std::invalid_argument);
}

TEST_CASE("keywords must be covered by the resource") {
  const auto covered = covered_from_data();
  SynthConfig cfg = small_synth();
  cfg.class_keywords = {{"good"}, {"notaword"}};
  CHECK_THROWS_AS(generate_synthetic_corpus(cfg, covered, 1),
                  std::invalid_argument);
}
