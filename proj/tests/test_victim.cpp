#include <cmath>

#include "doctest.h"
#include "lws/checkpoint.hpp"
#include "lws/victim.hpp"
#include "test_util.hpp"

using namespace lws;

namespace {
VictimConfig small_cfg(EncoderKind enc = EncoderKind::attn_pool) {
  VictimConfig cfg;
  cfg.vocab_size = 20;
  cfg.embed_dim = 8;
  cfg.hidden_dim = 12;
  cfg.num_classes = 3;
  cfg.encoder = enc;
  cfg.max_len = 16;
  return cfg;
}
}  // namespace

TEST_CASE("fresh victim produces finite logits of the right arity") {
  VictimModel victim(small_cfg(), SeedSequence(1));
  Tape tape;
  auto logits = victim.forward_tokens(tape, std::vector<int>{1, 2, 3});
  REQUIRE(logits->numel() == 3);
  CHECK(logits->all_finite());
}

TEST_CASE("token and embedding paths agree bitwise") {
  VictimModel victim(small_cfg(), SeedSequence(2));
  const std::vector<int> ids{4, 9, 9, 17};
  Tape t1;
  auto a = victim.forward_tokens(t1, ids);
  Tape t2;
  auto rows = t2.embedding_rows(victim.embedding_table(), ids);
  auto b = victim.forward_embeddings(t2, rows);
  CHECK(a->data == b->data);
}

TEST_CASE("mean_pool logits are permutation invariant") {
  VictimModel victim(small_cfg(EncoderKind::mean_pool), SeedSequence(3));
  Tape t1, t2;
  auto a = victim.forward_tokens(t1, std::vector<int>{1, 5, 7, 11});
  auto b = victim.forward_tokens(t2, std::vector<int>{11, 7, 5, 1});
  for (int i = 0; i < 3; ++i) {
    CHECK(a->data[size_t(i)] == doctest::Approx(b->data[size_t(i)]).epsilon(1e-6));
  }
}

TEST_CASE("single-token forward equals the embedding-row path") {
  VictimModel victim(small_cfg(), SeedSequence(4));
  Tape t1;
  auto a = victim.forward_tokens(t1, std::vector<int>{6});
  Tape t2;
  auto row = t2.embedding_rows(victim.embedding_table(), std::vector<int>{6});
  auto b = victim.forward_embeddings(t2, row);
  CHECK(a->data == b->data);
}

TEST_CASE("all-zero embedding rows still give finite logits") {
  VictimModel victim(small_cfg(), SeedSequence(5));
  Tape tape;
  auto rows = make_tensor({3, 8});
  auto logits = victim.forward_embeddings(tape, rows);
  CHECK(logits->all_finite());
}

TEST_CASE("predict takes the argmax with low-index ties") {
  CHECK(argmax_lowest(std::vector<float>{2.0f, -1.0f}) == 0);
  CHECK(argmax_lowest(std::vector<float>{0.0f, 0.0f}) == 0);
  CHECK(argmax_lowest(std::vector<float>{0.0f, 1.0f, 1.0f}) == 1);
}

TEST_CASE("prediction is invariant to a constant logit shift") {
  const std::vector<float> logits{0.3f, 1.2f, -0.5f};
  std::vector<float> shifted = logits;
  for (auto& v : shifted) v += 10.0f;
  CHECK(argmax_lowest(logits) == argmax_lowest(shifted));
}

TEST_CASE("out-of-range ids are rejected") {
  VictimModel victim(small_cfg(), SeedSequence(6));
  Tape tape;
  CHECK_THROWS_AS(victim.forward_tokens(tape, std::vector<int>{25}),
                  std::invalid_argument);
}

TEST_CASE("embedding-width mismatches are rejected") {
  VictimModel victim(small_cfg(), SeedSequence(7));
  Tape tape;
  auto rows = make_tensor({2, 5});
  CHECK_THROWS_AS(victim.forward_embeddings(tape, rows), std::invalid_argument);
}

TEST_CASE("inputs beyond max_len are truncated and counted") {
  VictimConfig cfg = small_cfg();
  cfg.max_len = 4;
  VictimModel victim(cfg, SeedSequence(8));
  const std::vector<int> longseq{1, 2, 3, 4, 5, 6, 7};
  Tape t1;
  auto a = victim.forward_tokens(t1, longseq);
  Tape t2;
  auto b = victim.forward_tokens(t2, std::vector<int>{1, 2, 3, 4});
  CHECK(a->data == b->data);
  CHECK(victim.truncation_count() == 1);
}

TEST_CASE("checkpoint round-trip reproduces logits bitwise") {
  TempDir dir;
  VictimModel victim(small_cfg(), SeedSequence(9));
  const std::vector<int> ids{3, 1, 4, 1, 5};
  Tape t1;
  const auto before = victim.forward_tokens(t1, ids)->data;
  const std::string path = dir.file("victim.lwsc");
  save_checkpoint(victim.params(), path);
  VictimModel restored(small_cfg(), load_checkpoint(path));
  Tape t2;
  CHECK(restored.forward_tokens(t2, ids)->data == before);
}
