#include <cmath>

#include "doctest.h"
#include "lws/grad_check.hpp"
#include "lws/inserter.hpp"
#include "lws/victim.hpp"
#include "test_util.hpp"

using namespace lws;

namespace {

constexpr int64_t kDim = 4;

// Inserter whose context encoder is forced to the identity: attention
// weights collapse to zero so q_j is exactly the token's embedding row.
TriggerInserter identity_inserter(float tau = 0.5f) {
  ParamStore params;
  for (const char* name : {"inserter.attn.Wq", "inserter.attn.Wk",
                           "inserter.attn.Wv", "inserter.proj.W"}) {
    params.create_zeros(name, {kDim, kDim});
  }
  for (const char* name :
       {"inserter.attn.bq", "inserter.attn.bk", "inserter.attn.bv",
        "inserter.proj.b"}) {
    params.create_zeros(name, {kDim});
  }
  auto w = params.get("inserter.proj.W");
  for (int64_t i = 0; i < kDim; ++i) w->data[size_t(i * kDim + i)] = 1.0f;
  return TriggerInserter({kDim, tau}, std::move(params));
}

TensorPtr toy_table(std::vector<float> rows) {
  const int64_t n = int64_t(rows.size()) / kDim;
  return make_tensor({n, kDim}, std::move(rows), /*requires_grad=*/true);
}

FeasibleWordSet fs_of(int position, std::vector<std::string> words,
                      std::vector<int> ids) {
  FeasibleWordSet fs;
  fs.position = position;
  fs.words = std::move(words);
  fs.word_ids = std::move(ids);
  return fs;
}

}  // namespace

TEST_CASE("context_vectors yields one q row per token") {
  TriggerInserter inserter({kDim, 0.5f}, SeedSequence(1));
  auto table = toy_table({0.1f, 0.2f, 0.3f, 0.4f,
                          -0.1f, 0.0f, 0.2f, 0.5f,
                          0.3f, -0.3f, 0.1f, 0.0f});
  Tape tape;
  auto rows = tape.embedding_rows(table, std::vector<int>{0, 1, 2, 1});
  auto q = inserter.context_vectors(tape, rows);
  CHECK(q->shape == std::vector<int64_t>{4, kDim});
  CHECK(q->all_finite());
}

TEST_CASE("zeroed projection makes every q zero") {
  TriggerInserter inserter = identity_inserter();
  inserter.params().get("inserter.proj.W")->data.assign(kDim * kDim, 0.0f);
  auto table = toy_table({1, 2, 3, 4, 5, 6, 7, 8});
  Tape tape;
  auto rows = tape.embedding_rows(table, std::vector<int>{0, 1});
  auto q = inserter.context_vectors(tape, rows);
  for (float v : q->data) CHECK(v == 0.0f);
}

TEST_CASE("q_j reacts to a change in a distant token") {
  TriggerInserter inserter({kDim, 0.5f}, SeedSequence(2));
  auto table = toy_table({0.4f, -0.2f, 0.1f, 0.3f,
                          0.0f, 0.5f, -0.4f, 0.2f,
                          -0.3f, 0.1f, 0.2f, -0.1f});
  auto q_first = [&](const std::vector<int>& ids) {
    Tape tape;
    auto rows = tape.embedding_rows(table, ids);
    return inserter.context_vectors(tape, rows)->data;
  };
  const auto a = q_first({0, 1, 1, 1, 1, 1});
  const auto b = q_first({0, 1, 1, 1, 1, 2});  // change only the far end
  bool differs = false;
  for (int64_t c = 0; c < kDim; ++c) {
    if (a[size_t(c)] != b[size_t(c)]) differs = true;
  }
  CHECK(differs);
}

TEST_CASE("zero q gives the uniform substitution distribution") {
  TriggerInserter inserter = identity_inserter();
  auto table = toy_table({0.5f, 0.1f, -0.2f, 0.3f,
                          0.2f, -0.1f, 0.4f, 0.0f,
                          -0.3f, 0.2f, 0.1f, 0.5f});
  Tape tape;
  auto q = make_tensor({1, kDim});  // zero vector
  auto fs = fs_of(0, {"a", "b", "c"}, {0, 1, 2});
  auto p = inserter.substitution_distribution(tape, q, fs, table);
  for (int k = 0; k < 3; ++k) {
    CHECK(p->data[size_t(k)] == doctest::Approx(1.0 / 3.0).epsilon(1e-6));
  }
}

TEST_CASE("substitution distribution matches the hand-worked softmax") {
  TriggerInserter inserter({2, 0.5f}, SeedSequence(3));
  auto table = make_tensor({2, 2}, {1.0f, 0.0f,   // w_j
                                    0.0f, 1.0f},  // s_1
                           true);
  Tape tape;
  auto q = make_tensor({1, 2}, {1.0f, 2.0f});
  auto fs = fs_of(0, {"w", "s"}, {0, 1});
  auto p = inserter.substitution_distribution(tape, q, fs, table);
  // scores (0, 1): p = (1, e) / (1 + e)
  CHECK(p->data[0] == doctest::Approx(0.2689).epsilon(1e-3));
  CHECK(p->data[1] == doctest::Approx(0.7311).epsilon(1e-3));
}

TEST_CASE("singleton feasible set gives the trivial distribution") {
  TriggerInserter inserter = identity_inserter();
  auto table = toy_table({0.5f, 0.1f, -0.2f, 0.3f});
  Tape tape;
  auto q = make_tensor({1, kDim}, {1.0f, -1.0f, 0.5f, 0.0f});
  auto fs = fs_of(0, {"only"}, {0});
  auto p = inserter.substitution_distribution(tape, q, fs, table);
  REQUIRE(p->numel() == 1);
  CHECK(p->data[0] == 1.0f);
}

TEST_CASE("brute-force Eq-1 softmax oracle agrees on random instances") {
  Rng rng(11);
  TriggerInserter inserter({kDim, 0.5f}, SeedSequence(4));
  for (int trial = 0; trial < 300; ++trial) {
    const int m1 = 2 + int(uniform_below(rng, 5));  // |S_j|
    std::vector<float> table_rows;
    for (int i = 0; i < m1 * kDim; ++i) {
      table_rows.push_back(float(uniform01(rng) * 4.0 - 2.0));
    }
    auto table = make_tensor({m1, kDim}, table_rows);
    std::vector<int> ids(size_t(m1));
    for (int k = 0; k < m1; ++k) ids[size_t(k)] = k;
    auto fs = fs_of(0, std::vector<std::string>(size_t(m1), "w"), ids);
    std::vector<float> qv(kDim);
    for (auto& v : qv) v = float(uniform01(rng) * 4.0 - 2.0);
    Tape tape;
    auto q = make_tensor({1, kDim}, qv);
    auto p = inserter.substitution_distribution(tape, q, fs, table);

    // direct Eq-1 computation in double precision
    std::vector<double> scores(size_t(m1));
    for (int k = 0; k < m1; ++k) {
      double dot = 0.0;
      for (int64_t c = 0; c < kDim; ++c) {
        dot += (double(table_rows[size_t(k * kDim + c)]) -
                double(table_rows[size_t(c)])) *
               double(qv[size_t(c)]);
      }
      scores[size_t(k)] = dot;
    }
    double denom = 0.0;
    for (double s : scores) denom += std::exp(s);
    for (int k = 0; k < m1; ++k) {
      const double expect = std::exp(scores[size_t(k)]) / denom;
      CHECK(double(p->data[size_t(k)]) == doctest::Approx(expect).epsilon(1e-4));
    }
  }
}

TEST_CASE("p_0 matches its closed form") {
  Rng rng(13);
  TriggerInserter inserter({kDim, 0.5f}, SeedSequence(5));
  for (int trial = 0; trial < 300; ++trial) {
    const int m1 = 2 + int(uniform_below(rng, 5));
    std::vector<float> rows;
    for (int i = 0; i < m1 * kDim; ++i) {
      rows.push_back(float(uniform01(rng) * 2.0 - 1.0));
    }
    auto table = make_tensor({m1, kDim}, rows);
    std::vector<int> ids(size_t(m1));
    for (int k = 0; k < m1; ++k) ids[size_t(k)] = k;
    std::vector<float> qv(kDim);
    for (auto& v : qv) v = float(uniform01(rng) * 2.0 - 1.0);
    Tape tape;
    auto p = inserter.substitution_distribution(
        tape, make_tensor({1, kDim}, qv),
        fs_of(0, std::vector<std::string>(size_t(m1), "w"), ids), table);
    double tail = 0.0;
    for (int k = 1; k < m1; ++k) {
      double dot = 0.0;
      for (int64_t c = 0; c < kDim; ++c) {
        dot += (double(rows[size_t(k * kDim + c)]) - double(rows[size_t(c)])) *
               double(qv[size_t(c)]);
      }
      tail += std::exp(dot);
    }
    CHECK(double(p->data[0]) ==
          doctest::Approx(1.0 / (1.0 + tail)).epsilon(1e-5));
  }
}

TEST_CASE("substitution distribution is shift invariant in the embeddings") {
  Rng rng(17);
  TriggerInserter inserter({kDim, 0.5f}, SeedSequence(6));
  for (int trial = 0; trial < 200; ++trial) {
    const int m1 = 2 + int(uniform_below(rng, 4));
    std::vector<float> rows;
    for (int i = 0; i < m1 * kDim; ++i) {
      rows.push_back(float(uniform01(rng) * 2.0 - 1.0));
    }
    std::vector<float> shift(kDim);
    for (auto& v : shift) v = float(uniform01(rng) * 2.0 - 1.0);
    std::vector<float> shifted = rows;
    for (int k = 0; k < m1; ++k) {
      for (int64_t c = 0; c < kDim; ++c) {
        shifted[size_t(k * kDim + c)] += shift[size_t(c)];
      }
    }
    std::vector<float> qv(kDim);
    for (auto& v : qv) v = float(uniform01(rng) * 2.0 - 1.0);
    std::vector<int> ids(size_t(m1));
    for (int k = 0; k < m1; ++k) ids[size_t(k)] = k;
    auto fs = fs_of(0, std::vector<std::string>(size_t(m1), "w"), ids);

    Tape t1, t2;
    auto p1 = inserter.substitution_distribution(
        t1, make_tensor({1, kDim}, qv), fs, make_tensor({m1, kDim}, rows));
    auto p2 = inserter.substitution_distribution(
        t2, make_tensor({1, kDim}, qv), fs, make_tensor({m1, kDim}, shifted));
    for (int k = 0; k < m1; ++k) {
      CHECK(p1->data[size_t(k)] ==
            doctest::Approx(p2->data[size_t(k)]).epsilon(1e-4));
    }
  }
}

TEST_CASE("relax_sample with zero noise and unit temperature returns p") {
  TriggerInserter inserter = identity_inserter();
  Tape tape;
  auto scores = make_tensor({1, 3}, {0.2f, -0.4f, 0.9f});
  auto p = tape.softmax_rows(scores);
  const std::vector<float> zero(3, 0.0f);
  auto p_star = inserter.relax_sample_with_noise(tape, p, 1.0f, zero);
  for (int k = 0; k < 3; ++k) {
    CHECK(p_star->data[size_t(k)] ==
          doctest::Approx(p->data[size_t(k)]).epsilon(1e-6));
  }
}

TEST_CASE("gumbel-max argmax frequencies track the categorical (smoke)") {
  // full chi-square goodness of fit runs in the acceptance suite
  Rng rng(23);
  const std::vector<double> p{0.5, 0.3, 0.2};
  std::vector<int> counts(3, 0);
  const int draws = 20000;
  for (int i = 0; i < draws; ++i) {
    double best = -1e30;
    int arg = 0;
    for (int k = 0; k < 3; ++k) {
      const double z = std::log(p[size_t(k)]) + sample_gumbel_scalar(rng);
      if (z > best) {
        best = z;
        arg = k;
      }
    }
    ++counts[size_t(arg)];
  }
  for (int k = 0; k < 3; ++k) {
    CHECK(double(counts[size_t(k)]) / draws ==
          doctest::Approx(p[size_t(k)]).epsilon(0.05));
  }
}

TEST_CASE("one-hot relaxed weights reproduce the discrete embedding") {
  TriggerInserter inserter = identity_inserter();
  auto table = toy_table({1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12});
  Tape tape;
  auto cand = tape.embedding_rows(table, std::vector<int>{0, 1, 2});
  auto one_hot = make_tensor({1, 3}, {0.0f, 1.0f, 0.0f});
  auto w = inserter.weighted_embedding(tape, one_hot, cand);
  CHECK(w->data == std::vector<float>{5, 6, 7, 8});
}

TEST_CASE("pseudo_poison passes singleton positions through unchanged") {
  TriggerInserter inserter({kDim, 0.5f}, SeedSequence(7));
  auto table = toy_table({0.1f, 0.2f, 0.3f, 0.4f,
                          0.5f, 0.6f, 0.7f, 0.8f});
  std::vector<FeasibleWordSet> sets{fs_of(0, {"a"}, {0}), fs_of(1, {"b"}, {1})};
  Rng rng(1);
  Tape tape;
  auto out = inserter.pseudo_poison(tape, std::vector<int>{0, 1}, sets,
                                    table, rng);
  CHECK(out->shape == std::vector<int64_t>{2, kDim});
  CHECK(out->data == std::vector<float>{0.1f, 0.2f, 0.3f, 0.4f,
                                        0.5f, 0.6f, 0.7f, 0.8f});
}

TEST_CASE("pseudo_poison preserves sequence length") {
  TriggerInserter inserter({kDim, 0.5f}, SeedSequence(8));
  auto table = toy_table({0.1f, 0.2f, 0.3f, 0.4f,
                          0.5f, 0.6f, 0.7f, 0.8f,
                          -0.1f, -0.2f, -0.3f, -0.4f});
  std::vector<FeasibleWordSet> sets{
      fs_of(0, {"a", "b"}, {0, 1}),
      fs_of(1, {"b"}, {1}),
      fs_of(2, {"c", "a", "b"}, {2, 0, 1}),
  };
  Rng rng(5);
  Tape tape;
  auto out = inserter.pseudo_poison(tape, std::vector<int>{0, 1, 2}, sets,
                                    table, rng);
  CHECK(out->rows() == 3);
}

TEST_CASE("target-label gradient reaches the inserter parameters") {
  SeedSequence seeds(9);
  VictimConfig vcfg;
  vcfg.vocab_size = 6;
  vcfg.embed_dim = kDim;
  vcfg.hidden_dim = 5;
  vcfg.num_classes = 2;
  VictimModel victim(vcfg, SeedSequence(seeds.derive("victim")));
  TriggerInserter inserter({kDim, 0.5f}, SeedSequence(seeds.derive("ins")));
  std::vector<FeasibleWordSet> sets{
      fs_of(0, {"a", "b", "c"}, {0, 1, 2}),
      fs_of(1, {"d"}, {3}),
  };
  const std::vector<int> ids{0, 3};

  auto f = [&](Tape& tape) {
    Rng noise_rng(1234);  // frozen noise keeps f deterministic
    auto rows = inserter.pseudo_poison(tape, ids, sets,
                                       victim.embedding_table(), noise_rng);
    auto logits = victim.forward_embeddings(tape, rows);
    int target = 1;
    return tape.sum(tape.cross_entropy(logits, std::span(&target, 1)));
  };

  Rng rng(31);
  const float err = grad_check(f, inserter.params(), 5e-3f, 6, rng);
  CHECK(err < 1e-2f);

  Tape tape;
  auto loss = f(tape);
  tape.backward(loss);
  bool nonzero = false;
  for (float g : inserter.params().get("inserter.proj.W")->grad) {
    if (g != 0.0f) nonzero = true;
  }
  CHECK(nonzero);
}

TEST_CASE("hard poisoning keeps the original under a uniform distribution") {
  TriggerInserter inserter = identity_inserter();
  inserter.params().get("inserter.proj.W")->data.assign(kDim * kDim, 0.0f);
  auto table = toy_table({0.3f, 0.0f, 0.1f, 0.2f,
                          -0.4f, 0.2f, 0.0f, 0.1f,
                          0.2f, 0.2f, -0.1f, 0.0f});
  Example ex{{"a", "good", "movie"}, 0, 7};
  std::vector<FeasibleWordSet> sets{
      fs_of(0, {"a"}, {0}),
      fs_of(1, {"good", "fine"}, {1, 2}),
      fs_of(2, {"movie"}, {0}),
  };
  Example out = inserter.poison_example_hard(ex, sets, table);
  CHECK(out.tokens == ex.tokens);  // zero q -> uniform -> tie keeps k=0
  CHECK(out.poisoned);
  CHECK(out.substituted_positions.empty());
}

TEST_CASE("hard poisoning applies the argmax substitution with provenance") {
  TriggerInserter inserter = identity_inserter();
  // w = e0 scaled, s = 2*e0: score for s is positive, so argmax picks it
  auto table = toy_table({1.0f, 0.0f, 0.0f, 0.0f,
                          2.0f, 0.0f, 0.0f, 0.0f,
                          0.0f, 1.0f, 0.0f, 0.0f});
  Example ex{{"a", "good", "movie"}, 0, 8};
  std::vector<FeasibleWordSet> sets{
      fs_of(0, {"a"}, {2}),
      fs_of(1, {"good", "fine"}, {0, 1}),
      fs_of(2, {"movie"}, {2}),
  };
  Example out = inserter.poison_example_hard(ex, sets, table);
  CHECK(out.tokens == std::vector<std::string>{"a", "fine", "movie"});
  REQUIRE(out.substituted_positions.size() == 1);
  CHECK(out.substituted_positions[0].position == 1);
  CHECK(out.substituted_positions[0].original == "good");
  CHECK(out.substituted_positions[0].chosen == "fine");

  Example again = inserter.poison_example_hard(ex, sets, table);
  CHECK(again.tokens == out.tokens);  // deterministic
}
