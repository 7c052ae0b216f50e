#include "lws/ngram_lm.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <stdexcept>

namespace lws {

namespace {

void put_u32(std::ostream& os, uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v),
                        static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16),
                        static_cast<unsigned char>(v >> 24)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  if (!is) throw std::runtime_error("lm: truncated file");
  return uint32_t(b[0]) | uint32_t(b[1]) << 8 | uint32_t(b[2]) << 16 |
         uint32_t(b[3]) << 24;
}

void put_u64(std::ostream& os, uint64_t v) {
  put_u32(os, static_cast<uint32_t>(v));
  put_u32(os, static_cast<uint32_t>(v >> 32));
}

uint64_t get_u64(std::istream& is) {
  const uint64_t lo = get_u32(is);
  const uint64_t hi = get_u32(is);
  return lo | hi << 32;
}

void put_f64(std::ostream& os, double v) {
  uint64_t bits;
  std::memcpy(&bits, &v, 8);
  put_u64(os, bits);
}

double get_f64(std::istream& is) {
  const uint64_t bits = get_u64(is);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

void put_counts(std::ostream& os, const std::map<std::vector<int>, int64_t>& m) {
  put_u64(os, m.size());
  for (const auto& [key, count] : m) {
    put_u32(os, static_cast<uint32_t>(key.size()));
    for (int id : key) put_u32(os, static_cast<uint32_t>(id));
    put_u64(os, static_cast<uint64_t>(count));
  }
}

std::map<std::vector<int>, int64_t> get_counts(std::istream& is) {
  std::map<std::vector<int>, int64_t> m;
  const uint64_t n = get_u64(is);
  for (uint64_t i = 0; i < n; ++i) {
    const uint32_t len = get_u32(is);
    std::vector<int> key(len);
    for (auto& id : key) id = static_cast<int>(get_u32(is));
    m[std::move(key)] = static_cast<int64_t>(get_u64(is));
  }
  return m;
}

}  // namespace

NgramLM NgramLM::train(const Dataset& corpus, int order, double k) {
  if (corpus.examples.empty()) {
    throw std::invalid_argument("lm: empty training corpus");
  }
  if (order < 1) throw std::invalid_argument("lm: order must be >= 1");
  if (!(k > 0.0)) {
    throw std::invalid_argument("lm: smoothing k must be > 0");
  }
  NgramLM lm;
  lm.order_ = order;
  lm.k_ = k;
  lm.vocab_ = {"<s>", "</s>", "<unk>"};
  std::set<std::string> seen;
  for (const auto& ex : corpus.examples) {
    for (const auto& t : ex.tokens) seen.insert(t);
  }
  for (const auto& t : seen) lm.vocab_.push_back(t);
  for (size_t i = 0; i < lm.vocab_.size(); ++i) {
    lm.index_[lm.vocab_[i]] = static_cast<int>(i);
  }
  for (const auto& ex : corpus.examples) {
    const auto stream = lm.encode_stream(ex.tokens);
    for (size_t i = size_t(order - 1); i < stream.size(); ++i) {
      std::vector<int> ctx(stream.begin() + i - (order - 1), stream.begin() + i);
      ++lm.context_counts_[ctx];
      ctx.push_back(stream[i]);
      ++lm.ngram_counts_[ctx];
    }
  }
  return lm;
}

std::vector<int> NgramLM::encode_stream(
    std::span<const std::string> tokens) const {
  std::vector<int> stream;
  stream.reserve(tokens.size() + size_t(order_));
  for (int i = 0; i < order_ - 1; ++i) stream.push_back(kLmBos);
  for (const auto& t : tokens) stream.push_back(token_id(t));
  stream.push_back(kLmEos);
  return stream;
}

int NgramLM::token_id(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? kLmUnk : it->second;
}

int64_t NgramLM::predicted_vocab_size() const {
  // Everything except the start marker can be predicted.
  return static_cast<int64_t>(vocab_.size()) - 1;
}

double NgramLM::prob(std::span<const int> context, int token_id) const {
  if (static_cast<int>(context.size()) != order_ - 1) {
    throw std::invalid_argument("lm: context length must be order-1");
  }
  const std::vector<int> ctx(context.begin(), context.end());
  auto cit = context_counts_.find(ctx);
  const int64_t ctx_count = cit == context_counts_.end() ? 0 : cit->second;
  std::vector<int> full = ctx;
  full.push_back(token_id);
  auto nit = ngram_counts_.find(full);
  const int64_t full_count = nit == ngram_counts_.end() ? 0 : nit->second;
  return (double(full_count) + k_) /
         (double(ctx_count) + k_ * double(predicted_vocab_size()));
}

double NgramLM::perplexity(std::span<const std::string> tokens) const {
  if (tokens.empty()) throw std::invalid_argument("lm: empty token sequence");
  const auto stream = encode_stream(tokens);
  double nll = 0.0;
  int64_t n = 0;
  for (size_t i = size_t(order_ - 1); i < stream.size(); ++i) {
    const std::span<const int> ctx(stream.data() + i - (order_ - 1),
                                   size_t(order_ - 1));
    nll -= std::log(prob(ctx, stream[i]));
    ++n;
  }
  return std::exp(nll / double(n));
}

void NgramLM::save(const std::string& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("lm: cannot write " + path);
  os.write("LWSN", 4);
  put_u32(os, 1);  // version
  put_u32(os, static_cast<uint32_t>(order_));
  put_f64(os, k_);
  put_u64(os, vocab_.size());
  for (const auto& t : vocab_) {
    put_u32(os, static_cast<uint32_t>(t.size()));
    os.write(t.data(), static_cast<std::streamsize>(t.size()));
  }
  put_counts(os, context_counts_);
  put_counts(os, ngram_counts_);
  if (!os) throw std::runtime_error("lm: write failed for " + path);
}

NgramLM NgramLM::load(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("lm: cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "LWSN", 4) != 0) {
    throw std::runtime_error("lm: bad magic in " + path);
  }
  const uint32_t version = get_u32(is);
  if (version != 1) {
    throw std::runtime_error("lm: unsupported version " +
                             std::to_string(version));
  }
  NgramLM lm;
  lm.order_ = static_cast<int>(get_u32(is));
  lm.k_ = get_f64(is);
  const uint64_t vocab_n = get_u64(is);
  lm.vocab_.clear();
  for (uint64_t i = 0; i < vocab_n; ++i) {
    const uint32_t len = get_u32(is);
    std::string t(len, '\0');
    is.read(t.data(), len);
    if (!is) throw std::runtime_error("lm: truncated vocab");
    lm.vocab_.push_back(std::move(t));
  }
  for (size_t i = 0; i < lm.vocab_.size(); ++i) {
    lm.index_[lm.vocab_[i]] = static_cast<int>(i);
  }
  lm.context_counts_ = get_counts(is);
  lm.ngram_counts_ = get_counts(is);
  return lm;
}

}  // namespace lws
