#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "lws/tensor.hpp"

namespace lws {

using Rng = std::mt19937_64;

/// Uniform in [0,1) built from the top 53 bits; avoids the
/// implementation-defined std::uniform_real_distribution.
double uniform01(Rng& rng);

/// Uniform integer in [0, n). n must be > 0.
uint64_t uniform_below(Rng& rng, uint64_t n);

/// Fisher-Yates shuffle with the portable uniform_below.
template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (size_t i = v.size(); i > 1; --i) {
    size_t j = static_cast<size_t>(uniform_below(rng, i));
    std::swap(v[i - 1], v[j]);
  }
}

/// Standard Gumbel(0,1) draw: -log(-log(U)), U clamped to [eps, 1-eps].
float sample_gumbel_scalar(Rng& rng);

/// Tensor of iid Gumbel(0,1) noise.
TensorPtr sample_gumbel(const std::vector<int64_t>& shape, Rng& rng);

/// N(0, sigma) via Box-Muller on the portable uniform; deterministic.
float sample_normal(Rng& rng, float sigma);

/// Counter-based derivation of per-component seeds from one global seed.
/// Identical (seed, label, counter) triples always yield the same stream.
class SeedSequence {
 public:
  explicit SeedSequence(uint64_t global_seed) : global_(global_seed) {}
  uint64_t derive(std::string_view label, uint64_t counter = 0) const;
  Rng stream(std::string_view label, uint64_t counter = 0) const;
  uint64_t global() const { return global_; }

 private:
  uint64_t global_;
};

}  // namespace lws
