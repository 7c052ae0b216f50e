#include "lws/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace lws {

namespace {

constexpr double kGumbelEps = 1e-10;

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint64_t fnv1a(std::string_view s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

uint64_t uniform_below(Rng& rng, uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_below: n must be > 0");
  // Rejection sampling for an unbiased draw.
  const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

float sample_gumbel_scalar(Rng& rng) {
  double u = uniform01(rng);
  if (u < kGumbelEps) u = kGumbelEps;
  if (u > 1.0 - kGumbelEps) u = 1.0 - kGumbelEps;
  return static_cast<float>(-std::log(-std::log(u)));
}

TensorPtr sample_gumbel(const std::vector<int64_t>& shape, Rng& rng) {
  auto t = make_tensor(shape);
  for (auto& v : t->data) v = sample_gumbel_scalar(rng);
  return t;
}

float sample_normal(Rng& rng, float sigma) {
  double u1 = uniform01(rng);
  if (u1 < 1e-12) u1 = 1e-12;
  const double u2 = uniform01(rng);
  const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  return static_cast<float>(z * sigma);
}

uint64_t SeedSequence::derive(std::string_view label, uint64_t counter) const {
  return splitmix64(global_ ^ fnv1a(label) ^ splitmix64(counter));
}

Rng SeedSequence::stream(std::string_view label, uint64_t counter) const {
  return Rng(derive(label, counter));
}

}  // namespace lws
