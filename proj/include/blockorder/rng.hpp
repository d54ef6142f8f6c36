// Deterministic random number generation for samplers and experiments.
//
// The generator is xoshiro256++ seeded through SplitMix64, so a 64-bit seed
// fully determines every draw on every platform.  Parallel replications use
// derive_stream() to split one master seed into independent streams: the
// master seed is hashed together with a list of 64-bit tags (grid point,
// replication index, method name hash, ...) one SplitMix64 round per tag.

#pragma once

#include <cstdint>
#include <cmath>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace blockorder {

struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
};

// FNV-1a, used to turn method/scenario names into stream tags.
inline std::uint64_t hash_tag(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Mixes a master seed with an ordered list of tags into a new 64-bit seed.
inline std::uint64_t derive_stream(std::uint64_t master,
                                   std::initializer_list<std::uint64_t> tags) {
  SplitMix64 mix(master);
  std::uint64_t h = mix.next();
  for (std::uint64_t t : tags) {
    SplitMix64 step(h ^ (t + 0x9e3779b97f4a7c15ULL));
    h = step.next();
  }
  return h;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    SplitMix64 mix(seed);
    for (auto& w : s_) w = mix.next();
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform double in [0,1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  bool bernoulli(double p) { return uniform01() < p; }

  // Unbiased integer in [0, n) by rejection.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("Rng::below: n must be positive");
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  // Index a in [0,k) with probability weights[a] / sum(weights).
  int categorical(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double u = uniform01() * total;
    for (std::size_t a = 0; a + 1 < weights.size(); ++a) {
      u -= weights[a];
      if (u < 0.0) return static_cast<int>(a);
    }
    return static_cast<int>(weights.size()) - 1;
  }

  // One draw from Dirichlet(1,...,1): normalized standard exponentials.
  std::vector<double> flat_dirichlet(int k) {
    std::vector<double> x(static_cast<std::size_t>(k));
    double total = 0.0;
    for (auto& v : x) {
      double u = uniform01();
      if (u <= 0.0) u = 0x1.0p-53;
      v = -std::log(u);
      total += v;
    }
    for (auto& v : x) v /= total;
    return x;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t s_[4];
};

}  // namespace blockorder
