#pragma once

#include <cstdint>
#include <limits>
#include <string_view>

namespace copeland {

// SplitMix64 finalizer. Used for seed derivation and for expanding a 64-bit
// seed into engine state.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// FNV-1a, for turning a stage tag into a 64-bit constant.
constexpr std::uint64_t tag_hash(std::string_view tag) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Stream-splitting rule shared by every randomized component:
//   derive_seed(master, index, tag) = splitmix64(splitmix64(master ^ tag_hash(tag)) ^ splitmix64(index))
// Distinct (index, tag) pairs give statistically independent substreams, and the
// result does not depend on the order in which substreams are created.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index,
                                    std::string_view tag) {
  return splitmix64(splitmix64(master ^ tag_hash(tag)) ^ splitmix64(index));
}

// xoshiro256** (Blackman & Vigna). Small state, cheap to seed, so one engine
// per comparison pair is affordable. Satisfies UniformRandomBitGenerator.
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& s : state_) {
      x += 0x9e3779b97f4a7c15ULL;
      std::uint64_t z = x;
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
      s = z ^ (z >> 31);
    }
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4];
};

}  // namespace copeland
