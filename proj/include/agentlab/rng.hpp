#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace agentlab {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Derives an independent stream seed from a master seed plus context tags.
// Same (master, tags) always yields the same seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t s = master ^ 0x6a09e667f3bcc909ull;
  std::uint64_t out = splitmix64_next(s);
  s ^= a * 0x9e3779b97f4a7c15ull;
  out ^= splitmix64_next(s);
  s ^= b * 0xc2b2ae3d27d4eb4full;
  out ^= splitmix64_next(s);
  s ^= c * 0x165667b19e3779f9ull;
  out ^= splitmix64_next(s);
  return out;
}

inline std::uint64_t tag_of(std::string_view name) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : name) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline Rng make_rng(std::uint64_t seed) { return Rng{seed}; }

}  // namespace agentlab
