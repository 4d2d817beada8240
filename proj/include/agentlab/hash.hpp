#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "agentlab/bytes.hpp"

namespace agentlab {

inline std::uint64_t fnv1a64(std::string_view data,
                             std::uint64_t h = 0xcbf29ce484222325ull) {
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return s;
}

// Stable 16-hex-digit hash of a state's canonical bytes.
template <class T>
std::string state_hash(const T& v) {
  return hex64(fnv1a64(canonical_bytes(v)));
}

}  // namespace agentlab
