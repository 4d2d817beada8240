#pragma once

#include <bit>
#include <cstdint>
#include <string_view>

#include "agentlab/bitvec.hpp"
#include "agentlab/bytes.hpp"

namespace agentlab {

// Normalized Hamming distance over aligned bit representations. States of
// unequal length are compared as if the shorter one were padded with a
// sentinel that matches nothing, so every missing position counts as a
// difference. Result is in [0, 1]; zero iff the states are identical.
inline double state_distance(const BitVec& a, const BitVec& b) {
  const std::size_t na = a.size(), nb = b.size();
  if (na == 0 && nb == 0) return 0.0;
  const std::size_t common = na < nb ? na : nb;
  const std::size_t longest = na < nb ? nb : na;
  std::size_t diff = longest - common;
  for (std::size_t i = 0; i < common; ++i)
    if (a.get(i) != b.get(i)) ++diff;
  return static_cast<double>(diff) / static_cast<double>(longest);
}

inline double state_distance(std::string_view a, std::string_view b) {
  const std::size_t na = a.size(), nb = b.size();
  if (na == 0 && nb == 0) return 0.0;
  const std::size_t common = na < nb ? na : nb;
  const std::size_t longest = na < nb ? nb : na;
  std::size_t diff_bits = (longest - common) * 8;
  for (std::size_t i = 0; i < common; ++i)
    diff_bits += static_cast<std::size_t>(std::popcount(
        static_cast<unsigned>(static_cast<unsigned char>(a[i]) ^
                              static_cast<unsigned char>(b[i]))));
  return static_cast<double>(diff_bits) / static_cast<double>(longest * 8);
}

// Bit view of an arbitrary state through its canonical byte encoding.
inline const BitVec& to_bits(const BitVec& v) { return v; }

template <class T>
BitVec to_bits(const T& v) {
  const std::string bytes = canonical_bytes(v);
  BitVec bits(bytes.size() * 8);
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    const unsigned char c = static_cast<unsigned char>(bytes[i]);
    for (int b = 0; b < 8; ++b)
      if ((c >> b) & 1) bits.set(i * 8 + static_cast<std::size_t>(b), true);
  }
  return bits;
}

}  // namespace agentlab
