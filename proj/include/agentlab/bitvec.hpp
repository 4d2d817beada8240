#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "agentlab/bytes.hpp"
#include "agentlab/errors.hpp"
#include "agentlab/rng.hpp"

namespace agentlab {

// Fixed-width bit vector packed into 64-bit words. Index 0 is the leftmost
// cell in the string representation.
class BitVec {
 public:
  BitVec() = default;

  explicit BitVec(std::size_t n, bool fill = false)
      : words_((n + 63) / 64, fill ? ~0ull : 0ull), size_(n) {
    trim();
  }

  static BitVec from_string(std::string_view s) {
    BitVec v(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '1') {
        v.set(i, true);
      } else if (s[i] != '0') {
        throw InputError("bit string must contain only '0' and '1'");
      }
    }
    return v;
  }

  static BitVec random(std::size_t n, Rng& rng) {
    BitVec v(n);
    for (auto& w : v.words_) w = rng();
    v.trim();
    return v;
  }

  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }

  bool get(std::size_t i) const {
    return (words_[i >> 6] >> (i & 63)) & 1ull;
  }

  void set(std::size_t i, bool v) {
    if (v)
      words_[i >> 6] |= 1ull << (i & 63);
    else
      words_[i >> 6] &= ~(1ull << (i & 63));
  }

  void flip(std::size_t i) { words_[i >> 6] ^= 1ull << (i & 63); }

  std::size_t popcount() const {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }

  std::size_t hamming(const BitVec& o) const {
    if (size_ != o.size_) throw InputError("hamming requires equal widths");
    std::size_t n = 0;
    for (std::size_t i = 0; i < words_.size(); ++i)
      n += static_cast<std::size_t>(std::popcount(words_[i] ^ o.words_[i]));
    return n;
  }

  BitVec operator^(const BitVec& o) const {
    if (size_ != o.size_) throw InputError("xor requires equal widths");
    BitVec r = *this;
    for (std::size_t i = 0; i < words_.size(); ++i) r.words_[i] ^= o.words_[i];
    return r;
  }

  bool operator==(const BitVec& o) const {
    return size_ == o.size_ && words_ == o.words_;
  }
  bool operator!=(const BitVec& o) const { return !(*this == o); }

  // Cyclic shift: result[i] = (*this)[(i + k) mod size], k may be negative.
  BitVec rotated(std::int64_t k) const {
    if (size_ == 0) return *this;
    std::int64_t n = static_cast<std::int64_t>(size_);
    std::int64_t s = ((k % n) + n) % n;
    BitVec r(size_);
    for (std::size_t i = 0; i < size_; ++i) {
      std::size_t j = (i + static_cast<std::size_t>(s)) % size_;
      if (get(j)) r.set(i, true);
    }
    return r;
  }

  std::string to_string() const {
    std::string s(size_, '0');
    for (std::size_t i = 0; i < size_; ++i)
      if (get(i)) s[i] = '1';
    return s;
  }

  // Packed little-endian payload bytes, LSB of byte 0 is bit 0.
  std::string to_bytes() const {
    std::string b((size_ + 7) / 8, '\0');
    for (std::size_t i = 0; i < size_; ++i)
      if (get(i)) b[i >> 3] |= static_cast<char>(1 << (i & 7));
    return b;
  }

 private:
  void trim() {
    if (size_ % 64 != 0 && !words_.empty())
      words_.back() &= (~0ull >> (64 - (size_ % 64)));
  }

  std::vector<std::uint64_t> words_;
  std::size_t size_ = 0;
};

inline void encode_state(ByteSink& s, const BitVec& v) {
  s.put_varint(v.size());
  s.put_bytes(v.to_bytes());
}

}  // namespace agentlab
