#pragma once

#include <bit>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "agentlab/errors.hpp"

namespace agentlab {

// Lossless coders used as computable stand-ins for description length.
// compress returns both the packed bytes and the exact bit count; decompress
// restores the original payload for every input.

namespace detail {

class BitWriter {
 public:
  void put_bit(unsigned b) {
    if (fill_ == 0) bytes_.push_back('\0');
    if (b) bytes_.back() |= static_cast<char>(1 << (7 - fill_));
    fill_ = (fill_ + 1) & 7;
    ++bits_;
  }

  void put_bits(std::uint64_t v, int n) {
    for (int i = n - 1; i >= 0; --i) put_bit(static_cast<unsigned>((v >> i) & 1));
  }

  // Elias gamma code for v >= 1.
  void put_gamma(std::uint64_t v) {
    const int k = std::bit_width(v) - 1;
    for (int i = 0; i < k; ++i) put_bit(0);
    put_bits(v, k + 1);
  }

  std::uint64_t bit_count() const { return bits_; }
  std::string take() { return std::move(bytes_); }

 private:
  std::string bytes_;
  int fill_ = 0;
  std::uint64_t bits_ = 0;
};

class BitReaderMsb {
 public:
  explicit BitReaderMsb(std::string_view data) : data_(data) {}

  unsigned get_bit() {
    if (pos_ >= data_.size() * 8) throw Error("bit stream truncated");
    const unsigned byte = static_cast<unsigned char>(data_[pos_ >> 3]);
    const unsigned bit = (byte >> (7 - (pos_ & 7))) & 1;
    ++pos_;
    return bit;
  }

  std::uint64_t get_bits(int n) {
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v = (v << 1) | get_bit();
    return v;
  }

  std::uint64_t get_gamma() {
    int k = 0;
    while (get_bit() == 0) {
      if (++k > 63) throw Error("gamma code too long");
    }
    std::uint64_t v = 1;
    for (int i = 0; i < k; ++i) v = (v << 1) | get_bit();
    return v;
  }

 private:
  std::string_view data_;
  std::size_t pos_ = 0;
};

inline int gamma_bits(std::uint64_t v) { return 2 * (std::bit_width(v) - 1) + 1; }

}  // namespace detail

struct Compressed {
  std::string bytes;
  std::uint64_t bits = 0;
};

class Compressor {
 public:
  virtual ~Compressor() = default;
  virtual std::string id() const = 0;
  virtual Compressed compress(std::string_view payload) const = 0;
  virtual std::string decompress(std::string_view bytes) const = 0;
};

// Classic incremental-dictionary coder. Tokens are (phrase index, literal)
// pairs; each token also extends the dictionary by one phrase. Index width
// grows with the dictionary. A flag bit per token marks the final
// index-only token used when the input ends in the middle of a phrase.
class Lz78Codec final : public Compressor {
 public:
  std::string id() const override { return "lz78"; }

  Compressed compress(std::string_view payload) const override {
    detail::BitWriter w;
    w.put_gamma(payload.size() + 1);
    std::unordered_map<std::uint64_t, std::uint32_t> trie;
    std::uint32_t dict_size = 0;
    std::uint32_t cur = 0;  // index of the phrase matched so far, 0 = empty
    for (unsigned char c : payload) {
      const std::uint64_t key =
          (static_cast<std::uint64_t>(cur) << 8) | c;
      auto it = trie.find(key);
      if (it != trie.end()) {
        cur = it->second;
        continue;
      }
      w.put_bit(0);
      w.put_bits(cur, std::bit_width(dict_size));
      w.put_bits(c, 8);
      trie.emplace(key, ++dict_size);
      cur = 0;
    }
    if (cur != 0) {
      w.put_bit(1);
      w.put_bits(cur, std::bit_width(dict_size));
    }
    Compressed out;
    out.bits = w.bit_count();
    out.bytes = w.take();
    return out;
  }

  std::string decompress(std::string_view bytes) const override {
    detail::BitReaderMsb r(bytes);
    const std::uint64_t length = r.get_gamma() - 1;
    std::vector<std::pair<std::uint32_t, unsigned char>> phrases;  // parent, ch
    auto phrase_of = [&](std::uint32_t idx) {
      std::string s;
      while (idx != 0) {
        s.push_back(static_cast<char>(phrases[idx - 1].second));
        idx = phrases[idx - 1].first;
      }
      return std::string(s.rbegin(), s.rend());
    };
    std::string out;
    out.reserve(length);
    while (out.size() < length) {
      const unsigned final_flag = r.get_bit();
      const std::uint32_t idx = static_cast<std::uint32_t>(
          r.get_bits(std::bit_width(static_cast<std::uint32_t>(phrases.size()))));
      out += phrase_of(idx);
      if (final_flag) break;
      const unsigned char c = static_cast<unsigned char>(r.get_bits(8));
      out.push_back(static_cast<char>(c));
      phrases.emplace_back(idx, c);
    }
    if (out.size() != length) throw Error("lz78 stream inconsistent");
    return out;
  }
};

// Greedy sliding-window coder with an unbounded window. Matches may overlap
// their own output, so runs collapse to a few tokens. Offsets and lengths
// are gamma-coded; a match is only emitted when it beats spelling the bytes
// out as literals.
class Lz77Codec final : public Compressor {
 public:
  std::string id() const override { return "lz77"; }

  Compressed compress(std::string_view payload) const override {
    detail::BitWriter w;
    w.put_gamma(payload.size() + 1);
    const std::size_t n = payload.size();
    std::vector<std::int32_t> head(1 << 16, -1);
    std::vector<std::int32_t> chain(n, -1);
    auto hash3 = [&](std::size_t pos) {
      const std::uint32_t v =
          static_cast<std::uint32_t>(static_cast<unsigned char>(payload[pos])) |
          (static_cast<std::uint32_t>(
               static_cast<unsigned char>(payload[pos + 1]))
           << 8) |
          (static_cast<std::uint32_t>(
               static_cast<unsigned char>(payload[pos + 2]))
           << 16);
      return (v * 2654435761u) >> 16;
    };
    auto insert_pos = [&](std::size_t pos) {
      if (pos + 3 > n) return;
      const std::uint32_t h = hash3(pos);
      chain[pos] = head[h];
      head[h] = static_cast<std::int32_t>(pos);
    };

    std::size_t pos = 0;
    while (pos < n) {
      std::size_t best_len = 0, best_dist = 0;
      if (pos + 3 <= n) {
        std::int32_t cand = head[hash3(pos)];
        int tries = 128;
        while (cand >= 0 && tries-- > 0) {
          const std::size_t c = static_cast<std::size_t>(cand);
          std::size_t len = 0;
          while (pos + len < n && payload[c + len] == payload[pos + len]) ++len;
          if (len > best_len) {
            best_len = len;
            best_dist = pos - c;
          }
          cand = chain[c];
        }
      }
      bool emitted_match = false;
      if (best_len >= 3) {
        const int cost = 1 + detail::gamma_bits(best_dist) +
                         detail::gamma_bits(best_len - 2);
        if (cost < static_cast<int>(9 * best_len)) {
          w.put_bit(1);
          w.put_gamma(best_dist);
          w.put_gamma(best_len - 2);
          for (std::size_t i = 0; i < best_len; ++i) insert_pos(pos + i);
          pos += best_len;
          emitted_match = true;
        }
      }
      if (!emitted_match) {
        w.put_bit(0);
        w.put_bits(static_cast<unsigned char>(payload[pos]), 8);
        insert_pos(pos);
        ++pos;
      }
    }
    Compressed out;
    out.bits = w.bit_count();
    out.bytes = w.take();
    return out;
  }

  std::string decompress(std::string_view bytes) const override {
    detail::BitReaderMsb r(bytes);
    const std::uint64_t length = r.get_gamma() - 1;
    std::string out;
    out.reserve(length);
    while (out.size() < length) {
      if (r.get_bit()) {
        const std::uint64_t dist = r.get_gamma();
        const std::uint64_t len = r.get_gamma() + 2;
        if (dist == 0 || dist > out.size()) throw Error("lz77 bad offset");
        for (std::uint64_t i = 0; i < len; ++i)
          out.push_back(out[out.size() - dist]);
      } else {
        out.push_back(static_cast<char>(r.get_bits(8)));
      }
    }
    if (out.size() != length) throw Error("lz77 stream inconsistent");
    return out;
  }
};

inline const Compressor& default_compressor() {
  static const Lz78Codec codec;
  return codec;
}

inline const Compressor& compressor_by_id(std::string_view id) {
  static const Lz78Codec lz78;
  static const Lz77Codec lz77;
  if (id == "lz78") return lz78;
  if (id == "lz77") return lz77;
  throw InputError("unknown compressor id: " + std::string(id));
}

// Compressed size in bits; an upper bound on the payload's description
// length under the chosen coder.
inline std::uint64_t compress_bound(std::string_view payload,
                                    const Compressor& coder) {
  return coder.compress(payload).bits;
}

inline std::uint64_t compress_bound(std::string_view payload) {
  return compress_bound(payload, default_compressor());
}

}  // namespace agentlab
