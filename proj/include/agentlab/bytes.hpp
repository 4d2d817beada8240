#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <variant>
#include <vector>

#include "agentlab/errors.hpp"

namespace agentlab {

// Canonical byte encoding used for hashing, distances, compression and the
// full-state trace logs. Encoders append to a ByteSink; every encodable type
// provides an encode_state overload found by ADL.

struct ByteSink {
  std::string out;

  void put_u8(std::uint8_t v) { out.push_back(static_cast<char>(v)); }

  void put_varint(std::uint64_t v) {
    while (v >= 0x80) {
      put_u8(static_cast<std::uint8_t>(v) | 0x80);
      v >>= 7;
    }
    put_u8(static_cast<std::uint8_t>(v));
  }

  void put_zigzag(std::int64_t v) {
    put_varint((static_cast<std::uint64_t>(v) << 1) ^
               static_cast<std::uint64_t>(v >> 63));
  }

  void put_bytes(std::string_view b) { out.append(b.data(), b.size()); }

  void put_prefixed(std::string_view b) {
    put_varint(b.size());
    put_bytes(b);
  }
};

struct ByteReader {
  std::string_view in;
  std::size_t pos = 0;

  bool at_end() const { return pos >= in.size(); }

  std::uint8_t get_u8() {
    if (pos >= in.size()) throw Error("byte stream truncated");
    return static_cast<std::uint8_t>(in[pos++]);
  }

  std::uint64_t get_varint() {
    std::uint64_t v = 0;
    int shift = 0;
    for (;;) {
      std::uint8_t b = get_u8();
      v |= static_cast<std::uint64_t>(b & 0x7f) << shift;
      if (!(b & 0x80)) break;
      shift += 7;
      if (shift > 63) throw Error("varint too long");
    }
    return v;
  }

  std::int64_t get_zigzag() {
    std::uint64_t v = get_varint();
    return static_cast<std::int64_t>((v >> 1) ^ (~(v & 1) + 1));
  }

  std::string_view get_bytes(std::size_t n) {
    if (pos + n > in.size()) throw Error("byte stream truncated");
    std::string_view r = in.substr(pos, n);
    pos += n;
    return r;
  }

  std::string_view get_prefixed() { return get_bytes(get_varint()); }
};

inline void encode_state(ByteSink& s, std::uint64_t v) { s.put_varint(v); }
inline void encode_state(ByteSink& s, std::uint32_t v) { s.put_varint(v); }
inline void encode_state(ByteSink& s, std::int64_t v) { s.put_zigzag(v); }
inline void encode_state(ByteSink& s, std::int32_t v) { s.put_zigzag(v); }
inline void encode_state(ByteSink& s, bool v) { s.put_u8(v ? 1 : 0); }
inline void encode_state(ByteSink& s, const std::string& v) { s.put_prefixed(v); }
inline void encode_state(ByteSink& s, std::string_view v) { s.put_prefixed(v); }

template <class A, class B>
void encode_state(ByteSink& s, const std::pair<A, B>& p) {
  encode_state(s, p.first);
  encode_state(s, p.second);
}

template <class T>
void encode_state(ByteSink& s, const std::vector<T>& v) {
  s.put_varint(v.size());
  for (const auto& x : v) encode_state(s, x);
}

template <class... Ts>
void encode_state(ByteSink& s, const std::variant<Ts...>& v) {
  s.put_varint(v.index());
  std::visit([&](const auto& x) { encode_state(s, x); }, v);
}

template <class T>
std::string canonical_bytes(const T& v) {
  ByteSink s;
  encode_state(s, v);
  return s.out;
}

}  // namespace agentlab
