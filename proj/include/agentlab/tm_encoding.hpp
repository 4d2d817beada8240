#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "agentlab/bytes.hpp"
#include "agentlab/errors.hpp"
#include "agentlab/turing.hpp"

namespace agentlab {

// Canonical machine-plus-input encoding, format "TMW1":
//   magic "TMW1"
//   states:        varint count, then length-prefixed names (sorted)
//   tape alphabet: varint count, then length-prefixed names (sorted)
//   blank, start, accept, reject as varint ids in the sorted numbering
//   input alphabet: varint count + varint ids
//   delta: varint count + rows of 5 varints (state, read, next, write, move)
//          sorted by (state, read); move is 0 for left, 1 for right
//   input word: varint length + varint symbol ids
// Sorting the name tables and rows makes the encoding canonical: machines
// that differ only in listing order encode identically, and any semantic
// difference (one delta row, one name) produces different bytes.

// Returns a copy with states and symbols relabeled in sorted-name order.
inline TuringMachine tm_canonicalize(const TuringMachine& tm) {
  tm.validate();
  std::vector<int> state_order(static_cast<std::size_t>(tm.num_states()));
  std::iota(state_order.begin(), state_order.end(), 0);
  std::sort(state_order.begin(), state_order.end(), [&](int a, int b) {
    return tm.states[static_cast<std::size_t>(a)] <
           tm.states[static_cast<std::size_t>(b)];
  });
  std::vector<int> sym_order(static_cast<std::size_t>(tm.num_symbols()));
  std::iota(sym_order.begin(), sym_order.end(), 0);
  std::sort(sym_order.begin(), sym_order.end(), [&](int a, int b) {
    return tm.tape_alphabet[static_cast<std::size_t>(a)] <
           tm.tape_alphabet[static_cast<std::size_t>(b)];
  });

  std::vector<int> state_new(state_order.size()), sym_new(sym_order.size());
  for (std::size_t i = 0; i < state_order.size(); ++i)
    state_new[static_cast<std::size_t>(state_order[i])] = static_cast<int>(i);
  for (std::size_t i = 0; i < sym_order.size(); ++i)
    sym_new[static_cast<std::size_t>(sym_order[i])] = static_cast<int>(i);

  TuringMachine out;
  out.name = tm.name;
  for (int old : state_order)
    out.states.push_back(tm.states[static_cast<std::size_t>(old)]);
  for (int old : sym_order)
    out.tape_alphabet.push_back(tm.tape_alphabet[static_cast<std::size_t>(old)]);
  out.blank = sym_new[static_cast<std::size_t>(tm.blank)];
  out.start = state_new[static_cast<std::size_t>(tm.start)];
  out.accept = state_new[static_cast<std::size_t>(tm.accept)];
  out.reject = state_new[static_cast<std::size_t>(tm.reject)];
  for (int a : tm.input_symbols)
    out.input_symbols.push_back(sym_new[static_cast<std::size_t>(a)]);
  std::sort(out.input_symbols.begin(), out.input_symbols.end());
  for (const auto& [key, tr] : tm.delta) {
    TmTransition t{state_new[static_cast<std::size_t>(tr.next)],
                   sym_new[static_cast<std::size_t>(tr.write)], tr.move};
    out.delta[{state_new[static_cast<std::size_t>(key.first)],
               sym_new[static_cast<std::size_t>(key.second)]}] = t;
  }
  return out;
}

inline bool tm_equivalent(const TuringMachine& a, const TuringMachine& b) {
  const TuringMachine ca = tm_canonicalize(a);
  const TuringMachine cb = tm_canonicalize(b);
  return ca.states == cb.states && ca.tape_alphabet == cb.tape_alphabet &&
         ca.blank == cb.blank && ca.start == cb.start &&
         ca.accept == cb.accept && ca.reject == cb.reject &&
         ca.input_symbols == cb.input_symbols && ca.delta == cb.delta;
}

inline std::string encode_tm_with_input(const TuringMachine& tm,
                                        const std::vector<int>& input) {
  for (int sym : input)
    if (!tm.is_input_symbol(sym))
      throw InputError("encoded word contains a non-input symbol");
  const TuringMachine c = tm_canonicalize(tm);

  // Remap the word through the same relabeling the canonical form used.
  std::vector<int> word;
  word.reserve(input.size());
  for (int sym : input)
    word.push_back(
        c.symbol_id(tm.tape_alphabet[static_cast<std::size_t>(sym)]));

  ByteSink s;
  s.put_bytes("TMW1");
  s.put_varint(c.states.size());
  for (const auto& n : c.states) s.put_prefixed(n);
  s.put_varint(c.tape_alphabet.size());
  for (const auto& n : c.tape_alphabet) s.put_prefixed(n);
  s.put_varint(static_cast<std::uint64_t>(c.blank));
  s.put_varint(static_cast<std::uint64_t>(c.start));
  s.put_varint(static_cast<std::uint64_t>(c.accept));
  s.put_varint(static_cast<std::uint64_t>(c.reject));
  s.put_varint(c.input_symbols.size());
  for (int a : c.input_symbols) s.put_varint(static_cast<std::uint64_t>(a));
  s.put_varint(c.delta.size());
  for (const auto& [key, tr] : c.delta) {
    s.put_varint(static_cast<std::uint64_t>(key.first));
    s.put_varint(static_cast<std::uint64_t>(key.second));
    s.put_varint(static_cast<std::uint64_t>(tr.next));
    s.put_varint(static_cast<std::uint64_t>(tr.write));
    s.put_varint(tr.move == Move::Left ? 0u : 1u);
  }
  s.put_varint(word.size());
  for (int a : word) s.put_varint(static_cast<std::uint64_t>(a));
  return s.out;
}

inline std::pair<TuringMachine, std::vector<int>> decode_tm_with_input(
    std::string_view bytes) {
  ByteReader r{bytes};
  if (r.get_bytes(4) != "TMW1") throw InputError("bad magic, expected TMW1");
  TuringMachine tm;
  const std::uint64_t n_states = r.get_varint();
  for (std::uint64_t i = 0; i < n_states; ++i)
    tm.states.emplace_back(r.get_prefixed());
  const std::uint64_t n_syms = r.get_varint();
  for (std::uint64_t i = 0; i < n_syms; ++i)
    tm.tape_alphabet.emplace_back(r.get_prefixed());
  tm.blank = static_cast<int>(r.get_varint());
  tm.start = static_cast<int>(r.get_varint());
  tm.accept = static_cast<int>(r.get_varint());
  tm.reject = static_cast<int>(r.get_varint());
  const std::uint64_t n_inputs = r.get_varint();
  for (std::uint64_t i = 0; i < n_inputs; ++i)
    tm.input_symbols.push_back(static_cast<int>(r.get_varint()));
  const std::uint64_t n_delta = r.get_varint();
  for (std::uint64_t i = 0; i < n_delta; ++i) {
    const int q = static_cast<int>(r.get_varint());
    const int a = static_cast<int>(r.get_varint());
    TmTransition tr;
    tr.next = static_cast<int>(r.get_varint());
    tr.write = static_cast<int>(r.get_varint());
    tr.move = r.get_varint() == 0 ? Move::Left : Move::Right;
    tm.delta[{q, a}] = tr;
  }
  std::vector<int> word;
  const std::uint64_t n_word = r.get_varint();
  for (std::uint64_t i = 0; i < n_word; ++i)
    word.push_back(static_cast<int>(r.get_varint()));
  if (!r.at_end()) throw InputError("trailing bytes after TMW1 payload");
  tm.validate();
  return {std::move(tm), std::move(word)};
}

}  // namespace agentlab
