#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include "agentlab/bitvec.hpp"
#include "agentlab/errors.hpp"

namespace agentlab {

// Elementary cellular automaton rule in Wolfram numbering. table[n] is the
// output bit for the 3-cell neighborhood whose bits (left, center, right)
// spell n = 4*l + 2*c + r.
struct EcaRule {
  int index = 0;
  std::array<std::uint8_t, 8> table{};
};

inline EcaRule eca_rule_table(int rule_index) {
  if (rule_index < 0 || rule_index > 255)
    throw InputError("rule index must be in [0, 255], got " +
                     std::to_string(rule_index));
  EcaRule r;
  r.index = rule_index;
  for (int n = 0; n < 8; ++n)
    r.table[static_cast<std::size_t>(n)] =
        static_cast<std::uint8_t>((rule_index >> n) & 1);
  return r;
}

// One row of cells with periodic boundary.
using EcaRow = BitVec;

inline EcaRow eca_step(const EcaRow& row, const EcaRule& rule) {
  const std::size_t w = row.size();
  if (w < 3) throw InputError("row width must be at least 3");
  EcaRow next(w);
  for (std::size_t i = 0; i < w; ++i) {
    const bool l = row.get((i + w - 1) % w);
    const bool c = row.get(i);
    const bool r = row.get((i + 1) % w);
    const std::size_t n =
        (static_cast<std::size_t>(l) << 2) | (static_cast<std::size_t>(c) << 1) |
        static_cast<std::size_t>(r);
    if (rule.table[n]) next.set(i, true);
  }
  return next;
}

inline EcaRow eca_iterate(EcaRow row, const EcaRule& rule, std::uint64_t steps) {
  for (std::uint64_t k = 0; k < steps; ++k) row = eca_step(row, rule);
  return row;
}

// XOR-linear rules: update = a*left ^ b*center ^ c*right. Returns the tap
// coefficients {a, b, c} when the rule has that form, nullopt otherwise.
inline std::optional<std::array<bool, 3>> linear_taps(const EcaRule& rule) {
  const bool a = rule.table[4] != 0;
  const bool b = rule.table[2] != 0;
  const bool c = rule.table[1] != 0;
  for (int n = 0; n < 8; ++n) {
    const bool l = (n >> 2) & 1, m = (n >> 1) & 1, r = n & 1;
    const bool expect = (a && l) ^ (b && m) ^ (c && r);
    if ((rule.table[static_cast<std::size_t>(n)] != 0) != expect)
      return std::nullopt;
  }
  return std::array<bool, 3>{a, b, c};
}

}  // namespace agentlab
