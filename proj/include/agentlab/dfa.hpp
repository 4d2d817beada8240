#pragma once

#include <string>
#include <vector>

#include "agentlab/errors.hpp"

namespace agentlab {

// Deterministic finite automaton with a total transition function.
struct Dfa {
  int num_states = 0;
  int alphabet_size = 0;
  std::vector<int> delta;  // state * alphabet_size + symbol -> state
  int start = 0;
  std::vector<bool> accepting;

  int next(int state, int symbol) const {
    return delta[static_cast<std::size_t>(state) *
                     static_cast<std::size_t>(alphabet_size) +
                 static_cast<std::size_t>(symbol)];
  }

  void validate() const {
    if (num_states <= 0) throw InputError("dfa needs at least one state");
    if (alphabet_size <= 0) throw InputError("dfa needs a nonempty alphabet");
    if (delta.size() != static_cast<std::size_t>(num_states) *
                            static_cast<std::size_t>(alphabet_size))
      throw InputError("dfa transition table must be total");
    for (int t : delta)
      if (t < 0 || t >= num_states)
        throw InputError("dfa transition target out of range");
    if (start < 0 || start >= num_states)
      throw InputError("dfa start state out of range");
    if (accepting.size() != static_cast<std::size_t>(num_states))
      throw InputError("dfa accepting set size mismatch");
  }
};

// True iff some input string drives the automaton from q1 to q2. Always
// terminates; visits each transition edge at most once.
inline bool dfa_reachable(const Dfa& dfa, int q1, int q2) {
  if (q1 < 0 || q1 >= dfa.num_states || q2 < 0 || q2 >= dfa.num_states)
    throw InputError("unknown dfa state id");
  if (q1 == q2) return true;
  std::vector<bool> seen(static_cast<std::size_t>(dfa.num_states), false);
  std::vector<int> stack{q1};
  seen[static_cast<std::size_t>(q1)] = true;
  while (!stack.empty()) {
    int q = stack.back();
    stack.pop_back();
    for (int a = 0; a < dfa.alphabet_size; ++a) {
      int t = dfa.next(q, a);
      if (t == q2) return true;
      if (!seen[static_cast<std::size_t>(t)]) {
        seen[static_cast<std::size_t>(t)] = true;
        stack.push_back(t);
      }
    }
  }
  return false;
}

inline bool dfa_language_empty(const Dfa& dfa) {
  for (int q = 0; q < dfa.num_states; ++q)
    if (dfa.accepting[static_cast<std::size_t>(q)] &&
        dfa_reachable(dfa, dfa.start, q))
      return false;
  return true;
}

}  // namespace agentlab
