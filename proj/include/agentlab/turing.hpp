#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "agentlab/bytes.hpp"
#include "agentlab/errors.hpp"

namespace agentlab {

enum class Move : std::int8_t { Left = -1, Right = 1 };

struct TmTransition {
  int next = 0;
  int write = 0;
  Move move = Move::Right;

  bool operator==(const TmTransition&) const = default;
};

// Single-tape deterministic Turing machine. States and tape symbols are
// stored by name; ids are indices into the name tables. The transition map
// is partial: a missing (state, symbol) entry is interpreted as a move-free
// transition into the reject state, which makes every machine total without
// changing the halting behavior of fully specified ones.
struct TuringMachine {
  std::string name;
  std::vector<std::string> states;
  std::vector<std::string> tape_alphabet;
  std::vector<int> input_symbols;  // sorted ids, blank excluded
  int blank = 0;
  int start = 0;
  int accept = 0;
  int reject = 0;
  std::map<std::pair<int, int>, TmTransition> delta;

  int num_states() const { return static_cast<int>(states.size()); }
  int num_symbols() const { return static_cast<int>(tape_alphabet.size()); }

  int state_id(std::string_view s) const {
    for (std::size_t i = 0; i < states.size(); ++i)
      if (states[i] == s) return static_cast<int>(i);
    throw InputError("unknown state: " + std::string(s));
  }

  int symbol_id(std::string_view s) const {
    for (std::size_t i = 0; i < tape_alphabet.size(); ++i)
      if (tape_alphabet[i] == s) return static_cast<int>(i);
    throw InputError("unknown tape symbol: " + std::string(s));
  }

  bool is_input_symbol(int sym) const {
    return std::binary_search(input_symbols.begin(), input_symbols.end(), sym);
  }

  bool is_halt_state(int q) const { return q == accept || q == reject; }

  void validate() const {
    if (states.empty()) throw InputError("machine has no states");
    if (tape_alphabet.empty()) throw InputError("machine has no tape alphabet");
    auto state_ok = [&](int q) { return q >= 0 && q < num_states(); };
    auto sym_ok = [&](int a) { return a >= 0 && a < num_symbols(); };
    if (!state_ok(start)) throw InputError("start state out of range");
    if (!state_ok(accept)) throw InputError("accept state out of range");
    if (!state_ok(reject)) throw InputError("reject state out of range");
    if (accept == reject) throw InputError("accept and reject must differ");
    if (!sym_ok(blank)) throw InputError("blank symbol out of range");
    {
      std::set<std::string> uniq(states.begin(), states.end());
      if (uniq.size() != states.size())
        throw InputError("duplicate state names");
    }
    {
      std::set<std::string> uniq(tape_alphabet.begin(), tape_alphabet.end());
      if (uniq.size() != tape_alphabet.size())
        throw InputError("duplicate tape symbol names");
    }
    for (int a : input_symbols) {
      if (!sym_ok(a)) throw InputError("input symbol out of range");
      if (a == blank) throw InputError("blank cannot be an input symbol");
    }
    if (!std::is_sorted(input_symbols.begin(), input_symbols.end()))
      throw InputError("input symbols must be sorted");
    for (const auto& [key, tr] : delta) {
      if (!state_ok(key.first) || !sym_ok(key.second))
        throw InputError("transition key out of range");
      if (is_halt_state(key.first))
        throw InputError("transition defined on a halting state");
      if (!state_ok(tr.next)) throw InputError("transition target out of range");
      if (!sym_ok(tr.write)) throw InputError("transition write out of range");
    }
  }
};

struct HaltSignal {
  bool accepted = false;
};

// Machine snapshot: sparse tape (only non-blank cells stored), head position,
// control state and elapsed step count.
struct TapeConfiguration {
  std::map<std::int64_t, int> tape;
  std::int64_t head = 0;
  int state = 0;
  std::uint64_t steps_elapsed = 0;

  int read(const TuringMachine& tm) const {
    auto it = tape.find(head);
    int sym = it == tape.end() ? tm.blank : it->second;
    if (sym < 0 || sym >= tm.num_symbols())
      throw MalformedConfigError("tape symbol " + std::to_string(sym) +
                                 " outside the machine's tape alphabet");
    return sym;
  }

  void write(const TuringMachine& tm, int sym) {
    if (sym == tm.blank)
      tape.erase(head);
    else
      tape[head] = sym;
  }

  bool operator==(const TapeConfiguration&) const = default;
};

inline void encode_state(ByteSink& s, const TapeConfiguration& cfg) {
  s.put_zigzag(cfg.head);
  s.put_varint(static_cast<std::uint64_t>(cfg.state));
  s.put_varint(cfg.tape.size());
  for (const auto& [pos, sym] : cfg.tape) {
    s.put_zigzag(pos);
    s.put_varint(static_cast<std::uint64_t>(sym));
  }
}

inline TapeConfiguration initial_configuration(const TuringMachine& tm,
                                               const std::vector<int>& input) {
  TapeConfiguration cfg;
  cfg.state = tm.start;
  for (std::size_t i = 0; i < input.size(); ++i) {
    if (!tm.is_input_symbol(input[i]))
      throw InputError("input symbol id " + std::to_string(input[i]) +
                       " is not in the input alphabet");
    if (input[i] != tm.blank) cfg.tape[static_cast<std::int64_t>(i)] = input[i];
  }
  return cfg;
}

// Parses an input string one character per symbol name.
inline std::vector<int> parse_input(const TuringMachine& tm,
                                    std::string_view text) {
  std::vector<int> out;
  out.reserve(text.size());
  for (char c : text) out.push_back(tm.symbol_id(std::string_view(&c, 1)));
  return out;
}

// Applies one transition. Stepping a configuration already in a halting
// state yields the halt signal instead of a successor.
inline std::variant<TapeConfiguration, HaltSignal> tm_step(
    const TuringMachine& tm, const TapeConfiguration& cfg) {
  if (cfg.state < 0 || cfg.state >= tm.num_states())
    throw InputError("configuration state out of range");
  if (tm.is_halt_state(cfg.state))
    return HaltSignal{cfg.state == tm.accept};
  TapeConfiguration next = cfg;
  const int sym = cfg.read(tm);
  auto it = tm.delta.find({cfg.state, sym});
  if (it == tm.delta.end()) {
    next.state = tm.reject;  // implicit transition, tape and head unchanged
  } else {
    next.write(tm, it->second.write);
    next.head += it->second.move == Move::Left ? -1 : 1;
    next.state = it->second.next;
  }
  next.steps_elapsed = cfg.steps_elapsed + 1;
  return next;
}

struct Halted {
  std::uint64_t at_step = 0;
  bool accepted = false;
};

struct OutOfBudget {
  TapeConfiguration final_cfg;
};

using RunOutcome = std::variant<Halted, OutOfBudget>;

inline bool run_halted(const RunOutcome& r) {
  return std::holds_alternative<Halted>(r);
}

// ---------------------------------------------------------------------------
// Flat table + dense tape execution path. Same semantics as tm_step; used by
// the long bounded runs and the sweeps.

struct CompiledTm {
  int num_states = 0;
  int num_symbols = 0;
  int blank = 0;
  int start = 0;
  int accept = 0;
  int reject = 0;
  std::vector<std::int32_t> next;   // -1 encodes a missing entry
  std::vector<std::int32_t> write;
  std::vector<std::int8_t> move;

  static CompiledTm from(const TuringMachine& tm) {
    tm.validate();
    CompiledTm c;
    c.num_states = tm.num_states();
    c.num_symbols = tm.num_symbols();
    c.blank = tm.blank;
    c.start = tm.start;
    c.accept = tm.accept;
    c.reject = tm.reject;
    const std::size_t n = static_cast<std::size_t>(c.num_states) *
                          static_cast<std::size_t>(c.num_symbols);
    c.next.assign(n, -1);
    c.write.assign(n, 0);
    c.move.assign(n, 1);
    for (const auto& [key, tr] : tm.delta) {
      const std::size_t idx = static_cast<std::size_t>(key.first) *
                                  static_cast<std::size_t>(c.num_symbols) +
                              static_cast<std::size_t>(key.second);
      c.next[idx] = tr.next;
      c.write[idx] = tr.write;
      c.move[idx] = tr.move == Move::Left ? -1 : 1;
    }
    return c;
  }

  bool is_halt_state(int q) const { return q == accept || q == reject; }
};

// Dense tape window that grows on demand. Cells outside the window are blank.
class Tape {
 public:
  Tape() = default;
  explicit Tape(int blank) : blank_(blank) { reset(); }

  void reset() {
    cells_.assign(16, blank_);
    origin_ = -8;
    head_ = 0;
    lo_ = 0;
    hi_ = 0;
  }

  int blank_symbol() const { return blank_; }
  std::int64_t head() const { return head_; }

  int read() const {
    return cells_[static_cast<std::size_t>(head_ - origin_)];
  }

  void write(int sym) {
    cells_[static_cast<std::size_t>(head_ - origin_)] = sym;
    lo_ = std::min(lo_, head_);
    hi_ = std::max(hi_, head_);
  }

  void move(int dir) {
    head_ += dir;
    if (head_ - origin_ < 0 ||
        head_ - origin_ >= static_cast<std::int64_t>(cells_.size()))
      grow();
  }

  void set_cell(std::int64_t pos, int sym) {
    while (pos - origin_ < 0 ||
           pos - origin_ >= static_cast<std::int64_t>(cells_.size()))
      grow();
    cells_[static_cast<std::size_t>(pos - origin_)] = sym;
    lo_ = std::min(lo_, pos);
    hi_ = std::max(hi_, pos);
  }

  void set_head(std::int64_t pos) {
    while (pos - origin_ < 0 ||
           pos - origin_ >= static_cast<std::int64_t>(cells_.size()))
      grow();
    head_ = pos;
  }

  int cell(std::int64_t pos) const {
    if (pos - origin_ < 0 ||
        pos - origin_ >= static_cast<std::int64_t>(cells_.size()))
      return blank_;
    return cells_[static_cast<std::size_t>(pos - origin_)];
  }

  std::map<std::int64_t, int> to_sparse() const {
    std::map<std::int64_t, int> m;
    for (std::int64_t p = lo_; p <= hi_; ++p) {
      int s = cell(p);
      if (s != blank_) m[p] = s;
    }
    return m;
  }

  static Tape from_sparse(const std::map<std::int64_t, int>& m,
                          std::int64_t head, int blank) {
    Tape t(blank);
    for (const auto& [pos, sym] : m) t.set_cell(pos, sym);
    t.set_head(head);
    return t;
  }

  bool operator==(const Tape& o) const {
    return blank_ == o.blank_ && head_ == o.head_ && to_sparse() == o.to_sparse();
  }

 private:
  void grow() {
    const std::size_t old = cells_.size();
    std::vector<std::int32_t> bigger(old * 2, blank_);
    const std::size_t shift = old / 2;
    std::copy(cells_.begin(), cells_.end(), bigger.begin() + shift);
    cells_.swap(bigger);
    origin_ -= static_cast<std::int64_t>(shift);
  }

  std::vector<std::int32_t> cells_;
  std::int64_t origin_ = -8;
  std::int64_t head_ = 0;
  std::int64_t lo_ = 0, hi_ = 0;
  int blank_ = 0;
};

inline void encode_state(ByteSink& s, const Tape& t) {
  s.put_zigzag(t.head());
  auto m = t.to_sparse();
  s.put_varint(m.size());
  for (const auto& [pos, sym] : m) {
    s.put_zigzag(pos);
    s.put_varint(static_cast<std::uint64_t>(sym));
  }
}

struct TmRunner {
  const CompiledTm* tm = nullptr;
  Tape tape;
  std::int32_t state = 0;
  std::uint64_t steps = 0;

  explicit TmRunner(const CompiledTm& m, const std::vector<int>& input)
      : tm(&m), tape(m.blank), state(m.start) {
    for (std::size_t i = 0; i < input.size(); ++i)
      tape.set_cell(static_cast<std::int64_t>(i), input[i]);
    tape.set_head(0);
  }

  bool halted() const { return tm->is_halt_state(state); }

  void step() {
    const int sym = tape.read();
    const std::size_t idx = static_cast<std::size_t>(state) *
                                static_cast<std::size_t>(tm->num_symbols) +
                            static_cast<std::size_t>(sym);
    const std::int32_t nx = tm->next[idx];
    if (nx < 0) {
      state = tm->reject;
    } else {
      tape.write(tm->write[idx]);
      tape.move(tm->move[idx]);
      state = nx;
    }
    ++steps;
  }

  TapeConfiguration to_configuration() const {
    TapeConfiguration cfg;
    cfg.tape = tape.to_sparse();
    cfg.head = tape.head();
    cfg.state = state;
    cfg.steps_elapsed = steps;
    return cfg;
  }
};

// Runs the machine at most `budget` transitions and reports either the exact
// halting step and verdict or the configuration it was left in.
inline RunOutcome tm_run_bounded(const TuringMachine& tm,
                                 const std::vector<int>& input,
                                 std::uint64_t budget) {
  if (budget < 1) throw InputError("budget must be at least 1");
  for (int sym : input)
    if (!tm.is_input_symbol(sym))
      throw InputError("input symbol id " + std::to_string(sym) +
                       " is not in the input alphabet");
  const CompiledTm compiled = CompiledTm::from(tm);
  TmRunner run(compiled, input);
  for (;;) {
    if (run.halted())
      return Halted{run.steps, run.state == compiled.accept};
    if (run.steps >= budget) return OutOfBudget{run.to_configuration()};
    run.step();
  }
}

inline RunOutcome tm_run_bounded(const TuringMachine& tm,
                                 std::string_view input_text,
                                 std::uint64_t budget) {
  return tm_run_bounded(tm, parse_input(tm, input_text), budget);
}

}  // namespace agentlab
