#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "agentlab/agent.hpp"
#include "agentlab/bytes.hpp"
#include "agentlab/errors.hpp"
#include "agentlab/turing.hpp"

namespace agentlab {

// Compiles a Turing machine plus input into a coupled agent/environment
// system that simulates it with the environment acting as the tape:
//
//   - the agent state is the machine's control state under an injective
//     relabeling phi; the agent never sees the tape except through its
//     input channel, which exposes exactly the symbol under the head;
//   - the environment state is the tape plus head position;
//   - an action is a symbol naming one conditional tape instruction
//     ("if the scanned cell reads x, write y and move d") -- one per control
//     state, plus a no-op issued from halted states. The embedding map
//     records the bijection between action symbols and instructions, and the
//     environment applies the instruction against the scanned cell.
//
// One coupled step simulates exactly one machine transition, and decoding
// the coupled state at any time yields the machine configuration after the
// same number of direct steps. Encoding the action as a conditional
// instruction is what makes that possible under the synchronous update:
// a raw (write, move) pair is a function of the scanned symbol, which the
// agent only receives one step after emitting the action.

struct EmbAction {
  std::int32_t row = -1;  // source control state id; -1 is the no-op

  bool operator==(const EmbAction&) const = default;
};

inline void encode_state(ByteSink& s, const EmbAction& a) {
  s.put_zigzag(a.row);
}

inline std::string trace_cell(const EmbAction& a) {
  return a.row < 0 ? std::string("noop") : "instr" + std::to_string(a.row);
}

struct EmbeddedProgram {
  CompiledTm tm;
  std::vector<std::int32_t> phi;          // state id -> agent state id
  std::vector<std::int32_t> phi_inverse;  // agent state id -> state id, -1 unused

  std::int32_t agent_of(int q) const {
    return phi[static_cast<std::size_t>(q)];
  }
  std::int32_t state_of(std::int32_t agent_id) const {
    if (agent_id < 0 ||
        agent_id >= static_cast<std::int32_t>(phi_inverse.size()))
      return -1;
    return phi_inverse[static_cast<std::size_t>(agent_id)];
  }
};

namespace detail {

struct EmbInputFn {
  std::shared_ptr<const EmbeddedProgram> p;
  std::int32_t operator()(const Tape& t) const {
    return static_cast<std::int32_t>(t.read());
  }
};

struct EmbGenFn {
  std::int32_t operator()(const std::int32_t& s) const { return s; }
};

struct EmbIntegrateFn {
  std::shared_ptr<const EmbeddedProgram> p;
  std::int32_t operator()(const std::int32_t& s, const std::int32_t& sym) const {
    const int q = p->state_of(s);
    if (q < 0) throw SpecGapError("agent state " + std::to_string(s) +
                                  " is outside the embedding image");
    if (p->tm.is_halt_state(q)) return s;
    const std::size_t idx = static_cast<std::size_t>(q) *
                                static_cast<std::size_t>(p->tm.num_symbols) +
                            static_cast<std::size_t>(sym);
    const std::int32_t nx = p->tm.next[idx];
    return p->agent_of(nx < 0 ? p->tm.reject : nx);
  }
};

struct EmbOutputFn {
  std::shared_ptr<const EmbeddedProgram> p;
  EmbAction operator()(const std::int32_t& s) const {
    const int q = p->state_of(s);
    if (q < 0) throw SpecGapError("agent state " + std::to_string(s) +
                                  " is outside the embedding image");
    if (p->tm.is_halt_state(q)) return EmbAction{-1};
    return EmbAction{static_cast<std::int32_t>(q)};
  }
};

struct EmbGoalFn {
  std::int32_t accept_id = -1;
  bool operator()(const std::int32_t& sa, const Tape&) const {
    return sa == accept_id;
  }
};

struct EmbEnvStepInplaceFn {
  std::shared_ptr<const EmbeddedProgram> p;
  void operator()(Tape& tape, const EmbAction& a) const {
    if (a.row < 0) return;
    const int sym = tape.read();
    const std::size_t idx = static_cast<std::size_t>(a.row) *
                                static_cast<std::size_t>(p->tm.num_symbols) +
                            static_cast<std::size_t>(sym);
    const std::int32_t nx = p->tm.next[idx];
    if (nx < 0) return;  // instruction has no entry for this symbol
    tape.write(p->tm.write[idx]);
    tape.move(p->tm.move[idx]);
  }
};

struct EmbEnvStepFn {
  EmbEnvStepInplaceFn inplace;
  Tape operator()(const Tape& t, const EmbAction& a) const {
    Tape next = t;
    inplace(next, a);
    return next;
  }
};

}  // namespace detail

using EmbAgentSpec =
    AgentSpec<std::int32_t, Tape, std::int32_t, EmbAction, detail::EmbInputFn,
              detail::EmbGenFn, detail::EmbIntegrateFn, detail::EmbOutputFn,
              detail::EmbGoalFn>;
using EmbEnvSpec = EnvironmentSpec<Tape, EmbAction, detail::EmbEnvStepFn,
                                   detail::EmbEnvStepInplaceFn>;

// One conditional tape instruction as data, for codec auditing.
struct CodecEntry {
  std::int32_t action_id = -1;
  // per scanned symbol: {defined, write, move(-1|+1)}
  std::vector<std::array<std::int32_t, 3>> by_symbol;

  bool operator==(const CodecEntry&) const = default;
};

struct EmbeddingMap {
  std::vector<std::int32_t> phi;
  std::vector<std::int32_t> phi_inverse;
  std::vector<CodecEntry> codec;  // indexed by non-halt control state
  std::int64_t tape_offset = 0;   // machine cell i lives at env coordinate i+offset
};

struct EmbeddedSystem {
  EmbAgentSpec agent;
  EmbEnvSpec env;
  CoupledState<std::int32_t, Tape> s0;
  EmbeddingMap map;
  TuringMachine source_tm;
  std::vector<int> source_input;
  std::shared_ptr<const EmbeddedProgram> program;
};

// Recovers the machine configuration from a coupled state.
inline TapeConfiguration decode_coupled(const EmbeddedSystem& sys,
                                        std::int32_t sa, const Tape& se,
                                        std::uint64_t t) {
  const int q = sys.program->state_of(sa);
  if (q < 0)
    throw ConstructionError("agent state " + std::to_string(sa) +
                            " has no preimage under phi");
  TapeConfiguration cfg;
  cfg.tape = se.to_sparse();
  cfg.head = se.head() - sys.map.tape_offset;
  cfg.state = q;
  cfg.steps_elapsed = t;
  return cfg;
}

// Structural audit of an embedding: phi injective with a consistent inverse,
// codec rows exactly mirroring the transition table, s0 decoding to the
// machine's initial configuration.
inline void check_embedding(const EmbeddedSystem& sys) {
  const auto& p = *sys.program;
  std::vector<bool> hit(sys.map.phi_inverse.size(), false);
  if (sys.map.phi.size() != static_cast<std::size_t>(p.tm.num_states))
    throw ConstructionError("phi table size mismatch");
  for (std::size_t q = 0; q < sys.map.phi.size(); ++q) {
    const std::int32_t a = sys.map.phi[q];
    if (a < 0 || a >= static_cast<std::int32_t>(sys.map.phi_inverse.size()))
      throw ConstructionError("phi image out of range for state " +
                              std::to_string(q));
    if (hit[static_cast<std::size_t>(a)])
      throw ConstructionError("phi is not injective: agent id " +
                              std::to_string(a) + " has two preimages");
    hit[static_cast<std::size_t>(a)] = true;
    if (sys.map.phi_inverse[static_cast<std::size_t>(a)] !=
        static_cast<std::int32_t>(q))
      throw ConstructionError("phi inverse inconsistent at state " +
                              std::to_string(q));
  }
  for (const auto& entry : sys.map.codec) {
    const int q = entry.action_id;
    if (q < 0 || q >= p.tm.num_states || p.tm.is_halt_state(q))
      throw ConstructionError("codec action id must name a non-halt state");
    if (entry.by_symbol.size() != static_cast<std::size_t>(p.tm.num_symbols))
      throw ConstructionError("codec row width mismatch");
    for (int a = 0; a < p.tm.num_symbols; ++a) {
      const std::size_t idx = static_cast<std::size_t>(q) *
                                  static_cast<std::size_t>(p.tm.num_symbols) +
                              static_cast<std::size_t>(a);
      const auto& cell = entry.by_symbol[static_cast<std::size_t>(a)];
      const bool defined = p.tm.next[idx] >= 0;
      if ((cell[0] != 0) != defined ||
          (defined && (cell[1] != p.tm.write[idx] || cell[2] != p.tm.move[idx])))
        throw ConstructionError("codec row diverges from the transition table");
    }
  }
  const TapeConfiguration decoded =
      decode_coupled(sys, sys.s0.sa, sys.s0.se, 0);
  const TapeConfiguration expected =
      initial_configuration(sys.source_tm, sys.source_input);
  if (!(decoded == expected))
    throw ConstructionError("s0 does not decode to the initial configuration");
}

namespace detail {

inline EmbeddedSystem build_embedded_with_phi(const TuringMachine& tm,
                                              const std::vector<int>& input,
                                              std::vector<std::int32_t> phi,
                                              bool validate) {
  auto program = std::make_shared<EmbeddedProgram>();
  program->tm = CompiledTm::from(tm);
  program->phi = std::move(phi);
  std::int32_t max_id = 0;
  for (std::int32_t a : program->phi) max_id = std::max(max_id, a);
  program->phi_inverse.assign(static_cast<std::size_t>(max_id) + 1, -1);
  for (std::size_t q = 0; q < program->phi.size(); ++q)
    program->phi_inverse[static_cast<std::size_t>(program->phi[q])] =
        static_cast<std::int32_t>(q);

  std::shared_ptr<const EmbeddedProgram> p = program;
  EmbeddedSystem sys;
  sys.agent.input_map = EmbInputFn{p};
  sys.agent.generative = EmbGenFn{};
  sys.agent.integrate = EmbIntegrateFn{p};
  sys.agent.output_map = EmbOutputFn{p};
  sys.agent.goal = EmbGoalFn{p->agent_of(p->tm.accept)};
  sys.env.transition_inplace = EmbEnvStepInplaceFn{p};
  sys.env.transition = EmbEnvStepFn{EmbEnvStepInplaceFn{p}};
  sys.env.complexity_class = "TM-tape";

  Tape tape(p->tm.blank);
  for (std::size_t i = 0; i < input.size(); ++i)
    tape.set_cell(static_cast<std::int64_t>(i), input[i]);
  tape.set_head(0);
  sys.s0 = {p->agent_of(p->tm.start), std::move(tape), 0};

  sys.map.phi = p->phi;
  sys.map.phi_inverse = p->phi_inverse;
  sys.map.tape_offset = 0;
  for (int q = 0; q < p->tm.num_states; ++q) {
    if (p->tm.is_halt_state(q)) continue;
    CodecEntry entry;
    entry.action_id = q;
    for (int a = 0; a < p->tm.num_symbols; ++a) {
      const std::size_t idx = static_cast<std::size_t>(q) *
                                  static_cast<std::size_t>(p->tm.num_symbols) +
                              static_cast<std::size_t>(a);
      if (p->tm.next[idx] >= 0)
        entry.by_symbol.push_back({1, p->tm.write[idx], p->tm.move[idx]});
      else
        entry.by_symbol.push_back({0, 0, 0});
    }
    sys.map.codec.push_back(std::move(entry));
  }

  sys.source_tm = tm;
  sys.source_input = input;
  sys.program = p;
  if (validate) check_embedding(sys);
  return sys;
}

}  // namespace detail

inline EmbeddedSystem build_embedded_machine(const TuringMachine& tm,
                                             const std::vector<int>& input) {
  try {
    tm.validate();
  } catch (const InputError& e) {
    throw ConstructionError(std::string("malformed machine: ") + e.what());
  }
  for (int sym : input)
    if (!tm.is_input_symbol(sym))
      throw ConstructionError("input word uses a non-input symbol");
  // phi: a fixed affine relabeling, kept away from the raw ids so that the
  // injectivity audit is not comparing a table against itself.
  std::vector<std::int32_t> phi;
  phi.reserve(static_cast<std::size_t>(tm.num_states()));
  for (int q = 0; q < tm.num_states(); ++q)
    phi.push_back(static_cast<std::int32_t>(2 * q + 5));
  return detail::build_embedded_with_phi(tm, input, std::move(phi), true);
}

// Property over coupled states that holds exactly when the control is in a
// halting state.
struct HaltingProperty {
  std::int32_t accept_id = -1;
  std::int32_t reject_id = -1;

  bool operator()(const std::int32_t& sa, const Tape&) const {
    return sa == accept_id || sa == reject_id;
  }
};

inline HaltingProperty halting_property(const EmbeddedSystem& sys) {
  return HaltingProperty{sys.program->agent_of(sys.program->tm.accept),
                         sys.program->agent_of(sys.program->tm.reject)};
}

// Bounded semi-decision outcome: either the property was reached at an exact
// step, or the budget ran out with nothing to report. There is no negative
// verdict by design.
struct EpOutcome {
  enum class Kind { Reached, Unknown };
  Kind kind = Kind::Unknown;
  std::uint64_t t = 0;       // valid for Reached
  std::uint64_t budget = 0;  // the bound that was given
  std::uint64_t spent = 0;   // transition evaluations used
  std::string property_id;

  bool reached() const { return kind == Kind::Reached; }
};

// Enumerates t = 0, 1, 2, ... along the exact trajectory and answers only
// positively, at the first step where the property holds.
template <class Agent, class Env, class Prop>
EpOutcome ep_semi_decide(const Agent& agent, const Env& env,
                         const CoupledState<typename Agent::agent_state,
                                            typename Agent::env_state>& s0,
                         Prop&& prop, std::uint64_t budget,
                         std::string property_id = "") {
  if (budget < 1) throw InputError("budget must be at least 1");
  EpOutcome out;
  out.budget = budget;
  out.property_id = std::move(property_id);
  if (prop(s0.sa, s0.se)) {
    out.kind = EpOutcome::Kind::Reached;
    out.t = 0;
    out.spent = 0;
    return out;
  }
  auto sa = s0.sa;
  auto se = s0.se;
  for (std::uint64_t t = 1; t <= budget; ++t) {
    coupled_step_inplace(agent, env, sa, se);
    if (prop(sa, se)) {
      out.kind = EpOutcome::Kind::Reached;
      out.t = t;
      out.spent = t;
      return out;
    }
  }
  out.kind = EpOutcome::Kind::Unknown;
  out.spent = budget;
  return out;
}

inline EpOutcome ep_semi_decide_halting(const EmbeddedSystem& sys,
                                        std::uint64_t budget) {
  return ep_semi_decide(sys.agent, sys.env, sys.s0, halting_property(sys),
                        budget, "P_halt");
}

// ---------------------------------------------------------------------------
// Cross-validation of the construction against direct machine stepping.

struct EquivalenceDivergence {
  std::uint64_t step = 0;
  TapeConfiguration direct;
  TapeConfiguration decoded;
};

struct EquivalenceReport {
  bool ok = false;
  std::uint64_t steps_checked = 0;
  bool halted = false;
  std::uint64_t halt_step = 0;
  bool accepted = false;
  std::uint64_t coupled_steps = 0;
  std::uint64_t tm_steps = 0;
  std::optional<EquivalenceDivergence> divergence;
};

namespace detail {

inline bool equiv_compare_full(const EmbeddedSystem& sys, const TmRunner& direct,
                               std::int32_t sa, const Tape& se,
                               std::uint64_t step, EquivalenceReport& report) {
  TapeConfiguration dc = direct.to_configuration();
  TapeConfiguration ec;
  const int q = sys.program->state_of(sa);
  if (q >= 0) {
    ec = decode_coupled(sys, sa, se, step);
  } else {
    ec.state = -1;
  }
  dc.steps_elapsed = step;
  if (q < 0 || !(dc == ec)) {
    report.ok = false;
    report.divergence = EquivalenceDivergence{step, std::move(dc), std::move(ec)};
    return false;
  }
  return true;
}

}  // namespace detail

// Steps the embedded system and the machine in lockstep for up to `budget`
// transitions. Each step compares control state, head position and the one
// cell a step can change; full sparse-tape comparisons run at the start, at
// the halt step and at the end (and at every step when full_compare is set).
inline EquivalenceReport embedding_equivalence_check(
    const TuringMachine& tm, const std::vector<int>& input,
    std::uint64_t budget, bool full_compare = false) {
  if (budget < 1) throw InputError("budget must be at least 1");
  EmbeddedSystem sys = build_embedded_machine(tm, input);
  const CompiledTm& ctm = sys.program->tm;

  TmRunner direct(ctm, input);
  std::int32_t sa = sys.s0.sa;
  Tape se = sys.s0.se;

  EquivalenceReport report;
  report.ok = true;
  if (!detail::equiv_compare_full(sys, direct, sa, se, 0, report)) return report;

  for (std::uint64_t step = 1; step <= budget; ++step) {
    if (direct.halted()) break;
    const std::int64_t prev_head = direct.tape.head();
    direct.step();
    ++report.tm_steps;
    coupled_step_inplace(sys.agent, sys.env, sa, se);
    ++report.coupled_steps;
    report.steps_checked = step;

    const bool match_control =
        sys.program->state_of(sa) == static_cast<int>(direct.state);
    const bool match_head = se.head() == direct.tape.head();
    const bool match_cell = se.cell(prev_head) == direct.tape.cell(prev_head);
    if (!match_control || !match_head || !match_cell || full_compare) {
      if (!detail::equiv_compare_full(sys, direct, sa, se, step, report))
        return report;
    }
  }

  if (direct.halted()) {
    report.halted = true;
    report.halt_step = direct.steps;
    report.accepted = direct.state == ctm.accept;
    const HaltingProperty prop = halting_property(sys);
    if (!prop(sa, se)) {
      report.ok = false;
      report.divergence = EquivalenceDivergence{
          direct.steps, direct.to_configuration(),
          decode_coupled(sys, sa, se, direct.steps)};
      return report;
    }
  }
  if (!detail::equiv_compare_full(sys, direct, sa, se, direct.steps, report))
    return report;
  return report;
}

// ---------------------------------------------------------------------------
// Machine corpus helpers.

// All two-state two-symbol machines with a total transition table. Each of
// the four (state, symbol) pairs takes one of 16 instruction digits:
// bits 0-1 target (A, B, accept, reject), bit 2 written symbol, bit 3 move
// (0 left, 1 right). 16^4 = 65536 machines.
inline constexpr std::uint32_t kNumEnum2x2 = 65536;

inline TuringMachine make_enum_2x2(std::uint32_t index) {
  if (index >= kNumEnum2x2)
    throw InputError("enumeration index out of range");
  TuringMachine tm;
  tm.name = "enum2x2-" + std::to_string(index);
  tm.states = {"A", "B", "acc", "rej"};
  tm.tape_alphabet = {"0", "1"};
  tm.input_symbols = {1};
  tm.blank = 0;
  tm.start = 0;
  tm.accept = 2;
  tm.reject = 3;
  for (int pair = 0; pair < 4; ++pair) {
    const std::uint32_t digit = (index >> (4 * pair)) & 0xf;
    TmTransition tr;
    tr.next = static_cast<int>(digit & 3);
    tr.write = static_cast<int>((digit >> 2) & 1);
    tr.move = ((digit >> 3) & 1) ? Move::Right : Move::Left;
    tm.delta[{pair / 2, pair % 2}] = tr;
  }
  return tm;
}

}  // namespace agentlab
