#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "agentlab/bytes.hpp"
#include "agentlab/csv.hpp"
#include "agentlab/errors.hpp"
#include "agentlab/hash.hpp"
#include "agentlab/rng.hpp"

namespace agentlab {

// Minimal agent: input map, generative component, state integration, output
// map and a goal predicate. The full transition is the composition
// transition(s, i) = integrate(generative(s), i), so the generative
// contribution is a structurally distinguished stage rather than a claim
// about the implementation of some opaque lambda.
//
// The callable slots default to std::function; performance-sensitive callers
// instantiate them with concrete functor types instead.
template <class SAgent, class SEnv, class Input, class Action,
          class InputFn = std::function<Input(const SEnv&)>,
          class GenFn = std::function<SAgent(const SAgent&)>,
          class IntegrateFn = std::function<SAgent(const SAgent&, const Input&)>,
          class OutputFn = std::function<Action(const SAgent&)>,
          class GoalFn = std::function<bool(const SAgent&, const SEnv&)>>
struct AgentSpec {
  using agent_state = SAgent;
  using env_state = SEnv;
  using input_type = Input;
  using action_type = Action;

  InputFn input_map;     // environment state -> perceived input
  GenFn generative;      // internal contribution g
  IntegrateFn integrate; // combines g(s) with the current input
  OutputFn output_map;   // agent state -> action
  GoalFn goal;           // goal predicate over (agent, environment)

  // State-space descriptor: an exhaustive enumeration when the space is
  // finite and small, and a sampler for probe searches.
  std::optional<std::vector<SAgent>> state_enum;
  std::function<SAgent(Rng&)> state_sampler;

  SAgent transition(const SAgent& s, const Input& i) const {
    return integrate(generative(s), i);
  }
};

template <class SEnv, class Action,
          class StepFn = std::function<SEnv(const SEnv&, const Action&)>,
          class StepInplaceFn = std::function<void(SEnv&, const Action&)>>
struct EnvironmentSpec {
  using env_state = SEnv;
  using action_type = Action;

  StepFn transition;                // pure step
  StepInplaceFn transition_inplace; // same semantics, mutates in place
  std::string complexity_class;     // informational label
  std::function<SEnv(Rng&)> state_sampler;
};

// Builds an EnvironmentSpec from a pure step function alone.
template <class SEnv, class Action, class StepFn>
EnvironmentSpec<SEnv, Action> make_environment(StepFn step,
                                               std::string complexity_class) {
  EnvironmentSpec<SEnv, Action> env;
  env.transition = step;
  env.transition_inplace = [step](SEnv& se, const Action& a) { se = step(se, a); };
  env.complexity_class = std::move(complexity_class);
  return env;
}

template <class SAgent, class SEnv>
struct CoupledState {
  SAgent sa;
  SEnv se;
  std::uint64_t t = 0;
};

// One synchronous step: both updates read only the time-t snapshot.
template <class Agent, class Env>
CoupledState<typename Agent::agent_state, typename Agent::env_state>
coupled_step(const Agent& agent, const Env& env,
             const CoupledState<typename Agent::agent_state,
                                typename Agent::env_state>& cs) {
  const auto input = agent.input_map(cs.se);
  const auto action = agent.output_map(cs.sa);
  return {agent.transition(cs.sa, input), env.transition(cs.se, action),
          cs.t + 1};
}

// In-place variant used by long runs; identical semantics.
template <class Agent, class Env>
void coupled_step_inplace(const Agent& agent, const Env& env,
                          typename Agent::agent_state& sa,
                          typename Agent::env_state& se) {
  const auto input = agent.input_map(se);
  const auto action = agent.output_map(sa);
  sa = agent.transition(sa, input);
  env.transition_inplace(se, action);
}

template <class SAgent, class SEnv, class Input, class Action>
struct TraceRecord {
  std::uint64_t t = 0;
  SAgent sa;
  SEnv se;
  Input ia;
  Action oa;
};

template <class SAgent, class SEnv, class Input, class Action>
struct CoupledTrace {
  std::vector<TraceRecord<SAgent, SEnv, Input, Action>> records;
  std::optional<std::uint64_t> first_hit;
  std::uint64_t seed = 0;
  std::string config_hash;

  std::size_t length() const { return records.size(); }
};

// Runs the coupled dynamics for `horizon` steps recording every state. When
// a property is supplied, first_hit is the earliest time it holds; with
// early_stop the trace is truncated there.
template <class Agent, class Env, class Prop>
CoupledTrace<typename Agent::agent_state, typename Agent::env_state,
             typename Agent::input_type, typename Agent::action_type>
run_coupled(const Agent& agent, const Env& env,
            CoupledState<typename Agent::agent_state,
                         typename Agent::env_state> s0,
            std::uint64_t horizon, Prop&& prop, bool early_stop) {
  if (horizon < 1) throw InputError("horizon must be at least 1");
  CoupledTrace<typename Agent::agent_state, typename Agent::env_state,
               typename Agent::input_type, typename Agent::action_type> trace;
  trace.records.reserve(static_cast<std::size_t>(horizon) + 1);
  CoupledState<typename Agent::agent_state, typename Agent::env_state> cs =
      std::move(s0);
  for (std::uint64_t t = 0;; ++t) {
    trace.records.push_back({cs.t, cs.sa, cs.se, agent.input_map(cs.se),
                             agent.output_map(cs.sa)});
    if (!trace.first_hit && prop(cs.sa, cs.se)) {
      trace.first_hit = cs.t;
      if (early_stop) break;
    }
    if (t == horizon) break;
    cs = coupled_step(agent, env, cs);
  }
  return trace;
}

template <class Agent, class Env>
CoupledTrace<typename Agent::agent_state, typename Agent::env_state,
             typename Agent::input_type, typename Agent::action_type>
run_coupled(const Agent& agent, const Env& env,
            CoupledState<typename Agent::agent_state,
                         typename Agent::env_state> s0,
            std::uint64_t horizon) {
  auto never = [](const auto&, const auto&) { return false; };
  auto trace = run_coupled(agent, env, std::move(s0), horizon, never, false);
  trace.first_hit.reset();
  return trace;
}

// ---------------------------------------------------------------------------
// Trace export. States go out as hashes in the CSV; the sidecar binary log
// keeps the full canonical bytes of every record.

template <class T>
std::string trace_cell(const T& v) {
  return state_hash(v);
}
inline std::string trace_cell(std::uint64_t v) { return std::to_string(v); }
inline std::string trace_cell(std::int64_t v) { return std::to_string(v); }
inline std::string trace_cell(std::int32_t v) { return std::to_string(v); }
inline std::string trace_cell(bool v) { return v ? "1" : "0"; }

template <class SAgent, class SEnv, class Input, class Action, class Prop>
void write_trace_csv(const CoupledTrace<SAgent, SEnv, Input, Action>& trace,
                     const std::filesystem::path& path, Prop&& prop) {
  CsvWriter csv(path, {"t", "s_A_hash", "s_E_hash", "i_A", "o_A", "prop"});
  for (const auto& rec : trace.records) {
    csv.row({std::to_string(rec.t), state_hash(rec.sa), state_hash(rec.se),
             trace_cell(rec.ia), trace_cell(rec.oa),
             prop(rec.sa, rec.se) ? "1" : "0"});
  }
}

template <class SAgent, class SEnv, class Input, class Action>
void write_trace_csv(const CoupledTrace<SAgent, SEnv, Input, Action>& trace,
                     const std::filesystem::path& path) {
  write_trace_csv(trace, path,
                  [](const SAgent&, const SEnv&) { return false; });
}

// Sidecar full-state log: magic "ATRC", seed, config hash, record count,
// then per record (t, sa, se, ia, oa) as length-prefixed canonical bytes.
template <class SAgent, class SEnv, class Input, class Action>
std::string trace_binary(const CoupledTrace<SAgent, SEnv, Input, Action>& trace) {
  ByteSink s;
  s.put_bytes("ATRC");
  s.put_varint(trace.seed);
  s.put_prefixed(trace.config_hash);
  s.put_u8(trace.first_hit ? 1 : 0);
  if (trace.first_hit) s.put_varint(*trace.first_hit);
  s.put_varint(trace.records.size());
  for (const auto& rec : trace.records) {
    s.put_varint(rec.t);
    s.put_prefixed(canonical_bytes(rec.sa));
    s.put_prefixed(canonical_bytes(rec.se));
    s.put_prefixed(canonical_bytes(rec.ia));
    s.put_prefixed(canonical_bytes(rec.oa));
  }
  return s.out;
}

template <class SAgent, class SEnv, class Input, class Action>
void write_trace_binary(const CoupledTrace<SAgent, SEnv, Input, Action>& trace,
                        const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open trace output: " + path.string());
  const std::string bytes = trace_binary(trace);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace agentlab
