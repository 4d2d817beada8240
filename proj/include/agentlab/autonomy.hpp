#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "agentlab/agent.hpp"
#include "agentlab/bitvec.hpp"
#include "agentlab/distance.hpp"
#include "agentlab/errors.hpp"
#include "agentlab/rng.hpp"

namespace agentlab {

// Bounded witness search for the three autonomy conditions. The conditions
// quantify existentially over behaviors, so a probe can prove them true by
// exhibiting a witness but can rarely prove them false; the status keeps
// "no witness found within budget" distinct from a genuine proof of absence.

enum class WitnessStatus { Witnessed, NoWitnessWithinBudget, ProvenFalse };

inline const char* witness_status_name(WitnessStatus s) {
  switch (s) {
    case WitnessStatus::Witnessed: return "witnessed";
    case WitnessStatus::NoWitnessWithinBudget: return "no-witness-within-budget";
    case WitnessStatus::ProvenFalse: return "proven-false";
  }
  return "?";
}

// Two agent states reacting differently to the same environment snapshot.
template <class SA, class SE>
struct StatePairWitness {
  SA s1, s2;
  SE e;
};

template <class SE>
struct InputChannelWitness {
  SE e1, e2;  // environment states perceived differently
};

template <class SA, class SE>
struct ActionChannelWitness {
  SE e;
  SA s1, s2;  // agent states whose actions move the environment differently
};

template <class SA, class SE>
struct AutonomyReport {
  WitnessStatus condition1 = WitnessStatus::NoWitnessWithinBudget;
  std::optional<StatePairWitness<SA, SE>> condition1_witness;

  WitnessStatus condition2 = WitnessStatus::NoWitnessWithinBudget;
  std::optional<StatePairWitness<SA, SE>> condition2_witness;

  WitnessStatus condition3 = WitnessStatus::NoWitnessWithinBudget;
  std::optional<InputChannelWitness<SE>> condition3_input_witness;
  std::optional<ActionChannelWitness<SA, SE>> condition3_action_witness;

  std::uint64_t evaluations_used = 0;
  std::uint64_t seed = 0;

  bool holds(int condition) const {
    switch (condition) {
      case 1: return condition1 == WitnessStatus::Witnessed;
      case 2: return condition2 == WitnessStatus::Witnessed;
      case 3: return condition3 == WitnessStatus::Witnessed;
    }
    return false;
  }
};

namespace detail {

template <class Agent>
typename Agent::agent_state sample_agent_state(const Agent& agent, Rng& rng) {
  if (agent.state_enum && !agent.state_enum->empty()) {
    const std::size_t i = rng() % agent.state_enum->size();
    return (*agent.state_enum)[i];
  }
  if (!agent.state_sampler)
    throw InputError("agent spec has no state sampler for probing");
  return agent.state_sampler(rng);
}

template <class Env>
typename Env::env_state sample_env_state(const Env& env, Rng& rng) {
  if (!env.state_sampler)
    throw InputError("environment spec has no state sampler for probing");
  return env.state_sampler(rng);
}

}  // namespace detail

// Searches for witnesses within probe_budget transition evaluations.
//  - condition 1: two different agent states, same perceived input, different
//    next states (history matters beyond the current input);
//  - condition 2: two states with different generative contributions that
//    also land on different next states under the same input;
//  - condition 3: the input channel reacts to the environment and the action
//    channel moves it, each shown by an explicit pair.
template <class Agent, class Env>
AutonomyReport<typename Agent::agent_state, typename Agent::env_state>
check_autonomy_conditions(const Agent& agent, const Env& env,
                          std::uint64_t probe_budget, std::uint64_t seed) {
  using SA = typename Agent::agent_state;
  using SE = typename Agent::env_state;
  if (probe_budget < 1) throw InputError("probe budget must be at least 1");

  AutonomyReport<SA, SE> report;
  report.seed = seed;
  std::uint64_t used = 0;
  const bool singleton =
      agent.state_enum.has_value() && agent.state_enum->size() == 1;

  // condition 1
  if (singleton) {
    report.condition1 = WitnessStatus::ProvenFalse;
  } else {
    Rng rng{derive_seed(seed, 1)};
    while (used < probe_budget) {
      SE e = detail::sample_env_state(env, rng);
      SA s1 = detail::sample_agent_state(agent, rng);
      SA s2 = detail::sample_agent_state(agent, rng);
      if (s1 == s2) continue;
      const auto input = agent.input_map(e);
      const SA n1 = agent.transition(s1, input);
      const SA n2 = agent.transition(s2, input);
      used += 2;
      if (!(n1 == n2)) {
        report.condition1 = WitnessStatus::Witnessed;
        report.condition1_witness = StatePairWitness<SA, SE>{s1, s2, e};
        break;
      }
    }
  }

  // condition 2
  if (singleton) {
    report.condition2 = WitnessStatus::ProvenFalse;
  } else {
    Rng rng{derive_seed(seed, 2)};
    while (used < probe_budget) {
      SE e = detail::sample_env_state(env, rng);
      SA s1 = detail::sample_agent_state(agent, rng);
      SA s2 = detail::sample_agent_state(agent, rng);
      if (s1 == s2) continue;
      const SA g1 = agent.generative(s1);
      const SA g2 = agent.generative(s2);
      used += 2;
      if (g1 == g2) continue;
      const auto input = agent.input_map(e);
      const SA n1 = agent.transition(s1, input);
      const SA n2 = agent.transition(s2, input);
      used += 2;
      if (!(n1 == n2)) {
        report.condition2 = WitnessStatus::Witnessed;
        report.condition2_witness = StatePairWitness<SA, SE>{s1, s2, e};
        break;
      }
    }
  }

  // condition 3, input side then action side
  {
    Rng rng{derive_seed(seed, 3)};
    while (used < probe_budget && !report.condition3_input_witness) {
      SE e1 = detail::sample_env_state(env, rng);
      SE e2 = detail::sample_env_state(env, rng);
      used += 2;
      if (e1 == e2) continue;
      if (!(agent.input_map(e1) == agent.input_map(e2))) {
        report.condition3_input_witness = InputChannelWitness<SE>{e1, e2};
      }
    }
    while (used < probe_budget && !report.condition3_action_witness) {
      SE e = detail::sample_env_state(env, rng);
      SA s1 = detail::sample_agent_state(agent, rng);
      SA s2 = detail::sample_agent_state(agent, rng);
      const auto a1 = agent.output_map(s1);
      const auto a2 = agent.output_map(s2);
      if (a1 == a2) {
        used += 1;
        continue;
      }
      const SE t1 = env.transition(e, a1);
      const SE t2 = env.transition(e, a2);
      used += 2;
      if (!(t1 == t2)) {
        report.condition3_action_witness = ActionChannelWitness<SA, SE>{e, s1, s2};
      }
    }
    if (report.condition3_input_witness && report.condition3_action_witness)
      report.condition3 = WitnessStatus::Witnessed;
  }

  report.evaluations_used = used;
  return report;
}

// Replays every claimed witness through coupled_step and re-derives the
// inequalities. Returns false if any claim fails to reproduce.
template <class Agent, class Env>
bool verify_autonomy_witnesses(
    const Agent& agent, const Env& env,
    const AutonomyReport<typename Agent::agent_state,
                         typename Agent::env_state>& report) {
  using SA = typename Agent::agent_state;
  using SE = typename Agent::env_state;
  if (report.condition1 == WitnessStatus::Witnessed) {
    if (!report.condition1_witness) return false;
    const auto& w = *report.condition1_witness;
    const auto c1 = coupled_step(agent, env, {w.s1, w.e, 0});
    const auto c2 = coupled_step(agent, env, {w.s2, w.e, 0});
    if (w.s1 == w.s2) return false;
    if (!(agent.input_map(w.e) == agent.input_map(w.e))) return false;
    if (c1.sa == c2.sa) return false;
  }
  if (report.condition2 == WitnessStatus::Witnessed) {
    if (!report.condition2_witness) return false;
    const auto& w = *report.condition2_witness;
    if (agent.generative(w.s1) == agent.generative(w.s2)) return false;
    const auto c1 = coupled_step(agent, env, {w.s1, w.e, 0});
    const auto c2 = coupled_step(agent, env, {w.s2, w.e, 0});
    if (c1.sa == c2.sa) return false;
  }
  if (report.condition3 == WitnessStatus::Witnessed) {
    if (!report.condition3_input_witness || !report.condition3_action_witness)
      return false;
    const auto& wi = *report.condition3_input_witness;
    if (agent.input_map(wi.e1) == agent.input_map(wi.e2)) return false;
    const auto& wa = *report.condition3_action_witness;
    const auto c1 = coupled_step(agent, env, {wa.s1, wa.e, 0});
    const auto c2 = coupled_step(agent, env, {wa.s2, wa.e, 0});
    if (c1.se == c2.se) return false;
  }
  return true;
}

// Maximum observed output distance under environment perturbations of at
// most delta_cells bit flips. With delta_cells == 1 and trials covering the
// width, all single flips are enumerated; otherwise flips are sampled.
template <class TsFn, class S>
double perturbation_sensitivity(TsFn&& ts, const S& s, const BitVec& e,
                                int delta_cells, int trials,
                                std::uint64_t seed) {
  if (delta_cells < 1) throw InputError("delta must be at least one cell");
  if (trials < 1) throw InputError("need at least one trial");
  const auto base_bits = to_bits(ts(s, e));
  double worst = 0.0;
  if (delta_cells == 1 &&
      static_cast<std::size_t>(trials) >= e.size()) {
    for (std::size_t i = 0; i < e.size(); ++i) {
      BitVec ep = e;
      ep.flip(i);
      const double d = state_distance(base_bits, to_bits(ts(s, ep)));
      if (d > worst) worst = d;
    }
    return worst;
  }
  Rng rng{seed};
  for (int k = 0; k < trials; ++k) {
    BitVec ep = e;
    const int flips = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(
                                               delta_cells));
    for (int f = 0; f < flips; ++f) ep.flip(rng() % ep.size());
    const double d = state_distance(base_bits, to_bits(ts(s, ep)));
    if (d > worst) worst = d;
  }
  return worst;
}

struct ReturnTime {
  std::uint64_t t = 0;
};
struct Diverged {
  std::uint64_t horizon = 0;
};

// Applies a perturbation to the agent state at t = 0, then reports the first
// time the agent state is back in the core set.
template <class Agent, class Env, class CorePred, class PerturbFn>
std::variant<ReturnTime, Diverged> core_stability_probe(
    const Agent& agent, const Env& env, CorePred&& in_core,
    const CoupledState<typename Agent::agent_state,
                       typename Agent::env_state>& s0,
    PerturbFn&& perturb, std::uint64_t horizon) {
  auto sa = perturb(s0.sa);
  auto se = s0.se;
  if (in_core(sa)) return ReturnTime{0};
  for (std::uint64_t t = 1; t <= horizon; ++t) {
    coupled_step_inplace(agent, env, sa, se);
    if (in_core(sa)) return ReturnTime{t};
  }
  return Diverged{horizon};
}

}  // namespace agentlab
