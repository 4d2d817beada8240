#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "agentlab/agent.hpp"
#include "agentlab/bitvec.hpp"
#include "agentlab/eca.hpp"
#include "agentlab/embedding.hpp"
#include "agentlab/errors.hpp"
#include "agentlab/rng.hpp"
#include "agentlab/tm_spec.hpp"

namespace agentlab {

// Built-in agent and environment families selectable from a spec document.
// Agent families: reactive, counter, table-driven, tm-embedded.
// Environment families: eca, static, noisy-bit, copy-bit (tm-embedded
// supplies its own tape environment).

struct NoiseState {
  std::uint64_t bit = 0;
  std::uint64_t rng = 0;

  bool operator==(const NoiseState&) const = default;
};

inline void encode_state(ByteSink& s, const NoiseState& n) {
  s.put_varint(n.bit);
  s.put_varint(n.rng);
}

using FamAgentState = std::uint64_t;
using FamInput = std::uint64_t;
using FamAction = std::variant<std::uint64_t, EmbAction>;
using FamEnvState = std::variant<BitVec, Tape, NoiseState, std::uint64_t>;

using FamAgent = AgentSpec<FamAgentState, FamEnvState, FamInput, FamAction>;
using FamEnv = EnvironmentSpec<FamEnvState, FamAction>;

inline std::string trace_cell(const FamAction& a) {
  if (const auto* v = std::get_if<std::uint64_t>(&a)) return std::to_string(*v);
  return trace_cell(std::get<EmbAction>(a));
}

struct FamilySystem {
  FamAgent agent;
  FamEnv env;
  CoupledState<FamAgentState, FamEnvState> s0;
  std::string description;
};

namespace detail {

// Default observation: the low bit of whatever the environment is, except
// tapes, which expose the full symbol under the head.
inline FamInput observe_env(const FamEnvState& se) {
  if (const auto* row = std::get_if<BitVec>(&se))
    return row->empty() ? 0 : static_cast<FamInput>(row->get(0));
  if (const auto* tape = std::get_if<Tape>(&se))
    return static_cast<FamInput>(tape->read());
  if (const auto* noise = std::get_if<NoiseState>(&se)) return noise->bit;
  return std::get<std::uint64_t>(se) & 1;
}

inline std::uint64_t action_bit(const FamAction& a) {
  if (const auto* v = std::get_if<std::uint64_t>(&a)) return *v & 1;
  return 0;
}

inline const nlohmann::json& fam_need(const nlohmann::json& j,
                                      const char* field, const char* what) {
  if (!j.contains(field))
    throw ConfigError(std::string(what) + " spec missing field '" + field + "'");
  return j.at(field);
}

}  // namespace detail

inline FamEnv build_env_family(const nlohmann::json& cfg, std::uint64_t seed,
                               FamEnvState& initial_out) {
  const std::string family =
      detail::fam_need(cfg, "family", "environment").get<std::string>();

  if (family == "eca") {
    const int rule_index = detail::fam_need(cfg, "rule", "eca").get<int>();
    const EcaRule rule = eca_rule_table(rule_index);
    const std::size_t width =
        detail::fam_need(cfg, "width", "eca").get<std::size_t>();
    if (width < 3) throw ConfigError("eca width must be at least 3");
    const std::string hook = cfg.value("action_hook", "none");
    if (hook != "none" && hook != "xor-cell0")
      throw ConfigError("unknown action_hook: " + hook);
    const bool writable = hook == "xor-cell0";

    FamEnv env = make_environment<FamEnvState, FamAction>(
        [rule, writable](const FamEnvState& se, const FamAction& a) {
          BitVec row = std::get<BitVec>(se);
          if (writable && detail::action_bit(a)) row.flip(0);
          return FamEnvState{eca_step(row, rule)};
        },
        "CA-rule-" + std::to_string(rule_index));
    env.state_sampler = [width](Rng& rng) {
      return FamEnvState{BitVec::random(width, rng)};
    };

    const std::string init = cfg.contains("init") && cfg.at("init").is_string()
                                 ? cfg.at("init").get<std::string>()
                                 : "random";
    if (cfg.contains("init") && cfg.at("init").is_object()) {
      initial_out = BitVec::from_string(
          cfg.at("init").at("bits").get<std::string>());
      if (std::get<BitVec>(initial_out).size() != width)
        throw ConfigError("init bits width mismatch");
    } else if (init == "random") {
      Rng rng{derive_seed(seed, tag_of("env-init"))};
      initial_out = BitVec::random(width, rng);
    } else if (init == "single-one") {
      BitVec row(width);
      row.set(width / 2, true);
      initial_out = row;
    } else {
      throw ConfigError("unknown eca init: " + init);
    }
    return env;
  }

  if (family == "static") {
    FamEnv env = make_environment<FamEnvState, FamAction>(
        [](const FamEnvState& se, const FamAction&) { return se; }, "finite");
    if (cfg.contains("bits")) {
      initial_out = BitVec::from_string(cfg.at("bits").get<std::string>());
    } else {
      const std::size_t width = cfg.value("width", std::size_t{8});
      Rng rng{derive_seed(seed, tag_of("env-init"))};
      initial_out = BitVec::random(width, rng);
    }
    const BitVec fixed = std::get<BitVec>(initial_out);
    env.state_sampler = [fixed](Rng&) { return FamEnvState{fixed}; };
    return env;
  }

  if (family == "noisy-bit") {
    // One fresh fair coin per step, folded into the state so transitions
    // stay deterministic and replayable.
    FamEnv env = make_environment<FamEnvState, FamAction>(
        [](const FamEnvState& se, const FamAction&) {
          NoiseState ns = std::get<NoiseState>(se);
          ns.bit = splitmix64_next(ns.rng) & 1;
          return FamEnvState{ns};
        },
        "finite");
    env.state_sampler = [](Rng& rng) {
      return FamEnvState{NoiseState{rng() & 1, rng()}};
    };
    initial_out = NoiseState{0, derive_seed(seed, tag_of("noisy-bit"))};
    return env;
  }

  if (family == "copy-bit") {
    FamEnv env = make_environment<FamEnvState, FamAction>(
        [](const FamEnvState&, const FamAction& a) {
          return FamEnvState{detail::action_bit(a)};
        },
        "finite");
    env.state_sampler = [](Rng& rng) { return FamEnvState{rng() & 1}; };
    initial_out = std::uint64_t{0};
    return env;
  }

  throw ConfigError("unknown environment family: " + family);
}

inline FamilySystem build_system(const nlohmann::json& spec, std::uint64_t seed,
                                 const std::filesystem::path& base_dir = {}) {
  const auto& agent_cfg = detail::fam_need(spec, "agent", "system");
  const std::string family =
      detail::fam_need(agent_cfg, "family", "agent").get<std::string>();

  FamilySystem sys;

  if (family == "tm-embedded") {
    const std::string machine_rel =
        detail::fam_need(agent_cfg, "machine", "tm-embedded").get<std::string>();
    const std::filesystem::path machine_path =
        base_dir.empty() ? std::filesystem::path(machine_rel)
                         : base_dir / machine_rel;
    TmSpecFile tmspec = tm_load_file(machine_path);
    std::vector<int> input = tmspec.input;
    if (agent_cfg.contains("input"))
      input = parse_input(tmspec.machine,
                          agent_cfg.at("input").get<std::string>());
    EmbeddedSystem emb = build_embedded_machine(tmspec.machine, input);
    auto program = emb.program;

    sys.agent.input_map = [program](const FamEnvState& se) {
      return static_cast<FamInput>(std::get<Tape>(se).read());
    };
    sys.agent.generative = [](const FamAgentState& s) { return s; };
    const detail::EmbIntegrateFn integrate{program};
    sys.agent.integrate = [integrate](const FamAgentState& g,
                                      const FamInput& i) {
      return static_cast<FamAgentState>(
          integrate(static_cast<std::int32_t>(g), static_cast<std::int32_t>(i)));
    };
    const detail::EmbOutputFn output{program};
    sys.agent.output_map = [output](const FamAgentState& s) {
      return FamAction{output(static_cast<std::int32_t>(s))};
    };
    const std::int32_t accept_id = program->agent_of(program->tm.accept);
    sys.agent.goal = [accept_id](const FamAgentState& sa, const FamEnvState&) {
      return static_cast<std::int32_t>(sa) == accept_id;
    };
    std::vector<FamAgentState> all_states;
    for (std::int32_t id : program->phi)
      all_states.push_back(static_cast<FamAgentState>(id));
    sys.agent.state_enum = all_states;
    sys.agent.state_sampler = [all_states](Rng& rng) {
      return all_states[rng() % all_states.size()];
    };

    const detail::EmbEnvStepInplaceFn env_step{program};
    sys.env.transition_inplace = [env_step](FamEnvState& se,
                                            const FamAction& a) {
      env_step(std::get<Tape>(se),
               std::holds_alternative<EmbAction>(a) ? std::get<EmbAction>(a)
                                                    : EmbAction{-1});
    };
    sys.env.transition = [env_step](const FamEnvState& se, const FamAction& a) {
      FamEnvState next = se;
      env_step(std::get<Tape>(next),
               std::holds_alternative<EmbAction>(a) ? std::get<EmbAction>(a)
                                                    : EmbAction{-1});
      return next;
    };
    sys.env.complexity_class = "TM-tape";
    const int blank = program->tm.blank;
    const int nsym = program->tm.num_symbols;
    sys.env.state_sampler = [blank, nsym](Rng& rng) {
      Tape t(blank);
      for (std::int64_t p = -2; p <= 2; ++p)
        t.set_cell(p, static_cast<int>(rng() % static_cast<std::uint64_t>(nsym)));
      t.set_head(0);
      return FamEnvState{t};
    };

    sys.s0 = {static_cast<FamAgentState>(emb.s0.sa), FamEnvState{emb.s0.se}, 0};
    sys.description = "tm-embedded:" + tmspec.machine.name;
    return sys;
  }

  // Other agent families pair with a configured environment.
  FamEnvState env_initial;
  sys.env = build_env_family(detail::fam_need(spec, "env", "system"), seed,
                             env_initial);

  sys.agent.input_map = detail::observe_env;
  sys.agent.goal = [](const FamAgentState&, const FamEnvState&) {
    return false;
  };

  if (family == "reactive") {
    const std::uint64_t out = agent_cfg.value("output", std::uint64_t{0});
    sys.agent.generative = [](const FamAgentState& s) { return s; };
    sys.agent.integrate = [](const FamAgentState&, const FamInput&) {
      return FamAgentState{0};
    };
    sys.agent.output_map = [out](const FamAgentState&) { return FamAction{out}; };
    sys.agent.state_enum = std::vector<FamAgentState>{0};
    sys.agent.state_sampler = [](Rng&) { return FamAgentState{0}; };
    sys.s0 = {0, env_initial, 0};
    sys.description = "reactive";
    return sys;
  }

  if (family == "counter") {
    const std::uint64_t modulus = agent_cfg.value("modulus", std::uint64_t{65536});
    if (modulus < 2) throw ConfigError("counter modulus must be at least 2");
    const std::uint64_t weight = agent_cfg.value("input_weight", std::uint64_t{0});
    sys.agent.generative = [modulus](const FamAgentState& s) {
      return (s + 1) % modulus;
    };
    sys.agent.integrate = [modulus, weight](const FamAgentState& g,
                                            const FamInput& i) {
      return (g + weight * i) % modulus;
    };
    sys.agent.output_map = [](const FamAgentState& s) {
      return FamAction{s & 1};
    };
    if (modulus <= 4096) {
      std::vector<FamAgentState> all;
      for (std::uint64_t v = 0; v < modulus; ++v) all.push_back(v);
      sys.agent.state_enum = std::move(all);
    }
    sys.agent.state_sampler = [modulus](Rng& rng) { return rng() % modulus; };
    sys.s0 = {agent_cfg.value("initial", std::uint64_t{0}) % modulus,
              env_initial, 0};
    sys.description = "counter-mod-" + std::to_string(modulus);
    return sys;
  }

  if (family == "table-driven") {
    std::vector<std::string> names;
    for (const auto& s : detail::fam_need(agent_cfg, "states", "table-driven"))
      names.push_back(s.get<std::string>());
    if (names.empty()) throw ConfigError("table-driven agent needs states");
    auto index_of = [names](const std::string& n) -> FamAgentState {
      for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == n) return i;
      throw ConfigError("unknown table-driven state: " + n);
    };

    auto g_table = std::make_shared<std::map<FamAgentState, FamAgentState>>();
    for (const auto& [from, to] :
         detail::fam_need(agent_cfg, "g", "table-driven").items())
      (*g_table)[index_of(from)] = index_of(to.get<std::string>());

    auto step_table = std::make_shared<
        std::map<std::pair<FamAgentState, FamInput>, FamAgentState>>();
    for (const auto& [key, to] :
         detail::fam_need(agent_cfg, "integrate", "table-driven").items()) {
      const std::size_t comma = key.find(',');
      if (comma == std::string::npos)
        throw ConfigError("integrate keys must be \"<g-state>,<input>\"");
      (*step_table)[{index_of(key.substr(0, comma)),
                     std::stoull(key.substr(comma + 1))}] =
          index_of(to.get<std::string>());
    }

    auto out_table = std::make_shared<std::map<FamAgentState, std::uint64_t>>();
    if (agent_cfg.contains("output"))
      for (const auto& [from, v] : agent_cfg.at("output").items())
        (*out_table)[index_of(from)] = v.get<std::uint64_t>();

    auto names_ptr = std::make_shared<std::vector<std::string>>(names);
    sys.agent.generative = [g_table, names_ptr](const FamAgentState& s) {
      auto it = g_table->find(s);
      if (it == g_table->end())
        throw SpecGapError("g undefined on state " + (*names_ptr)[s]);
      return it->second;
    };
    sys.agent.integrate = [step_table, names_ptr](const FamAgentState& g,
                                                  const FamInput& i) {
      auto it = step_table->find({g, i});
      if (it == step_table->end())
        throw SpecGapError("transition undefined on state " + (*names_ptr)[g] +
                           " with input " + std::to_string(i));
      return it->second;
    };
    sys.agent.output_map = [out_table](const FamAgentState& s) {
      auto it = out_table->find(s);
      return FamAction{it == out_table->end() ? std::uint64_t{0} : it->second};
    };
    std::vector<FamAgentState> all;
    for (std::size_t i = 0; i < names.size(); ++i) all.push_back(i);
    sys.agent.state_enum = all;
    sys.agent.state_sampler = [all](Rng& rng) {
      return all[rng() % all.size()];
    };
    sys.s0 = {index_of(detail::fam_need(agent_cfg, "initial", "table-driven")
                           .get<std::string>()),
              env_initial, 0};
    sys.description = "table-driven";
    return sys;
  }

  throw ConfigError("unknown agent family: " + family);
}

}  // namespace agentlab
