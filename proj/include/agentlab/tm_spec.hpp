#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "agentlab/errors.hpp"
#include "agentlab/turing.hpp"

namespace agentlab {

// Machine spec document, see docs/formats.md. Required fields: states,
// input_alphabet, tape_alphabet, blank, start, accept, reject, delta.
// delta rows are 5-tuples [state, read, next, write, move].
inline TuringMachine tm_from_json(const nlohmann::json& j) {
  auto need = [&](const char* field) -> const nlohmann::json& {
    if (!j.contains(field))
      throw ConfigError(std::string("machine spec missing field '") + field +
                        "'");
    return j.at(field);
  };

  TuringMachine tm;
  tm.name = j.value("name", "");
  for (const auto& s : need("states")) tm.states.push_back(s.get<std::string>());
  for (const auto& s : need("tape_alphabet"))
    tm.tape_alphabet.push_back(s.get<std::string>());
  tm.blank = tm.symbol_id(need("blank").get<std::string>());
  tm.start = tm.state_id(need("start").get<std::string>());
  tm.accept = tm.state_id(need("accept").get<std::string>());
  tm.reject = tm.state_id(need("reject").get<std::string>());
  for (const auto& s : need("input_alphabet"))
    tm.input_symbols.push_back(tm.symbol_id(s.get<std::string>()));
  std::sort(tm.input_symbols.begin(), tm.input_symbols.end());
  for (const auto& row : need("delta")) {
    if (!row.is_array() || row.size() != 5)
      throw ConfigError("delta rows must be [state, read, next, write, move]");
    const int q = tm.state_id(row[0].get<std::string>());
    const int a = tm.symbol_id(row[1].get<std::string>());
    TmTransition tr;
    tr.next = tm.state_id(row[2].get<std::string>());
    tr.write = tm.symbol_id(row[3].get<std::string>());
    const std::string mv = row[4].get<std::string>();
    if (mv == "L")
      tr.move = Move::Left;
    else if (mv == "R")
      tr.move = Move::Right;
    else
      throw ConfigError("move must be \"L\" or \"R\", got \"" + mv + "\"");
    if (tm.delta.count({q, a}))
      throw ConfigError("duplicate delta row for (" + row[0].get<std::string>() +
                        ", " + row[1].get<std::string>() + ")");
    tm.delta[{q, a}] = tr;
  }
  tm.validate();
  return tm;
}

inline nlohmann::json tm_to_json(const TuringMachine& tm) {
  nlohmann::json j;
  if (!tm.name.empty()) j["name"] = tm.name;
  j["states"] = tm.states;
  j["tape_alphabet"] = tm.tape_alphabet;
  nlohmann::json inputs = nlohmann::json::array();
  for (int a : tm.input_symbols)
    inputs.push_back(tm.tape_alphabet[static_cast<std::size_t>(a)]);
  j["input_alphabet"] = inputs;
  j["blank"] = tm.tape_alphabet[static_cast<std::size_t>(tm.blank)];
  j["start"] = tm.states[static_cast<std::size_t>(tm.start)];
  j["accept"] = tm.states[static_cast<std::size_t>(tm.accept)];
  j["reject"] = tm.states[static_cast<std::size_t>(tm.reject)];
  nlohmann::json delta = nlohmann::json::array();
  for (const auto& [key, tr] : tm.delta) {
    delta.push_back({tm.states[static_cast<std::size_t>(key.first)],
                     tm.tape_alphabet[static_cast<std::size_t>(key.second)],
                     tm.states[static_cast<std::size_t>(tr.next)],
                     tm.tape_alphabet[static_cast<std::size_t>(tr.write)],
                     tr.move == Move::Left ? "L" : "R"});
  }
  j["delta"] = delta;
  return j;
}

struct TmSpecFile {
  TuringMachine machine;
  std::vector<int> input;  // optional word bundled with the spec
};

inline TmSpecFile tm_load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open machine spec: " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("machine spec " + path.string() + ": " + e.what());
  }
  TmSpecFile spec;
  spec.machine = tm_from_json(j);
  if (j.contains("input")) {
    const auto& w = j.at("input");
    if (w.is_string()) {
      spec.input = parse_input(spec.machine, w.get<std::string>());
    } else {
      for (const auto& s : w)
        spec.input.push_back(spec.machine.symbol_id(s.get<std::string>()));
    }
    for (int sym : spec.input)
      if (!spec.machine.is_input_symbol(sym))
        throw ConfigError("machine spec " + path.string() +
                          ": input word uses a non-input symbol");
  }
  return spec;
}

}  // namespace agentlab
