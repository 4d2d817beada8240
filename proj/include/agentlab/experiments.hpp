#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "agentlab/autonomy.hpp"
#include "agentlab/csv.hpp"
#include "agentlab/embedding.hpp"
#include "agentlab/errors.hpp"
#include "agentlab/families.hpp"
#include "agentlab/hash.hpp"
#include "agentlab/info_metrics.hpp"
#include "agentlab/predictors.hpp"
#include "agentlab/tm_spec.hpp"
#include "agentlab/version.hpp"

namespace agentlab {

inline const std::vector<std::string>& experiment_ids() {
  static const std::vector<std::string> ids{
      "eca-run",       "embed-check",  "predict-sweep",
      "complexity-sweep", "halting-sweep", "autonomy-report"};
  return ids;
}

struct ExperimentConfig {
  std::string experiment;
  std::uint64_t seed = 0;
  nlohmann::json params;
  std::filesystem::path base_dir;  // for resolving relative paths
  std::string config_hash;         // hash of the effective canonical config
};

namespace detail {

inline const nlohmann::json& cfg_need(const nlohmann::json& j,
                                      const std::string& field) {
  if (!j.contains(field))
    throw ConfigError("config missing field '" + field + "'");
  return j.at(field);
}

inline std::filesystem::path resolve(const ExperimentConfig& cfg,
                                     const std::string& rel) {
  const std::filesystem::path p(rel);
  return p.is_absolute() || cfg.base_dir.empty() ? p : cfg.base_dir / p;
}

inline void validate_config(ExperimentConfig& cfg) {
  const auto& ids = experiment_ids();
  if (std::find(ids.begin(), ids.end(), cfg.experiment) == ids.end())
    throw ConfigError("unknown experiment id: '" + cfg.experiment + "'");
  const nlohmann::json& p = cfg.params;

  auto check_rule = [&](const nlohmann::json& r, const char* field) {
    const int v = r.get<int>();
    if (v < 0 || v > 255)
      throw ConfigError(std::string("field '") + field +
                        "' must be in [0, 255], got " + std::to_string(v));
  };

  if (cfg.experiment == "eca-run") {
    check_rule(cfg_need(p, "rule"), "rule");
    if (cfg_need(p, "width").get<int>() < 3)
      throw ConfigError("field 'width' must be at least 3");
    if (cfg_need(p, "steps").get<std::int64_t>() < 1)
      throw ConfigError("field 'steps' must be at least 1");
    if (p.value("num_seeds", 1) < 1)
      throw ConfigError("field 'num_seeds' must be at least 1");
  } else if (cfg.experiment == "embed-check") {
    if (cfg_need(p, "budget").get<std::int64_t>() < 1)
      throw ConfigError("field 'budget' must be at least 1");
    const auto dir = resolve(cfg, cfg_need(p, "corpus_dir").get<std::string>());
    if (!std::filesystem::is_directory(dir))
      throw ConfigError("corpus_dir does not exist: " + dir.string());
  } else if (cfg.experiment == "predict-sweep") {
    if (cfg_need(p, "width").get<int>() < 3)
      throw ConfigError("field 'width' must be at least 3");
    for (const auto& r : cfg_need(p, "rules")) check_rule(r, "rules");
    const auto& hs = cfg_need(p, "horizons");
    if (hs.empty()) throw ConfigError("field 'horizons' must be non-empty");
    for (std::size_t i = 1; i < hs.size(); ++i)
      if (hs[i].get<std::uint64_t>() <= hs[i - 1].get<std::uint64_t>())
        throw ConfigError("field 'horizons' must be strictly ascending");
    if (cfg_need(p, "num_seeds").get<int>() < 1)
      throw ConfigError("field 'num_seeds' must be at least 1");
    for (const auto& pr : cfg_need(p, "predictors"))
      predictor_kind_from_string(cfg_need(pr, "kind").get<std::string>());
  } else if (cfg.experiment == "complexity-sweep") {
    if (cfg_need(p, "width").get<int>() < 3)
      throw ConfigError("field 'width' must be at least 3");
    for (const auto& r : cfg_need(p, "rules")) check_rule(r, "rules");
    if (cfg_need(p, "steps").get<std::int64_t>() < 1)
      throw ConfigError("field 'steps' must be at least 1");
    if (p.value("prefix_points", 21) < 2)
      throw ConfigError("field 'prefix_points' must be at least 2");
    compressor_by_id(p.value("compressor", "lz77"));
  } else if (cfg.experiment == "halting-sweep") {
    if (cfg_need(p, "budget").get<std::int64_t>() < 1)
      throw ConfigError("field 'budget' must be at least 1");
    if (p.contains("corpus_dir")) {
      const auto dir = resolve(cfg, p.at("corpus_dir").get<std::string>());
      if (!std::filesystem::is_directory(dir))
        throw ConfigError("corpus_dir does not exist: " + dir.string());
    }
  } else if (cfg.experiment == "autonomy-report") {
    cfg_need(p, "system");
    if (cfg_need(p, "probe_budget").get<std::int64_t>() < 1)
      throw ConfigError("field 'probe_budget' must be at least 1");
    if (cfg_need(p, "trace_steps").get<std::int64_t>() < 2)
      throw ConfigError("field 'trace_steps' must be at least 2");
    const auto& agent = cfg_need(cfg_need(p, "system"), "agent");
    if (agent.value("family", "") == "tm-embedded") {
      const auto path = resolve(cfg, cfg_need(agent, "machine").get<std::string>());
      if (!std::filesystem::exists(path))
        throw ConfigError("machine spec does not exist: " + path.string());
    }
  }
}

}  // namespace detail

inline ExperimentConfig parse_config_json(nlohmann::json j,
                                          std::filesystem::path base_dir) {
  ExperimentConfig cfg;
  if (!j.contains("experiment"))
    throw ConfigError("config missing field 'experiment'");
  cfg.experiment = j.at("experiment").get<std::string>();
  if (!j.contains("seed"))
    throw ConfigError(
        "config missing field 'seed' (seeds are explicit, no defaults)");
  cfg.seed = j.at("seed").get<std::uint64_t>();
  cfg.params = j.value("params", nlohmann::json::object());
  cfg.base_dir = std::move(base_dir);
  nlohmann::json canon{{"experiment", cfg.experiment},
                       {"seed", cfg.seed},
                       {"params", cfg.params}};
  cfg.config_hash = hex64(fnv1a64(canon.dump()));
  detail::validate_config(cfg);
  return cfg;
}

inline ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < e.byte && i < text.size(); ++i)
      if (text[i] == '\n') ++line;
    throw ConfigError(path.string() + ":" + std::to_string(line) + ": " +
                      e.what());
  }
  try {
    return parse_config_json(std::move(j), path.parent_path());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

struct OutputRecord {
  std::string path;  // relative to the output directory
  std::uint64_t bytes = 0;
  std::string fnv64;
};

struct RunManifest {
  std::string experiment;
  std::string config_hash;
  std::string artifact_version;
  std::uint64_t master_seed = 0;
  std::string started_at;
  std::string finished_at;
  std::string status;  // running | complete | failed
  std::string error;
  std::vector<OutputRecord> outputs;
};

namespace detail {

inline std::string iso_timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline nlohmann::json manifest_to_json(const RunManifest& m) {
  nlohmann::json j;
  j["experiment"] = m.experiment;
  j["config_hash"] = m.config_hash;
  j["artifact_version"] = m.artifact_version;
  j["master_seed"] = m.master_seed;
  j["started_at"] = m.started_at;
  j["finished_at"] = m.finished_at;
  j["status"] = m.status;
  if (!m.error.empty()) j["error"] = m.error;
  nlohmann::json outs = nlohmann::json::array();
  for (const auto& o : m.outputs)
    outs.push_back({{"path", o.path}, {"bytes", o.bytes}, {"fnv64", o.fnv64}});
  j["outputs"] = outs;
  return j;
}

inline void write_manifest(const RunManifest& m,
                           const std::filesystem::path& out_dir) {
  std::ofstream out(out_dir / "manifest.json", std::ios::binary);
  if (!out) throw Error("cannot write manifest in " + out_dir.string());
  out << manifest_to_json(m).dump(2) << '\n';
}

inline void write_text(const std::filesystem::path& path,
                       const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write output: " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

inline OutputRecord register_output(const std::filesystem::path& out_dir,
                                    const std::string& rel) {
  std::ifstream in(out_dir / rel, std::ios::binary);
  if (!in) throw Error("emitted output missing: " + rel);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string bytes = buf.str();
  return {rel, bytes.size(), hex64(fnv1a64(bytes))};
}

// --- per-experiment implementations, each returns relative output paths ---

inline std::vector<std::string> run_eca_run(const ExperimentConfig& cfg,
                                            const std::filesystem::path& out) {
  const auto& p = cfg.params;
  const int rule = p.at("rule").get<int>();
  const std::size_t width = p.at("width").get<std::size_t>();
  const std::uint64_t steps = p.at("steps").get<std::uint64_t>();
  const int num_seeds = p.value("num_seeds", 1);
  const std::string init = p.value("init", "random");

  std::vector<std::string> outputs;
  for (int k = 0; k < num_seeds; ++k) {
    const std::uint64_t run_seed =
        derive_seed(cfg.seed, tag_of("eca-run"), static_cast<std::uint64_t>(k));
    nlohmann::json sys_spec{
        {"agent", {{"family", "reactive"}}},
        {"env",
         {{"family", "eca"}, {"rule", rule}, {"width", width}, {"init", init}}}};
    FamilySystem sys = build_system(sys_spec, run_seed, cfg.base_dir);
    auto trace = run_coupled(sys.agent, sys.env, sys.s0, steps);
    trace.seed = run_seed;
    trace.config_hash = cfg.config_hash;
    const std::string csv_name = "trace_" + std::to_string(k) + ".csv";
    const std::string bin_name = "trace_" + std::to_string(k) + ".bin";
    write_trace_csv(trace, out / csv_name);
    write_trace_binary(trace, out / bin_name);
    outputs.push_back(csv_name);
    outputs.push_back(bin_name);
  }
  return outputs;
}

inline std::vector<TmSpecFile> load_corpus(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::vector<TmSpecFile> corpus;
  for (const auto& f : files) {
    TmSpecFile spec = tm_load_file(f);
    if (spec.machine.name.empty()) spec.machine.name = f.stem().string();
    corpus.push_back(std::move(spec));
  }
  return corpus;
}

inline std::vector<std::string> run_embed_check(
    const ExperimentConfig& cfg, const std::filesystem::path& out) {
  const auto& p = cfg.params;
  const std::uint64_t budget = p.at("budget").get<std::uint64_t>();
  const bool include_enum = p.value("include_enumeration", true);
  const auto corpus = load_corpus(resolve(cfg, p.at("corpus_dir").get<std::string>()));

  std::uint64_t total = 0, passed = 0;
  nlohmann::json failures = nlohmann::json::array();

  CsvWriter csv(out / "machines.csv",
                {"machine", "steps_checked", "halted", "halt_step", "accepted",
                 "ok"});
  auto record = [&](const std::string& name, const EquivalenceReport& rep) {
    ++total;
    if (rep.ok) ++passed;
    csv.row({name, std::to_string(rep.steps_checked), rep.halted ? "1" : "0",
             rep.halted ? std::to_string(rep.halt_step) : "NA",
             rep.halted ? (rep.accepted ? "1" : "0") : "NA",
             rep.ok ? "1" : "0"});
    if (!rep.ok) {
      nlohmann::json f{{"machine", name}};
      if (rep.divergence) f["divergence_step"] = rep.divergence->step;
      failures.push_back(f);
    }
  };

  for (const auto& spec : corpus)
    record(spec.machine.name,
           embedding_equivalence_check(spec.machine, spec.input, budget, true));
  if (include_enum) {
    for (std::uint32_t i = 0; i < kNumEnum2x2; ++i) {
      const TuringMachine tm = make_enum_2x2(i);
      record(tm.name, embedding_equivalence_check(tm, {}, budget, false));
    }
  }
  csv.close();

  nlohmann::json report{{"budget", budget},
                        {"total", total},
                        {"passed", passed},
                        {"all_passed", passed == total},
                        {"failures", failures}};
  write_text(out / "report.json", report.dump(2) + "\n");
  return {"machines.csv", "report.json"};
}

inline std::vector<std::string> run_predict_sweep(
    const ExperimentConfig& cfg, const std::filesystem::path& out) {
  const auto& p = cfg.params;
  const std::size_t width = p.at("width").get<std::size_t>();
  const std::vector<std::uint64_t> horizons =
      p.at("horizons").get<std::vector<std::uint64_t>>();
  const std::size_t num_seeds = p.at("num_seeds").get<std::size_t>();

  std::vector<EcaSystem> systems;
  for (const auto& r : p.at("rules"))
    systems.push_back({eca_rule_table(r.get<int>()), width});

  struct PredEntry {
    PredictorSpec spec;
    std::set<int> rules;  // empty = all
  };
  std::vector<PredEntry> preds;
  for (const auto& pr : p.at("predictors")) {
    PredEntry e;
    e.spec.kind = predictor_kind_from_string(pr.at("kind").get<std::string>());
    e.spec.resource_budget = pr.value("r", std::uint64_t{0});
    e.spec.coarse_factor = pr.value("coarse_factor", 2);
    if (pr.contains("rules"))
      for (const auto& r : pr.at("rules")) e.rules.insert(r.get<int>());
    preds.push_back(std::move(e));
  }

  CsvWriter reports_csv(out / "reports.csv",
                        {"system", "predictor", "r", "t", "seed", "distance",
                         "accuracy", "eta_paper", "eta_accuracy",
                         "resources_spent"});
  CsvWriter curves_csv(out / "curves.csv",
                       {"system", "predictor", "t", "seeds", "mean_accuracy",
                        "sd_accuracy", "mean_eta_paper", "mean_eta_accuracy"});

  for (const auto& sys : systems) {
    std::vector<PredictorSpec> applicable;
    for (const auto& e : preds)
      if (e.rules.empty() || e.rules.count(sys.rule.index))
        applicable.push_back(e.spec);
    if (applicable.empty()) continue;
    const std::uint64_t sys_seed = derive_seed(cfg.seed, tag_of(sys.id()));
    SweepResult res =
        efficiency_sweep({sys}, applicable, horizons, num_seeds, sys_seed);
    for (const auto& r : res.reports) {
      reports_csv.row({r.system, r.predictor, std::to_string(r.r),
                       std::to_string(r.horizon), std::to_string(r.seed),
                       csv_num(r.distance), csv_num(r.accuracy),
                       csv_opt(r.eta_paper), csv_opt(r.eta_accuracy),
                       std::to_string(r.resources_spent)});
    }
    for (const auto& c : res.curves) {
      for (const auto& pt : c.points) {
        curves_csv.row({c.system, c.predictor, std::to_string(pt.t),
                        std::to_string(pt.seeds), csv_num(pt.mean_accuracy),
                        csv_num(pt.sd_accuracy), csv_opt(pt.mean_eta_paper),
                        csv_opt(pt.mean_eta_accuracy)});
      }
    }
  }
  reports_csv.close();
  curves_csv.close();
  return {"reports.csv", "curves.csv"};
}

inline std::vector<std::string> run_complexity_sweep(
    const ExperimentConfig& cfg, const std::filesystem::path& out) {
  const auto& p = cfg.params;
  const std::size_t width = p.at("width").get<std::size_t>();
  const std::uint64_t steps = p.at("steps").get<std::uint64_t>();
  const int prefix_points = p.value("prefix_points", 21);
  const int num_seeds = p.value("num_seeds", 1);
  const bool include_constant = p.value("include_constant", true);
  const Compressor& coder = compressor_by_id(p.value("compressor", "lz77"));

  std::vector<std::uint64_t> prefixes;
  for (int i = 0; i < prefix_points; ++i) {
    const std::uint64_t t =
        steps * static_cast<std::uint64_t>(i) /
        static_cast<std::uint64_t>(prefix_points - 1);
    if (prefixes.empty() || t > prefixes.back()) prefixes.push_back(t);
  }

  struct SysDef {
    std::string id;
    nlohmann::json spec;
  };
  std::vector<SysDef> defs;
  for (const auto& r : p.at("rules")) {
    const int rule = r.get<int>();
    defs.push_back({"rule" + std::to_string(rule),
                    {{"agent", {{"family", "reactive"}}},
                     {"env",
                      {{"family", "eca"}, {"rule", rule}, {"width", width}}}}});
  }
  if (include_constant)
    defs.push_back({"constant",
                    {{"agent", {{"family", "reactive"}}},
                     {"env", {{"family", "static"}, {"width", width}}}}});

  CsvWriter curve_csv(out / "curves.csv", {"system", "seed", "t", "khat_bits"});
  CsvWriter slope_csv(out / "slopes.csv",
                      {"system", "seed", "slope", "residual", "compressor"});
  std::map<std::string, double> mean_slope;
  for (const auto& def : defs) {
    double slope_sum = 0.0;
    for (int k = 0; k < num_seeds; ++k) {
      const std::uint64_t run_seed =
          derive_seed(cfg.seed, tag_of(def.id), static_cast<std::uint64_t>(k));
      FamilySystem sys = build_system(def.spec, run_seed, cfg.base_dir);
      auto trace = run_coupled(sys.agent, sys.env, sys.s0, steps);
      ComplexityCurve curve = complexity_curve(trace, prefixes, coder);
      for (const auto& pt : curve.points)
        curve_csv.row({def.id, std::to_string(run_seed), std::to_string(pt.t),
                       std::to_string(pt.khat_bits)});
      slope_csv.row({def.id, std::to_string(run_seed), csv_num(curve.slope),
                     csv_num(curve.residual), curve.compressor_id});
      slope_sum += curve.slope;
    }
    mean_slope[def.id] = slope_sum / num_seeds;
  }
  curve_csv.close();
  slope_csv.close();

  nlohmann::json summary{{"compressor", coder.id()},
                         {"mean_slopes", nlohmann::json::object()},
                         {"ratios_vs_rule0", nlohmann::json::object()}};
  for (const auto& [id, s] : mean_slope) summary["mean_slopes"][id] = s;
  if (mean_slope.count("rule0")) {
    ComplexityCurve ref;
    ref.slope = mean_slope["rule0"];
    for (const auto& [id, s] : mean_slope) {
      ComplexityCurve c;
      c.slope = s;
      summary["ratios_vs_rule0"][id] = irreducibility_score(c, ref);
    }
  }
  write_text(out / "summary.json", summary.dump(2) + "\n");
  return {"curves.csv", "slopes.csv", "summary.json"};
}

inline std::vector<std::string> run_halting_sweep(
    const ExperimentConfig& cfg, const std::filesystem::path& out) {
  const auto& p = cfg.params;
  const std::uint64_t budget = p.at("budget").get<std::uint64_t>();
  const bool include_enum = p.value("include_enumeration", true);

  CsvWriter csv(out / "halting.csv",
                {"machine", "direct", "direct_step", "verdict", "t", "spent",
                 "agree"});
  std::uint64_t total = 0, reached = 0, agree_count = 0;

  auto run_one = [&](const TuringMachine& tm, const std::vector<int>& input) {
    const RunOutcome direct = tm_run_bounded(tm, input, budget);
    const EmbeddedSystem sys = build_embedded_machine(tm, input);
    const EpOutcome ep = ep_semi_decide_halting(sys, budget);
    const bool direct_halted = run_halted(direct);
    const std::uint64_t direct_step =
        direct_halted ? std::get<Halted>(direct).at_step : 0;
    const bool agree = direct_halted == ep.reached() &&
                       (!direct_halted || direct_step == ep.t);
    ++total;
    if (ep.reached()) ++reached;
    if (agree) ++agree_count;
    csv.row({tm.name, direct_halted ? "halted" : "out-of-budget",
             direct_halted ? std::to_string(direct_step) : "NA",
             ep.reached() ? "reached" : "unknown",
             ep.reached() ? std::to_string(ep.t) : "NA",
             std::to_string(ep.spent), agree ? "1" : "0"});
  };

  if (p.contains("corpus_dir"))
    for (const auto& spec :
         load_corpus(resolve(cfg, p.at("corpus_dir").get<std::string>())))
      run_one(spec.machine, spec.input);
  if (include_enum)
    for (std::uint32_t i = 0; i < kNumEnum2x2; ++i)
      run_one(make_enum_2x2(i), {});
  csv.close();

  nlohmann::json summary{{"budget", budget},
                         {"total", total},
                         {"reached", reached},
                         {"unknown", total - reached},
                         {"agree", agree_count},
                         {"all_agree", agree_count == total}};
  write_text(out / "summary.json", summary.dump(2) + "\n");
  return {"halting.csv", "summary.json"};
}

template <class SA, class SE>
nlohmann::json witness_json(const StatePairWitness<SA, SE>& w) {
  return {{"s1", state_hash(w.s1)},
          {"s2", state_hash(w.s2)},
          {"e", state_hash(w.e)},
          {"s1_bytes", hex64(fnv1a64(canonical_bytes(w.s1)))}};
}

inline std::vector<std::string> run_autonomy_report(
    const ExperimentConfig& cfg, const std::filesystem::path& out) {
  const auto& p = cfg.params;
  FamilySystem sys = build_system(p.at("system"), cfg.seed, cfg.base_dir);
  const std::uint64_t probe_budget = p.at("probe_budget").get<std::uint64_t>();
  const std::uint64_t trace_steps = p.at("trace_steps").get<std::uint64_t>();

  CoarseGrainer grain;
  if (p.contains("grain")) {
    const auto& g = p.at("grain");
    const std::string kind = g.value("kind", "identity");
    if (kind == "identity") {
      grain.kind = CoarseGrainer::Kind::Identity;
    } else if (kind == "hash") {
      grain.kind = CoarseGrainer::Kind::HashToK;
      grain.k = g.value("k", 8);
    } else if (kind == "window") {
      grain.kind = CoarseGrainer::Kind::WindowProjection;
      grain.window_offset_bits = g.value("offset", 0);
      grain.window_len_bits = g.value("len", 8);
    } else {
      throw ConfigError("unknown grain kind: " + kind);
    }
  }

  const auto report = check_autonomy_conditions(
      sys.agent, sys.env, probe_budget, derive_seed(cfg.seed, tag_of("probe")));
  const bool verified = verify_autonomy_witnesses(sys.agent, sys.env, report);

  auto trace = run_coupled(sys.agent, sys.env, sys.s0, trace_steps);
  trace.seed = cfg.seed;
  trace.config_hash = cfg.config_hash;
  const double lambda_e = environment_conditional_entropy(trace, grain);
  const MiReport mi = autonomy_index(trace, grain);

  nlohmann::json j;
  j["system"] = sys.description;
  j["conditions"] = {
      {"internal_state_independence",
       {{"status", witness_status_name(report.condition1)},
        {"witness", report.condition1_witness
                        ? witness_json(*report.condition1_witness)
                        : nlohmann::json()}}},
      {"generative",
       {{"status", witness_status_name(report.condition2)},
        {"witness", report.condition2_witness
                        ? witness_json(*report.condition2_witness)
                        : nlohmann::json()}}},
      {"coupling",
       {{"status", witness_status_name(report.condition3)}}}};
  j["witnesses_verified"] = verified;
  j["evaluations_used"] = report.evaluations_used;
  j["lambda_E_bits"] = lambda_e;
  j["grain"] = grain.id();
  j["mi"] = {{"i_agent_to_env", mi.i_agent_to_env},
             {"i_env_to_agent", mi.i_env_to_agent},
             {"autonomy_index", mi.autonomy_index},
             {"samples", mi.samples}};
  write_text(out / "report.json", j.dump(2) + "\n");
  return {"report.json"};
}

}  // namespace detail

// Runs an experiment into out_dir. A manifest is written before any result
// and finalized with per-output checksums afterwards; all randomness derives
// from the config seed, so identical (config, seed) reproduce every result
// file byte for byte. The manifest's timestamps are the one deliberate
// exception and are excluded from that contract.
inline RunManifest run_experiment(const ExperimentConfig& cfg,
                                  const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  RunManifest manifest;
  manifest.experiment = cfg.experiment;
  manifest.config_hash = cfg.config_hash;
  manifest.artifact_version = kArtifactVersion;
  manifest.master_seed = cfg.seed;
  manifest.started_at = detail::iso_timestamp();
  manifest.status = "running";
  detail::write_manifest(manifest, out_dir);

  std::vector<std::string> outputs;
  try {
    if (cfg.experiment == "eca-run")
      outputs = detail::run_eca_run(cfg, out_dir);
    else if (cfg.experiment == "embed-check")
      outputs = detail::run_embed_check(cfg, out_dir);
    else if (cfg.experiment == "predict-sweep")
      outputs = detail::run_predict_sweep(cfg, out_dir);
    else if (cfg.experiment == "complexity-sweep")
      outputs = detail::run_complexity_sweep(cfg, out_dir);
    else if (cfg.experiment == "halting-sweep")
      outputs = detail::run_halting_sweep(cfg, out_dir);
    else if (cfg.experiment == "autonomy-report")
      outputs = detail::run_autonomy_report(cfg, out_dir);
    else
      throw ConfigError("unknown experiment id: " + cfg.experiment);
  } catch (const std::exception& e) {
    manifest.status = "failed";
    manifest.error = e.what();
    manifest.finished_at = detail::iso_timestamp();
    detail::write_manifest(manifest, out_dir);
    throw;
  }

  for (const auto& rel : outputs)
    manifest.outputs.push_back(detail::register_output(out_dir, rel));
  manifest.status = "complete";
  manifest.finished_at = detail::iso_timestamp();
  detail::write_manifest(manifest, out_dir);
  return manifest;
}

// Reshapes a results directory into plot-ready CSV files under <out>/.
inline std::vector<std::string> emit_plot_data(
    const std::filesystem::path& results_dir,
    const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::vector<std::string> written;

  const auto curves = results_dir / "curves.csv";
  if (std::filesystem::exists(curves)) {
    auto rows = read_csv(curves);
    if (rows.empty()) throw ConfigError("empty curves.csv in results");
    const auto& header = rows[0];
    if (header.size() >= 5 && header[1] == "predictor") {
      // predict-sweep curves -> one accuracy column per predictor, per system
      std::map<std::string, std::map<std::uint64_t, std::map<std::string, std::string>>>
          by_system;
      std::set<std::string> predictors;
      for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& r = rows[i];
        by_system[r[0]][std::stoull(r[2])][r[1]] = r[4];
        predictors.insert(r[1]);
      }
      for (const auto& [system, data] : by_system) {
        const std::string name = "accuracy_vs_t_" + system + ".csv";
        std::ofstream f(out_dir / name, std::ios::binary);
        f << "t";
        for (const auto& pr : predictors) f << ',' << pr;
        f << '\n';
        for (const auto& [t, cells] : data) {
          f << t;
          for (const auto& pr : predictors) {
            auto it = cells.find(pr);
            f << ',' << (it == cells.end() ? "NA" : it->second);
          }
          f << '\n';
        }
        written.push_back(name);
      }
    } else if (header.size() == 4 && header[3] == "khat_bits") {
      // complexity-sweep curves -> one series per system (first seed)
      std::map<std::string, std::map<std::uint64_t, std::string>> series;
      std::map<std::string, std::string> first_seed;
      for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& r = rows[i];
        auto it = first_seed.find(r[0]);
        if (it == first_seed.end()) first_seed[r[0]] = r[1];
        if (first_seed[r[0]] != r[1]) continue;
        series[r[0]][std::stoull(r[2])] = r[3];
      }
      std::set<std::uint64_t> ts;
      for (const auto& [sys, pts] : series)
        for (const auto& [t, v] : pts) ts.insert(t);
      const std::string name = "khat_vs_t.csv";
      std::ofstream f(out_dir / name, std::ios::binary);
      f << "t";
      for (const auto& [sys, pts] : series) f << ',' << sys;
      f << '\n';
      for (std::uint64_t t : ts) {
        f << t;
        for (const auto& [sys, pts] : series) {
          auto it = pts.find(t);
          f << ',' << (it == pts.end() ? "NA" : it->second);
        }
        f << '\n';
      }
      written.push_back(name);
    }
  }

  const auto halting = results_dir / "halting.csv";
  if (std::filesystem::exists(halting)) {
    auto rows = read_csv(halting);
    std::map<std::uint64_t, std::uint64_t> hist;  // halt step -> count
    for (std::size_t i = 1; i < rows.size(); ++i)
      if (rows[i][3] == "reached") ++hist[std::stoull(rows[i][4])];
    const std::string name = "halting_steps_hist.csv";
    std::ofstream f(out_dir / name, std::ios::binary);
    f << "halt_step,count\n";
    for (const auto& [t, c] : hist) f << t << ',' << c << '\n';
    written.push_back(name);
  }

  if (written.empty())
    throw ConfigError("no plottable results found in " + results_dir.string() +
                      " (expected curves.csv or halting.csv)");
  return written;
}

}  // namespace agentlab
