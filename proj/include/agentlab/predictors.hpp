#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "agentlab/distance.hpp"
#include "agentlab/eca.hpp"
#include "agentlab/errors.hpp"
#include "agentlab/hash.hpp"
#include "agentlab/rng.hpp"

namespace agentlab {

// Resource-bounded external prediction of cellular automaton states.
// The resource unit is one transition evaluation: applying the rule to one
// cell's neighborhood window. A full row step of width W therefore costs W
// units, and a predictor's budget r is denominated in those units.

struct EcaSystem {
  EcaRule rule;
  std::size_t width = 0;

  using state = EcaRow;

  EcaRow step(const EcaRow& row) const { return eca_step(row, rule); }
  std::uint64_t step_cost() const { return width; }
  EcaRow random_state(Rng& rng) const { return BitVec::random(width, rng); }

  std::string id() const {
    return "eca" + std::to_string(rule.index) + "-w" + std::to_string(width);
  }
};

enum class PredictorKind {
  Frozen,
  ChanceBaseline,
  TruncatedSimulator,
  CoarseSimulator,
  AdditiveShortcut,
  ExactSimulator,
};

struct PredictorSpec {
  PredictorKind kind = PredictorKind::Frozen;
  std::uint64_t resource_budget = 0;  // r, transition evaluations
  int coarse_factor = 2;
  std::uint64_t seed = 0;  // chance baseline stream

  std::string id() const {
    switch (kind) {
      case PredictorKind::Frozen: return "frozen";
      case PredictorKind::ChanceBaseline: return "chance-baseline";
      case PredictorKind::TruncatedSimulator: return "truncated-simulator";
      case PredictorKind::CoarseSimulator: return "coarse-simulator";
      case PredictorKind::AdditiveShortcut: return "additive-shortcut";
      case PredictorKind::ExactSimulator: return "exact-simulator";
    }
    return "?";
  }
};

inline PredictorKind predictor_kind_from_string(const std::string& s) {
  if (s == "frozen") return PredictorKind::Frozen;
  if (s == "chance-baseline") return PredictorKind::ChanceBaseline;
  if (s == "truncated-simulator") return PredictorKind::TruncatedSimulator;
  if (s == "coarse-simulator") return PredictorKind::CoarseSimulator;
  if (s == "additive-shortcut") return PredictorKind::AdditiveShortcut;
  if (s == "exact-simulator") return PredictorKind::ExactSimulator;
  throw InputError("unknown predictor kind: " + s);
}

struct Prediction {
  EcaRow state;
  std::uint64_t resources_spent = 0;
};

namespace detail {

inline Prediction predict_additive(const PredictorSpec& pred,
                                   const EcaSystem& sys, const EcaRow& s0,
                                   std::uint64_t t) {
  const auto taps = linear_taps(sys.rule);
  if (!taps)
    throw PredictorError("additive-shortcut requires an XOR-linear rule; rule " +
                         std::to_string(sys.rule.index) + " is not");
  const std::uint64_t need =
      sys.width * static_cast<std::uint64_t>(std::popcount(t));
  if (need > pred.resource_budget)
    throw PredictorError("additive-shortcut needs " + std::to_string(need) +
                         " evaluations, budget is " +
                         std::to_string(pred.resource_budget));
  // The one-step update is a linear operator over GF(2); squaring such an
  // operator just doubles the tap offsets, so the t-step operator factors
  // into one three-tap application per set bit of t.
  const bool a = (*taps)[0], b = (*taps)[1], c = (*taps)[2];
  EcaRow state = s0;
  std::uint64_t spent = 0;
  for (int bit = 0; bit < 64; ++bit) {
    if (!((t >> bit) & 1)) continue;
    const std::int64_t s = static_cast<std::int64_t>(1) << bit;
    EcaRow next(sys.width);
    if (a) next = next ^ state.rotated(-s);
    if (b) next = next ^ state;
    if (c) next = next ^ state.rotated(s);
    state = std::move(next);
    spent += sys.width;
  }
  return {std::move(state), spent};
}

inline Prediction predict_coarse(const PredictorSpec& pred, const EcaSystem& sys,
                                 const EcaRow& s0, std::uint64_t t) {
  const int f = pred.coarse_factor;
  if (f < 2 || sys.width % static_cast<std::size_t>(f) != 0 ||
      sys.width / static_cast<std::size_t>(f) < 3)
    throw PredictorError("coarse-simulator needs width divisible by factor " +
                         std::to_string(f) + " with at least 3 coarse cells");
  const std::size_t cw = sys.width / static_cast<std::size_t>(f);
  EcaRow coarse(cw);
  for (std::size_t i = 0; i < cw; ++i)
    coarse.set(i, s0.get(i * static_cast<std::size_t>(f)));
  const std::uint64_t steps =
      std::min<std::uint64_t>(t, pred.resource_budget / cw);
  EcaSystem small{sys.rule, cw};
  for (std::uint64_t k = 0; k < steps; ++k) coarse = small.step(coarse);
  EcaRow up(sys.width);
  for (std::size_t i = 0; i < sys.width; ++i)
    up.set(i, coarse.get(i / static_cast<std::size_t>(f)));
  return {std::move(up), steps * cw};
}

}  // namespace detail

// Computes the predictor's estimate of the state at horizon t from s0,
// together with the transition evaluations actually consumed (always within
// the declared budget).
inline Prediction predict(const PredictorSpec& pred, const EcaSystem& sys,
                          const EcaRow& s0, std::uint64_t t) {
  if (s0.size() != sys.width)
    throw InputError("initial row width does not match the system");
  switch (pred.kind) {
    case PredictorKind::Frozen:
      return {s0, 0};
    case PredictorKind::ChanceBaseline: {
      Rng rng{derive_seed(pred.seed, fnv1a64(canonical_bytes(s0)), t)};
      return {BitVec::random(sys.width, rng), 0};
    }
    case PredictorKind::TruncatedSimulator: {
      const std::uint64_t steps =
          std::min<std::uint64_t>(t, pred.resource_budget / sys.step_cost());
      EcaRow state = s0;
      for (std::uint64_t k = 0; k < steps; ++k) state = sys.step(state);
      return {std::move(state), steps * sys.step_cost()};
    }
    case PredictorKind::CoarseSimulator:
      return detail::predict_coarse(pred, sys, s0, t);
    case PredictorKind::AdditiveShortcut:
      return detail::predict_additive(pred, sys, s0, t);
    case PredictorKind::ExactSimulator: {
      if (pred.resource_budget < t * sys.step_cost())
        throw PredictorError(
            "exact-simulator needs r >= " + std::to_string(t * sys.step_cost()) +
            " evaluations for horizon " + std::to_string(t));
      EcaRow state = s0;
      for (std::uint64_t k = 0; k < t; ++k) state = sys.step(state);
      return {std::move(state), t * sys.step_cost()};
    }
  }
  throw PredictorError("unknown predictor kind");
}

struct PredictionReport {
  std::string predictor;
  std::string system;
  std::string s0_hash;
  std::uint64_t horizon = 0;
  std::uint64_t r = 0;
  std::uint64_t resources_spent = 0;
  std::uint64_t seed = 0;
  double distance = 0.0;
  double accuracy = 0.0;
  std::optional<double> eta_paper;     // D / r, undefined at r = 0
  std::optional<double> eta_accuracy;  // (1 - D) / r, undefined at r = 0
};

inline PredictionReport prediction_efficiency(const PredictorSpec& pred,
                                              const EcaSystem& sys,
                                              const EcaRow& s0, std::uint64_t t,
                                              const EcaRow& actual) {
  Prediction p = predict(pred, sys, s0, t);
  PredictionReport rep;
  rep.predictor = pred.id();
  rep.system = sys.id();
  rep.s0_hash = state_hash(s0);
  rep.horizon = t;
  rep.r = pred.resource_budget;
  rep.resources_spent = p.resources_spent;
  rep.distance = state_distance(actual, p.state);
  rep.accuracy = 1.0 - rep.distance;
  if (pred.resource_budget > 0) {
    rep.eta_paper = rep.distance / static_cast<double>(pred.resource_budget);
    rep.eta_accuracy = rep.accuracy / static_cast<double>(pred.resource_budget);
  }
  return rep;
}

inline PredictionReport prediction_efficiency(const PredictorSpec& pred,
                                              const EcaSystem& sys,
                                              const EcaRow& s0,
                                              std::uint64_t t) {
  EcaRow actual = s0;
  for (std::uint64_t k = 0; k < t; ++k) actual = sys.step(actual);
  return prediction_efficiency(pred, sys, s0, t, actual);
}

struct EfficiencyPoint {
  std::uint64_t t = 0;
  double mean_accuracy = 0.0;
  double sd_accuracy = 0.0;
  std::optional<double> mean_eta_paper;
  std::optional<double> mean_eta_accuracy;
  std::size_t seeds = 0;
};

struct EfficiencyCurve {
  std::string predictor;
  std::string system;
  std::vector<EfficiencyPoint> points;
};

struct SweepResult {
  std::vector<PredictionReport> reports;
  std::vector<EfficiencyCurve> curves;
};

// Runs every (system, predictor, horizon, seed) cell. Initial rows are drawn
// uniformly per (system, seed); ground truth comes from one incremental
// exact simulation per row. Deterministic given the master seed.
inline SweepResult efficiency_sweep(const std::vector<EcaSystem>& systems,
                                    const std::vector<PredictorSpec>& predictors,
                                    const std::vector<std::uint64_t>& horizons,
                                    std::size_t num_seeds,
                                    std::uint64_t master_seed) {
  if (horizons.empty()) throw InputError("horizons must be non-empty");
  for (std::size_t i = 1; i < horizons.size(); ++i)
    if (horizons[i] <= horizons[i - 1])
      throw InputError("horizons must be strictly ascending");
  if (num_seeds == 0) throw InputError("need at least one seed");

  SweepResult result;
  for (std::size_t si = 0; si < systems.size(); ++si) {
    const EcaSystem& sys = systems[si];
    // accumulate per (predictor, horizon)
    std::vector<std::vector<std::vector<PredictionReport>>> cells(
        predictors.size(),
        std::vector<std::vector<PredictionReport>>(horizons.size()));

    for (std::size_t k = 0; k < num_seeds; ++k) {
      const std::uint64_t cell_seed = derive_seed(master_seed, si, k);
      Rng rng{cell_seed};
      const EcaRow s0 = sys.random_state(rng);
      // ground truth at each horizon, one pass
      std::vector<EcaRow> actual;
      actual.reserve(horizons.size());
      {
        EcaRow state = s0;
        std::uint64_t done = 0;
        for (std::uint64_t t : horizons) {
          for (; done < t; ++done) state = sys.step(state);
          actual.push_back(state);
        }
      }
      for (std::size_t pi = 0; pi < predictors.size(); ++pi) {
        PredictorSpec pred = predictors[pi];
        pred.seed = derive_seed(master_seed, tag_of(pred.id()), cell_seed);
        for (std::size_t hi = 0; hi < horizons.size(); ++hi) {
          PredictionReport rep = prediction_efficiency(pred, sys, s0,
                                                       horizons[hi], actual[hi]);
          rep.seed = cell_seed;
          cells[pi][hi].push_back(rep);
          result.reports.push_back(std::move(rep));
        }
      }
    }

    for (std::size_t pi = 0; pi < predictors.size(); ++pi) {
      EfficiencyCurve curve;
      curve.predictor = predictors[pi].id();
      curve.system = sys.id();
      for (std::size_t hi = 0; hi < horizons.size(); ++hi) {
        const auto& reps = cells[pi][hi];
        EfficiencyPoint pt;
        pt.t = horizons[hi];
        pt.seeds = reps.size();
        double sum = 0.0, sum2 = 0.0, sum_ep = 0.0, sum_ea = 0.0;
        bool has_eta = true;
        for (const auto& r : reps) {
          sum += r.accuracy;
          sum2 += r.accuracy * r.accuracy;
          if (r.eta_paper) {
            sum_ep += *r.eta_paper;
            sum_ea += *r.eta_accuracy;
          } else {
            has_eta = false;
          }
        }
        const double n = static_cast<double>(reps.size());
        pt.mean_accuracy = sum / n;
        const double var = sum2 / n - pt.mean_accuracy * pt.mean_accuracy;
        pt.sd_accuracy = var > 0 ? std::sqrt(var) : 0.0;
        if (has_eta) {
          pt.mean_eta_paper = sum_ep / n;
          pt.mean_eta_accuracy = sum_ea / n;
        }
        curve.points.push_back(pt);
      }
      result.curves.push_back(std::move(curve));
    }
  }
  return result;
}

}  // namespace agentlab
