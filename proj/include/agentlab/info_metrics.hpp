#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "agentlab/agent.hpp"
#include "agentlab/bytes.hpp"
#include "agentlab/compress.hpp"
#include "agentlab/errors.hpp"
#include "agentlab/hash.hpp"

namespace agentlab {

// Deterministic coarse-graining of canonical state bytes into discrete
// symbols, so entropy and mutual-information tables stay dense on large
// state spaces.
struct CoarseGrainer {
  enum class Kind { Identity, HashToK, WindowProjection };

  Kind kind = Kind::Identity;
  int k = 8;                           // HashToK output bits
  std::size_t window_offset_bits = 0;  // WindowProjection
  std::size_t window_len_bits = 8;

  std::string id() const {
    switch (kind) {
      case Kind::Identity: return "identity";
      case Kind::HashToK: return "hash" + std::to_string(k);
      case Kind::WindowProjection:
        return "window" + std::to_string(window_offset_bits) + "+" +
               std::to_string(window_len_bits);
    }
    return "?";
  }

  std::string apply(const std::string& canonical) const {
    switch (kind) {
      case Kind::Identity:
        return canonical;
      case Kind::HashToK: {
        const std::uint64_t mask =
            k >= 64 ? ~0ull : ((1ull << k) - 1);
        return std::to_string(fnv1a64(canonical) & mask);
      }
      case Kind::WindowProjection: {
        std::string out(window_len_bits, '0');
        for (std::size_t i = 0; i < window_len_bits; ++i) {
          const std::size_t bit = window_offset_bits + i;
          const std::size_t byte = bit >> 3;
          if (byte < canonical.size() &&
              ((static_cast<unsigned char>(canonical[byte]) >> (bit & 7)) & 1))
            out[i] = '1';
        }
        return out;
      }
    }
    return {};
  }
};

// Plug-in Shannon entropy of the empirical distribution, base 2.
inline double empirical_entropy(const std::vector<std::string>& symbols) {
  if (symbols.empty()) throw InputError("entropy of an empty sequence");
  std::map<std::string, std::size_t> counts;
  for (const auto& s : symbols) ++counts[s];
  const double n = static_cast<double>(symbols.size());
  double h = 0.0;
  for (const auto& [sym, c] : counts) {
    const double p = static_cast<double>(c) / n;
    h -= p * std::log2(p);
  }
  return h;
}

namespace detail {

inline std::string join_symbols(const std::string& a, const std::string& b) {
  std::string s;
  s.reserve(a.size() + b.size() + 1);
  s += a;
  s.push_back('\x1f');
  s += b;
  return s;
}

// Conditional entropy H(Y | X) computed by grouping, so a functionally
// determined Y gives exactly zero.
inline double conditional_entropy(const std::vector<std::string>& xs,
                                  const std::vector<std::string>& ys) {
  std::map<std::string, std::map<std::string, std::size_t>> groups;
  for (std::size_t i = 0; i < xs.size(); ++i) ++groups[xs[i]][ys[i]];
  const double n = static_cast<double>(xs.size());
  double h = 0.0;
  for (const auto& [x, dist] : groups) {
    std::size_t total = 0;
    for (const auto& [y, c] : dist) total += c;
    double hx = 0.0;
    for (const auto& [y, c] : dist) {
      const double p = static_cast<double>(c) / static_cast<double>(total);
      hx -= p * std::log2(p);
    }
    h += (static_cast<double>(total) / n) * hx;
  }
  return h;
}

inline double mutual_information(const std::vector<std::string>& xs,
                                 const std::vector<std::string>& ys) {
  std::vector<std::string> joint;
  joint.reserve(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i)
    joint.push_back(join_symbols(xs[i], ys[i]));
  const double mi =
      empirical_entropy(xs) + empirical_entropy(ys) - empirical_entropy(joint);
  return mi > 0.0 ? mi : 0.0;
}

}  // namespace detail

// Environment conditional entropy: H(next env state | env state, action),
// estimated from the empirical triples of a trace under the grainer.
template <class SAgent, class SEnv, class Input, class Action>
double environment_conditional_entropy(
    const CoupledTrace<SAgent, SEnv, Input, Action>& trace,
    const CoarseGrainer& grain) {
  if (trace.records.size() < 2) throw InputError("trace too short");
  std::vector<std::string> contexts, nexts;
  contexts.reserve(trace.records.size() - 1);
  for (std::size_t i = 0; i + 1 < trace.records.size(); ++i) {
    contexts.push_back(detail::join_symbols(
        grain.apply(canonical_bytes(trace.records[i].se)),
        canonical_bytes(trace.records[i].oa)));
    nexts.push_back(grain.apply(canonical_bytes(trace.records[i + 1].se)));
  }
  return detail::conditional_entropy(contexts, nexts);
}

struct MiReport {
  double i_agent_to_env = 0.0;  // I(S_A(t); S_E(t+1))
  double i_env_to_agent = 0.0;  // I(S_E(t); S_A(t+1))
  double autonomy_index = 0.0;  // difference of the two
  std::size_t samples = 0;
  std::string grain_id;
};

// The two lagged mutual-information terms and their difference. Both use
// the same grainer on both sides.
template <class SAgent, class SEnv, class Input, class Action>
MiReport autonomy_index(const CoupledTrace<SAgent, SEnv, Input, Action>& trace,
                        const CoarseGrainer& grain) {
  if (trace.records.size() < 2) throw InputError("trace too short");
  const std::size_t n = trace.records.size() - 1;
  std::vector<std::string> sa_now, se_next, se_now, sa_next;
  sa_now.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    sa_now.push_back(grain.apply(canonical_bytes(trace.records[i].sa)));
    se_next.push_back(grain.apply(canonical_bytes(trace.records[i + 1].se)));
    se_now.push_back(grain.apply(canonical_bytes(trace.records[i].se)));
    sa_next.push_back(grain.apply(canonical_bytes(trace.records[i + 1].sa)));
  }
  MiReport rep;
  rep.i_agent_to_env = detail::mutual_information(sa_now, se_next);
  rep.i_env_to_agent = detail::mutual_information(se_now, sa_next);
  rep.autonomy_index = rep.i_agent_to_env - rep.i_env_to_agent;
  rep.samples = n;
  rep.grain_id = grain.id();
  return rep;
}

struct ComplexityPoint {
  std::uint64_t t = 0;
  std::uint64_t khat_bits = 0;
};

struct ComplexityCurve {
  std::vector<ComplexityPoint> points;
  double slope = 0.0;     // least-squares fit, bits per step
  double residual = 0.0;  // rms residual of the fit
  std::string compressor_id;
};

namespace detail {

inline void fit_slope(ComplexityCurve& curve) {
  const std::size_t n = curve.points.size();
  if (n < 2) {
    curve.slope = 0.0;
    curve.residual = 0.0;
    return;
  }
  double mx = 0.0, my = 0.0;
  for (const auto& p : curve.points) {
    mx += static_cast<double>(p.t);
    my += static_cast<double>(p.khat_bits);
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (const auto& p : curve.points) {
    const double dx = static_cast<double>(p.t) - mx;
    sxy += dx * (static_cast<double>(p.khat_bits) - my);
    sxx += dx * dx;
  }
  curve.slope = sxx > 0 ? sxy / sxx : 0.0;
  const double intercept = my - curve.slope * mx;
  double ss = 0.0;
  for (const auto& p : curve.points) {
    const double e = static_cast<double>(p.khat_bits) -
                     (curve.slope * static_cast<double>(p.t) + intercept);
    ss += e * e;
  }
  curve.residual = std::sqrt(ss / static_cast<double>(n));
}

}  // namespace detail

// Conditional description-length curve of a trajectory: for each prefix
// length t, the coder's size of (s_0 ++ X_t) minus the size of s_0 alone,
// where X_t serializes the coupled states s_0 .. s_t.
template <class SAgent, class SEnv, class Input, class Action>
ComplexityCurve complexity_curve(
    const CoupledTrace<SAgent, SEnv, Input, Action>& trace,
    const std::vector<std::uint64_t>& prefix_steps, const Compressor& coder) {
  if (prefix_steps.empty()) throw InputError("no prefix steps given");
  for (std::size_t i = 1; i < prefix_steps.size(); ++i)
    if (prefix_steps[i] <= prefix_steps[i - 1])
      throw InputError("prefix steps must be strictly ascending");
  if (prefix_steps.back() + 1 > trace.records.size())
    throw InputError("prefix steps exceed the trace length");

  auto record_bytes = [&](std::size_t i) {
    return canonical_bytes(trace.records[i].sa) +
           canonical_bytes(trace.records[i].se);
  };
  const std::string base = record_bytes(0);
  const std::uint64_t base_bits = compress_bound(base, coder);

  ComplexityCurve curve;
  curve.compressor_id = coder.id();
  std::string payload = base;
  std::size_t emitted = 0;  // records appended after the base
  for (std::uint64_t t : prefix_steps) {
    while (emitted <= t) {
      payload += record_bytes(emitted);
      ++emitted;
    }
    const std::uint64_t bits = compress_bound(payload, coder);
    curve.points.push_back(
        {t, bits > base_bits ? bits - base_bits : 0});
  }
  detail::fit_slope(curve);
  return curve;
}

template <class SAgent, class SEnv, class Input, class Action>
ComplexityCurve complexity_curve(
    const CoupledTrace<SAgent, SEnv, Input, Action>& trace,
    const std::vector<std::uint64_t>& prefix_steps) {
  return complexity_curve(trace, prefix_steps, default_compressor());
}

// Slope ratio against a reference curve; the floor keeps flat references
// from blowing the ratio up.
inline double irreducibility_score(const ComplexityCurve& curve,
                                   const ComplexityCurve& reference,
                                   double slope_floor = 0.01) {
  const double num = curve.slope > 0.0 ? curve.slope : 0.0;
  const double den =
      reference.slope > slope_floor ? reference.slope : slope_floor;
  return num / den;
}

}  // namespace agentlab
