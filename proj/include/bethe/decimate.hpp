#pragma once

// Vertex removal with re-pairing of the freed half-edges, and repeated
// application with local-tree and free-energy bookkeeping.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bethe/error.hpp"
#include "bethe/functional.hpp"
#include "bethe/graph.hpp"
#include "bethe/partition.hpp"
#include "bethe/rng.hpp"
#include "bethe/spec.hpp"

namespace bethe {

enum class PairingMode { Argmin, Random };
enum class ZMethod { None, Exact, MonteCarlo };

inline std::string to_string(PairingMode m) { return m == PairingMode::Argmin ? "argmin" : "random"; }

inline std::string to_string(ZMethod m) {
  switch (m) {
    case ZMethod::None: return "none";
    case ZMethod::Exact: return "exact";
    case ZMethod::MonteCarlo: return "mc";
  }
  return "none";
}

struct OpROptions {
  PairingMode mode = PairingMode::Random;
  ZMethod z_method = ZMethod::None;
  FactorSpec spec;
  std::optional<PottsParams> potts;  // required for ZMethod::MonteCarlo
  TIOptions ti;
};

struct OpRResult {
  MultiGraph graph;
  int removed = -1;                           // index in the input graph
  std::vector<std::pair<int, int>> pairing;   // endpoints, input indices
  std::optional<double> logz_delta;           // log Z_G - log Z_{result}
  std::vector<double> candidate_deltas;       // argmin mode: one per pairing
};

namespace detail {

inline double logz_by(const MultiGraph& g, const OpROptions& opts, std::uint64_t index) {
  if (opts.z_method == ZMethod::Exact) return logz_brute(g, opts.spec);
  auto ti = opts.ti;
  ti.seed = derive_seed(opts.ti.seed, "op_r_ti", index);
  return estimate_logz_ti(g, *opts.potts, ti).estimate;
}

// Graph with `removed` deleted (vertices above it shift down by one) and the
// given pairs, in input indices, added.
inline MultiGraph remove_and_pair(const MultiGraph& g, int removed,
                                  const std::vector<std::pair<int, int>>& pairs) {
  auto relabel = [removed](int v) { return v > removed ? v - 1 : v; };
  MultiGraph out(g.n() - 1);
  for (const auto& e : g.edges()) {
    if (e.u != removed && e.v != removed) out.add_edge(relabel(e.u), relabel(e.v));
  }
  for (auto [a, b] : pairs) out.add_edge(relabel(a), relabel(b));
  return out;
}

}  // namespace detail

/// Removes a uniformly random vertex I of a d-regular graph (d even) and
/// re-pairs the half-edge slots of its neighbours: the slot list holds the
/// other endpoint of every non-loop edge at I, so a repeated neighbour fills
/// several slots. Argmin mode keeps the pairing with the smallest
/// log Z_G - log Z_{G'} (first on ties); random mode takes a uniform pairing.
inline OpRResult op_R(const MultiGraph& g, const OpROptions& opts, Rng& rng) {
  const int d = g.regular_degree();
  if (d < 0) fail(ErrorCode::NotRegular, "op_R needs a regular graph");
  if (d % 2 != 0) fail(ErrorCode::OddDegree, "op_R is defined for even d only");
  if (g.n() < 1) fail(ErrorCode::InvalidArgument, "empty graph");
  if (opts.mode == PairingMode::Argmin && opts.z_method == ZMethod::None) {
    fail(ErrorCode::InvalidArgument, "argmin mode needs a partition-function method");
  }
  if (opts.z_method == ZMethod::Exact &&
      g.n() * std::log2(static_cast<double>(opts.spec.q)) > kBruteForceLog2Budget) {
    fail(ErrorCode::ZTooExpensive, "graph exceeds the brute-force budget");
  }
  if (opts.z_method == ZMethod::MonteCarlo && !opts.potts) {
    fail(ErrorCode::InvalidArgument, "Monte Carlo Z needs Potts parameters");
  }

  OpRResult out;
  out.removed = static_cast<int>(rng.below(static_cast<std::uint64_t>(g.n())));
  std::vector<int> slots;
  for (int w : g.neighbors(out.removed)) {
    if (w != out.removed) slots.push_back(w);
  }
  const int m = static_cast<int>(slots.size());

  auto to_pairs = [&](const std::vector<int>& p) {
    std::vector<std::pair<int, int>> pairs;
    for (int k = 0; k < m; k += 2) pairs.emplace_back(slots[p[k]], slots[p[k + 1]]);
    return pairs;
  };

  if (opts.mode == PairingMode::Random) {
    std::vector<int> perm(m);
    for (int i = 0; i < m; ++i) perm[i] = i;
    rng.shuffle(perm);
    out.pairing = to_pairs(perm);
    out.graph = detail::remove_and_pair(g, out.removed, out.pairing);
    if (opts.z_method != ZMethod::None) {
      out.logz_delta = detail::logz_by(g, opts, 0) - detail::logz_by(out.graph, opts, 1);
    }
    return out;
  }

  const double logz_g = detail::logz_by(g, opts, 0);
  std::vector<std::vector<std::pair<int, int>>> candidates;
  detail::for_each_pairing(m, [&](const std::vector<int>& p) { candidates.push_back(to_pairs(p)); });
  if (candidates.empty()) candidates.emplace_back();
  std::size_t best = 0;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const auto next = detail::remove_and_pair(g, out.removed, candidates[c]);
    out.candidate_deltas.push_back(logz_g - detail::logz_by(next, opts, c + 1));
    if (out.candidate_deltas[c] < out.candidate_deltas[best]) best = c;
  }
  out.pairing = candidates[best];
  out.graph = detail::remove_and_pair(g, out.removed, out.pairing);
  out.logz_delta = out.candidate_deltas[best];
  if (*out.logz_delta != *std::min_element(out.candidate_deltas.begin(), out.candidate_deltas.end())) {
    fail(ErrorCode::InvalidArgument, "argmin bookkeeping mismatch");
  }
  return out;
}

inline OpRResult op_R(const MultiGraph& g, const OpROptions& opts, std::uint64_t seed) {
  auto rng = make_rng(seed, "op_r");
  return op_R(g, opts, rng);
}

struct DecimationStep {
  int step = 0;
  int n = 0;         // vertex count after the step
  int removed = -1;  // original label; -1 for the initial record
  std::vector<std::pair<int, int>> pairing;  // original labels
  std::vector<double> zeta;                  // one per requested radius
  std::optional<double> logz_delta;
};

struct DecimationTrace {
  std::vector<int> radii;
  std::vector<DecimationStep> steps;  // steps[0] describes the input graph

  // max over recorded steps j <= max_step of zeta at radii[idx].
  double max_zeta(std::size_t idx, int max_step) const {
    double mx = 0.0;
    for (const auto& s : steps) {
      if (s.step <= max_step) mx = std::max(mx, s.zeta[idx]);
    }
    return mx;
  }

  double mean_logz_delta() const {
    double sum = 0.0;
    int count = 0;
    for (const auto& s : steps) {
      if (s.logz_delta) {
        sum += *s.logz_delta;
        ++count;
      }
    }
    return count > 0 ? sum / count : std::nan("");
  }
};

/// Applies op_R `steps` times, recording zeta at every radius after each step.
/// Vertex labels in the trace refer to the input graph.
inline DecimationTrace decimate(const MultiGraph& g, const OpROptions& opts, int steps,
                                const std::vector<int>& radii, std::uint64_t seed) {
  if (steps < 0 || steps > std::max(0, g.n() - 1)) {
    fail(ErrorCode::InvalidArgument, "need 0 <= steps <= n - 1");
  }
  const int d = g.regular_degree();
  if (d < 0) fail(ErrorCode::NotRegular, "decimate needs a regular graph");
  if (steps > 0 && d % 2 != 0) fail(ErrorCode::OddDegree, "op_R is defined for even d only");

  DecimationTrace trace;
  trace.radii = radii;
  auto record = [&](const MultiGraph& cur, DecimationStep step) {
    for (int t : radii) step.zeta.push_back(zeta(cur, t, d));
    step.n = cur.n();
    trace.steps.push_back(std::move(step));
  };
  record(g, {});

  std::vector<int> label(g.n());
  for (int v = 0; v < g.n(); ++v) label[v] = v;
  auto rng = make_rng(seed, "decimate");
  MultiGraph cur = g;
  for (int j = 1; j <= steps; ++j) {
    auto r = op_R(cur, opts, rng);
    DecimationStep step;
    step.step = j;
    step.removed = label[r.removed];
    for (auto [a, b] : r.pairing) step.pairing.emplace_back(label[a], label[b]);
    step.logz_delta = r.logz_delta;
    label.erase(label.begin() + r.removed);
    cur = std::move(r.graph);
    record(cur, std::move(step));
  }
  return trace;
}

}  // namespace bethe
