#pragma once

// Slow, independent reference computations for tests and the acceptance report.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <utility>
#include <vector>

#include "bethe/spec.hpp"

namespace bethe::oracle {

/// Psi^vx by summing all q^{d+1} assignments of centre and leaves.
inline double dense_psi_vx(const FactorSpec& spec, const std::vector<SimplexMeasure>& tuple) {
  const int q = spec.q;
  const int d = static_cast<int>(tuple.size());
  double total = 0.0;
  std::vector<int> leaves(d, 0);
  for (int centre = 0; centre < q; ++centre) {
    std::fill(leaves.begin(), leaves.end(), 0);
    while (true) {
      double w = spec.vertex_weight(centre);
      for (int j = 0; j < d; ++j) w *= spec.weight(centre, leaves[j]) * tuple[j][leaves[j]];
      total += w;
      int k = 0;
      while (k < d && ++leaves[k] == q) leaves[k++] = 0;
      if (k == d) break;
    }
  }
  return total;
}

/// Average of fn(perm) over all permutations of {0..n-1}.
inline double permutation_average(int n, const std::function<double(const std::vector<int>&)>& fn) {
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double total = 0.0;
  long count = 0;
  do {
    total += fn(perm);
    ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total / count;
}

/// Every perfect matching of {0..n-1} as a partner array.
inline std::vector<std::vector<int>> all_matchings(int n) {
  std::vector<std::vector<int>> out;
  std::vector<int> partner(n, -1);
  std::function<void()> rec = [&]() {
    int i = 0;
    while (i < n && partner[i] >= 0) ++i;
    if (i == n) {
      out.push_back(partner);
      return;
    }
    for (int j = i + 1; j < n; ++j) {
      if (partner[j] >= 0) continue;
      partner[i] = j;
      partner[j] = i;
      rec();
      partner[i] = partner[j] = -1;
    }
  };
  rec();
  return out;
}

/// Edge list of the multigraph obtained by matching d half-edges per vertex
/// (half-edge h belongs to vertex h / d).
inline std::vector<std::pair<int, int>> matching_edges(const std::vector<int>& partner, int d) {
  std::vector<std::pair<int, int>> edges;
  for (int h = 0; h < static_cast<int>(partner.size()); ++h) {
    if (h < partner[h]) edges.emplace_back(h / d, partner[h] / d);
  }
  return edges;
}

/// Unnormalized Gibbs weight of a configuration, computed directly.
inline double config_weight(const FactorSpec& spec, const std::vector<std::pair<int, int>>& edges,
                            const std::vector<int>& sigma) {
  double w = 1.0;
  for (int s : sigma) w *= spec.vertex_weight(s);
  for (auto [u, v] : edges) w *= spec.weight(sigma[u], sigma[v]);
  return w;
}

/// Calls fn(sigma) for every configuration in [q]^n.
inline void for_each_config(int n, int q, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> sigma(n, 0);
  while (true) {
    fn(sigma);
    int k = 0;
    while (k < n && ++sigma[k] == q) sigma[k++] = 0;
    if (k == n) break;
  }
}

/// Exact Gibbs law, indexed by sum_v sigma[v] q^v.
inline std::vector<double> gibbs_law(const FactorSpec& spec, int n,
                                     const std::vector<std::pair<int, int>>& edges) {
  std::vector<double> law;
  double z = 0.0;
  for_each_config(n, spec.q, [&](const std::vector<int>& sigma) {
    law.push_back(config_weight(spec, edges, sigma));
    z += law.back();
  });
  for (double& x : law) x /= z;
  return law;
}

inline double log_z_direct(const FactorSpec& spec, int n,
                           const std::vector<std::pair<int, int>>& edges) {
  double z = 0.0;
  for_each_config(n, spec.q, [&](const std::vector<int>& sigma) {
    z += config_weight(spec, edges, sigma);
  });
  return std::log(z);
}

/// Number of (configuration, matching) pairs on n vertices of degree d with
/// each value of the integer statistics, keyed by the q x q pair counts
/// (both orientations of each edge) followed by the q spin counts.
inline std::map<std::vector<long>, long> matching_census(int n, int d, int q) {
  std::map<std::vector<long>, long> census;
  for (const auto& m : all_matchings(n * d)) {
    const auto edges = matching_edges(m, d);
    for_each_config(n, q, [&](const std::vector<int>& sigma) {
      std::vector<long> key(q * q + q, 0);
      for (auto [u, v] : edges) {
        ++key[sigma[u] * q + sigma[v]];
        ++key[sigma[v] * q + sigma[u]];
      }
      for (int s : sigma) ++key[q * q + s];
      ++census[key];
    });
  }
  return census;
}

/// (1/n) log E[Z] over the configuration model by summing every matching.
inline double annealed_direct(int n, int d, const FactorSpec& spec) {
  const auto matchings = all_matchings(n * d);
  double total = 0.0;
  for (const auto& m : matchings) total += std::exp(log_z_direct(spec, n, matching_edges(m, d)));
  return std::log(total / matchings.size()) / n;
}

}  // namespace bethe::oracle
