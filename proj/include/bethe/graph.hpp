#pragma once

// Multigraphs on [n] with self-loops and parallel edges, configuration-model
// and simple regular sampling, local tree-likeness, and degree repair.

#include <algorithm>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "bethe/error.hpp"
#include "bethe/rng.hpp"

namespace bethe {

struct Edge {
  int u = 0;
  int v = 0;  // u <= v

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

class MultiGraph {
 public:
  MultiGraph() = default;
  explicit MultiGraph(int n) : n_(n), adj_(n) {
    if (n < 0) fail(ErrorCode::InvalidArgument, "negative vertex count");
  }
  MultiGraph(int n, const std::vector<std::pair<int, int>>& edges) : MultiGraph(n) {
    for (auto [u, v] : edges) add_edge(u, v);
  }

  int n() const { return n_; }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }

  void add_edge(int u, int v) {
    if (u < 0 || v < 0 || u >= n_ || v >= n_) {
      fail(ErrorCode::OutOfRange, "edge endpoint outside [0, n)");
    }
    if (u > v) std::swap(u, v);
    edges_.push_back({u, v});
    adj_[u].push_back(v);
    adj_[v].push_back(u);  // a self-loop lists v twice
  }

  // Neighbours with multiplicity; a self-loop contributes its vertex twice.
  const std::vector<int>& neighbors(int v) const { return adj_[v]; }
  int degree(int v) const { return static_cast<int>(adj_[v].size()); }

  std::vector<int> degrees() const {
    std::vector<int> out(n_);
    for (int v = 0; v < n_; ++v) out[v] = degree(v);
    return out;
  }

  bool is_regular(int d) const {
    for (int v = 0; v < n_; ++v) {
      if (degree(v) != d) return false;
    }
    return true;
  }

  // Common degree, or -1 if the graph is not regular (or empty).
  int regular_degree() const {
    if (n_ == 0) return -1;
    return is_regular(degree(0)) ? degree(0) : -1;
  }

  bool is_simple() const {
    auto sorted = edges_;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      if (sorted[i].u == sorted[i].v) return false;
      if (i > 0 && sorted[i] == sorted[i - 1]) return false;
    }
    return true;
  }

  // Same graph with the edge list sorted lexicographically.
  MultiGraph canonical() const {
    auto sorted = edges_;
    std::sort(sorted.begin(), sorted.end());
    MultiGraph g(n_);
    for (const auto& e : sorted) g.add_edge(e.u, e.v);
    return g;
  }

  friend bool operator==(const MultiGraph& a, const MultiGraph& b) {
    return a.n_ == b.n_ && a.edges_ == b.edges_;
  }

 private:
  int n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> adj_;
};

// ---------------------------------------------------------------------------
// File format: "n m", then m lines "u v" (0-based).
// ---------------------------------------------------------------------------

inline MultiGraph read_graph(std::istream& in) {
  long long n = -1, m = -1;
  if (!(in >> n >> m) || n < 0 || m < 0) fail(ErrorCode::BadGraphFile, "missing or bad 'n m' header");
  MultiGraph g(static_cast<int>(n));
  for (long long i = 0; i < m; ++i) {
    long long u, v;
    if (!(in >> u >> v)) fail(ErrorCode::BadGraphFile, "expected " + std::to_string(m) + " edges");
    if (u < 0 || v < 0 || u >= n || v >= n) {
      fail(ErrorCode::BadGraphFile, "edge " + std::to_string(i) + " out of range");
    }
    g.add_edge(static_cast<int>(u), static_cast<int>(v));
  }
  std::string rest;
  if (in >> rest) fail(ErrorCode::BadGraphFile, "trailing content after edge list");
  return g;
}

inline void write_graph(std::ostream& out, const MultiGraph& g) {
  out << g.n() << ' ' << g.num_edges() << '\n';
  for (const auto& e : g.edges()) out << e.u << ' ' << e.v << '\n';
}

inline std::string to_graph_string(const MultiGraph& g) {
  std::ostringstream os;
  write_graph(os, g);
  return os.str();
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

/// Uniform perfect matching of {0..count-1}: a uniform permutation read off
/// in consecutive pairs.
inline std::vector<std::pair<int, int>> random_matching(int count, Rng& rng) {
  if (count % 2 != 0) fail(ErrorCode::OddHalfEdges, "odd number of half-edges");
  std::vector<int> perm(count);
  for (int i = 0; i < count; ++i) perm[i] = i;
  rng.shuffle(perm);
  std::vector<std::pair<int, int>> out;
  out.reserve(count / 2);
  for (int i = 0; i + 1 < count; i += 2) out.emplace_back(perm[i], perm[i + 1]);
  return out;
}

/// Uniform perfect matching of the n*d half-edges (half-edge i belongs to
/// vertex i / d), projected to a multigraph.
inline MultiGraph sample_config_model(int n, int d, Rng& rng) {
  if (n < 0 || d < 0) fail(ErrorCode::InvalidArgument, "n and d must be >= 0");
  if ((static_cast<long long>(n) * d) % 2 != 0) {
    fail(ErrorCode::OddHalfEdges, "n*d must be even");
  }
  MultiGraph g(n);
  for (auto [a, b] : random_matching(n * d, rng)) g.add_edge(a / d, b / d);
  return g;
}

inline MultiGraph sample_config_model(int n, int d, std::uint64_t seed) {
  auto rng = make_rng(seed, "config_model");
  return sample_config_model(n, d, rng);
}

/// Uniform simple d-regular graph by rejection from the configuration model.
/// The acceptance probability tends to exp(-(d^2-1)/4), independent of n.
inline MultiGraph sample_simple_regular(int n, int d, std::uint64_t seed, long max_attempts = 100000) {
  if ((static_cast<long long>(n) * d) % 2 != 0) {
    fail(ErrorCode::OddHalfEdges, "n*d must be even");
  }
  if (n <= d) fail(ErrorCode::InvalidArgument, "simple d-regular graphs need n > d");
  for (long attempt = 0; attempt < max_attempts; ++attempt) {
    auto rng = make_rng(seed, "simple_regular", static_cast<std::uint64_t>(attempt));
    auto g = sample_config_model(n, d, rng);
    if (g.is_simple()) return g;
  }
  fail(ErrorCode::AttemptsExhausted, "no simple graph in " + std::to_string(max_attempts) + " attempts");
}

// ---------------------------------------------------------------------------
// Local tree-likeness
// ---------------------------------------------------------------------------

namespace detail {

// Reusable scratch space for ball tests.
struct BallScratch {
  std::vector<int> dist;
  std::vector<int> ball;

  explicit BallScratch(int n) : dist(n, -1) {}
};

// True iff the radius-t ball around v is isomorphic to the depth-t d-regular
// tree: the induced ball is a tree and every vertex at depth < t has degree d.
inline bool ball_is_tree(const MultiGraph& g, int v, int t, int d, BallScratch& scratch) {
  auto& dist = scratch.dist;
  auto& ball = scratch.ball;
  ball.clear();
  ball.push_back(v);
  dist[v] = 0;
  bool ok = true;
  for (std::size_t head = 0; head < ball.size(); ++head) {
    const int u = ball[head];
    if (dist[u] == t) continue;
    if (g.degree(u) != d) ok = false;
    for (int w : g.neighbors(u)) {
      if (dist[w] < 0) {
        dist[w] = dist[u] + 1;
        ball.push_back(w);
      }
    }
  }
  long twice_edges = 0;
  for (int u : ball) {
    for (int w : g.neighbors(u)) {
      if (dist[w] >= 0) ++twice_edges;
    }
  }
  for (int u : ball) dist[u] = -1;
  return ok && twice_edges == 2 * (static_cast<long>(ball.size()) - 1);
}

}  // namespace detail

/// Fraction of vertices whose radius-t ball is not the depth-t d-regular tree.
/// With d = 0 the degree of vertex 0 is used.
inline double zeta(const MultiGraph& g, int t, int d = 0) {
  if (t < 0) fail(ErrorCode::InvalidArgument, "radius must be >= 0");
  if (g.n() == 0) return 0.0;
  if (d <= 0) d = g.degree(0);
  detail::BallScratch scratch(g.n());
  int bad = 0;
  for (int v = 0; v < g.n(); ++v) {
    if (!detail::ball_is_tree(g, v, t, d, scratch)) ++bad;
  }
  return static_cast<double>(bad) / g.n();
}

// ---------------------------------------------------------------------------
// Degree repair
// ---------------------------------------------------------------------------

/// Makes g d-regular: while some vertex has degree > d, removes the
/// lowest-index edge at the lowest-index vertex of maximum degree; then gives
/// each vertex d - deg(v) fresh half-edges and matches them uniformly.
inline MultiGraph regularize(const MultiGraph& g, int d, std::uint64_t seed) {
  const long long deficit_parity = 2LL * g.num_edges() - static_cast<long long>(d) * g.n();
  if (deficit_parity % 2 != 0) {
    fail(ErrorCode::ParityViolation, "2|E| - d n is odd; no d-regular completion exists");
  }
  std::vector<Edge> edges = g.edges();
  std::vector<char> alive(edges.size(), 1);
  auto deg = g.degrees();
  while (true) {
    int worst = -1;
    for (int v = 0; v < g.n(); ++v) {
      if (deg[v] > d && (worst < 0 || deg[v] > deg[worst])) worst = v;
    }
    if (worst < 0) break;
    for (std::size_t i = 0; i < edges.size(); ++i) {
      if (alive[i] && (edges[i].u == worst || edges[i].v == worst)) {
        alive[i] = 0;
        --deg[edges[i].u];
        --deg[edges[i].v];
        break;
      }
    }
  }
  MultiGraph out(g.n());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (alive[i]) out.add_edge(edges[i].u, edges[i].v);
  }
  std::vector<int> half;
  for (int v = 0; v < g.n(); ++v) {
    for (int k = deg[v]; k < d; ++k) half.push_back(v);
  }
  auto rng = make_rng(seed, "regularize");
  rng.shuffle(half);
  for (std::size_t i = 0; i + 1 < half.size(); i += 2) out.add_edge(half[i], half[i + 1]);
  return out;
}

}  // namespace bethe
