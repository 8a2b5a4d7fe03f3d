#pragma once

// Weighted social graphs, named families, cuts and exact cutwidth.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "opinion/errors.hpp"
#include "opinion/rational.hpp"

namespace opinion {

/// Players are indexed by bit position in 64-bit masks.
inline constexpr std::size_t kMaxPlayers = 64;
/// Largest decimal precision accepted for edge weights.
inline constexpr int kMaxWeightDigits = 6;

using VertexMask = std::uint64_t;

inline VertexMask bit(std::size_t i) { return VertexMask{1} << i; }

/// Edge weight before precision inference.
struct WeightedEdge {
  std::size_t u = 0;
  std::size_t v = 0;
  Rational weight;
};

/// Edge with its weight stored as an exact integer multiple of 10^-k.
struct Edge {
  std::size_t u = 0;  // u < v
  std::size_t v = 0;
  std::int64_t scaled_weight = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct Neighbor {
  std::size_t vertex = 0;
  std::int64_t scaled_weight = 0;
};

/// Connected, simple, positively weighted undirected graph.
///
/// Weights are kept as integers w·10^k where k is the largest number of
/// decimal digits among the input weights, so every cut comparison is exact.
/// Immutable after construction.
class SocialGraph {
 public:
  SocialGraph() = default;

  SocialGraph(std::size_t n, std::vector<WeightedEdge> edges) : n_(n) {
    if (n == 0) throw ConfigError("graph needs at least one vertex");
    if (n > kMaxPlayers) {
      throw LimitError("graph has " + std::to_string(n) + " vertices; at most " +
                       std::to_string(kMaxPlayers) + " are supported");
    }
    int k = 0;
    for (std::size_t e = 0; e < edges.size(); ++e) {
      const auto& we = edges[e];
      std::string where = "edges[" + std::to_string(e) + "]";
      if (we.u >= n || we.v >= n) throw ConfigError(where + ": endpoint out of range");
      if (we.u == we.v) throw ConfigError(where + ": self-loop");
      if (we.weight <= Rational(0)) throw ConfigError(where + ": weight must be positive");
      int digits = we.weight.decimal_digits(kMaxWeightDigits);
      if (digits < 0) {
        throw ConfigError(where + ": weight " + we.weight.str() + " needs more than " +
                          std::to_string(kMaxWeightDigits) + " decimal digits");
      }
      k = std::max(k, digits);
    }
    precision_ = k;
    scale_ = pow10(k);
    edges_.reserve(edges.size());
    for (const auto& we : edges) {
      Rational scaled = we.weight * Rational(scale_);
      edges_.push_back({std::min(we.u, we.v), std::max(we.u, we.v), scaled.num()});
    }
    std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
      return std::pair(a.u, a.v) < std::pair(b.u, b.v);
    });
    for (std::size_t e = 1; e < edges_.size(); ++e) {
      if (edges_[e].u == edges_[e - 1].u && edges_[e].v == edges_[e - 1].v) {
        throw ConfigError("duplicate edge (" + std::to_string(edges_[e].u) + ", " +
                          std::to_string(edges_[e].v) + ")");
      }
    }
    adjacency_.assign(n, {});
    weighted_degree_.assign(n, 0);
    for (const auto& e : edges_) {
      adjacency_[e.u].push_back({e.v, e.scaled_weight});
      adjacency_[e.v].push_back({e.u, e.scaled_weight});
      weighted_degree_[e.u] += e.scaled_weight;
      weighted_degree_[e.v] += e.scaled_weight;
      total_weight_ += e.scaled_weight;
      max_weight_ = std::max(max_weight_, e.scaled_weight);
    }
    if (!connected()) throw ConfigError("graph is not connected");
  }

  std::size_t size() const { return n_; }
  std::span<const Edge> edges() const { return edges_; }
  std::span<const Neighbor> neighbors(std::size_t i) const { return adjacency_[i]; }
  std::size_t degree(std::size_t i) const { return adjacency_[i].size(); }
  std::size_t max_degree() const {
    std::size_t d = 0;
    for (const auto& a : adjacency_) d = std::max(d, a.size());
    return d;
  }

  /// Number k of decimal digits; every weight times 10^k is an integer.
  int precision() const { return precision_; }
  /// 10^k.
  std::int64_t scale() const { return scale_; }

  std::int64_t weighted_degree(std::size_t i) const { return weighted_degree_[i]; }
  std::int64_t total_weight() const { return total_weight_; }
  std::int64_t max_weight() const { return max_weight_; }

  Rational to_weight(std::int64_t scaled) const { return Rational(scaled, scale_); }
  Rational weight(const Edge& e) const { return to_weight(e.scaled_weight); }

  /// Scaled weight of edge {i, j}, zero when absent.
  std::int64_t scaled_weight(std::size_t i, std::size_t j) const {
    for (const auto& nb : adjacency_[i]) {
      if (nb.vertex == j) return nb.scaled_weight;
    }
    return 0;
  }

  /// Same vertex count and the same weighted edge set, compared as exact values.
  friend bool operator==(const SocialGraph& a, const SocialGraph& b) {
    if (a.n_ != b.n_ || a.edges_.size() != b.edges_.size()) return false;
    for (std::size_t e = 0; e < a.edges_.size(); ++e) {
      const auto& x = a.edges_[e];
      const auto& y = b.edges_[e];
      if (x.u != y.u || x.v != y.v || a.weight(x) != b.weight(y)) return false;
    }
    return true;
  }

 private:
  bool connected() const {
    std::vector<bool> seen(n_, false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    std::size_t count = 1;
    while (!stack.empty()) {
      std::size_t v = stack.back();
      stack.pop_back();
      for (const auto& nb : adjacency_[v]) {
        if (!seen[nb.vertex]) {
          seen[nb.vertex] = true;
          ++count;
          stack.push_back(nb.vertex);
        }
      }
    }
    return count == n_;
  }

  std::size_t n_ = 0;
  int precision_ = 0;
  std::int64_t scale_ = 1;
  std::vector<Edge> edges_;
  std::vector<std::vector<Neighbor>> adjacency_;
  std::vector<std::int64_t> weighted_degree_;
  std::int64_t total_weight_ = 0;
  std::int64_t max_weight_ = 0;
};

// ---------------------------------------------------------------------------
// Named families

inline SocialGraph make_clique(std::size_t n, const Rational& w) {
  if (n < 2) throw ConfigError("clique needs n >= 2");
  std::vector<WeightedEdge> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) edges.push_back({i, j, w});
  return SocialGraph(n, std::move(edges));
}

/// K_{m,m} with sides {0..m-1} and {m..2m-1}.
inline SocialGraph make_complete_bipartite(std::size_t m, const Rational& w) {
  if (m < 1) throw ConfigError("complete bipartite graph needs m >= 1");
  std::vector<WeightedEdge> edges;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) edges.push_back({i, m + j, w});
  return SocialGraph(2 * m, std::move(edges));
}

/// Vertex 0 is the center.
inline SocialGraph make_star(std::size_t leaves, const Rational& w) {
  if (leaves < 1) throw ConfigError("star needs at least one leaf");
  std::vector<WeightedEdge> edges;
  for (std::size_t i = 1; i <= leaves; ++i) edges.push_back({0, i, w});
  return SocialGraph(leaves + 1, std::move(edges));
}

inline SocialGraph make_path(std::size_t n, const Rational& w) {
  if (n < 2) throw ConfigError("path needs n >= 2");
  std::vector<WeightedEdge> edges;
  for (std::size_t i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, w});
  return SocialGraph(n, std::move(edges));
}

inline SocialGraph make_cycle(std::size_t n, const Rational& w) {
  if (n < 3) throw ConfigError("cycle needs n >= 3");
  std::vector<WeightedEdge> edges;
  for (std::size_t i = 0; i < n; ++i) edges.push_back({std::min(i, (i + 1) % n), std::max(i, (i + 1) % n), w});
  return SocialGraph(n, std::move(edges));
}

/// Role of a player inside the exponential best-response construction.
struct GadgetRole {
  std::size_t gadget = 0;  // 0 for the outer switch A_0
  char role = 'A';         // one of A..F
};

/// Chain of 6-gadgets G_1..G_g, each switched by the A player of the
/// previous gadget (A_0 for G_1).
struct GadgetChain {
  SocialGraph graph;
  std::size_t gadgets = 0;
  std::vector<GadgetRole> roles;  // indexed by player
  std::vector<Rational> epsilon;  // epsilon[i] for gadget i (index 0 unused)

  /// Player index of role in gadget i; gadget 0 only has role 'A'.
  std::size_t player(std::size_t gadget, char role) const {
    if (gadget == 0) {
      if (role != 'A') throw ConfigError("gadget 0 only contains the switch A_0");
      return 0;
    }
    if (gadget > gadgets || role < 'A' || role > 'F') throw ConfigError("no such gadget player");
    return 1 + 6 * (gadget - 1) + static_cast<std::size_t>(role - 'A');
  }
};

/// Builds 6g+1 players: A_0 then gadgets with edges (A,B)=ε, (B,C)=2ε,
/// (C,D)=3ε, (D,E)=(B,F)=(D,F)=4ε, plus switch edges (A_{i-1},B_i),
/// (A_{i-1},D_i) of weight 4ε_i. ε_g = eps_last and ε_i = ratio·ε_{i+1}.
inline GadgetChain make_gadget_chain(std::size_t g, const Rational& eps_last, std::int64_t ratio) {
  if (g < 1) throw ConfigError("gadget chain needs g >= 1");
  if (ratio <= 8) throw ConfigError("gadget weight ratio must exceed 8");
  if (6 * g + 1 > kMaxPlayers) throw LimitError("gadget chain too long for 64 players");
  GadgetChain chain;
  chain.gadgets = g;
  chain.epsilon.assign(g + 1, Rational(0));
  chain.epsilon[g] = eps_last;
  for (std::size_t i = g - 1; i >= 1; --i) chain.epsilon[i] = chain.epsilon[i + 1] * Rational(ratio);
  chain.roles.push_back({0, 'A'});
  for (std::size_t i = 1; i <= g; ++i)
    for (char r = 'A'; r <= 'F'; ++r) chain.roles.push_back({i, r});

  std::vector<WeightedEdge> edges;
  for (std::size_t i = 1; i <= g; ++i) {
    const Rational& e = chain.epsilon[i];
    auto p = [&](char r) { return chain.player(i, r); };
    edges.push_back({p('A'), p('B'), e});
    edges.push_back({p('B'), p('C'), e * Rational(2)});
    edges.push_back({p('C'), p('D'), e * Rational(3)});
    edges.push_back({p('D'), p('E'), e * Rational(4)});
    edges.push_back({p('B'), p('F'), e * Rational(4)});
    edges.push_back({p('D'), p('F'), e * Rational(4)});
    std::size_t sw = chain.player(i - 1, 'A');
    edges.push_back({sw, p('B'), e * Rational(4)});
    edges.push_back({sw, p('D'), e * Rational(4)});
  }
  chain.graph = SocialGraph(6 * g + 1, std::move(edges));
  return chain;
}

// ---------------------------------------------------------------------------
// Cuts

/// Scaled weight of edges with exactly one endpoint in the set.
inline std::int64_t cut_weight(const SocialGraph& g, VertexMask set) {
  std::int64_t total = 0;
  for (const auto& e : g.edges()) {
    bool a = (set >> e.u) & 1U;
    bool b = (set >> e.v) & 1U;
    if (a != b) total += e.scaled_weight;
  }
  return total;
}

/// Max prefix cut of a vertex ordering (scaled).
inline std::int64_t ordering_width(const SocialGraph& g, std::span<const std::size_t> ordering) {
  VertexMask prefix = 0;
  std::int64_t width = 0;
  for (std::size_t pos = 0; pos + 1 < ordering.size(); ++pos) {
    prefix |= bit(ordering[pos]);
    width = std::max(width, cut_weight(g, prefix));
  }
  return width;
}

struct CutwidthResult {
  std::int64_t value = 0;  // scaled by 10^k
  std::vector<std::size_t> ordering;
};

inline constexpr std::size_t kDefaultCutwidthLimit = 20;

/// Exact weighted cutwidth by dynamic programming over vertex subsets:
/// f(S) = max(cut(S), min_{v in S} f(S \ {v})). The ordering is rebuilt
/// backwards choosing the smallest-index minimizing last vertex.
inline CutwidthResult cutwidth_exact(const SocialGraph& g, std::size_t limit = kDefaultCutwidthLimit) {
  const std::size_t n = g.size();
  if (n > limit || n > 30) {
    throw LimitError("cutwidth DP limited to " + std::to_string(std::min<std::size_t>(limit, 30)) +
                     " vertices, graph has " + std::to_string(n));
  }
  const std::size_t states = std::size_t{1} << n;
  std::vector<std::int64_t> cut(states, 0);
  for (std::size_t s = 1; s < states; ++s) {
    std::size_t v = static_cast<std::size_t>(__builtin_ctzll(s));
    std::size_t rest = s & (s - 1);
    std::int64_t inside = 0;
    for (const auto& nb : g.neighbors(v))
      if ((rest >> nb.vertex) & 1U) inside += nb.scaled_weight;
    cut[s] = cut[rest] + g.weighted_degree(v) - 2 * inside;
  }
  std::vector<std::int64_t> best(states, 0);
  for (std::size_t s = 1; s < states; ++s) {
    std::int64_t m = std::numeric_limits<std::int64_t>::max();
    for (std::size_t rest = s; rest != 0; rest &= rest - 1) {
      std::size_t v = static_cast<std::size_t>(__builtin_ctzll(rest));
      m = std::min(m, best[s & ~(std::size_t{1} << v)]);
    }
    best[s] = std::max(m, cut[s]);
  }

  CutwidthResult result;
  result.value = best[states - 1];
  result.ordering.resize(n);
  std::size_t s = states - 1;
  for (std::size_t pos = n; pos-- > 0;) {
    std::size_t chosen = n;
    for (std::size_t v = 0; v < n; ++v) {
      if (!((s >> v) & 1U)) continue;
      if (std::max(best[s & ~(std::size_t{1} << v)], cut[s]) == best[s]) {
        chosen = v;
        break;
      }
    }
    if (chosen == n) throw InvariantError("cutwidth backtracking failed");
    result.ordering[pos] = chosen;
    s &= ~(std::size_t{1} << chosen);
  }
  return result;
}

}  // namespace opinion
