#pragma once

// Opinion games: utilities, exact potential, social cost, Nash structure and
// belief canonicalization. All arithmetic is exact.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "opinion/errors.hpp"
#include "opinion/graph.hpp"
#include "opinion/rational.hpp"

namespace opinion {

/// Strategy profile x in {0,1}^n; bit i holds x_i.
struct Profile {
  std::uint64_t bits = 0;

  int operator[](std::size_t i) const { return static_cast<int>((bits >> i) & 1U); }
  Profile flipped(std::size_t i) const { return {bits ^ bit(i)}; }
  Profile with(std::size_t i, int s) const { return {s ? (bits | bit(i)) : (bits & ~bit(i))}; }
  int ones() const { return __builtin_popcountll(bits); }

  static Profile all(std::size_t n, int s) {
    if (!s) return {0};
    return {n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1};
  }

  friend bool operator==(const Profile&, const Profile&) = default;
  friend auto operator<=>(const Profile&, const Profile&) = default;
};

inline std::string to_hex(Profile x) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "0x%llx", static_cast<unsigned long long>(x.bits));
  return buf;
}

/// x_0 x_1 ... x_{n-1} as characters.
inline std::string to_bitstring(Profile x, std::size_t n) {
  std::string s(n, '0');
  for (std::size_t i = 0; i < n; ++i) s[i] = static_cast<char>('0' + x[i]);
  return s;
}

inline std::int64_t lcm_checked(std::int64_t a, std::int64_t b) {
  __int128 l = static_cast<__int128>(a / std::gcd(a, b)) * b;
  if (l > INT64_MAX / 4) throw LimitError("belief denominators too large");
  return static_cast<std::int64_t>(l);
}

/// Opinion game on a social graph.
///
/// Player i pays c_i(x) = scale·(x_i − b_i)² + D_i(x) where D_i is the weight
/// of discording incident edges. The belief scale is 1 for ordinary games and
/// 10^k for integer versions.
///
/// Exact values are handled internally as integer "ticks" over the common
/// denominator q², where q is a multiple of 4·10^k and of every belief
/// denominator, so canonicalized beliefs and their midpoints stay exact.
class OpinionGame {
 public:
  OpinionGame() = default;

  OpinionGame(SocialGraph graph, std::vector<Rational> beliefs, std::int64_t belief_scale = 1)
      : graph_(std::move(graph)), beliefs_(std::move(beliefs)), belief_scale_(belief_scale) {
    const std::size_t n = graph_.size();
    if (beliefs_.size() != n) {
      throw ConfigError("expected " + std::to_string(n) + " beliefs, got " + std::to_string(beliefs_.size()));
    }
    if (belief_scale_ < 1) throw ConfigError("belief scale must be positive");
    q_ = 4 * graph_.scale();
    for (std::size_t i = 0; i < n; ++i) {
      if (beliefs_[i] < Rational(0) || beliefs_[i] > Rational(1)) {
        throw ConfigError("beliefs[" + std::to_string(i) + "] = " + beliefs_[i].str() + " outside [0,1]");
      }
      q_ = lcm_checked(q_, beliefs_[i].den());
    }
    __int128 den = static_cast<__int128>(q_) * q_;
    edge_factor_ = den / graph_.scale();
    __int128 bound = den * belief_scale_ * static_cast<__int128>(n) * 2 +
                     static_cast<__int128>(edge_factor_) * graph_.total_weight() * 2;
    if (den > (__int128{1} << 61) || bound > (__int128{1} << 61)) {
      throw LimitError("game values exceed exact 64-bit range; reduce decimal precision");
    }
    tick_den_ = static_cast<std::int64_t>(den);
    belief_num_.resize(n);
    belief_cost_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      belief_num_[i] = beliefs_[i].num() * (q_ / beliefs_[i].den());
      for (int s = 0; s < 2; ++s) {
        std::int64_t d = s * q_ - belief_num_[i];
        belief_cost_[i][s] = belief_scale_ * d * d;
      }
    }
  }

  const SocialGraph& graph() const { return graph_; }
  std::size_t players() const { return graph_.size(); }
  const Rational& belief(std::size_t i) const { return beliefs_[i]; }
  std::span<const Rational> beliefs() const { return beliefs_; }
  std::int64_t belief_scale() const { return belief_scale_; }

  /// Common belief denominator q.
  std::int64_t belief_denominator() const { return q_; }
  /// Denominator q² of every tick value.
  std::int64_t tick_denominator() const { return tick_den_; }
  /// Ticks per unit of scaled edge weight.
  std::int64_t edge_factor() const { return edge_factor_; }
  /// b_i·q.
  std::int64_t belief_numerator(std::size_t i) const { return belief_num_[i]; }
  /// scale·(s − b_i)² in ticks.
  std::int64_t belief_cost_ticks(std::size_t i, int s) const { return belief_cost_[i][s]; }

  Rational from_ticks(std::int64_t ticks) const { return Rational(ticks, tick_den_); }
  double ticks_to_double(std::int64_t ticks) const {
    return static_cast<double>(ticks) / static_cast<double>(tick_den_);
  }

  /// B_i: 0 if b_i ≤ 1/2, else 1.
  int nearest_integer_belief(std::size_t i) const { return 2 * belief_num_[i] <= q_ ? 0 : 1; }

  friend bool operator==(const OpinionGame& a, const OpinionGame& b) {
    return a.graph_ == b.graph_ && a.beliefs_ == b.beliefs_ && a.belief_scale_ == b.belief_scale_;
  }

 private:
  SocialGraph graph_;
  std::vector<Rational> beliefs_;
  std::int64_t belief_scale_ = 1;
  std::int64_t q_ = 4;
  std::int64_t tick_den_ = 16;
  std::int64_t edge_factor_ = 16;
  std::vector<std::int64_t> belief_num_;
  std::vector<std::array<std::int64_t, 2>> belief_cost_;
};

inline OpinionGame uniform_belief_game(SocialGraph graph, const Rational& b) {
  std::vector<Rational> beliefs(graph.size(), b);
  return OpinionGame(std::move(graph), std::move(beliefs));
}

// ---------------------------------------------------------------------------
// Costs, potential, social cost

/// W_i^s(x): scaled weight of i's neighbours playing s.
inline std::int64_t neighbor_weight(const OpinionGame& game, Profile x, std::size_t i, int s) {
  std::int64_t w = 0;
  for (const auto& nb : game.graph().neighbors(i))
    if (x[nb.vertex] == s) w += nb.scaled_weight;
  return w;
}

inline std::int64_t cost_ticks(const OpinionGame& game, Profile x, std::size_t i) {
  int s = x[i];
  return game.belief_cost_ticks(i, s) + game.edge_factor() * neighbor_weight(game, x, i, 1 - s);
}

inline Rational cost(const OpinionGame& game, Profile x, std::size_t i) {
  return game.from_ticks(cost_ticks(game, x, i));
}

/// u_i(x) = −((x_i − b_i)² + Σ_j w_ij (x_i − x_j)²).
inline Rational utility(const OpinionGame& game, Profile x, std::size_t i) {
  return game.from_ticks(-cost_ticks(game, x, i));
}

/// c_i(x) − c_i(x with i flipped), in ticks. Positive means flipping is a
/// strict improvement; by the exact-potential property it is also the drop
/// in Φ.
inline std::int64_t flip_gain_ticks(const OpinionGame& game, Profile x, std::size_t i) {
  int s = x[i];
  std::int64_t same = 0;
  std::int64_t other = 0;
  for (const auto& nb : game.graph().neighbors(i)) {
    if (x[nb.vertex] == s) same += nb.scaled_weight;
    else other += nb.scaled_weight;
  }
  return game.belief_cost_ticks(i, s) - game.belief_cost_ticks(i, 1 - s) +
         game.edge_factor() * (other - same);
}

/// D(x): total scaled weight of discording edges.
inline std::int64_t discord_weight(const OpinionGame& game, Profile x) {
  std::int64_t d = 0;
  for (const auto& e : game.graph().edges())
    if (x[e.u] != x[e.v]) d += e.scaled_weight;
  return d;
}

/// b(x) = scale·Σ_i (x_i − b_i)² in ticks.
inline std::int64_t belief_term_ticks(const OpinionGame& game, Profile x) {
  std::int64_t t = 0;
  for (std::size_t i = 0; i < game.players(); ++i) t += game.belief_cost_ticks(i, x[i]);
  return t;
}

inline std::int64_t potential_ticks(const OpinionGame& game, Profile x) {
  return belief_term_ticks(game, x) + game.edge_factor() * discord_weight(game, x);
}

/// Φ(x) = Σ_i (x_i − b_i)² + D(x).
inline Rational potential(const OpinionGame& game, Profile x) {
  return game.from_ticks(potential_ticks(game, x));
}

/// SC(x) = Σ_i (x_i − b_i)² + 2D(x) = Φ(x) + D(x).
inline std::int64_t social_cost_ticks(const OpinionGame& game, Profile x) {
  return belief_term_ticks(game, x) + 2 * game.edge_factor() * discord_weight(game, x);
}

inline Rational social_cost(const OpinionGame& game, Profile x) {
  return game.from_ticks(social_cost_ticks(game, x));
}

inline constexpr std::size_t kMaxEnumeratedPlayers = 22;

inline void require_enumerable(const OpinionGame& game, std::size_t limit, const char* what) {
  if (game.players() > limit) {
    throw LimitError(std::string(what) + " enumerates 2^n profiles; n = " + std::to_string(game.players()) +
                     " exceeds limit " + std::to_string(limit));
  }
}

/// Φ in ticks for every profile, indexed by bitmask.
inline std::vector<std::int64_t> potential_table(const OpinionGame& game, std::size_t limit = kMaxEnumeratedPlayers) {
  require_enumerable(game, limit, "potential table");
  const std::size_t states = std::size_t{1} << game.players();
  std::vector<std::int64_t> phi(states);
  phi[0] = potential_ticks(game, Profile{0});
  for (std::size_t s = 1; s < states; ++s) {
    std::size_t v = static_cast<std::size_t>(__builtin_ctzll(s));
    Profile prev{s & (s - 1)};
    phi[s] = phi[prev.bits] - flip_gain_ticks(game, prev, v);
  }
  return phi;
}

/// The four values Φ_e takes on edge e = (i, j) with i < j.
struct EdgePotentialCases {
  Rational alpha;  // x_i = x_j = 0
  Rational beta;   // x_i = 0, x_j = 1
  Rational gamma;  // x_i = 1, x_j = 0
  Rational delta;  // x_i = x_j = 1
};

inline EdgePotentialCases edge_potential_cases(const OpinionGame& game, std::size_t edge_index) {
  const auto& e = game.graph().edges()[edge_index];
  const Rational scale(game.belief_scale());
  auto share = [&](std::size_t v, int s) {
    Rational d = Rational(s) - game.belief(v);
    return scale * d * d / Rational(static_cast<std::int64_t>(game.graph().degree(v)));
  };
  const Rational w = game.graph().weight(e);
  return {share(e.u, 0) + share(e.v, 0), share(e.u, 0) + share(e.v, 1) + w,
          share(e.u, 1) + share(e.v, 0) + w, share(e.u, 1) + share(e.v, 1)};
}

/// Φ_e(x); summing over all edges recovers Φ(x) when every vertex has degree ≥ 1.
inline Rational edge_potential(const OpinionGame& game, std::size_t edge_index, Profile x) {
  const auto& e = game.graph().edges()[edge_index];
  auto c = edge_potential_cases(game, edge_index);
  int a = x[e.u];
  int b = x[e.v];
  if (!a && !b) return c.alpha;
  if (!a && b) return c.beta;
  if (a && !b) return c.gamma;
  return c.delta;
}

// ---------------------------------------------------------------------------
// Nash equilibria

/// Direct check: player i cannot strictly lower its cost by flipping.
inline bool flip_stable(const OpinionGame& game, Profile x, std::size_t i) {
  return flip_gain_ticks(game, x, i) <= 0;
}

/// Threshold characterization: with B_i the integer nearest b_i and
/// δ = 1/2 − |B_i − b_i|, player i may play B_i iff W_i^{B_i} ≥ W_i/2 − δ and
/// may play 1 − B_i iff W_i^{B_i} ≤ W_i/2 − δ (δ scaled by the belief scale).
inline bool nash_condition(const OpinionGame& game, Profile x, std::size_t i) {
  const int b_int = game.nearest_integer_belief(i);
  const std::int64_t q = game.belief_denominator();
  const std::int64_t dist = std::abs(b_int * q - game.belief_numerator(i));
  // 2·W^B·ef compared with W·ef − 2·scale·δ·q².
  const __int128 lhs = static_cast<__int128>(2) * neighbor_weight(game, x, i, b_int) * game.edge_factor();
  const __int128 rhs = static_cast<__int128>(game.graph().weighted_degree(i)) * game.edge_factor() -
                       static_cast<__int128>(game.belief_scale()) * q * (q - 2 * dist);
  return x[i] == b_int ? lhs >= rhs : lhs <= rhs;
}

struct NashCheck {
  bool nash = true;
  std::vector<bool> stable;  // per-player witness
};

/// Runs both the one-flip check and the threshold characterization; they
/// must agree for every player.
inline NashCheck is_nash(const OpinionGame& game, Profile x) {
  NashCheck check;
  check.stable.resize(game.players());
  for (std::size_t i = 0; i < game.players(); ++i) {
    bool direct = flip_stable(game, x, i);
    if (direct != nash_condition(game, x, i)) {
      throw InvariantError("Nash characterization disagrees with flip check for player " + std::to_string(i) +
                           " at " + to_hex(x));
    }
    check.stable[i] = direct;
    check.nash = check.nash && direct;
  }
  return check;
}

/// Starting from everyone playing `fill`, repeatedly moves every player that
/// strictly prefers the other strategy until nobody does. The result is the
/// equilibrium with the most players at `fill`.
inline Profile greedy_nash(const OpinionGame& game, int fill) {
  if (fill != 0 && fill != 1) throw ConfigError("fill strategy must be 0 or 1");
  const std::size_t n = game.players();
  Profile x = Profile::all(n, fill);
  for (;;) {
    std::vector<std::size_t> movers;
    for (std::size_t i = 0; i < n; ++i)
      if (x[i] == fill && flip_gain_ticks(game, x, i) > 0) movers.push_back(i);
    if (movers.empty()) break;
    for (auto i : movers) x = x.with(i, 1 - fill);
  }
  return x;
}

inline std::vector<Profile> enumerate_nash(const OpinionGame& game, std::size_t limit = kMaxEnumeratedPlayers) {
  require_enumerable(game, limit, "Nash enumeration");
  const std::size_t n = game.players();
  const std::uint64_t states = std::uint64_t{1} << n;
  std::vector<Profile> out;
  for (std::uint64_t s = 0; s < states; ++s) {
    Profile x{s};
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) ok = nash_condition(game, x, i);
    if (ok) out.push_back(x);
  }
  return out;
}

struct OptimumProfile {
  Profile profile;
  Rational cost;
};

/// Exhaustive minimum of the social cost; ties go to the smallest bitmask.
inline OptimumProfile optimum_profile(const OpinionGame& game, std::size_t limit = kMaxEnumeratedPlayers) {
  require_enumerable(game, limit, "optimum search");
  const std::uint64_t states = std::uint64_t{1} << game.players();
  Profile best{0};
  std::int64_t best_cost = social_cost_ticks(game, best);
  for (std::uint64_t s = 1; s < states; ++s) {
    std::int64_t c = social_cost_ticks(game, Profile{s});
    if (c < best_cost) {
      best_cost = c;
      best = Profile{s};
    }
  }
  return {best, game.from_ticks(best_cost)};
}

/// Ratio that may be unbounded.
struct PriceRatio {
  bool infinite = false;
  Rational value;

  std::string str() const { return infinite ? "inf" : value.str(); }
  friend bool operator==(const PriceRatio&, const PriceRatio&) = default;
};

struct EquilibriumReport {
  std::vector<Profile> nash_profiles;
  Profile optimum;
  Rational optimum_cost;
  Rational best_nash_cost;
  Rational worst_nash_cost;
  PriceRatio poa;
  PriceRatio pos;
};

inline PriceRatio price_ratio(const Rational& num, const Rational& den) {
  if (den == Rational(0)) {
    // 0/0 happens only when every equilibrium is itself optimal.
    return num == Rational(0) ? PriceRatio{false, Rational(1)} : PriceRatio{true, Rational(0)};
  }
  return {false, num / den};
}

inline EquilibriumReport poa_pos(const OpinionGame& game, std::size_t limit = kMaxEnumeratedPlayers) {
  EquilibriumReport r;
  r.nash_profiles = enumerate_nash(game, limit);
  if (r.nash_profiles.empty()) throw InvariantError("potential game without pure Nash equilibrium");
  auto opt = optimum_profile(game, limit);
  r.optimum = opt.profile;
  r.optimum_cost = opt.cost;
  std::int64_t best = social_cost_ticks(game, r.nash_profiles.front());
  std::int64_t worst = best;
  for (const auto& x : r.nash_profiles) {
    std::int64_t c = social_cost_ticks(game, x);
    best = std::min(best, c);
    worst = std::max(worst, c);
  }
  r.best_nash_cost = game.from_ticks(best);
  r.worst_nash_cost = game.from_ticks(worst);
  r.poa = price_ratio(r.worst_nash_cost, r.optimum_cost);
  r.pos = price_ratio(r.best_nash_cost, r.optimum_cost);
  return r;
}

// ---------------------------------------------------------------------------
// Threshold beliefs and canonicalization

inline constexpr std::size_t kDefaultDegreeCap = 20;

/// Beliefs in [0,1] at which player i is indifferent for some opponent
/// profile: b = 1/2 − W_i/(2·scale) + s/scale for every achievable W_i^0 = s.
inline std::vector<Rational> threshold_beliefs(const OpinionGame& game, std::size_t i,
                                               std::size_t degree_cap = kDefaultDegreeCap) {
  const auto& g = game.graph();
  if (g.degree(i) > degree_cap) {
    throw LimitError("player " + std::to_string(i) + " has degree " + std::to_string(g.degree(i)) +
                     " above the subset-sum cap " + std::to_string(degree_cap));
  }
  std::vector<std::int64_t> sums{0};
  for (const auto& nb : g.neighbors(i)) {
    std::size_t m = sums.size();
    for (std::size_t k = 0; k < m; ++k) sums.push_back(sums[k] + nb.scaled_weight);
    std::sort(sums.begin(), sums.end());
    sums.erase(std::unique(sums.begin(), sums.end()), sums.end());
  }
  const std::int64_t total = g.weighted_degree(i);
  const std::int64_t den = 2 * game.belief_scale() * g.scale();
  std::vector<Rational> out;
  for (auto s : sums) {
    Rational b = Rational(1, 2) + Rational(2 * s - total, den);
    if (b >= Rational(0) && b <= Rational(1)) out.push_back(b);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// Replaces each non-threshold belief by the midpoint of the consecutive pair
/// of {0, 1} ∪ thresholds enclosing it. Best responses are unchanged.
inline OpinionGame canonicalize_beliefs(const OpinionGame& game, std::size_t degree_cap = kDefaultDegreeCap) {
  std::vector<Rational> beliefs(game.beliefs().begin(), game.beliefs().end());
  for (std::size_t i = 0; i < game.players(); ++i) {
    auto points = threshold_beliefs(game, i, degree_cap);
    points.push_back(Rational(0));
    points.push_back(Rational(1));
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    const Rational& b = beliefs[i];
    auto hi = std::lower_bound(points.begin(), points.end(), b);
    if (*hi == b) continue;
    beliefs[i] = (*(hi - 1) + *hi) * Rational(1, 2);
  }
  return OpinionGame(game.graph(), std::move(beliefs), game.belief_scale());
}

/// Integer version: weights multiplied by 10^k (now integral) and the belief
/// term scaled by the same factor, so every utility and Φ scale by 10^k.
inline OpinionGame integer_version(const OpinionGame& game) {
  const auto& g = game.graph();
  std::vector<WeightedEdge> edges;
  for (const auto& e : g.edges()) edges.push_back({e.u, e.v, Rational(e.scaled_weight)});
  std::vector<Rational> beliefs(game.beliefs().begin(), game.beliefs().end());
  __int128 scale = static_cast<__int128>(game.belief_scale()) * g.scale();
  if (scale > INT64_MAX / 4) throw LimitError("integer version scale overflow");
  return OpinionGame(SocialGraph(g.size(), std::move(edges)), std::move(beliefs),
                     static_cast<std::int64_t>(scale));
}

}  // namespace opinion
