#pragma once

// Logit dynamics: exact transition structure, Gibbs measure, mixing and
// relaxation times, coupling contraction, canonical-path congestion and
// bottleneck lower bounds.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "opinion/errors.hpp"
#include "opinion/game.hpp"
#include "opinion/graph.hpp"
#include "opinion/random.hpp"
#include "opinion/rational.hpp"
#include "opinion/symmetric_eigen.hpp"

namespace opinion {

using Distribution = std::vector<double>;

inline constexpr std::size_t kMaxMatrixPlayers = 14;
inline constexpr std::size_t kMaxMixingPlayers = 12;
inline constexpr std::size_t kMaxBottleneckPlayers = 20;

/// 1/(1 + e^{−z}) without overflow.
template <class T>
T logistic(T z) {
  if (z >= 0) return T(1) / (T(1) + std::exp(-z));
  T e = std::exp(z);
  return e / (T(1) + e);
}

class LogitChain {
 public:
  LogitChain(OpinionGame game, double beta) : game_(std::move(game)), beta_(beta) {
    if (!(beta_ >= 0) || !std::isfinite(beta_)) throw ConfigError("beta must be a finite non-negative number");
    if (game_.players() <= kMaxEnumeratedPlayers) {
      phi_ = potential_table(game_);
      phi_min_ = *std::min_element(phi_.begin(), phi_.end());
      phi_max_ = *std::max_element(phi_.begin(), phi_.end());
    }
  }

  const OpinionGame& game() const { return game_; }
  double beta() const { return beta_; }
  std::size_t players() const { return game_.players(); }
  std::size_t states() const { return std::size_t{1} << players(); }

  /// Φ in ticks, indexed by profile mask (n ≤ 22).
  std::span<const std::int64_t> potential_ticks_table() const {
    require_table("potential table");
    return phi_;
  }
  std::int64_t min_potential_ticks() const {
    require_table("potential table");
    return phi_min_;
  }
  std::int64_t max_potential_ticks() const {
    require_table("potential table");
    return phi_max_;
  }

  /// σ_i(1 − x_i | x_{−i}): the chance that i, once selected, switches.
  template <class T = double>
  T switch_prob(Profile x, std::size_t i) const {
    const T du = static_cast<T>(flip_gain_ticks(game_, x, i)) / static_cast<T>(game_.tick_denominator());
    return logistic<T>(static_cast<T>(beta_) * du);
  }

  void require_table(const char* what) const {
    if (phi_.empty()) {
      throw LimitError(std::string(what) + " needs n <= " + std::to_string(kMaxEnumeratedPlayers));
    }
  }

  void require_players(std::size_t limit, const char* what) const {
    if (players() > limit) {
      throw LimitError(std::string(what) + " limited to n <= " + std::to_string(limit) + ", got n = " +
                       std::to_string(players()));
    }
  }

 private:
  OpinionGame game_;
  double beta_ = 0;
  std::vector<std::int64_t> phi_;
  std::int64_t phi_min_ = 0;
  std::int64_t phi_max_ = 0;
};

/// σ_i(s | x_{−i}) as a logistic of β·(u_i(s) − u_i(1−s)).
inline double update_prob(const LogitChain& chain, Profile x, std::size_t i, int s) {
  if (s != 0 && s != 1) throw ConfigError("strategy must be 0 or 1");
  const double gain = static_cast<double>(flip_gain_ticks(chain.game(), x, i)) /
                      static_cast<double>(chain.game().tick_denominator());
  // u_i(1 − x_i) − u_i(x_i) = flip gain
  const double du = s == x[i] ? -gain : gain;
  return logistic(chain.beta() * du);
}

/// Row-stochastic transition matrix stored by its nonzero structure: the
/// n off-diagonal entries P(x, x^i) of each row plus the diagonal.
template <class T = double>
struct TransitionMatrix {
  std::size_t players = 0;
  std::size_t states = 0;
  std::vector<T> flip;  // flip[x·n + i] = P(x, x^i)
  std::vector<T> stay;  // P(x, x)

  T operator()(std::size_t x, std::size_t y) const {
    if (x == y) return stay[x];
    std::uint64_t d = x ^ y;
    if (__builtin_popcountll(d) != 1) return T{};
    return flip[x * players + static_cast<std::size_t>(__builtin_ctzll(d))];
  }

  T off_diagonal_sum(std::size_t x) const {
    T s{};
    for (std::size_t i = 0; i < players; ++i) s += flip[x * players + i];
    return s;
  }

  DenseMatrix<T> dense(std::size_t limit = kMaxMixingPlayers) const {
    if (players > limit) throw LimitError("dense transition matrix limited to n <= " + std::to_string(limit));
    DenseMatrix<T> m(states, states);
    for (std::size_t x = 0; x < states; ++x) {
      m(x, x) = stay[x];
      for (std::size_t i = 0; i < players; ++i) m(x, x ^ bit(i)) = flip[x * players + i];
    }
    return m;
  }
};

template <class T = double>
TransitionMatrix<T> transition_matrix(const LogitChain& chain, std::size_t limit = kMaxMatrixPlayers) {
  chain.require_players(limit, "transition matrix");
  const std::size_t n = chain.players();
  TransitionMatrix<T> m;
  m.players = n;
  m.states = chain.states();
  m.flip.resize(m.states * n);
  m.stay.resize(m.states);
  const T inv_n = T(1) / static_cast<T>(n);
  for (std::size_t x = 0; x < m.states; ++x) {
    T off{};
    for (std::size_t i = 0; i < n; ++i) {
      T p = chain.switch_prob<T>(Profile{x}, i) * inv_n;
      m.flip[x * n + i] = p;
      off += p;
    }
    m.stay[x] = T(1) - off;
  }
  return m;
}

/// Unnormalized Gibbs weights e^{−β(Φ − Φ_min)} and their sum.
inline std::pair<std::vector<double>, double> gibbs_weights(const LogitChain& chain) {
  auto phi = chain.potential_ticks_table();
  const double den = static_cast<double>(chain.game().tick_denominator());
  const std::int64_t lo = chain.min_potential_ticks();
  std::vector<double> w(phi.size());
  double z = 0;
  for (std::size_t x = 0; x < phi.size(); ++x) {
    w[x] = std::exp(-chain.beta() * static_cast<double>(phi[x] - lo) / den);
    z += w[x];
  }
  return {std::move(w), z};
}

/// π(x) = e^{−βΦ(x)}/Z.
inline Distribution gibbs(const LogitChain& chain) {
  auto [w, z] = gibbs_weights(chain);
  for (auto& v : w) v /= z;
  return w;
}

/// max |π(x)P(x,y) − π(y)P(y,x)| over a dense matrix.
inline double max_detailed_balance_violation(const DenseMatrix<double>& p, const Distribution& pi) {
  if (p.rows() != pi.size() || p.cols() != pi.size()) throw ConfigError("matrix and distribution sizes differ");
  double worst = 0;
  for (std::size_t x = 0; x < pi.size(); ++x)
    for (std::size_t y = x + 1; y < pi.size(); ++y)
      worst = std::max(worst, std::abs(pi[x] * p(x, y) - pi[y] * p(y, x)));
  return worst;
}

/// Detailed-balance violation of the chain against its Gibbs measure. Pairs
/// at Hamming distance ≥ 2 contribute exactly 0 and are skipped.
inline double check_reversibility(const LogitChain& chain) {
  auto p = transition_matrix(chain);
  auto pi = gibbs(chain);
  const std::size_t n = chain.players();
  double worst = 0;
  for (std::size_t x = 0; x < p.states; ++x) {
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t y = x ^ bit(i);
      if (y < x) continue;
      worst = std::max(worst, std::abs(pi[x] * p.flip[x * n + i] - pi[y] * p.flip[y * n + i]));
    }
  }
  return worst;
}

/// ½ Σ |μ(x) − ν(x)|.
template <class T>
T tv_distance(std::span<const T> mu, std::span<const T> nu) {
  if (mu.size() != nu.size()) throw ConfigError("tv_distance: length mismatch");
  T s{};
  for (std::size_t i = 0; i < mu.size(); ++i) s += std::abs(mu[i] - nu[i]);
  return s / 2;
}

inline double tv_distance(const Distribution& mu, const Distribution& nu) {
  return tv_distance<double>(std::span<const double>(mu), std::span<const double>(nu));
}

/// Σ (μ(x) − ν(x))⁺, the mass of the maximizing event {μ > ν}.
inline double tv_distance_positive_part(const Distribution& mu, const Distribution& nu) {
  if (mu.size() != nu.size()) throw ConfigError("tv_distance: length mismatch");
  double s = 0;
  for (std::size_t i = 0; i < mu.size(); ++i) s += std::max(0.0, mu[i] - nu[i]);
  return s;
}

// ---------------------------------------------------------------------------
// Mixing time

enum class MixingMethod { row_iteration, repeated_squaring };

struct MixingOptions {
  std::size_t max_players = kMaxMixingPlayers;
  /// Per-start step budget for row iteration before switching to squaring.
  std::uint64_t row_step_cap = 20000;
  /// Squaring keeps the dense 2^n × 2^n matrix in long double.
  std::size_t squaring_max_players = 8;
};

struct MixingResult {
  std::uint64_t t = 0;
  MixingMethod method = MixingMethod::row_iteration;
};

namespace detail {

inline void check_eps(double eps) {
  if (!(eps > 0 && eps < 0.5)) throw ConfigError("eps must lie in (0, 1/2)");
}

// One step μ ↦ μP on the sparse structure.
template <class T>
void sparse_step(const TransitionMatrix<T>& p, const std::vector<T>& in, std::vector<T>& out) {
  const std::size_t n = p.players;
  for (std::size_t y = 0; y < p.states; ++y) {
    T s = in[y] * p.stay[y];
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t x = y ^ bit(i);
      s += in[x] * p.flip[x * n + i];
    }
    out[y] = s;
  }
}

// Largest per-row first hitting time of d_x(t) ≤ eps, or 0 when some row
// exceeds the cap.
inline std::uint64_t mixing_by_rows(const TransitionMatrix<double>& p, const Distribution& pi, double eps,
                                    std::uint64_t cap) {
  std::vector<double> cur(p.states), next(p.states);
  std::uint64_t worst = 0;
  for (std::size_t x = 0; x < p.states; ++x) {
    std::fill(cur.begin(), cur.end(), 0.0);
    cur[x] = 1.0;
    std::uint64_t t = 0;
    while (true) {
      if (t >= cap) return 0;
      sparse_step(p, cur, next);
      cur.swap(next);
      ++t;
      if (tv_distance<double>(cur, pi) <= eps) break;
    }
    worst = std::max(worst, t);
  }
  return worst;
}

template <class T>
T worst_row_distance(const DenseMatrix<T>& m, const std::vector<T>& pi) {
  T worst{};
  for (std::size_t x = 0; x < m.rows(); ++x)
    worst = std::max(worst, tv_distance<T>(std::span<const T>(m.row(x), m.cols()), std::span<const T>(pi)));
  return worst;
}

// Squarings of P until d ≤ eps, then binary descent for the first such t.
inline std::uint64_t mixing_by_squaring(const LogitChain& chain, double eps) {
  auto p = transition_matrix<long double>(chain).dense();
  auto phi = chain.potential_ticks_table();
  const long double den = static_cast<long double>(chain.game().tick_denominator());
  std::vector<long double> pi(phi.size());
  long double z = 0;
  for (std::size_t x = 0; x < phi.size(); ++x) {
    pi[x] = std::exp(-static_cast<long double>(chain.beta()) *
                     static_cast<long double>(phi[x] - chain.min_potential_ticks()) / den);
    z += pi[x];
  }
  for (auto& v : pi) v /= z;
  const long double e = eps;

  std::vector<DenseMatrix<long double>> powers{p};
  while (worst_row_distance(powers.back(), pi) > e) {
    if (powers.size() > 62) throw LimitError("mixing time exceeds 2^62 steps");
    powers.push_back(powers.back() * powers.back());
  }
  if (powers.size() == 1) return 1;
  auto acc = DenseMatrix<long double>::identity(p.rows());
  std::uint64_t t = 0;
  for (std::size_t k = powers.size() - 1; k-- > 0;) {
    auto cand = acc * powers[k];
    if (worst_row_distance(cand, pi) > e) {
      acc = std::move(cand);
      t += std::uint64_t{1} << k;
    }
  }
  return t + 1;
}

}  // namespace detail

/// t_mix(eps) = min{t : max_x ‖P^t(x,·) − π‖_TV ≤ eps}.
///
/// Iterates every start row, stopping each at its first t with d_x(t) ≤ eps
/// (d_x is non-increasing). Rows that exceed the step cap hand over to
/// repeated squaring of the dense matrix in long double.
inline MixingResult mixing_time_details(const LogitChain& chain, double eps = 0.25, const MixingOptions& opt = {}) {
  detail::check_eps(eps);
  chain.require_players(opt.max_players, "exact mixing time");
  auto p = transition_matrix(chain);
  auto pi = gibbs(chain);
  if (std::uint64_t t = detail::mixing_by_rows(p, pi, eps, opt.row_step_cap)) {
    return {t, MixingMethod::row_iteration};
  }
  if (chain.players() > opt.squaring_max_players) {
    throw LimitError("mixing time exceeds " + std::to_string(opt.row_step_cap) +
                     " steps and n is too large for repeated squaring");
  }
  return {detail::mixing_by_squaring(chain, eps), MixingMethod::repeated_squaring};
}

inline std::uint64_t mixing_time_exact(const LogitChain& chain, double eps = 0.25, const MixingOptions& opt = {}) {
  return mixing_time_details(chain, eps, opt).t;
}

// ---------------------------------------------------------------------------
// Spectrum

struct RelaxationResult {
  double t_rel = 0;
  double lambda_2 = 0;
  double lambda_min = 0;
  long double gap = 0;              // 1 − λ*
  std::vector<double> eigenvalues;  // descending, λ_1 = 1 first
};

/// Eigenvalues of D^{1/2} P D^{−1/2}. The solver runs on I − S with
/// S(x,y) = sqrt(P(x,y)P(y,x)) so that small gaps keep their relative
/// accuracy.
inline RelaxationResult relaxation_time(const LogitChain& chain, std::size_t limit = kMaxMixingPlayers) {
  chain.require_players(limit, "relaxation time");
  auto p = transition_matrix<long double>(chain);
  const std::size_t n = p.players;
  DenseMatrix<long double> l(p.states, p.states);
  for (std::size_t x = 0; x < p.states; ++x) {
    l(x, x) = p.off_diagonal_sum(x);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t y = x ^ bit(i);
      l(x, y) = -std::sqrt(p.flip[x * n + i] * p.flip[y * n + i]);
    }
  }
  auto mu = symmetric_eigenvalues(l);  // ascending, mu[0] ≈ 0

  RelaxationResult r;
  r.eigenvalues.reserve(mu.size());
  for (auto m : mu) r.eigenvalues.push_back(static_cast<double>(1.0L - m));
  const long double mu_max = mu.back();
  r.lambda_min = static_cast<double>(1.0L - mu_max);
  long double gap_low = mu_max <= 1 ? mu_max : 2 - mu_max;
  if (mu.size() == 1) {
    r.lambda_2 = 0;
    r.gap = 1;
  } else {
    const long double mu2 = mu[1];
    r.lambda_2 = static_cast<double>(1.0L - mu2);
    long double gap_high = mu2 <= 1 ? mu2 : 2 - mu2;
    r.gap = std::min(gap_high, gap_low);
  }
  if (!(r.gap > 0)) throw InvariantError("spectral gap is not positive");
  r.t_rel = static_cast<double>(1.0L / r.gap);
  return r;
}

struct RelaxationBounds {
  double t_rel = 0;
  double log_inv_pi_min = 0;  // log(1/π_min)
  double lower = 0;           // (t_rel − 1) log 2
  double upper = 0;           // log(4/π_min) t_rel
  double surrogate = 0;       // t_rel (n + 2 + βΦ_max)
};

/// Bounds from an already computed spectrum of `chain`.
inline RelaxationBounds mixing_bounds_from_relaxation(const LogitChain& chain, const RelaxationResult& rel) {
  auto [w, z] = gibbs_weights(chain);
  const double den = static_cast<double>(chain.game().tick_denominator());
  const double spread = static_cast<double>(chain.max_potential_ticks() - chain.min_potential_ticks()) / den;
  RelaxationBounds b;
  b.t_rel = rel.t_rel;
  b.log_inv_pi_min = chain.beta() * spread + std::log(z);
  b.lower = (rel.t_rel - 1) * std::log(2.0);
  b.upper = (std::log(4.0) + b.log_inv_pi_min) * rel.t_rel;
  const double phi_max = static_cast<double>(chain.max_potential_ticks()) / den;
  b.surrogate = rel.t_rel * (static_cast<double>(chain.players()) + 2 + chain.beta() * phi_max);
  return b;
}

inline RelaxationBounds mixing_bounds_from_relaxation(const LogitChain& chain, std::size_t limit = kMaxMixingPlayers) {
  return mixing_bounds_from_relaxation(chain, relaxation_time(chain, limit));
}

// ---------------------------------------------------------------------------
// Canonical paths

inline void require_ordering(std::span<const std::size_t> ordering, std::size_t n) {
  if (ordering.size() != n) throw ConfigError("ordering must list every player once");
  std::vector<bool> seen(n, false);
  for (auto v : ordering) {
    if (v >= n || seen[v]) throw ConfigError("ordering is not a permutation of the players");
    seen[v] = true;
  }
}

/// 2n · max over Hamming edges (z,w) with π(z) ≤ π(w) of
/// Σ_{x,y : (z,w) ∈ Γ_{x,y}} π(x)π(y)|Γ_{x,y}| / π(z), where Γ_{x,y} fixes the
/// differing coordinates of x and y in `ordering` order. Upper-bounds t_rel
/// because the move z → w has probability at least 1/(2n).
inline double congestion_upper_bound(const LogitChain& chain, std::span<const std::size_t> ordering,
                                     std::size_t limit = kMaxMixingPlayers) {
  chain.require_players(limit, "congestion bound");
  const std::size_t n = chain.players();
  require_ordering(ordering, n);
  const auto pi = gibbs(chain);
  const std::size_t states = pi.size();
  // load[(z without bit v)·n + v] for the undirected edge {z, z^v}
  std::vector<double> load(states * n, 0.0);
  for (std::size_t x = 0; x < states; ++x) {
    for (std::size_t y = 0; y < states; ++y) {
      const std::size_t diff = x ^ y;
      if (diff == 0) continue;
      const double w = pi[x] * pi[y] * __builtin_popcountll(diff);
      std::size_t cur = x;
      for (auto v : ordering) {
        if (!(diff & bit(v))) continue;
        load[(cur & ~bit(v)) * n + v] += w;
        cur ^= bit(v);
      }
    }
  }
  double worst = 0;
  for (std::size_t z = 0; z < states; ++z) {
    for (std::size_t v = 0; v < n; ++v) {
      if (z & bit(v)) continue;
      const double lo = std::min(pi[z], pi[z | bit(v)]);
      worst = std::max(worst, load[z * n + v] / lo);
    }
  }
  return 2.0 * static_cast<double>(n) * worst;
}

struct PathInequalityCheck {
  Rational min_slack;  // min of Φ(x) + Φ(y) − Φ(⊥) − Φ(Λ)
  Rational cutwidth_term;  // −2·width(ordering)
  bool holds = false;
  std::size_t edges_checked = 0;
};

/// Checks Φ(x) + Φ(y) − Φ(⊥) − Φ(Λ_ξ(x,y)) ≥ −2·width for every canonical
/// path edge ξ = (x^i, x^{i+1}). ⊥ is the lower-π endpoint of ξ; Λ takes x on
/// the vertices ordered before the moving vertex and y from there on (when
/// ⊥ = x^i), or x through the moving vertex and y after it (when ⊥ = x^{i+1}).
inline PathInequalityCheck canonical_path_inequality(const LogitChain& chain, std::span<const std::size_t> ordering,
                                                     std::size_t limit = 8) {
  chain.require_players(limit, "canonical path check");
  const std::size_t n = chain.players();
  require_ordering(ordering, n);
  auto phi = chain.potential_ticks_table();
  const auto& game = chain.game();
  const std::int64_t width = ordering_width(game.graph(), ordering) * game.edge_factor();
  // before[p]: vertices at positions < p.
  std::vector<std::size_t> before(n + 1, 0);
  for (std::size_t p = 0; p < n; ++p) before[p + 1] = before[p] | bit(ordering[p]);

  const std::size_t states = chain.states();
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  std::size_t checked = 0;
  for (std::size_t x = 0; x < states; ++x) {
    for (std::size_t y = 0; y < states; ++y) {
      const std::size_t diff = x ^ y;
      if (diff == 0) continue;
      std::size_t cur = x;
      for (std::size_t p = 0; p < n; ++p) {
        const std::size_t v = ordering[p];
        if (!(diff & bit(v))) continue;
        const std::size_t nxt = cur ^ bit(v);
        // π(cur) ≤ π(nxt) ⇔ Φ(cur) ≥ Φ(nxt) for β > 0; at β = 0 every π is equal.
        const bool first_case = chain.beta() == 0 || phi[cur] >= phi[nxt];
        std::size_t low, lambda;
        if (first_case) {
          low = cur;
          lambda = (x & before[p]) | (y & ~before[p]);
        } else {
          low = nxt;
          lambda = (x & before[p + 1]) | (y & ~before[p + 1]);
        }
        best = std::min(best, phi[x] + phi[y] - phi[low] - phi[lambda & (states - 1)]);
        ++checked;
        cur = nxt;
      }
    }
  }
  PathInequalityCheck r;
  r.min_slack = game.from_ticks(best);
  r.cutwidth_term = game.from_ticks(-2 * width);
  r.holds = best >= -2 * width;
  r.edges_checked = checked;
  return r;
}

// ---------------------------------------------------------------------------
// Simulation

struct SimulationResult {
  std::vector<Profile> trajectory;     // x_0..x_T when requested
  std::vector<std::uint64_t> visits;   // per state over x_1..x_T, n ≤ 22
  Profile final;
};

/// Each step picks a player uniformly and redraws its strategy from σ_i.
inline SimulationResult simulate(const LogitChain& chain, Profile x0, std::uint64_t steps, std::uint64_t seed,
                                 bool keep_trajectory = false) {
  const std::size_t n = chain.players();
  SeededRng rng(seed);
  SimulationResult r;
  const bool count = n <= kMaxEnumeratedPlayers;
  if (count) r.visits.assign(chain.states(), 0);
  if (keep_trajectory) {
    r.trajectory.reserve(steps + 1);
    r.trajectory.push_back(x0);
  }
  Profile x = x0;
  for (std::uint64_t t = 0; t < steps; ++t) {
    std::size_t i = static_cast<std::size_t>(rng.below(n));
    double u = rng.uniform();
    if (u < chain.switch_prob(x, i)) x = x.flipped(i);
    if (count) ++r.visits[x.bits];
    if (keep_trajectory) r.trajectory.push_back(x);
  }
  r.final = x;
  return r;
}

// ---------------------------------------------------------------------------
// Coupling

struct JointOutcome {
  int x_strategy = 0;
  int y_strategy = 0;
  double prob = 0;
};

/// The four-case joint update of player i, ordered (0,0), (1,1), (0,1), (1,0).
inline std::array<JointOutcome, 4> coupling_kernel(const LogitChain& chain, Profile x, Profile y, std::size_t i) {
  const double zx = update_prob(chain, x, i, 0);
  const double zy = update_prob(chain, y, i, 0);
  return {{{0, 0, std::min(zx, zy)},
           {1, 1, std::min(1 - zx, 1 - zy)},
           {0, 1, std::max(0.0, zx - zy)},
           {1, 0, std::max(0.0, zy - zx)}}};
}

struct CouplingDraw {
  std::size_t player = 0;
  double u = 0;  // uniform in [0,1)
};

inline CouplingDraw draw_coupling(SeededRng& rng, std::size_t n) {
  CouplingDraw d;
  d.player = static_cast<std::size_t>(rng.below(n));
  d.u = rng.uniform();
  return d;
}

inline std::pair<Profile, Profile> coupling_step(const LogitChain& chain, Profile x, Profile y, CouplingDraw draw) {
  if (draw.player >= chain.players()) throw ConfigError("coupling player out of range");
  const std::size_t i = draw.player;
  if (x == y) {
    int s = draw.u < update_prob(chain, x, i, 0) ? 0 : 1;
    return {x.with(i, s), y.with(i, s)};
  }
  auto kernel = coupling_kernel(chain, x, y, i);
  double acc = 0;
  for (const auto& o : kernel) {
    acc += o.prob;
    if (draw.u < acc) return {x.with(i, o.x_strategy), y.with(i, o.y_strategy)};
  }
  // u fell in the rounding slack at the top of [0,1)
  for (auto it = kernel.rbegin(); it != kernel.rend(); ++it)
    if (it->prob > 0) return {x.with(i, it->x_strategy), y.with(i, it->y_strategy)};
  return {x, y};
}

/// E[ρ(X_1, Y_1)] for the coupled step from (x, y), computed exactly.
inline double coupled_expected_distance(const LogitChain& chain, Profile x, Profile y) {
  const std::size_t n = chain.players();
  const int rho = __builtin_popcountll(x.bits ^ y.bits);
  double e = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const int others = rho - (x[i] != y[i] ? 1 : 0);
    double split = 0;
    if (x != y) {
      auto k = coupling_kernel(chain, x, y, i);
      split = k[2].prob + k[3].prob;
    }
    e += others + split;
  }
  return e / static_cast<double>(n);
}

struct ContractionResult {
  double max_expected_distance = 0;
  Profile x;
  std::size_t differing_player = 0;
};

/// Max of E[ρ(X_1,Y_1)] over Hamming-adjacent pairs (x, x^j).
inline ContractionResult contraction_check(const LogitChain& chain, std::size_t limit = kMaxMixingPlayers) {
  chain.require_players(limit, "contraction check");
  ContractionResult r;
  r.max_expected_distance = -1;
  for (std::size_t x = 0; x < chain.states(); ++x) {
    for (std::size_t j = 0; j < chain.players(); ++j) {
      double e = coupled_expected_distance(chain, Profile{x}, Profile{x}.flipped(j));
      if (e > r.max_expected_distance) {
        r.max_expected_distance = e;
        r.x = Profile{x};
        r.differing_player = j;
      }
    }
  }
  return r;
}

/// (log n + log(1/eps))/α with α = −log(max contraction); infinite when the
/// coupling does not contract.
inline double path_coupling_bound(double max_expected_distance, std::size_t n, double eps = 0.25) {
  detail::check_eps(eps);
  if (!(max_expected_distance < 1)) return std::numeric_limits<double>::infinity();
  const double alpha = -std::log(max_expected_distance);
  return (std::log(static_cast<double>(n)) + std::log(1 / eps)) / alpha;
}

/// β below which path coupling contracts: 1/(w_max·Δ_max).
inline double small_beta_threshold(const SocialGraph& g) {
  return 1.0 / (g.to_weight(g.max_weight()).to_double() * static_cast<double>(g.max_degree()));
}

// ---------------------------------------------------------------------------
// Bottleneck

/// B(L) = Q(L, S∖L)/π(L).
inline double bottleneck_ratio(const LogitChain& chain, std::span<const Profile> set) {
  chain.require_players(kMaxBottleneckPlayers, "bottleneck ratio");
  auto [w, z] = gibbs_weights(chain);
  std::vector<bool> in(chain.states(), false);
  for (auto x : set) {
    if (x.bits >= chain.states()) throw ConfigError("profile outside the state space");
    in[x.bits] = true;
  }
  const double inv_n = 1.0 / static_cast<double>(chain.players());
  double mass = 0, flow = 0;
  for (std::size_t x = 0; x < in.size(); ++x) {
    if (!in[x]) continue;
    mass += w[x];
    for (std::size_t i = 0; i < chain.players(); ++i)
      if (!in[x ^ bit(i)]) flow += w[x] * chain.switch_prob(Profile{x}, i) * inv_n;
  }
  if (mass == 0) throw ConfigError("set has zero stationary mass");
  return flow / mass;
}

inline double stationary_mass(const LogitChain& chain, std::span<const Profile> set) {
  auto [w, z] = gibbs_weights(chain);
  double m = 0;
  for (auto x : set) m += w[x.bits];
  return m / z;
}

/// 1/(4B(L)), a lower bound on t_mix(1/4) whenever π(L) ≤ 1/2.
inline double bottleneck_lower_bound(const LogitChain& chain, std::span<const Profile> set) {
  if (stationary_mass(chain, set) > 0.5) throw ConfigError("bottleneck set must have stationary mass at most 1/2");
  return 1.0 / (4.0 * bottleneck_ratio(chain, set));
}

struct BottleneckReport {
  Rational cutwidth;
  Rational b_star;
  bool b_star_exact = true;  // false: no profile discords exactly CW; fallback range used
  Rational threshold;        // b* + CW
  int endpoint = 0;          // R grown from all-0 or all-1
  Rational b_endpoint;
  std::vector<Profile> R;
  std::vector<Profile> boundary;
  std::size_t boundary_edges = 0;
  double pi_R0 = 0;
  double pi_R1 = 0;
  double pi_R = 0;
  double Q_out = 0;
  double B_R = 0;
  double lower_bound = 0;  // 1/(4 B_R)
  double B_R_upper = 0;  // n |∂R| e^{−β(CW + b* − b(endpoint))}
};

namespace detail {

inline std::vector<std::size_t> grow_below(std::span<const std::int64_t> phi, std::size_t n, std::size_t start,
                                           std::int64_t threshold) {
  std::vector<std::size_t> out;
  if (phi[start] >= threshold) return out;
  std::vector<bool> seen(phi.size(), false);
  std::deque<std::size_t> queue{start};
  seen[start] = true;
  while (!queue.empty()) {
    std::size_t x = queue.front();
    queue.pop_front();
    out.push_back(x);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t y = x ^ bit(i);
      if (!seen[y] && phi[y] < threshold) {
        seen[y] = true;
        queue.push_back(y);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace detail

/// R_0 (R_1): profiles joined to all-0 (all-1) by a Hamming path on which
/// Φ < b* + CW. R is R_0 when π(R_0) ≤ 1/2 and either π(R_1) > 1/2 or
/// Φ(0) ≤ Φ(1); otherwise R_1.
inline BottleneckReport build_R(const LogitChain& chain, std::size_t limit = kMaxBottleneckPlayers) {
  chain.require_players(limit, "bottleneck construction");
  const auto& game = chain.game();
  const std::size_t n = chain.players();
  const std::size_t states = chain.states();
  auto phi = chain.potential_ticks_table();
  const std::int64_t ef = game.edge_factor();

  const std::int64_t cw = cutwidth_exact(game.graph(), limit).value;
  std::int64_t w_max = game.graph().max_weight();
  std::int64_t best_b = std::numeric_limits<std::int64_t>::max();
  std::int64_t fallback_b = best_b;
  for (std::size_t x = 0; x < states; ++x) {
    const std::int64_t d = discord_weight(game, Profile{x});
    const std::int64_t b = phi[x] - ef * d;
    if (d == cw) best_b = std::min(best_b, b);
    if (d >= cw && d < cw + w_max) fallback_b = std::min(fallback_b, b);
  }
  BottleneckReport r;
  r.b_star_exact = best_b != std::numeric_limits<std::int64_t>::max();
  const std::int64_t b_star = r.b_star_exact ? best_b : fallback_b;
  if (b_star == std::numeric_limits<std::int64_t>::max()) throw InvariantError("no profile reaches the cutwidth");
  r.cutwidth = game.graph().to_weight(cw);
  r.b_star = game.from_ticks(b_star);
  const std::int64_t threshold = b_star + cw * ef;
  r.threshold = game.from_ticks(threshold);

  auto [w, z] = gibbs_weights(chain);
  auto mass = [&](const std::vector<std::size_t>& set) {
    double m = 0;
    for (auto x : set) m += w[x];
    return m / z;
  };
  const std::size_t ones = states - 1;
  auto r0 = detail::grow_below(phi, n, 0, threshold);
  auto r1 = detail::grow_below(phi, n, ones, threshold);
  r.pi_R0 = mass(r0);
  r.pi_R1 = mass(r1);
  const bool r0_ok = !r0.empty() && r.pi_R0 <= 0.5;
  const bool r1_ok = !r1.empty() && r.pi_R1 <= 0.5;
  if (r0_ok && (!r1_ok || phi[0] <= phi[ones])) {
    r.endpoint = 0;
  } else if (r1_ok) {
    r.endpoint = 1;
  } else {
    throw ConfigError("neither R_0 nor R_1 has stationary mass at most 1/2");
  }
  const auto& chosen = r.endpoint == 0 ? r0 : r1;
  const std::size_t start = r.endpoint == 0 ? 0 : ones;
  r.b_endpoint = game.from_ticks(phi[start] - ef * discord_weight(game, Profile{start}));
  r.pi_R = r.endpoint == 0 ? r.pi_R0 : r.pi_R1;

  std::vector<bool> in(states, false);
  for (auto x : chosen) in[x] = true;
  const double inv_n = 1.0 / static_cast<double>(n);
  double flow = 0;
  double mass_r = 0;
  for (auto x : chosen) {
    r.R.push_back(Profile{x});
    mass_r += w[x];
    bool on_boundary = false;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t y = x ^ bit(i);
      if (in[y]) continue;
      on_boundary = true;
      ++r.boundary_edges;
      flow += w[x] * chain.switch_prob(Profile{x}, i) * inv_n;
    }
    if (on_boundary) r.boundary.push_back(Profile{x});
  }
  r.Q_out = flow / z;
  r.B_R = flow / mass_r;
  r.lower_bound = 1.0 / (4.0 * r.B_R);
  const double exponent = (r.cutwidth + r.b_star - r.b_endpoint).to_double();
  r.B_R_upper = static_cast<double>(n) * static_cast<double>(r.boundary.size()) * std::exp(-chain.beta() * exponent);
  return r;
}

}  // namespace opinion
