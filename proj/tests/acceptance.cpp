// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "opinion/opinion.hpp"
#include "oracles.hpp"

using namespace opinion;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

OpinionGame unit_game(std::mt19937_64& rng, std::size_t n) {
  auto g = oracle::random_connected_graph(rng, n, 0, 0.3);
  std::vector<WeightedEdge> unit;
  for (const auto& e : g.edges()) unit.push_back({e.u, e.v, Rational(1)});
  return OpinionGame(SocialGraph(n, unit), oracle::random_beliefs(rng, n));
}

Profile random_profile(std::mt19937_64& rng, std::size_t n) { return Profile{rng() & ((std::uint64_t{1} << n) - 1)}; }

// 1 ------------------------------------------------------------------------
Outcome potential_exactness() {
  std::mt19937_64 rng(101);
  std::size_t checks = 0, bad = 0, oracle_checks = 0;
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 2 + static_cast<std::size_t>(rep % 9);
    auto game = oracle::random_game(rng, n, rep % 3);
    auto phi = potential_table(game);
    for (std::uint64_t s = 0; s < phi.size(); ++s) {
      Profile x{s};
      for (std::size_t i = 0; i < n; ++i) {
        Profile y = x.flipped(i);
        Rational dphi = game.from_ticks(phi[y.bits] - phi[x.bits]);
        Rational dc = cost(game, y, i) - cost(game, x, i);
        ++checks;
        if (dphi != dc) ++bad;
      }
    }
    // independent rational arithmetic on a sample of profiles
    for (int k = 0; k < 24; ++k) {
      Profile x = random_profile(rng, n);
      std::size_t i = rng() % n;
      Profile y = x.flipped(i);
      ++oracle_checks;
      Rational dphi = oracle::potential(game, y) - oracle::potential(game, x);
      if (dphi != oracle::cost(game, y, i) - oracle::cost(game, x, i)) ++bad;
      if (potential(game, x) != oracle::potential(game, x)) ++bad;
    }
  }
  return {bad == 0, std::to_string(checks) + " deviations + " + std::to_string(oracle_checks) +
                        " oracle samples, mismatches=" + std::to_string(bad)};
}

// 2 ------------------------------------------------------------------------
Outcome nash_characterization() {
  std::mt19937_64 rng(202);
  std::size_t profiles = 0, disagreements = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 2 + static_cast<std::size_t>(rep % 9);
    auto game = oracle::random_game(rng, n, rep % 3);
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << n); ++s) {
      Profile x{s};
      bool by_condition = true;
      for (std::size_t i = 0; i < n; ++i) by_condition = by_condition && nash_condition(game, x, i);
      ++profiles;
      if (by_condition != oracle::nash(game, x)) ++disagreements;
    }
  }
  return {disagreements == 0,
          std::to_string(profiles) + " profiles, disagreements=" + std::to_string(disagreements)};
}

// 3 ------------------------------------------------------------------------
Outcome price_instances() {
  std::vector<WeightedEdge> edges;
  for (std::size_t i = 1; i <= 10; ++i) edges.push_back({0, i, Rational(1, 10)});
  std::vector<Rational> beliefs(11, Rational(1));
  beliefs[0] = beliefs[1] = Rational(0);
  OpinionGame star(SocialGraph(11, edges), beliefs);
  auto s = poa_pos(star);
  const Rational formula(2 * (10 - 1), 10 + 2);  // 2(n−1)/(n+2), n leaves
  bool ok = s.nash_profiles.size() == 1 && s.optimum_cost == Rational(12, 10) && !s.pos.infinite &&
            s.pos.value == Rational(3, 2) && s.pos.value == formula;

  auto clique = uniform_belief_game(make_clique(3, Rational(1)), Rational(0));
  auto c = poa_pos(clique);
  ok = ok && c.poa.infinite && !c.pos.infinite && c.pos.value == Rational(1);

  std::mt19937_64 rng(303);
  int optimum_nash = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 2 + static_cast<std::size_t>(rep % 9);
    auto game = oracle::random_game(rng, n, 0);
    auto r = poa_pos(game);
    if (oracle::nash(game, r.optimum) && !r.pos.infinite && r.pos.value == Rational(1)) ++optimum_nash;
  }
  ok = ok && optimum_nash == 100;
  return {ok, "star: nash=" + std::to_string(s.nash_profiles.size()) + " opt=" + s.optimum_cost.str() +
                  " pos=" + s.pos.str() + "; clique poa=" + c.poa.str() + "; integer games with Nash optimum " +
                  std::to_string(optimum_nash) + "/100"};
}

// 4 ------------------------------------------------------------------------
Outcome best_response_convergence() {
  std::mt19937_64 rng(404);
  int bad_drop = 0, over = 0, runs = 0, unconverged = 0;
  double worst_ratio = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const std::size_t n = 3 + static_cast<std::size_t>(seed % 10);
    auto game = canonicalize_beliefs(unit_game(rng, n));
    auto t = run_best_response(game, random_profile(rng, n), Scheduler::uniform_random(seed), 1000000);
    ++runs;
    if (!t.converged) ++unconverged;
    if (!certify_drop(game, t)) ++bad_drop;
    const double bound = 2.0 * static_cast<double>(game.graph().edges().size() + n);
    worst_ratio = std::max(worst_ratio, static_cast<double>(t.flips()) / bound);
    if (static_cast<double>(t.flips()) > bound) ++over;
  }
  for (int k = 1; k <= 2; ++k) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const std::size_t n = 3 + static_cast<std::size_t>(seed % 8);
      OpinionGame base(oracle::random_connected_graph(rng, n, k), oracle::random_beliefs(rng, n));
      auto game = integer_version(canonicalize_beliefs(base));
      auto t = run_best_response(game, random_profile(rng, n), Scheduler::uniform_random(1000 * k + seed), 10000000);
      ++runs;
      if (!t.converged) ++unconverged;
      // 2·10^k(ΣW + n) with ΣW in original units
      const std::int64_t bound = 2 * (base.graph().total_weight() + base.graph().scale() * static_cast<std::int64_t>(n));
      worst_ratio = std::max(worst_ratio, static_cast<double>(t.flips()) / static_cast<double>(bound));
      if (static_cast<std::int64_t>(t.flips()) > bound) ++over;
    }
  }
  return {bad_drop == 0 && over == 0 && unconverged == 0,
          std::to_string(runs) + " runs, drop<1/2: " + std::to_string(bad_drop) + ", over bound: " +
              std::to_string(over) + ", max flips/bound " + fmt("%.3f", worst_ratio)};
}

// 5 ------------------------------------------------------------------------
Outcome exponential_gadget() {
  bool ok = true;
  std::string detail;
  std::size_t total1 = 0, total4 = 0;
  for (std::size_t g = 1; g <= 4; ++g) {
    auto chain = make_gadget_chain(g, Rational(1), 9);
    auto game = make_gadget_game(chain);
    ValidatedSchedule v;
    try {
      v = validated_gadget_schedule(chain, game);
    } catch (const InvariantError& e) {
      return {false, std::string("g=") + std::to_string(g) + ": " + e.what()};
    }
    // The start profile already holds G_1's switch-on (B_1 = D_1 = 1).
    const std::size_t pre_applied = g == 1 ? 2 : 0;
    const std::size_t measured = v.schedule.flips_per_gadget[g] + pre_applied;
    const std::size_t expected = (std::size_t{1} << (g - 1)) * (2 + 10);
    const std::size_t cycles = std::size_t{1} << (g - 1);
    const bool cycles_ok = v.schedule.switch_off_cycles[g] == cycles &&
                           (g == 1 || v.schedule.switch_on_cycles[g] == cycles);
    ok = ok && measured == expected && cycles_ok;
    detail += "G_" + std::to_string(g) + "=" + std::to_string(measured) + "/" + std::to_string(expected) + " ";
    if (g == 1) total1 = v.trace.flips();
    if (g == 4) total4 = v.trace.flips();
  }
  const double factor = static_cast<double>(total4) / static_cast<double>(total1);
  ok = ok && factor >= 6;
  return {ok, detail + "(G_1 counts its pre-applied switch-on); total g=4/g=1 = " + std::to_string(total4) + "/" +
                  std::to_string(total1) + " = " + fmt("%.1f", factor)};
}

// 6 ------------------------------------------------------------------------
Outcome cutwidth() {
  std::mt19937_64 rng(606);
  int bad = 0;
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = 2 + static_cast<std::size_t>(rep % 7);
    auto g = oracle::random_connected_graph(rng, n, rep % 3, 0.4);
    auto r = cutwidth_exact(g);
    if (r.value != oracle::cutwidth_brute_force(g) || ordering_width(g, r.ordering) != r.value) ++bad;
  }
  for (std::size_t m = 1; m <= 4; ++m)
    if (cutwidth_exact(make_complete_bipartite(m, Rational(1))).value != static_cast<std::int64_t>((m * m + 1) / 2)) ++bad;
  for (std::size_t n = 2; n <= 8; ++n)
    if (cutwidth_exact(make_clique(n, Rational(1))).value != static_cast<std::int64_t>(n * n / 4)) ++bad;
  return {bad == 0, "50 random graphs vs brute force, K_{m,m} m<=4, K_n n<=8; mismatches=" + std::to_string(bad)};
}

// 7 ------------------------------------------------------------------------
Outcome reversibility() {
  std::mt19937_64 rng(707);
  std::uniform_real_distribution<double> beta(0.0, 8.0);
  double worst = 0, worst_entry = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 2 + static_cast<std::size_t>(rep % 7);
    auto game = oracle::random_game(rng, n, rep % 3);
    const double b = rep == 0 ? 0.0 : rep == 1 ? 8.0 : beta(rng);
    LogitChain chain(game, b);
    auto p = transition_matrix(chain).dense();
    worst = std::max(worst, max_detailed_balance_violation(p, gibbs(chain)));
    auto q = oracle::transition_matrix(game, b);
    for (std::size_t x = 0; x < p.rows(); ++x)
      for (std::size_t y = 0; y < p.cols(); ++y) worst_entry = std::max(worst_entry, std::abs(p(x, y) - q(x, y)));
  }
  return {worst <= 1e-12 && worst_entry <= 1e-12,
          "max |pi(x)P(x,y) - pi(y)P(y,x)| = " + fmt("%.3g", worst) + ", max |P - P_oracle| = " + fmt("%.3g", worst_entry)};
}

// 8 ------------------------------------------------------------------------
Outcome exact_mixing() {
  bool ok = true;
  std::string detail;
  for (std::size_t n = 4; n <= 10; ++n) {
    auto game = uniform_belief_game(make_clique(n, Rational(1)), Rational(1, 2));
    const auto t = mixing_time_exact(LogitChain(game, 0.0));
    const auto o = oracle::mixing_time_by_powers(game, 0.0, 0.25);
    const double ratio = static_cast<double>(t) / (static_cast<double>(n) * std::log(static_cast<double>(n)));
    ok = ok && t == o && ratio >= 0.2 && ratio <= 3;
    detail += "n=" + std::to_string(n) + ":" + std::to_string(t) + (t == o ? "" : "!=" + std::to_string(o)) + "(" +
              fmt("%.2f", ratio) + ") ";
  }
  return {ok, "t_mix (t/(n ln n)) " + detail};
}

std::vector<SocialGraph> coupling_graphs() {
  std::vector<SocialGraph> out;
  for (std::size_t n = 4; n <= 10; ++n) {
    out.push_back(make_clique(n, Rational(1)));
    out.push_back(make_path(n, Rational(1, 2)));
    out.push_back(make_cycle(n, Rational(1)));
    out.push_back(make_star(n - 1, Rational(3, 10)));
  }
  for (std::size_t m = 2; m <= 5; ++m) out.push_back(make_complete_bipartite(m, Rational(1)));
  std::mt19937_64 rng(909);
  for (int rep = 0; rep < 14; ++rep) out.push_back(oracle::random_connected_graph(rng, 4 + rep % 7, rep % 3));
  return out;
}

// 9 ------------------------------------------------------------------------
Outcome coupling() {
  std::mt19937_64 rng(910);
  bool ok = true;
  int instances = 0, violated_at_10x = 0;
  double worst_margin = -1;
  for (const auto& g : coupling_graphs()) {
    const std::size_t n = g.size();
    OpinionGame game(g, oracle::random_beliefs(rng, n));
    const double thr = small_beta_threshold(g);
    const double target = std::exp(-1.0 / (3.0 * static_cast<double>(n)));
    for (double b : {thr / 4, thr / 2, thr}) {
      auto c = contraction_check(LogitChain(game, b));
      ++instances;
      worst_margin = std::max(worst_margin, c.max_expected_distance - target);
      if (c.max_expected_distance > target) ok = false;
    }
    if (contraction_check(LogitChain(game, 10 * thr)).max_expected_distance > target) ++violated_at_10x;
  }
  ok = ok && violated_at_10x >= 1;
  return {ok, std::to_string(instances) + " instances at beta <= 1/(w_max D_max), max E[rho] - e^{-1/(3n)} = " +
                  fmt("%.3g", worst_margin) + "; violated at 10x threshold on " + std::to_string(violated_at_10x) +
                  " graphs"};
}

struct ChainCase {
  OpinionGame game;
  double beta;
};

std::vector<ChainCase> spectral_cases() {
  std::vector<ChainCase> out;
  std::mt19937_64 rng(1010);
  for (std::size_t n = 3; n <= 8; ++n)
    for (double b : {0.0, 0.5, 1.0, 2.0})
      out.push_back({uniform_belief_game(make_clique(n, Rational(1)), Rational(1, 2)), b});
  for (std::size_t m = 2; m <= 4; ++m)
    for (double b : {0.5, 1.0, 2.0})
      out.push_back({uniform_belief_game(make_complete_bipartite(m, Rational(1)), Rational(1, 2)), b});
  for (int rep = 0; rep < 24; ++rep)
    out.push_back({oracle::random_game(rng, 3 + rep % 6, rep % 3), 0.25 * (rep % 9)});
  for (std::size_t n = 9; n <= 10; ++n) {
    out.push_back({oracle::random_game(rng, n, 1), 0.5});
    out.push_back({uniform_belief_game(make_clique(n, Rational(1)), Rational(1, 2)), 0.3});
  }
  return out;
}

// 10 -----------------------------------------------------------------------
Outcome spectral_sandwich() {
  bool ok = true;
  int checked = 0;
  double min_lambda = 1, worst_low = 0, worst_high = 0;
  for (const auto& c : spectral_cases()) {
    LogitChain chain(c.game, c.beta);
    auto rel = relaxation_time(chain);
    auto b = mixing_bounds_from_relaxation(chain, rel);
    const double t = static_cast<double>(mixing_time_exact(chain));
    ++checked;
    min_lambda = std::min(min_lambda, rel.lambda_min);
    worst_low = std::max(worst_low, b.lower / t);
    worst_high = std::max(worst_high, t / b.upper);
    if (!(b.lower <= t && t <= b.upper) || rel.lambda_min < -1e-10) ok = false;
  }
  return {ok, std::to_string(checked) + " chains, max lower/t_mix = " + fmt("%.3f", worst_low) +
                  ", max t_mix/upper = " + fmt("%.3f", worst_high) + ", min lambda_min = " + fmt("%.3g", min_lambda)};
}

// 11 -----------------------------------------------------------------------
Outcome congestion() {
  bool ok = true;
  int checked = 0;
  std::size_t edges = 0;
  double worst_low = 0, worst_high = 0;
  std::vector<OpinionGame> games;
  for (std::size_t n = 3; n <= 8; ++n) games.push_back(uniform_belief_game(make_clique(n, Rational(1)), Rational(1, 2)));
  for (std::size_t m = 2; m <= 4; ++m)
    games.push_back(uniform_belief_game(make_complete_bipartite(m, Rational(1)), Rational(1, 2)));
  for (const auto& game : games) {
    auto cw = cutwidth_exact(game.graph());
    const double cw_value = game.graph().to_weight(cw.value).to_double();
    const double n = static_cast<double>(game.players());
    for (double b : {0.5, 1.0, 2.0}) {
      LogitChain chain(game, b);
      const double t_rel = relaxation_time(chain).t_rel;
      const double bound = congestion_upper_bound(chain, cw.ordering);
      const double cap = 2 * n * n * std::exp(2 * b * cw_value);
      auto path = canonical_path_inequality(chain, cw.ordering);
      ++checked;
      edges += path.edges_checked;
      worst_low = std::max(worst_low, t_rel / bound);
      worst_high = std::max(worst_high, bound / cap);
      if (!(t_rel <= bound * (1 + 1e-9) && bound <= cap) || !path.holds) ok = false;
    }
  }
  return {ok, std::to_string(checked) + " chains, max t_rel/bound = " + fmt("%.3f", worst_low) +
                  ", max bound/(2n^2 e^{2 beta CW}) = " + fmt("%.3g", worst_high) + ", path inequality on " +
                  std::to_string(edges) + " edges"};
}

// 12 -----------------------------------------------------------------------
Outcome bottleneck() {
  bool ok = true;
  int applied = 0, beyond = 0;
  double worst = 0;
  std::vector<OpinionGame> games;
  for (std::size_t n = 3; n <= 8; ++n) games.push_back(uniform_belief_game(make_clique(n, Rational(1)), Rational(1, 2)));
  for (std::size_t m = 2; m <= 4; ++m)
    games.push_back(uniform_belief_game(make_complete_bipartite(m, Rational(1)), Rational(1, 2)));
  std::mt19937_64 rng(1212);
  for (int rep = 0; rep < 12; ++rep) games.push_back(oracle::random_game(rng, 3 + rep % 6, rep % 3));
  for (const auto& game : games) {
    for (double b : {0.5, 1.0, 2.0, 3.0}) {
      LogitChain chain(game, b);
      BottleneckReport r;
      try {
        r = build_R(chain);
      } catch (const ConfigError&) {
        continue;  // neither R_0 nor R_1 has mass at most 1/2
      }
      double t = 0;
      try {
        t = static_cast<double>(mixing_time_exact(chain));
      } catch (const LimitError&) {
        ++beyond;  // t_mix past 2^62 steps, no exact value to compare with
        continue;
      }
      ++applied;
      worst = std::max(worst, r.lower_bound / t);
      if (r.lower_bound > t || r.B_R > r.B_R_upper * (1 + 1e-12)) ok = false;
    }
  }

  auto clique = uniform_belief_game(make_clique(6, Rational(1)), Rational(1, 2));
  std::vector<double> xs{1, 2, 3, 4}, ys;
  for (double b : xs) ys.push_back(std::log(static_cast<double>(mixing_time_exact(LogitChain(clique, b)))));
  const double mx = 2.5;
  double my = 0, sxy = 0, sxx = 0;
  for (double y : ys) my += y / 4;
  for (std::size_t k = 0; k < 4; ++k) {
    sxy += (xs[k] - mx) * (ys[k] - my);
    sxx += (xs[k] - mx) * (xs[k] - mx);
  }
  const double slope = sxy / sxx;
  auto r = build_R(LogitChain(clique, 1.0));
  const double predicted = (r.cutwidth + r.b_star - r.b_endpoint).to_double();
  ok = ok && slope > 0 && slope >= predicted / 3 && slope <= predicted * 3;
  return {ok, std::to_string(applied) + " chains with 1/(4B(R)) <= t_mix (max ratio " + fmt("%.3f", worst) + ", " +
                  std::to_string(beyond) + " beyond exact range); clique-6 slope of ln t_mix = " + fmt("%.3f", slope) + " vs CW + b* - b(0) = " +
                  fmt("%.3f", predicted)};
}

// 13 -----------------------------------------------------------------------
Outcome boundary_size() {
  bool ok = true;
  std::string detail;
  for (std::size_t m = 2; m <= 4; ++m) {
    auto game = uniform_belief_game(make_complete_bipartite(m, Rational(1)), Rational(1, 2));
    auto r = build_R(LogitChain(game, 1.0));
    const double cap = std::exp(3.0 * static_cast<double>(m));
    ok = ok && static_cast<double>(r.boundary.size()) <= cap && !r.boundary.empty();
    detail += "m=" + std::to_string(m) + ": |dR|=" + std::to_string(r.boundary.size()) + " <= " + fmt("%.0f", cap) + " ";
  }
  return {ok, detail};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
    double budget_s;
  };
  const std::vector<Criterion> criteria{
      {"potential exactness", potential_exactness, 30},
      {"Nash characterization", nash_characterization, 0},
      {"PoA/PoS instances", price_instances, 0},
      {"best-response convergence", best_response_convergence, 60},
      {"exponential gadget schedule", exponential_gadget, 0},
      {"cutwidth DP", cutwidth, 60},
      {"Gibbs reversibility", reversibility, 0},
      {"exact mixing at beta=0", exact_mixing, 0},
      {"coupling contraction", coupling, 0},
      {"spectral sandwich", spectral_sandwich, 0},
      {"congestion bound", congestion, 0},
      {"bottleneck lower bound", bottleneck, 300},
      {"boundary size", boundary_size, 0},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (criteria[k].budget_s > 0 && secs > criteria[k].budget_s) {
      o.pass = false;
      o.detail += "; over time budget " + fmt("%.0f s", criteria[k].budget_s);
    }
    std::printf("%s %2zu %s: %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].name, o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
