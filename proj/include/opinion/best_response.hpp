#pragma once

// Best-response dynamics: schedulers, traces, potential-drop certification and
// the adversarial schedule on the 6-gadget chain.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "opinion/errors.hpp"
#include "opinion/game.hpp"
#include "opinion/graph.hpp"
#include "opinion/random.hpp"
#include "opinion/rational.hpp"

namespace opinion {

/// New strategy if flipping strictly lowers the player's cost. Ties stay.
inline std::optional<int> best_response(const OpinionGame& game, Profile x, std::size_t i) {
  if (flip_gain_ticks(game, x, i) > 0) return 1 - x[i];
  return std::nullopt;
}

struct Scheduler {
  enum class Kind { round_robin, uniform_random, fixed_sequence };

  Kind kind = Kind::round_robin;
  std::uint64_t seed = 0;
  std::vector<std::size_t> sequence;

  static Scheduler round_robin() { return {}; }
  static Scheduler uniform_random(std::uint64_t seed) { return {Kind::uniform_random, seed, {}}; }
  static Scheduler fixed_sequence(std::vector<std::size_t> players) {
    return {Kind::fixed_sequence, 0, std::move(players)};
  }
};

struct TraceStep {
  std::size_t t = 0;  // 1-based flip counter
  std::size_t mover = 0;
  int from = 0;
  int to = 0;
  Rational potential;  // Φ after the step
};

struct Trace {
  Profile start;
  std::vector<TraceStep> steps;
  bool converged = false;
  Profile final;

  std::size_t flips() const { return steps.size(); }
};

inline bool all_stable(const OpinionGame& game, Profile x) {
  for (std::size_t i = 0; i < game.players(); ++i)
    if (flip_gain_ticks(game, x, i) > 0) return false;
  return true;
}

/// Runs best-response dynamics from `start`. Only actual flips count as
/// steps; a scheduled player with no strictly better strategy is skipped.
///
/// round_robin converges after a full pass without flips. uniform_random and
/// fixed_sequence declare convergence when an explicit all-player check finds
/// no improving move.
inline Trace run_best_response(const OpinionGame& game, Profile start, const Scheduler& sched,
                               std::size_t max_steps) {
  if (max_steps < 1) throw ConfigError("max_steps must be at least 1");
  const std::size_t n = game.players();
  for (auto p : sched.sequence)
    if (p >= n) throw ConfigError("scheduled player " + std::to_string(p) + " out of range");

  Trace trace;
  trace.start = start;
  Profile x = start;
  std::int64_t phi = potential_ticks(game, x);

  auto apply = [&](std::size_t i) {
    std::int64_t gain = flip_gain_ticks(game, x, i);
    if (gain <= 0) return false;
    int from = x[i];
    x = x.flipped(i);
    phi -= gain;
    trace.steps.push_back({trace.steps.size() + 1, i, from, 1 - from, game.from_ticks(phi)});
    return true;
  };

  switch (sched.kind) {
    case Scheduler::Kind::round_robin: {
      std::size_t quiet = 0;
      std::size_t i = 0;
      while (quiet < n && trace.steps.size() < max_steps) {
        quiet = apply(i) ? 0 : quiet + 1;
        i = (i + 1) % n;
      }
      trace.converged = quiet >= n || all_stable(game, x);
      break;
    }
    case Scheduler::Kind::uniform_random: {
      SeededRng rng(sched.seed);
      while (trace.steps.size() < max_steps) {
        if (!apply(static_cast<std::size_t>(rng.below(n))) && all_stable(game, x)) break;
      }
      trace.converged = all_stable(game, x);
      break;
    }
    case Scheduler::Kind::fixed_sequence: {
      for (auto i : sched.sequence) {
        if (trace.steps.size() >= max_steps) break;
        apply(i);
      }
      trace.converged = all_stable(game, x);
      break;
    }
  }
  trace.final = x;
  return trace;
}

/// True iff every flip of the trace lowered Φ by at least 1/2 (in the game's
/// own units, so 10^k-scaled for integer versions). Meaningful on
/// canonicalized games.
inline bool certify_drop(const OpinionGame& game, const Trace& trace) {
  Profile x = trace.start;
  const std::int64_t half = game.tick_denominator() / 2;
  for (const auto& step : trace.steps) {
    if (step.mover >= game.players() || x[step.mover] != step.from) return false;
    if (flip_gain_ticks(game, x, step.mover) < half) return false;
    x = x.flipped(step.mover);
  }
  return true;
}

/// Smallest Φ drop over the trace's flips.
inline std::optional<Rational> min_drop(const OpinionGame& game, const Trace& trace) {
  std::optional<std::int64_t> least;
  Profile x = trace.start;
  for (const auto& step : trace.steps) {
    std::int64_t gain = flip_gain_ticks(game, x, step.mover);
    if (!least || gain < *least) least = gain;
    x = x.flipped(step.mover);
  }
  if (!least) return std::nullopt;
  return game.from_ticks(*least);
}

// ---------------------------------------------------------------------------
// Exponential schedule on the gadget chain

/// Every gadget player believes 1/2.
inline OpinionGame make_gadget_game(const GadgetChain& chain) {
  return uniform_belief_game(chain.graph, Rational(1, 2));
}

struct ExpectedMove {
  std::size_t mover = 0;
  int from = 0;
  int to = 0;
};

struct AdversarialSchedule {
  Profile start;
  std::vector<ExpectedMove> moves;
  std::vector<std::size_t> flips_per_gadget;     // index 0 is the outer switch
  std::vector<std::size_t> switch_on_cycles;     // per gadget
  std::vector<std::size_t> switch_off_cycles;    // per gadget

  Scheduler scheduler() const {
    std::vector<std::size_t> seq;
    seq.reserve(moves.size());
    for (const auto& m : moves) seq.push_back(m.mover);
    return Scheduler::fixed_sequence(std::move(seq));
  }
};

namespace detail {

class GadgetScheduleBuilder {
 public:
  explicit GadgetScheduleBuilder(const GadgetChain& chain) : chain_(chain) {
    out_.flips_per_gadget.assign(chain.gadgets + 1, 0);
    out_.switch_on_cycles.assign(chain.gadgets + 1, 0);
    out_.switch_off_cycles.assign(chain.gadgets + 1, 0);
  }

  AdversarialSchedule build(int switch_state) {
    // B_1, D_1 and every F_i start at 1; everybody else at 0.
    x_ = Profile{0}.with(0, switch_state);
    x_ = x_.with(chain_.player(1, 'B'), 1).with(chain_.player(1, 'D'), 1);
    for (std::size_t i = 1; i <= chain_.gadgets; ++i) x_ = x_.with(chain_.player(i, 'F'), 1);
    out_.start = x_;
    switch_off(1);
    return std::move(out_);
  }

 private:
  void move(std::size_t gadget, char role, int to) {
    std::size_t p = chain_.player(gadget, role);
    out_.moves.push_back({p, x_[p], to});
    x_ = x_.with(p, to);
    ++out_.flips_per_gadget[gadget];
    if (role == 'A' && gadget < chain_.gadgets) {
      if (to == 1) switch_on(gadget + 1);
      else switch_off(gadget + 1);
    }
  }

  // (0,0,0,0,0,1) -> (0,1,0,0,0,1) -> (0,1,0,1,0,1)
  void switch_on(std::size_t g) {
    ++out_.switch_on_cycles[g];
    move(g, 'B', 1);
    move(g, 'D', 1);
  }

  // Ten moves from (0,1,0,1,0,1) back to (0,0,0,0,0,1); A goes 0→1→0→1→0.
  void switch_off(std::size_t g) {
    ++out_.switch_off_cycles[g];
    move(g, 'A', 1);
    move(g, 'B', 0);
    move(g, 'A', 0);
    move(g, 'C', 1);
    move(g, 'B', 1);
    move(g, 'A', 1);
    move(g, 'D', 0);
    move(g, 'C', 0);
    move(g, 'B', 0);
    move(g, 'A', 0);
  }

  const GadgetChain& chain_;
  Profile x_;
  AdversarialSchedule out_;
};

}  // namespace detail

/// Schedule generated from the cycle grammar: G_1 runs a switch-off cycle and
/// every flip of A_i triggers the matching cycle of G_{i+1} (0→1 switch-on,
/// 1→0 switch-off). The outer switch A_0 starts at `switch_state`.
inline AdversarialSchedule gadget_adversarial_sequence(const GadgetChain& chain, int switch_state = 0) {
  return detail::GadgetScheduleBuilder(chain).build(switch_state);
}

/// Replays the schedule and requires every move to be a strict best response
/// that matches the expected strategy change. Throws InvariantError naming the
/// first offending move.
inline Trace replay_adversarial(const OpinionGame& game, const AdversarialSchedule& schedule) {
  for (std::size_t i = 0; i < game.players(); ++i) {
    if (game.belief(i) != Rational(1, 2)) throw ConfigError("gadget schedule requires every belief to be 1/2");
  }
  Trace trace;
  trace.start = schedule.start;
  Profile x = schedule.start;
  std::int64_t phi = potential_ticks(game, x);
  for (std::size_t t = 0; t < schedule.moves.size(); ++t) {
    const auto& m = schedule.moves[t];
    if (x[m.mover] != m.from) {
      throw InvariantError("move " + std::to_string(t + 1) + ": player " + std::to_string(m.mover) +
                           " is not playing the expected strategy");
    }
    auto br = best_response(game, x, m.mover);
    if (!br || *br != m.to) {
      throw InvariantError("move " + std::to_string(t + 1) + ": player " + std::to_string(m.mover) +
                           " flipping " + std::to_string(m.from) + "->" + std::to_string(m.to) +
                           " is not a strict best response");
    }
    phi -= flip_gain_ticks(game, x, m.mover);
    x = x.flipped(m.mover);
    trace.steps.push_back({t + 1, m.mover, m.from, m.to, game.from_ticks(phi)});
  }
  trace.final = x;
  trace.converged = all_stable(game, x);
  return trace;
}

struct ValidatedSchedule {
  AdversarialSchedule schedule;
  Trace trace;
};

/// Builds the schedule and discovers a setting of the outer switch A_0 under
/// which every move validates.
inline ValidatedSchedule validated_gadget_schedule(const GadgetChain& chain, const OpinionGame& game) {
  std::string last_error;
  for (int a0 : {0, 1}) {
    auto schedule = gadget_adversarial_sequence(chain, a0);
    try {
      auto trace = replay_adversarial(game, schedule);
      return {std::move(schedule), std::move(trace)};
    } catch (const InvariantError& e) {
      last_error = e.what();
    }
  }
  throw InvariantError("no switch setting validates the gadget schedule: " + last_error);
}

}  // namespace opinion
