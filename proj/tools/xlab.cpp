// xlab: command-line front end for the opinion-game library.
//
// Every subcommand prints a JSON report (or writes it to --out / --report).
// Exit status: 0 ok, 2 bad configuration, 3 size limit, 4 invariant failure.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "opinion/opinion.hpp"

namespace {

using namespace opinion;

std::string fmt17(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Doubles go into JSON as 17-significant-digit numbers; non-finite values as strings.
Json num(double v) {
  if (!std::isfinite(v)) return fmt17(v);
  return Json::parse(fmt17(v));
}

Json rat(const Rational& r) { return r.str(); }

std::vector<std::string> bits(const std::vector<Profile>& xs, std::size_t n) {
  std::vector<std::string> out;
  out.reserve(xs.size());
  for (auto x : xs) out.push_back(to_bitstring(x, n));
  return out;
}

Profile parse_profile(const std::string& text, std::size_t n) {
  if (text == "zeros") return Profile::all(n, 0);
  if (text == "ones") return Profile::all(n, 1);
  if (text.size() != n) throw ConfigError("--start: expected " + std::to_string(n) + " characters of 0/1");
  Profile x{0};
  for (std::size_t i = 0; i < n; ++i) {
    if (text[i] != '0' && text[i] != '1') throw ConfigError("--start: position " + std::to_string(i) + " is not 0/1");
    x = x.with(i, text[i] - '0');
  }
  return x;
}

std::uint64_t parse_seed(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    auto v = std::stoull(text, &used, 0);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(what + ": seed '" + text + "' is not an unsigned integer");
  }
}

Scheduler parse_scheduler(const std::string& text) {
  if (text == "round_robin") return Scheduler::round_robin();
  if (text.rfind("random:", 0) == 0) return Scheduler::uniform_random(parse_seed(text.substr(7), "--sched"));
  if (text == "random") throw ConfigError("--sched random needs an explicit seed: random:SEED");
  if (text.rfind("file:", 0) == 0) {
    std::ifstream in(text.substr(5));
    if (!in) throw ConfigError("cannot open schedule file " + text.substr(5));
    std::vector<std::size_t> seq;
    std::string tok;
    while (in >> tok) {
      std::replace(tok.begin(), tok.end(), ',', ' ');
      std::istringstream parts(tok);
      long long v;
      while (parts >> v) {
        if (v < 0) throw ConfigError("schedule file: negative player index");
        seq.push_back(static_cast<std::size_t>(v));
      }
    }
    if (seq.empty()) throw ConfigError("schedule file is empty");
    return Scheduler::fixed_sequence(std::move(seq));
  }
  throw ConfigError("--sched: expected round_robin, random:SEED or file:PATH");
}

std::vector<double> parse_betas(const std::string& list) {
  std::vector<double> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      double b = std::stod(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      if (!(b >= 0) || !std::isfinite(b)) throw ConfigError("--beta: values must be finite and >= 0");
      out.push_back(b);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      throw ConfigError("--beta: cannot parse '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError("--beta: empty list");
  return out;
}

void check_beta(double b) {
  if (!(b >= 0) || !std::isfinite(b)) throw ConfigError("--beta must be finite and >= 0");
}

std::size_t thread_count() {
  const char* env = std::getenv("XLAB_THREADS");
  if (!env || !*env) return 1;
  char* end = nullptr;
  long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1) throw ConfigError("XLAB_THREADS must be a positive integer");
  return static_cast<std::size_t>(v);
}

void emit(const Json& report, const std::string& path) {
  std::string text = report.dump(2) + "\n";
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_text_file(path, text);
  }
}

struct Options {
  std::string game;
  std::string out;
  std::string report;
  double beta = 0;
  std::string betas;
  double eps = 0.25;
  std::string sched = "round_robin";
  std::size_t max_steps = 1000000;
  std::string start = "zeros";
  std::size_t limit = 0;
  std::string family;
  std::size_t size = 0;
  std::string weight = "1";
  std::string belief = "1/2";
  std::string seed;
  int precision = 0;
  std::size_t gadgets = 1;
  std::string eps_last = "1";
  std::int64_t ratio = 9;
  bool integer = false;
  std::uint64_t steps = 0;
};

// ---------------------------------------------------------------------------

Json cmd_gen(const Options& o) {
  if (o.family.empty()) throw ConfigError("gen: --family is required");
  if (o.family == "gadget") {
    auto chain = make_gadget_chain(o.gadgets, Rational::parse(o.eps_last), o.ratio);
    return game_to_json(make_gadget_game(chain));
  }
  const Rational w = Rational::parse(o.weight);
  if (o.family == "random") {
    if (o.seed.empty()) throw ConfigError("gen random: --seed is required");
    if (o.size < 2) throw ConfigError("gen random: --n must be at least 2");
    if (o.precision < 0 || o.precision > 2) throw ConfigError("gen random: --precision must be 0, 1 or 2");
    SeededRng rng(parse_seed(o.seed, "--seed"));
    const std::int64_t scale = pow10(o.precision);
    auto weight = [&] {
      return o.precision == 0 ? Rational(1 + static_cast<std::int64_t>(rng.below(3)))
                              : Rational(1 + static_cast<std::int64_t>(rng.below(30)), scale);
    };
    std::vector<WeightedEdge> edges;
    std::vector<std::vector<bool>> used(o.size, std::vector<bool>(o.size, false));
    for (std::size_t v = 1; v < o.size; ++v) {
      std::size_t u = rng.below(v);
      used[u][v] = true;
      edges.push_back({u, v, weight()});
    }
    for (std::size_t u = 0; u < o.size; ++u)
      for (std::size_t v = u + 1; v < o.size; ++v)
        if (!used[u][v] && rng.uniform() < 0.35) edges.push_back({u, v, weight()});
    std::vector<Rational> beliefs;
    for (std::size_t i = 0; i < o.size; ++i) beliefs.push_back(Rational(static_cast<std::int64_t>(rng.below(11)), 10));
    return game_to_json(OpinionGame(SocialGraph(o.size, std::move(edges)), std::move(beliefs)));
  }
  SocialGraph g = [&] {
    if (o.family == "clique") return make_clique(o.size, w);
    if (o.family == "bipartite") return make_complete_bipartite(o.size, w);
    if (o.family == "star") return make_star(o.size, w);
    if (o.family == "path") return make_path(o.size, w);
    if (o.family == "cycle") return make_cycle(o.size, w);
    throw ConfigError("gen: unknown family '" + o.family + "'");
  }();
  return game_to_json(uniform_belief_game(std::move(g), Rational::parse(o.belief)));
}

Json cmd_nash(const OpinionGame& game, const Options& o) {
  auto nash = enumerate_nash(game, o.limit ? o.limit : kMaxEnumeratedPlayers);
  Json r;
  r["count"] = nash.size();
  r["profiles"] = bits(nash, game.players());
  Json costs = Json::array();
  for (auto x : nash) costs.push_back(rat(social_cost(game, x)));
  r["social_costs"] = costs;
  r["greedy_from_zeros"] = to_bitstring(greedy_nash(game, 0), game.players());
  r["greedy_from_ones"] = to_bitstring(greedy_nash(game, 1), game.players());
  return r;
}

Json cmd_poa_pos(const OpinionGame& game, const Options& o) {
  auto rep = poa_pos(game, o.limit ? o.limit : kMaxEnumeratedPlayers);
  Json r;
  r["poa"] = rep.poa.str();
  r["pos"] = rep.pos.str();
  r["optimum"] = to_bitstring(rep.optimum, game.players());
  r["optimum_cost"] = rat(rep.optimum_cost);
  r["best_nash_cost"] = rat(rep.best_nash_cost);
  r["worst_nash_cost"] = rat(rep.worst_nash_cost);
  r["nash_count"] = rep.nash_profiles.size();
  r["optimum_is_nash"] = is_nash(game, rep.optimum).nash;
  return r;
}

std::string trace_csv(const Trace& trace) {
  std::ostringstream csv;
  csv << "t,mover,old,new,phi_num,phi_den\n";
  for (const auto& s : trace.steps)
    csv << s.t << ',' << s.mover << ',' << s.from << ',' << s.to << ',' << s.potential.num() << ','
        << s.potential.den() << '\n';
  return csv.str();
}

Json cmd_br_run(const OpinionGame& game, const Options& o) {
  auto sched = parse_scheduler(o.sched);
  Profile start = parse_profile(o.start, game.players());
  auto trace = run_best_response(game, start, sched, o.max_steps);
  if (!o.out.empty()) write_text_file(o.out, trace_csv(trace));
  Json r;
  r["flips"] = trace.flips();
  r["converged"] = trace.converged;
  r["start"] = to_bitstring(trace.start, game.players());
  r["final"] = to_bitstring(trace.final, game.players());
  r["final_potential"] = rat(potential(game, trace.final));
  r["final_is_nash"] = is_nash(game, trace.final).nash;
  if (auto d = min_drop(game, trace)) r["min_drop"] = rat(*d);
  r["drop_at_least_half"] = certify_drop(game, trace);
  r["edges"] = game.graph().edges().size();
  if (!o.out.empty()) r["trace_csv"] = o.out;
  return r;
}

Json cmd_br_expo(const Options& o) {
  auto chain = make_gadget_chain(o.gadgets, Rational::parse(o.eps_last), o.ratio);
  auto game = make_gadget_game(chain);
  auto v = validated_gadget_schedule(chain, game);
  if (!o.out.empty()) write_text_file(o.out, trace_csv(v.trace));
  Json r;
  r["gadgets"] = o.gadgets;
  r["players"] = game.players();
  r["switch_A0"] = v.schedule.start[0];
  r["validated"] = true;
  r["total_flips"] = v.trace.flips();
  r["flips_per_gadget"] = v.schedule.flips_per_gadget;
  r["switch_on_cycles"] = v.schedule.switch_on_cycles;
  r["switch_off_cycles"] = v.schedule.switch_off_cycles;
  r["final_is_nash"] = v.trace.converged;
  return r;
}

Json cmd_canonicalize(const OpinionGame& game, const Options& o) {
  OpinionGame out = o.integer ? integer_version(canonicalize_beliefs(game)) : canonicalize_beliefs(game);
  Json changes = Json::array();
  for (std::size_t i = 0; i < game.players(); ++i) {
    if (out.belief(i) != game.belief(i)) {
      changes.push_back({{"player", i}, {"from", rat(game.belief(i))}, {"to", rat(out.belief(i))}});
    }
  }
  Json r;
  r["changed"] = changes;
  r["game"] = game_to_json(out);
  return r;
}

Json cmd_cutwidth(const OpinionGame& game, const Options& o) {
  auto cw = cutwidth_exact(game.graph(), o.limit ? o.limit : kDefaultCutwidthLimit);
  Json r;
  r["cutwidth"] = rat(game.graph().to_weight(cw.value));
  r["ordering"] = cw.ordering;
  return r;
}

std::vector<std::size_t> ordering_for(const OpinionGame& game) {
  return cutwidth_exact(game.graph(), kMaxMixingPlayers).ordering;
}

Json relaxation_json(const LogitChain& chain, const RelaxationResult& rel) {
  auto b = mixing_bounds_from_relaxation(chain, rel);
  Json r;
  r["t_rel"] = num(rel.t_rel);
  r["lambda_2"] = num(rel.lambda_2);
  r["lambda_min"] = num(rel.lambda_min);
  r["gap"] = num(static_cast<double>(rel.gap));
  r["log_inv_pi_min"] = num(b.log_inv_pi_min);
  r["t_mix_lower"] = num(b.lower);
  r["t_mix_upper"] = num(b.upper);
  r["t_mix_surrogate"] = num(b.surrogate);
  return r;
}

Json bottleneck_json(const LogitChain& chain) {
  auto rep = build_R(chain);
  Json r;
  r["cutwidth"] = rat(rep.cutwidth);
  r["b_star"] = rat(rep.b_star);
  r["b_star_exact"] = rep.b_star_exact;
  r["threshold"] = rat(rep.threshold);
  r["endpoint"] = rep.endpoint;
  r["b_endpoint"] = rat(rep.b_endpoint);
  r["R_size"] = rep.R.size();
  r["boundary_size"] = rep.boundary.size();
  r["boundary_edges"] = rep.boundary_edges;
  r["pi_R0"] = num(rep.pi_R0);
  r["pi_R1"] = num(rep.pi_R1);
  r["pi_R"] = num(rep.pi_R);
  r["Q_out"] = num(rep.Q_out);
  r["B_R"] = num(rep.B_R);
  r["t_mix_lower"] = num(rep.lower_bound);
  r["B_R_upper"] = num(rep.B_R_upper);
  return r;
}

Json cmd_logit_mix(const OpinionGame& game, const Options& o) {
  check_beta(o.beta);
  LogitChain chain(game, o.beta);
  MixingOptions opt;
  if (o.limit) opt.max_players = o.limit;
  auto mix = mixing_time_details(chain, o.eps, opt);
  Json r;
  r["t_mix"] = mix.t;
  r["method"] = mix.method == MixingMethod::row_iteration ? "row_iteration" : "repeated_squaring";
  r["relaxation"] = relaxation_json(chain, relaxation_time(chain));
  auto order = ordering_for(game);
  r["congestion_upper"] = num(congestion_upper_bound(chain, order));
  r["cutwidth_ordering"] = order;
  try {
    r["bottleneck"] = bottleneck_json(chain);
  } catch (const ConfigError& e) {
    r["bottleneck"] = {{"unavailable", e.what()}};
  }
  return r;
}

Json cmd_spectral(const OpinionGame& game, const Options& o) {
  check_beta(o.beta);
  LogitChain chain(game, o.beta);
  auto rel = relaxation_time(chain);
  Json r = relaxation_json(chain, rel);
  std::vector<Json> top;
  for (std::size_t k = 0; k < rel.eigenvalues.size() && k < 16; ++k) top.push_back(num(rel.eigenvalues[k]));
  r["eigenvalues_top"] = top;
  auto order = ordering_for(game);
  r["congestion_upper"] = num(congestion_upper_bound(chain, order));
  return r;
}

Json cmd_bottleneck(const OpinionGame& game, const Options& o) {
  check_beta(o.beta);
  LogitChain chain(game, o.beta);
  return bottleneck_json(chain);
}

Json cmd_couple_check(const OpinionGame& game, const Options& o) {
  check_beta(o.beta);
  LogitChain chain(game, o.beta);
  auto c = contraction_check(chain);
  const std::size_t n = game.players();
  const double target = std::exp(-1.0 / (3.0 * static_cast<double>(n)));
  Json r;
  r["beta_threshold"] = num(small_beta_threshold(game.graph()));
  r["below_threshold"] = o.beta <= small_beta_threshold(game.graph());
  r["max_expected_distance"] = num(c.max_expected_distance);
  r["worst_x"] = to_bitstring(c.x, n);
  r["worst_player"] = c.differing_player;
  r["contraction_target"] = num(target);
  r["contracts"] = c.max_expected_distance <= target;
  r["path_coupling_bound"] = num(path_coupling_bound(c.max_expected_distance, n, o.eps));
  if (o.steps > 0) {
    if (o.seed.empty()) throw ConfigError("couple-check --steps needs --seed");
    SeededRng rng(parse_seed(o.seed, "--seed"));
    Profile x = Profile::all(n, 0), y = Profile::all(n, 1);
    std::uint64_t met = 0;
    for (std::uint64_t t = 1; t <= o.steps && x.bits != y.bits; ++t) {
      std::tie(x, y) = coupling_step(chain, x, y, draw_coupling(rng, n));
      if (x.bits == y.bits) met = t;
    }
    r["coalescence_step"] = met;
    r["coalesced"] = x.bits == y.bits;
  }
  return r;
}

struct SweepRow {
  double beta = 0;
  std::uint64_t t_mix = 0;
  double t_rel = 0;
  double lb = std::nan("");
  double ub = 0;
};

Json cmd_sweep(const OpinionGame& game, const Options& o) {
  auto betas = parse_betas(o.betas);
  auto order = ordering_for(game);
  std::vector<SweepRow> rows(betas.size());
  std::vector<std::exception_ptr> errors(betas.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k; (k = next++) < betas.size();) {
      try {
        LogitChain chain(game, betas[k]);
        SweepRow row;
        row.beta = betas[k];
        row.t_mix = mixing_time_exact(chain, o.eps);
        row.t_rel = relaxation_time(chain).t_rel;
        try {
          row.lb = build_R(chain).lower_bound;
        } catch (const ConfigError&) {
        }
        row.ub = congestion_upper_bound(chain, order);
        rows[k] = row;
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::min(thread_count(), betas.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::ostringstream csv;
  csv << "beta,t_mix,t_rel,lb_bottleneck,ub_congestion\n";
  Json table = Json::array();
  for (const auto& r : rows) {
    csv << fmt17(r.beta) << ',' << r.t_mix << ',' << fmt17(r.t_rel) << ',' << (std::isnan(r.lb) ? "" : fmt17(r.lb))
        << ',' << fmt17(r.ub) << '\n';
    table.push_back({{"beta", num(r.beta)},
                     {"t_mix", r.t_mix},
                     {"t_rel", num(r.t_rel)},
                     {"lb_bottleneck", std::isnan(r.lb) ? Json(nullptr) : num(r.lb)},
                     {"ub_congestion", num(r.ub)}});
  }
  if (!o.out.empty()) {
    write_text_file(o.out, csv.str());
  } else if (o.report.empty()) {
    std::cout << csv.str();
  }
  Json r;
  r["rows"] = table;
  r["threads"] = threads;
  if (!o.out.empty()) r["csv"] = o.out;
  return r;
}

Json config_json(const std::string& name, const Options& o) {
  Json c;
  if (!o.game.empty()) c["game"] = o.game;
  if (name == "logit-mix" || name == "spectral" || name == "bottleneck" || name == "couple-check") c["beta"] = num(o.beta);
  if (name == "sweep") c["beta"] = o.betas;
  if (name == "logit-mix" || name == "sweep" || name == "couple-check") c["eps"] = num(o.eps);
  if (name == "br-run") {
    c["sched"] = o.sched;
    c["max_steps"] = o.max_steps;
    c["start"] = o.start;
  }
  if (name == "br-expo") {
    c["gadgets"] = o.gadgets;
    c["eps_last"] = o.eps_last;
    c["ratio"] = o.ratio;
  }
  if (name == "couple-check" && o.steps) {
    c["steps"] = o.steps;
    c["seed"] = o.seed;
  }
  if (o.limit) c["limit"] = o.limit;
  if (name == "canonicalize") c["integer"] = o.integer;
  if (!o.out.empty()) c["out"] = o.out;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Opinion games on weighted graphs: equilibria, best-response and logit dynamics"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  Options o;
  auto add_game = [&](CLI::App* s) { s->add_option("--game", o.game, "instance JSON")->required()->check(CLI::ExistingFile); };
  auto add_report = [&](CLI::App* s) { s->add_option("--report", o.report, "write the JSON report here"); };
  auto add_out = [&](CLI::App* s, const std::string& what) { s->add_option("--out", o.out, what); };
  auto add_beta = [&](CLI::App* s) { s->add_option("--beta", o.beta, "rationality level")->required(); };
  auto add_limit = [&](CLI::App* s) { s->add_option("--limit", o.limit, "override the player-count limit"); };

  auto* gen = app.add_subcommand("gen", "write an instance JSON");
  gen->add_option("--family", o.family, "clique|bipartite|star|path|cycle|gadget|random")->required();
  gen->add_option("--n", o.size, "players (clique/path/cycle/random), side size (bipartite), leaves (star)");
  gen->add_option("--weight", o.weight, "edge weight");
  gen->add_option("--belief", o.belief, "common belief");
  gen->add_option("--seed", o.seed, "seed (random family)");
  gen->add_option("--precision", o.precision, "decimal digits of random weights");
  gen->add_option("--gadgets", o.gadgets, "gadget count");
  gen->add_option("--eps-last", o.eps_last, "weight unit of the last gadget");
  gen->add_option("--ratio", o.ratio, "weight ratio between consecutive gadgets");
  add_out(gen, "instance path (stdout if omitted)");

  auto* nash = app.add_subcommand("nash", "enumerate pure Nash equilibria");
  add_game(nash), add_out(nash, "report path"), add_limit(nash);

  auto* poa = app.add_subcommand("poa-pos", "price of anarchy and stability");
  add_game(poa), add_out(poa, "report path"), add_limit(poa);

  auto* br = app.add_subcommand("br-run", "best-response dynamics");
  add_game(br), add_report(br), add_out(br, "trace CSV path");
  br->add_option("--sched", o.sched, "round_robin | random:SEED | file:PATH");
  br->add_option("--max-steps", o.max_steps, "flip budget");
  br->add_option("--start", o.start, "zeros | ones | bitstring x_0..x_{n-1}");

  auto* expo = app.add_subcommand("br-expo", "validated exponential schedule on the gadget chain");
  add_report(expo), add_out(expo, "trace CSV path");
  expo->add_option("--gadgets", o.gadgets, "gadget count")->required();
  expo->add_option("--eps-last", o.eps_last, "weight unit of the last gadget");
  expo->add_option("--ratio", o.ratio, "weight ratio between consecutive gadgets (> 8)");

  auto* canon = app.add_subcommand("canonicalize", "move beliefs off thresholds");
  add_game(canon), add_out(canon, "report path");
  canon->add_flag("--integer", o.integer, "also emit the integer version");

  auto* cw = app.add_subcommand("cutwidth", "exact weighted cutwidth");
  add_game(cw), add_out(cw, "report path"), add_limit(cw);

  auto* mix = app.add_subcommand("logit-mix", "exact mixing time with spectral and bottleneck bounds");
  add_game(mix), add_out(mix, "report path"), add_beta(mix), add_limit(mix);
  mix->add_option("--eps", o.eps, "total-variation target");

  auto* spectral = app.add_subcommand("spectral", "relaxation time and eigenvalues");
  add_game(spectral), add_out(spectral, "report path"), add_beta(spectral);

  auto* bot = app.add_subcommand("bottleneck", "R / boundary construction and bottleneck bound");
  add_game(bot), add_out(bot, "report path"), add_beta(bot);

  auto* couple = app.add_subcommand("couple-check", "path-coupling contraction");
  add_game(couple), add_out(couple, "report path"), add_beta(couple);
  couple->add_option("--eps", o.eps, "total-variation target for the coupling bound");
  couple->add_option("--steps", o.steps, "also run a coupled simulation from all-0 / all-1");
  couple->add_option("--seed", o.seed, "seed for --steps");

  auto* sweep = app.add_subcommand("sweep", "mixing sweep over beta values");
  add_game(sweep), add_report(sweep), add_out(sweep, "CSV path");
  sweep->add_option("--beta", o.betas, "comma-separated beta list")->required();
  sweep->add_option("--eps", o.eps, "total-variation target");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  const auto t0 = std::chrono::steady_clock::now();
  CLI::App* cmd = app.get_subcommands().front();
  const std::string name = cmd->get_name();
  try {
    Json results;
    if (name == "gen") {
      Json game = cmd_gen(o);
      emit(game, o.out);
      return 0;
    } else if (name == "br-expo") {
      results = cmd_br_expo(o);
    } else {
      OpinionGame game = parse_game(o.game);
      if (name == "nash") results = cmd_nash(game, o);
      else if (name == "poa-pos") results = cmd_poa_pos(game, o);
      else if (name == "br-run") results = cmd_br_run(game, o);
      else if (name == "canonicalize") results = cmd_canonicalize(game, o);
      else if (name == "cutwidth") results = cmd_cutwidth(game, o);
      else if (name == "logit-mix") results = cmd_logit_mix(game, o);
      else if (name == "spectral") results = cmd_spectral(game, o);
      else if (name == "bottleneck") results = cmd_bottleneck(game, o);
      else if (name == "couple-check") results = cmd_couple_check(game, o);
      else if (name == "sweep") results = cmd_sweep(game, o);
    }
    std::string echo;
    for (int i = 0; i < argc; ++i) echo += (i ? " " : "") + std::string(argv[i]);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    Json report{{"command", echo},
                {"subcommand", name},
                {"config", config_json(name, o)},
                {"results", results},
                {"wall_time_s", num(wall)},
                {"version", kVersion}};
    const bool csv_out = name == "br-run" || name == "br-expo" || name == "sweep";
    if (csv_out) {
      if (name == "sweep" && o.out.empty() && o.report.empty()) return 0;
      emit(report, o.report);
    } else {
      emit(report, o.out);
    }
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "xlab: config error: " << e.what() << "\n";
    return 2;
  } catch (const LimitError& e) {
    std::cerr << "xlab: limit exceeded: " << e.what() << "\n";
    return 3;
  } catch (const InvariantError& e) {
    std::cerr << "xlab: invariant violated: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "xlab: " << e.what() << "\n";
    return 4;
  }
}
