#pragma once

// Command-line front end. run() parses arguments, loads the game, dispatches
// to the library and writes one JSON report to `out`. Diagnostics go to `err`.
// Exit codes: 0 success, 1 invalid input (file, schema, game structure,
// precondition), 2 usage error.

#include <chrono>
#include <cstdint>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gamemetrics/concurrent.hpp"
#include "gamemetrics/game.hpp"
#include "gamemetrics/game_io.hpp"
#include "gamemetrics/metrics.hpp"
#include "gamemetrics/payoffs.hpp"
#include "gamemetrics/random_games.hpp"

namespace gamemetrics::cli {

enum ExitCode { kOk = 0, kInvalid = 1, kUsage = 2 };

/// Bad flag combination or unknown name on the command line.
class UsageError : public GameError {
 public:
  using GameError::GameError;
};

struct Options {
  std::string command;
  std::string game_path;
  std::string kind = "sim";
  std::string combine = "max";
  std::optional<double> alpha;
  double epsilon = 1e-6;
  std::optional<std::size_t> max_iters;
  std::optional<std::string> from, to;
  bool average = false;
  std::optional<std::size_t> total_steps;
  std::string reward = "r";
  int player = 1;
  std::size_t trials = 0;
  std::uint64_t seed = 1;
  std::string prop;
  std::string out_path;
  std::size_t samples = EstimatorParams{}.samples;
  std::size_t ascent_steps = EstimatorParams{}.ascent_steps;
  std::optional<double> step_size;
  bool timing = false;
};

namespace detail {

inline Json num(double x) {
  if (!std::isfinite(x)) return nullptr;
  return round9(x);
}

inline Json valuation_json(const GameStructure& g, const Valuation& v) {
  Json j = Json::object();
  for (State s = 0; s < g.size(); ++s) j[g.states[s]] = num(v[s]);
  return j;
}

inline Json summary(const GameStructure& g, const std::string& path, bool valid) {
  std::size_t m1 = 0, m2 = 0;
  for (State s = 0; s < g.size(); ++s) {
    m1 += g.moves1[s].size();
    m2 += g.moves2[s].size();
  }
  Json j;
  j["file"] = path;
  j["states"] = g.size();
  j["moves1"] = m1;
  j["moves2"] = m2;
  j["variables"] = g.variables.size();
  j["kind"] = valid ? Json(std::string(to_string(classify(g)))) : Json(nullptr);
  return j;
}

inline MetricKind metric_kind(const Options& o, double default_alpha) {
  MetricKind k;
  k.base = o.kind == "bis" ? MetricBase::Bisimulation : MetricBase::Simulation;
  k.combine = o.combine == "sum" ? Combine::Sum : Combine::Max;
  k.alpha = o.alpha.value_or(default_alpha);
  if (!(k.alpha > 0.0 && k.alpha <= 1.0)) throw UsageError("--alpha must lie in (0, 1]");
  return k;
}

inline Json kind_json(const MetricKind& k) {
  Json j;
  j["kind"] = k.base == MetricBase::Simulation ? "sim" : "bis";
  j["combine"] = k.combine == Combine::Max ? "max" : "sum";
  j["alpha"] = num(k.alpha);
  return j;
}

inline State state_arg(const GameStructure& g, const std::string& flag, const std::string& name) {
  try {
    return g.index_of(name);
  } catch (const LookupError&) {
    throw UsageError("unknown state '" + name + "' in " + flag);
  }
}

inline void metric_payload(const GameStructure& g, const Options& o, const FixpointResult& fp,
                           Json& rep) {
  if (o.from.has_value() != o.to.has_value()) throw UsageError("--from and --to go together");
  Json res;
  if (o.from) {
    const State s = state_arg(g, "--from", *o.from), t = state_arg(g, "--to", *o.to);
    res["from"] = *o.from;
    res["to"] = *o.to;
    res["distance"] = num(fp.metric.value_or_infinity(s, t));
    res["divergent"] = fp.metric.divergent(s, t);
  } else {
    res["states"] = g.states;
    Json rows = Json::array();
    Json div = Json::array();
    for (State s = 0; s < g.size(); ++s) {
      Json row = Json::array();
      for (State t = 0; t < g.size(); ++t) {
        row.push_back(num(fp.metric.value_or_infinity(s, t)));
        if (fp.metric.divergent(s, t)) div.push_back({g.states[s], g.states[t]});
      }
      rows.push_back(std::move(row));
    }
    res["matrix"] = std::move(rows);
    res["divergent"] = std::move(div);
  }
  rep["status"] = std::string(to_string(fp.report.status));
  rep["iterations"] = fp.report.iterations;
  rep["last_change"] = num(fp.report.last_change);
  rep["result"] = std::move(res);
}

inline Json violation_json(const GameStructure& g, const BoundViolation& v) {
  Json j;
  j["s"] = g.states[v.s];
  j["t"] = g.states[v.t];
  j["check"] = v.check;
  j["difference"] = num(v.difference);
  j["bound"] = num(v.bound);
  return j;
}

inline PayoffSpec payoff_spec(const Options& o, double default_alpha) {
  PayoffSpec spec;
  spec.reward = o.reward;
  spec.alpha = o.alpha.value_or(default_alpha);
  spec.player = o.player == 2 ? Player::Two : Player::One;
  return spec;
}

inline FixpointOptions fixpoint_options(const Options& o) {
  if (!(o.epsilon > 0.0)) throw UsageError("--epsilon must be positive");
  return {o.epsilon, o.max_iters};
}

inline void cmd_metric(const GameStructure& g, const Options& o, Json& rep) {
  const MetricKind kind = metric_kind(o, 1.0);
  rep["metric"] = kind_json(kind);
  if (classify(g) == GameKind::Concurrent)
    throw UnsupportedStructure("concurrent game: use 'estimate' for lower bounds");
  metric_payload(g, o, fixpoint(g, kind, fixpoint_options(o)), rep);
}

inline void cmd_estimate(const GameStructure& g, const Options& o, Json& rep) {
  const MetricKind kind = metric_kind(o, 1.0);
  EstimatorParams params;
  params.samples = o.samples;
  params.ascent_steps = o.ascent_steps;
  params.step_size = o.step_size;
  params.seed = o.seed;
  rep["metric"] = kind_json(kind);
  Json est;
  est["samples"] = params.samples;
  est["ascent_steps"] = params.ascent_steps;
  est["step_size"] = num(params.step_size.value_or(g.theta() / 4.0));
  est["seed"] = params.seed;
  rep["estimator"] = std::move(est);
  metric_payload(g, o, estimate_metric_concurrent(g, kind, params, fixpoint_options(o)), rep);
}

inline void cmd_kernel(const GameStructure& g, const Options& o, Json& rep) {
  if (o.combine != "max" || o.alpha) throw UsageError("kernel takes only --kind");
  Json res;
  if (o.kind == "bis") {
    const Partition q = bis_kernel(g);
    Json blocks = Json::array();
    for (const auto& b : q.blocks()) {
      Json names = Json::array();
      for (State s : b) names.push_back(g.states[s]);
      blocks.push_back(std::move(names));
    }
    res["blocks"] = std::move(blocks);
  } else {
    Json pairs = Json::array();
    for (const auto& [s, t] : sim_kernel(g).pairs())
      if (s != t) pairs.push_back({g.states[s], g.states[t]});
    res["pairs"] = std::move(pairs);
  }
  rep["kind"] = o.kind;
  rep["status"] = "converged";
  rep["result"] = std::move(res);
}

inline void cmd_value(const GameStructure& g, const Options& o, Json& rep) {
  const int modes = (o.alpha ? 1 : 0) + (o.average ? 1 : 0) + (o.total_steps ? 1 : 0);
  if (modes != 1) throw UsageError("value needs exactly one of --alpha, --average, --total-steps");
  const PayoffSpec spec = payoff_spec(o, 0.9);
  rep["reward"] = spec.reward;
  rep["player"] = o.player;
  Json res;
  if (o.alpha) {
    if (!(spec.alpha > 0.0 && spec.alpha < 1.0)) throw UsageError("--alpha must lie in (0, 1)");
    const auto v = discounted_value(g, spec);
    res["payoff"] = "discounted";
    res["alpha"] = num(spec.alpha);
    res["values"] = valuation_json(g, v.values);
    rep["status"] = v.converged ? "converged" : "iteration-limited";
    rep["iterations"] = v.iterations;
  } else if (o.average) {
    const auto est = average_value_estimate(g, spec);
    res["payoff"] = "average";
    res["alphas"] = {0.9, 0.99, 0.999};
    res["values"] = valuation_json(g, est.values);
    res["spread"] = valuation_json(g, est.spread);
    rep["status"] = "converged";
  } else {
    if (*o.total_steps < 1) throw UsageError("--total-steps must be at least 1");
    const auto iters = total_reward_iterates(g, spec, *o.total_steps);
    res["payoff"] = "total";
    res["steps"] = *o.total_steps;
    res["values"] = valuation_json(g, iters.back());
    bool divergent = false;
    for (double x : iters.back()) divergent |= std::abs(x) > g.theta() * kDivergenceFactor;
    rep["status"] = divergent ? "divergent" : "converged";
  }
  rep["result"] = std::move(res);
}

inline Json suite_json(const GameStructure& g, const BoundSuiteResult& r, bool* all_converged) {
  Json j;
  Json viol = Json::array(), counter = Json::array(), fps = Json::array();
  for (const auto& v : r.violations) viol.push_back(violation_json(g, v));
  for (const auto& v : r.counterexamples) counter.push_back(violation_json(g, v));
  for (const auto& [kind, rep] : r.fixpoints) {
    Json f = kind_json(kind);
    f["status"] = std::string(to_string(rep.status));
    f["iterations"] = rep.iterations;
    fps.push_back(std::move(f));
    if (rep.status == FixpointStatus::IterationLimited) *all_converged = false;
  }
  j["violations"] = std::move(viol);
  j["counterexamples"] = std::move(counter);
  j["fixpoints"] = std::move(fps);
  return j;
}

inline void cmd_check_bounds(const std::optional<GameStructure>& g, const Options& o, Json& rep) {
  const PayoffSpec spec = payoff_spec(o, 0.9);
  if (!(spec.alpha > 0.0 && spec.alpha < 1.0)) throw UsageError("--alpha must lie in (0, 1)");
  const FixpointOptions fo = fixpoint_options(o);
  bool converged = true;
  rep["alpha"] = num(spec.alpha);
  if (g) {
    rep["result"] = suite_json(*g, bound_suite(*g, spec, fo), &converged);
  } else {
    if (o.trials < 1) throw UsageError("check-bounds needs --game or --trials N");
    std::size_t violations = 0, counterexamples = 0;
    Json failures = Json::array();
    for (std::size_t i = 0; i < o.trials; ++i) {
      std::seed_seq seq{static_cast<std::uint32_t>(o.seed), static_cast<std::uint32_t>(o.seed >> 32),
                        static_cast<std::uint32_t>(i)};
      std::mt19937_64 rng(seq);
      RandomGameOptions opt;
      opt.turn_based = i % 2 == 1;
      const GameStructure rg = random_game(rng, opt);
      PayoffSpec sp = spec;
      sp.reward = "r";
      const auto r = bound_suite(rg, sp, fo);
      violations += r.violations.size();
      counterexamples += r.counterexamples.size();
      bool conv = true;
      Json detail = suite_json(rg, r, &conv);
      converged = converged && conv;
      if (!r.violations.empty()) {
        Json f;
        f["trial"] = i;
        f["game"] = to_json(rg);
        f["violations"] = std::move(detail["violations"]);
        failures.push_back(std::move(f));
      }
    }
    Json res;
    res["trials"] = o.trials;
    res["seed"] = o.seed;
    res["violations"] = violations;
    res["counterexamples"] = counterexamples;
    res["failures"] = std::move(failures);
    rep["result"] = std::move(res);
  }
  rep["status"] = converged ? "converged" : "iteration-limited";
}

inline void cmd_reduce(const GameStructure& g, const Options& o, Json& rep) {
  const GameStructure reduced = build_reduction(g, o.prop);
  const std::string text = dump_game(reduced);
  Json res;
  res["prop"] = o.prop;
  res["fresh_state"] = reduced.states.back();
  res["states"] = reduced.size();
  res["kind"] = std::string(to_string(classify(reduced)));
  if (o.out_path.empty() || o.out_path == "-") {
    res["game"] = to_json(reduced);
  } else {
    std::ofstream f(o.out_path);
    if (!f || !(f << text)) throw FormatError(o.out_path + ": cannot write file");
    res["out"] = o.out_path;
  }
  rep["status"] = "converged";
  rep["result"] = std::move(res);
}

inline Json command_echo(const std::vector<std::string>& args) {
  Json j = Json::array();
  for (const auto& a : args) j.push_back(a);
  return j;
}

}  // namespace detail

/// Entry point shared by the executable and the tests; `args` excludes the
/// program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Simulation and bisimulation metrics for stochastic games", "gamemetrics"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  auto add_game = [&](CLI::App* sub, bool required) {
    auto* opt = sub->add_option("--game", o.game_path, "game file (JSON)");
    if (required) opt->required();
    sub->add_flag("--timing", o.timing, "add wall-clock timing to the report");
  };
  auto add_metric = [&](CLI::App* sub) {
    sub->add_option("--kind", o.kind, "sim or bis")->check(CLI::IsMember({"sim", "bis"}));
    sub->add_option("--combine", o.combine, "max or sum")->check(CLI::IsMember({"max", "sum"}));
    sub->add_option("--alpha", o.alpha, "discount in (0, 1], default 1");
    sub->add_option("--epsilon", o.epsilon, "convergence tolerance");
    sub->add_option("--max-iters", o.max_iters, "iteration cap");
    sub->add_option("--from", o.from, "source state");
    sub->add_option("--to", o.to, "target state");
  };

  auto* validate_cmd = app.add_subcommand("validate", "check a game file");
  add_game(validate_cmd, true);

  auto* metric_cmd = app.add_subcommand("metric", "metric distances by Picard iteration");
  add_game(metric_cmd, true);
  add_metric(metric_cmd);

  auto* kernel_cmd = app.add_subcommand("kernel", "simulation preorder or bisimulation classes");
  add_game(kernel_cmd, true);
  kernel_cmd->add_option("--kind", o.kind, "sim or bis")->check(CLI::IsMember({"sim", "bis"}));

  auto* value_cmd = app.add_subcommand("value", "discounted, average or total payoff values");
  add_game(value_cmd, true);
  value_cmd->add_option("--alpha", o.alpha, "discount in (0, 1)");
  value_cmd->add_flag("--average", o.average, "average payoff (discount limit)");
  value_cmd->add_option("--total-steps", o.total_steps, "n-step total reward");
  value_cmd->add_option("--reward", o.reward, "reward variable");
  value_cmd->add_option("--player", o.player, "1 or 2")->check(CLI::Range(1, 2));

  auto* bounds_cmd = app.add_subcommand("check-bounds", "payoff bounds and metric orderings");
  add_game(bounds_cmd, false);
  bounds_cmd->add_option("--alpha", o.alpha, "discount in (0, 1), default 0.9");
  bounds_cmd->add_option("--reward", o.reward, "reward variable");
  bounds_cmd->add_option("--player", o.player, "1 or 2")->check(CLI::Range(1, 2));
  bounds_cmd->add_option("--trials", o.trials, "random games to check when no --game is given");
  bounds_cmd->add_option("--seed", o.seed, "seed for random games");
  bounds_cmd->add_option("--epsilon", o.epsilon, "convergence tolerance");
  bounds_cmd->add_option("--max-iters", o.max_iters, "iteration cap");

  auto* reduce_cmd = app.add_subcommand("reduce", "add the absorbing non-goal state t'");
  add_game(reduce_cmd, true);
  reduce_cmd->add_option("--prop", o.prop, "0/1 goal variable")->required();
  reduce_cmd->add_option("--out", o.out_path, "output game file ('-' embeds it in the report)");

  auto* estimate_cmd = app.add_subcommand("estimate", "lower-bound metric for concurrent games");
  add_game(estimate_cmd, true);
  add_metric(estimate_cmd);
  estimate_cmd->add_option("--samples", o.samples, "random test valuations per pair");
  estimate_cmd->add_option("--ascent-steps", o.ascent_steps, "coordinate-ascent steps");
  estimate_cmd->add_option("--step-size", o.step_size, "initial ascent step");
  estimate_cmd->add_option("--seed", o.seed, "random seed");

  std::vector<const char*> argv{"gamemetrics"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage: " << e.what() << "\n";
    return kUsage;
  }
  o.command = app.get_subcommands().front()->get_name();

  const auto start = std::chrono::steady_clock::now();
  Json rep;
  rep["command"] = o.command;
  rep["args"] = detail::command_echo(args);
  try {
    std::optional<GameStructure> g;
    if (!o.game_path.empty()) {
      g = load_game(o.game_path);
      const auto violations = validate(*g);
      rep["game"] = detail::summary(*g, o.game_path, violations.empty());
      if (o.command == "validate") {
        rep["status"] = "converged";
        rep["result"]["valid"] = violations.empty();
        rep["result"]["violations"] = violations;
        out << rep.dump(2) << "\n";
        return violations.empty() ? kOk : kInvalid;
      }
      if (!violations.empty()) {
        for (const auto& v : violations) err << o.game_path << ": " << v << "\n";
        return kInvalid;
      }
    }
    if (o.command == "metric") detail::cmd_metric(*g, o, rep);
    else if (o.command == "kernel") detail::cmd_kernel(*g, o, rep);
    else if (o.command == "value") detail::cmd_value(*g, o, rep);
    else if (o.command == "check-bounds") detail::cmd_check_bounds(g, o, rep);
    else if (o.command == "reduce") detail::cmd_reduce(*g, o, rep);
    else if (o.command == "estimate") detail::cmd_estimate(*g, o, rep);
  } catch (const UsageError& e) {
    err << "usage: " << e.what() << "\n";
    return kUsage;
  } catch (const FormatError& e) {
    err << e.what() << "\n";
    return kInvalid;
  } catch (const GameError& e) {
    err << (o.game_path.empty() ? "" : o.game_path + ": ") << e.what() << "\n";
    return kInvalid;
  }
  if (o.timing) {
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
    rep["timing"]["seconds"] = detail::num(dt.count());
  }
  out << rep.dump(2) << "\n";
  return kOk;
}

}  // namespace gamemetrics::cli
