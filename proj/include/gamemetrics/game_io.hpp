#pragma once

// Game files are JSON objects:
//   { "interval": [lo, hi], "states": [...], "variables": {v: {state: x}},
//     "moves1": {state: [...]}, "moves2": {state: [...]},
//     "trans": [{"state": s, "m1": a, "m2": b, "dist": {target: p}}] }
// "moves2" and "m2" may be omitted for player-1-only states.

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gamemetrics/errors.hpp"
#include "gamemetrics/game.hpp"

namespace gamemetrics {

using Json = nlohmann::ordered_json;

namespace detail {

[[noreturn]] inline void format_fail(const std::string& where, const std::string& what) {
  throw FormatError(where + ": " + what);
}

inline void only_keys(const Json& obj, const std::string& where,
                      const std::set<std::string>& allowed) {
  for (const auto& [key, _] : obj.items())
    if (!allowed.count(key)) format_fail(where, "unknown key '" + key + "'");
}

inline const Json& require_key(const Json& obj, const std::string& where, const std::string& key) {
  auto it = obj.find(key);
  if (it == obj.end()) format_fail(where, "missing key '" + key + "'");
  return *it;
}

inline double as_number(const Json& j, const std::string& where) {
  if (!j.is_number()) format_fail(where, "expected a number");
  return j.get<double>();
}

inline std::string as_string(const Json& j, const std::string& where) {
  if (!j.is_string()) format_fail(where, "expected a string");
  return j.get<std::string>();
}

inline std::vector<std::string> as_string_list(const Json& j, const std::string& where) {
  if (!j.is_array()) format_fail(where, "expected an array");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(as_string(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

inline const Json& as_object(const Json& j, const std::string& where) {
  if (!j.is_object()) format_fail(where, "expected an object");
  return j;
}

/// Runs a builder call and prefixes any lookup failure with the location.
template <class F>
void at(const std::string& where, F&& f) {
  try {
    f();
  } catch (const FormatError&) {
    throw;
  } catch (const GameError& e) {
    format_fail(where, e.what());
  }
}

}  // namespace detail

/// Parses a game from its JSON form. Structural invariants (sums, intervals,
/// missing transitions) are left to validate().
inline GameStructure parse_game(const Json& j) {
  using namespace detail;
  as_object(j, "game");
  only_keys(j, "game", {"interval", "states", "variables", "moves1", "moves2", "trans"});

  const Json& iv = require_key(j, "game", "interval");
  if (!iv.is_array() || iv.size() != 2) format_fail("interval", "expected [lo, hi]");
  GameBuilder b(Interval{as_number(iv[0], "interval[0]"), as_number(iv[1], "interval[1]")});

  const auto names = as_string_list(require_key(j, "game", "states"), "states");
  for (std::size_t i = 0; i < names.size(); ++i)
    at("states[" + std::to_string(i) + "]", [&] { b.state(names[i]); });

  if (auto it = j.find("variables"); it != j.end()) {
    for (const auto& [name, vals] : as_object(*it, "variables").items()) {
      const std::string where = "variables." + name;
      std::vector<std::pair<std::string, double>> entries;
      for (const auto& [s, x] : as_object(vals, where).items())
        entries.emplace_back(s, as_number(x, where + "." + s));
      at(where, [&] { b.variable(name, entries); });
    }
  }

  for (const auto& [s, ms] : as_object(require_key(j, "game", "moves1"), "moves1").items()) {
    auto moves = as_string_list(ms, "moves1." + s);
    at("moves1." + s, [&] { b.moves1(s, std::move(moves)); });
  }
  if (auto it = j.find("moves2"); it != j.end()) {
    for (const auto& [s, ms] : as_object(*it, "moves2").items()) {
      auto moves = as_string_list(ms, "moves2." + s);
      at("moves2." + s, [&] { b.moves2(s, std::move(moves)); });
    }
  }

  const Json& trans = require_key(j, "game", "trans");
  if (!trans.is_array()) format_fail("trans", "expected an array");
  for (std::size_t i = 0; i < trans.size(); ++i) {
    const std::string where = "trans[" + std::to_string(i) + "]";
    const Json& e = as_object(trans[i], where);
    only_keys(e, where, {"state", "m1", "m2", "dist"});
    const auto s = as_string(require_key(e, where, "state"), where + ".state");
    const auto m1 = as_string(require_key(e, where, "m1"), where + ".m1");
    const auto m2 = e.contains("m2") ? as_string(e["m2"], where + ".m2") : kDefaultMove;
    std::vector<std::pair<std::string, double>> dist;
    const std::string dwhere = where + ".dist";
    for (const auto& [target, p] : as_object(require_key(e, where, "dist"), dwhere).items())
      dist.emplace_back(target, as_number(p, dwhere + "." + target));
    at(where, [&] { b.transition(s, m1, m2, dist); });
  }
  return b.build();
}

inline GameStructure parse_game(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw FormatError(std::string("syntax: ") + e.what());
  }
  return parse_game(j);
}

inline GameStructure load_game(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError(path + ": cannot open file");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_game(buf.str());
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

/// Rounds to 9 significant digits, the precision of every emitted number.
inline double round9(double x) {
  if (!std::isfinite(x) || x == 0.0) return x;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return std::strtod(buf, nullptr);
}

inline Json to_json(const GameStructure& g) {
  Json j;
  j["interval"] = {round9(g.interval.lo), round9(g.interval.hi)};
  j["states"] = g.states;
  Json vars = Json::object();
  for (const auto& v : g.variables) {
    Json vals = Json::object();
    for (State s = 0; s < g.size(); ++s) vals[g.states[s]] = round9(v.values[s]);
    vars[v.name] = std::move(vals);
  }
  j["variables"] = std::move(vars);
  Json m1 = Json::object(), m2 = Json::object();
  for (State s = 0; s < g.size(); ++s) {
    m1[g.states[s]] = g.moves1[s];
    if (g.moves2[s] != std::vector<std::string>{kDefaultMove}) m2[g.states[s]] = g.moves2[s];
  }
  j["moves1"] = std::move(m1);
  if (!m2.empty()) j["moves2"] = std::move(m2);
  Json trans = Json::array();
  for (State s = 0; s < g.size(); ++s)
    for (std::size_t a = 0; a < g.moves1[s].size(); ++a)
      for (std::size_t b = 0; b < g.moves2[s].size(); ++b) {
        const Distribution& d = g.delta(s, a, b);
        if (d.empty()) continue;
        Json e;
        e["state"] = g.states[s];
        e["m1"] = g.moves1[s][a];
        if (g.moves2[s][b] != kDefaultMove) e["m2"] = g.moves2[s][b];
        Json dist = Json::object();
        for (const auto& [t, p] : d) dist[g.states[t]] = round9(p);
        e["dist"] = std::move(dist);
        trans.push_back(std::move(e));
      }
  j["trans"] = std::move(trans);
  return j;
}

inline std::string dump_game(const GameStructure& g) { return to_json(g).dump(2) + "\n"; }

}  // namespace gamemetrics
