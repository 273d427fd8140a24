#pragma once

#include <string>

#include "gamemetrics/game.hpp"
#include "gamemetrics/game_io.hpp"

namespace fixtures {

using gamemetrics::GameBuilder;
using gamemetrics::GameStructure;
using gamemetrics::Interval;

inline std::string game_path(const std::string& name) { return std::string(GAMES_DIR) + "/" + name; }

/// Two disjoint MDPs: s -a-> t; t -b-> v, -c-> u, -f-> (u, v) halves; and
/// s' -a-> w', -b-> t'; t' -c-> (1/2 - eps) u' + (1/2 + eps) v';
/// w' -e-> (1 - eps) u' + eps v', -f-> eps u' + (1 - eps) v'.
/// Colours: {s, s'}, {t, t', w'}, {u, u'}, {v, v'}.
inline GameStructure fig3(double eps) {
  GameBuilder b(Interval{0.0, 1.0});
  b.states({"s", "t", "u", "v", "s'", "t'", "w'", "u'", "v'"});
  b.variable("is_s", {{"s", 1}, {"t", 0}, {"u", 0}, {"v", 0}, {"s'", 1}, {"t'", 0}, {"w'", 0}, {"u'", 0}, {"v'", 0}});
  b.variable("is_t", {{"s", 0}, {"t", 1}, {"u", 0}, {"v", 0}, {"s'", 0}, {"t'", 1}, {"w'", 1}, {"u'", 0}, {"v'", 0}});
  b.variable("is_u", {{"s", 0}, {"t", 0}, {"u", 1}, {"v", 0}, {"s'", 0}, {"t'", 0}, {"w'", 0}, {"u'", 1}, {"v'", 0}});
  b.variable("is_v", {{"s", 0}, {"t", 0}, {"u", 0}, {"v", 1}, {"s'", 0}, {"t'", 0}, {"w'", 0}, {"u'", 0}, {"v'", 1}});
  b.moves1("s", {"a"}).moves1("t", {"b", "c", "f"}).moves1("u", {"stay"}).moves1("v", {"stay"});
  b.moves1("s'", {"a", "b"}).moves1("t'", {"c"}).moves1("w'", {"e", "f"});
  b.moves1("u'", {"stay"}).moves1("v'", {"stay"});
  b.transition("s", "a", {{"t", 1}});
  b.transition("t", "b", {{"v", 1}});
  b.transition("t", "c", {{"u", 1}});
  b.transition("t", "f", {{"u", 0.5}, {"v", 0.5}});
  b.transition("u", "stay", {{"u", 1}});
  b.transition("v", "stay", {{"v", 1}});
  b.transition("s'", "a", {{"w'", 1}});
  b.transition("s'", "b", {{"t'", 1}});
  b.transition("t'", "c", {{"u'", 0.5 - eps}, {"v'", 0.5 + eps}});
  b.transition("w'", "e", {{"u'", 1 - eps}, {"v'", eps}});
  b.transition("w'", "f", {{"u'", eps}, {"v'", 1 - eps}});
  b.transition("u'", "stay", {{"u'", 1}});
  b.transition("v'", "stay", {{"v'", 1}});
  return b.build();
}

/// s (r = 2) -> t (r = 5), s' (r = rs) -> t' (r = rt); t and t' absorbing.
inline GameStructure fig2(double rs = 2.1, double rt = 8.0) {
  GameBuilder b(Interval{0.0, 8.0});
  b.states({"s", "t", "s'", "t'"});
  b.variable("r", {{"s", 2}, {"t", 5}, {"s'", rs}, {"t'", rt}});
  for (const char* x : {"s", "t", "s'", "t'"}) b.moves1(x, {"go"});
  b.transition("s", "go", {{"t", 1}});
  b.transition("t", "go", {{"t", 1}});
  b.transition("s'", "go", {{"t'", 1}});
  b.transition("t'", "go", {{"t'", 1}});
  return b.build();
}

/// Matching moves reach the goal g, mismatching ones the sink z.
inline GameStructure mismatch() {
  GameBuilder b(Interval{0.0, 1.0});
  b.states({"s", "g", "z"});
  b.variable("q", {{"s", 0}, {"g", 1}, {"z", 0}});
  b.moves1("s", {"a", "b"}).moves2("s", {"a", "b"});
  b.moves1("g", {"-"}).moves1("z", {"-"});
  b.transition("s", "a", "a", {{"g", 1}});
  b.transition("s", "b", "b", {{"g", 1}});
  b.transition("s", "a", "b", {{"z", 1}});
  b.transition("s", "b", "a", {{"z", 1}});
  b.transition("g", "-", {{"g", 1}});
  b.transition("z", "-", {{"z", 1}});
  return b.build();
}

/// Deterministic 2-cycle x <-> y with r(x) = 0, r(y) = 1.
inline GameStructure two_cycle() {
  GameBuilder b(Interval{0.0, 1.0});
  b.states({"x", "y"});
  b.variable("r", {{"x", 0}, {"y", 1}});
  b.moves1("x", {"go"}).moves1("y", {"go"});
  b.transition("x", "go", {{"y", 1}});
  b.transition("y", "go", {{"x", 1}});
  return b.build();
}

/// Turn-based game: player 1 at p chooses between the two player-2 states;
/// player 2 at q1 / q2 chooses among absorbing leaves.
inline GameStructure small_turn_based() {
  GameBuilder b(Interval{0.0, 1.0});
  b.states({"p", "q1", "q2", "hi", "mid", "lo"});
  b.variable("turn", {{"p", 0}, {"q1", 1}, {"q2", 1}, {"hi", 0}, {"mid", 0}, {"lo", 0}});
  b.variable("r", {{"p", 0.5}, {"q1", 0.5}, {"q2", 0.5}, {"hi", 1}, {"mid", 0.5}, {"lo", 0}});
  b.moves1("p", {"left", "right"});
  b.moves1("q1", {"-"}).moves2("q1", {"x", "y"});
  b.moves1("q2", {"-"}).moves2("q2", {"x", "y"});
  for (const char* leaf : {"hi", "mid", "lo"}) b.moves1(leaf, {"stay"});
  b.transition("p", "left", {{"q1", 1}});
  b.transition("p", "right", {{"q2", 1}});
  b.transition("q1", "-", "x", {{"hi", 1}});
  b.transition("q1", "-", "y", {{"mid", 0.5}, {"hi", 0.5}});
  b.transition("q2", "-", "x", {{"hi", 1}});
  b.transition("q2", "-", "y", {{"lo", 1}});
  for (const char* leaf : {"hi", "mid", "lo"}) b.transition(leaf, "stay", {{leaf, 1}});
  return b.build();
}

}  // namespace fixtures
