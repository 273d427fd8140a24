#pragma once

// Game structures: states, observation variables, per-player move sets and a
// probabilistic transition function, plus the basic queries every metric and
// payoff algorithm is built from.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "gamemetrics/errors.hpp"

namespace gamemetrics {

using State = std::size_t;

/// A valuation assigns a real in the game's interval to every state.
using Valuation = std::vector<double>;

/// Probability weights over a state's pure moves, indexed like the move list.
using MixedMove = std::vector<double>;

/// Distribution sums must match 1 within this tolerance.
inline constexpr double kProbabilityTolerance = 1e-9;

inline const std::string kTurnVariable = "turn";
inline const std::string kDefaultMove = "-";

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  double width() const { return hi - lo; }
};

/// Sparse distribution over states, sorted by state, no duplicate targets.
using Distribution = std::vector<std::pair<State, double>>;

struct Variable {
  std::string name;
  std::vector<double> values;  // one per state
};

enum class GameKind { Mdp1, Mdp2, TurnBased, Concurrent };

inline std::string_view to_string(GameKind k) {
  switch (k) {
    case GameKind::Mdp1: return "MDP1";
    case GameKind::Mdp2: return "MDP2";
    case GameKind::TurnBased: return "TurnBased";
    case GameKind::Concurrent: return "Concurrent";
  }
  return "?";
}

struct GameStructure {
  std::vector<std::string> states;
  Interval interval;
  std::vector<Variable> variables;
  std::vector<std::vector<std::string>> moves1;
  std::vector<std::vector<std::string>> moves2;
  /// trans[s][a * moves2[s].size() + b]; an empty distribution marks a
  /// missing entry.
  std::vector<std::vector<Distribution>> trans;

  std::size_t size() const { return states.size(); }
  double theta() const { return interval.width(); }

  State index_of(std::string_view name) const {
    for (std::size_t i = 0; i < states.size(); ++i)
      if (states[i] == name) return i;
    throw LookupError("unknown state '" + std::string(name) + "'");
  }

  const Variable* find_variable(std::string_view name) const {
    for (const auto& v : variables)
      if (v.name == name) return &v;
    return nullptr;
  }

  const Variable& variable(std::string_view name) const {
    if (const Variable* v = find_variable(name)) return *v;
    throw LookupError("unknown variable '" + std::string(name) + "'");
  }

  std::size_t move_index(State s, int player, std::string_view move) const {
    const auto& ms = player == 1 ? moves1.at(s) : moves2.at(s);
    for (std::size_t i = 0; i < ms.size(); ++i)
      if (ms[i] == move) return i;
    throw LookupError("unknown move '" + std::string(move) + "' for player " +
                      std::to_string(player) + " at state '" + states.at(s) + "'");
  }

  const Distribution& delta(State s, std::size_t a, std::size_t b) const {
    return trans[s][a * moves2[s].size() + b];
  }

  bool operator==(const GameStructure& o) const {
    if (states != o.states || interval.lo != o.interval.lo || interval.hi != o.interval.hi ||
        moves1 != o.moves1 || moves2 != o.moves2 || trans != o.trans ||
        variables.size() != o.variables.size())
      return false;
    for (std::size_t i = 0; i < variables.size(); ++i)
      if (variables[i].name != o.variables[i].name || variables[i].values != o.variables[i].values)
        return false;
    return true;
  }
};

/// Incremental construction by name. States must be declared before anything
/// refers to them, and moves before transitions that use them. Player-2 move
/// sets default to the single move "-".
class GameBuilder {
 public:
  explicit GameBuilder(Interval interval = {}) { g_.interval = interval; }

  GameBuilder& state(const std::string& name) {
    if (std::find(g_.states.begin(), g_.states.end(), name) != g_.states.end())
      throw ContractError("duplicate state '" + name + "'");
    g_.states.push_back(name);
    g_.moves1.emplace_back();
    g_.moves2.emplace_back();
    declared2_.push_back(false);
    return *this;
  }

  GameBuilder& states(std::initializer_list<std::string> names) {
    for (const auto& n : names) state(n);
    return *this;
  }

  /// Unlisted states get NaN, which validate() reports.
  GameBuilder& variable(const std::string& name,
                        const std::vector<std::pair<std::string, double>>& values) {
    if (g_.find_variable(name)) throw ContractError("duplicate variable '" + name + "'");
    Variable v{name, std::vector<double>(g_.size(), std::numeric_limits<double>::quiet_NaN())};
    for (const auto& [s, x] : values) v.values[g_.index_of(s)] = x;
    g_.variables.push_back(std::move(v));
    return *this;
  }

  GameBuilder& moves1(const std::string& s, std::vector<std::string> moves) {
    g_.moves1[g_.index_of(s)] = std::move(moves);
    return *this;
  }

  GameBuilder& moves2(const std::string& s, std::vector<std::string> moves) {
    const State i = g_.index_of(s);
    g_.moves2[i] = std::move(moves);
    declared2_[i] = true;
    return *this;
  }

  GameBuilder& transition(const std::string& s, const std::string& m1, const std::string& m2,
                          const std::vector<std::pair<std::string, double>>& dist) {
    const State i = g_.index_of(s);
    const auto& ms1 = g_.moves1[i];
    if (std::find(ms1.begin(), ms1.end(), m1) == ms1.end())
      throw LookupError("unknown move '" + m1 + "' for player 1 at state '" + s + "'");
    if (declared2_[i]) {
      const auto& ms2 = g_.moves2[i];
      if (std::find(ms2.begin(), ms2.end(), m2) == ms2.end())
        throw LookupError("unknown move '" + m2 + "' for player 2 at state '" + s + "'");
    } else if (m2 != kDefaultMove) {
      throw LookupError("unknown move '" + m2 + "' for player 2 at state '" + s + "'");
    }
    const auto key = std::make_tuple(i, m1, m2);
    if (pending_.count(key))
      throw ContractError("duplicate transition for (" + s + ", " + m1 + ", " + m2 + ")");
    std::map<State, double> acc;
    for (const auto& [target, p] : dist) acc[g_.index_of(target)] += p;
    Distribution d;
    for (const auto& [u, p] : acc)
      if (p != 0.0) d.emplace_back(u, p);  // zero entries are not successors
    pending_[key] = std::move(d);
    return *this;
  }

  /// Shorthand for player-1-only states.
  GameBuilder& transition(const std::string& s, const std::string& m1,
                          const std::vector<std::pair<std::string, double>>& dist) {
    return transition(s, m1, kDefaultMove, dist);
  }

  GameStructure build() const {
    GameStructure g = g_;
    for (State s = 0; s < g.size(); ++s) {
      if (!declared2_[s]) g.moves2[s] = {kDefaultMove};
    }
    g.trans.assign(g.size(), {});
    for (State s = 0; s < g.size(); ++s) {
      g.trans[s].assign(g.moves1[s].size() * g.moves2[s].size(), {});
      for (std::size_t a = 0; a < g.moves1[s].size(); ++a)
        for (std::size_t b = 0; b < g.moves2[s].size(); ++b) {
          auto it = pending_.find(std::make_tuple(s, g.moves1[s][a], g.moves2[s][b]));
          if (it != pending_.end()) g.trans[s][a * g.moves2[s].size() + b] = it->second;
        }
    }
    return g;
  }

 private:
  GameStructure g_;
  std::vector<bool> declared2_;
  std::map<std::tuple<State, std::string, std::string>, Distribution> pending_;
};

namespace detail {

inline bool all_single(const std::vector<std::vector<std::string>>& moves) {
  return std::all_of(moves.begin(), moves.end(), [](const auto& m) { return m.size() == 1; });
}

inline std::string fmt_real(double x) {
  std::ostringstream os;
  os.precision(9);
  os << x;
  return os.str();
}

}  // namespace detail

/// Lists every violated structural invariant; empty iff the game is well formed.
inline std::vector<std::string> validate(const GameStructure& g) {
  std::vector<std::string> out;
  const std::size_t n = g.size();
  const double lo = g.interval.lo, hi = g.interval.hi;
  if (!(std::isfinite(lo) && std::isfinite(hi) && lo < hi))
    out.push_back("interval [" + detail::fmt_real(lo) + ", " + detail::fmt_real(hi) +
                  "] must satisfy theta1 < theta2");
  if (n == 0) out.push_back("game has no states");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (g.states[i] == g.states[j]) out.push_back("duplicate state '" + g.states[i] + "'");

  for (const auto& v : g.variables) {
    if (v.values.size() != n) {
      out.push_back("variable '" + v.name + "' has " + std::to_string(v.values.size()) +
                    " values for " + std::to_string(n) + " states");
      continue;
    }
    for (State s = 0; s < n; ++s) {
      const double x = v.values[s];
      if (std::isnan(x))
        out.push_back("variable '" + v.name + "' has no value at state '" + g.states[s] + "'");
      else if (x < lo || x > hi)
        out.push_back("variable '" + v.name + "' at state '" + g.states[s] + "' = " +
                      detail::fmt_real(x) + " lies outside the interval");
    }
  }

  if (g.moves1.size() != n || g.moves2.size() != n || g.trans.size() != n) {
    out.push_back("move or transition tables do not cover every state");
    return out;
  }
  for (State s = 0; s < n; ++s) {
    const auto& name = g.states[s];
    if (g.moves1[s].empty()) out.push_back("state '" + name + "' has no player-1 moves");
    if (g.moves2[s].empty()) out.push_back("state '" + name + "' has no player-2 moves");
    if (g.trans[s].size() != g.moves1[s].size() * g.moves2[s].size()) {
      out.push_back("transition table of state '" + name + "' has the wrong shape");
      continue;
    }
    for (std::size_t a = 0; a < g.moves1[s].size(); ++a)
      for (std::size_t b = 0; b < g.moves2[s].size(); ++b) {
        const auto& dist = g.delta(s, a, b);
        const std::string where =
            "(" + name + ", " + g.moves1[s][a] + ", " + g.moves2[s][b] + ")";
        if (dist.empty()) {
          out.push_back("missing transition at " + where);
          continue;
        }
        double sum = 0.0;
        bool bad = false;
        for (const auto& [t, p] : dist) {
          if (t >= n) {
            out.push_back("transition at " + where + " targets an unknown state");
            bad = true;
          }
          if (!std::isfinite(p) || p < 0.0) {
            out.push_back("transition at " + where + " has a negative probability");
            bad = true;
          }
          sum += p;
        }
        if (!bad && std::abs(sum - 1.0) > kProbabilityTolerance)
          out.push_back("distribution at " + where + " sums to " + detail::fmt_real(sum));
      }
  }

  // Turn-based structure: at most one player chooses at every state.
  const bool mdp = detail::all_single(g.moves1) || detail::all_single(g.moves2);
  bool single_chooser = true;
  for (State s = 0; s < n; ++s)
    if (g.moves1[s].size() > 1 && g.moves2[s].size() > 1) single_chooser = false;
  if (const Variable* turn = g.find_variable(kTurnVariable); turn && turn->values.size() == n) {
    for (State s = 0; s < n; ++s) {
      const double x = turn->values[s];
      if (x == lo) {
        if (g.moves2[s].size() != 1)
          out.push_back("player-1 state '" + g.states[s] + "' gives player 2 a choice");
      } else if (x == hi) {
        if (g.moves1[s].size() != 1)
          out.push_back("player-2 state '" + g.states[s] + "' gives player 1 a choice");
      } else if (!std::isnan(x)) {
        out.push_back("variable 'turn' at state '" + g.states[s] +
                      "' must equal theta1 or theta2");
      }
    }
  } else if (!mdp && single_chooser) {
    out.push_back("turn-based structure requires a 'turn' variable");
  }
  return out;
}

inline void require_valid(const GameStructure& g) {
  auto v = validate(g);
  if (!v.empty()) throw ValidationError(std::move(v));
}

/// Ties resolve MDP1 > MDP2 > TurnBased > Concurrent.
inline GameKind classify(const GameStructure& g) {
  require_valid(g);
  if (detail::all_single(g.moves2)) return GameKind::Mdp1;
  if (detail::all_single(g.moves1)) return GameKind::Mdp2;
  if (g.find_variable(kTurnVariable)) return GameKind::TurnBased;
  return GameKind::Concurrent;
}

/// Which player chooses at each state of a turn-based game or MDP.
struct PlayerView {
  GameKind kind;
  std::vector<int> owner;  // 1 or 2
};

inline PlayerView player_view(const GameStructure& g) {
  PlayerView v{classify(g), std::vector<int>(g.size(), 1)};
  switch (v.kind) {
    case GameKind::Mdp1: break;
    case GameKind::Mdp2: std::fill(v.owner.begin(), v.owner.end(), 2); break;
    case GameKind::TurnBased: {
      const auto& turn = g.variable(kTurnVariable);
      for (State s = 0; s < g.size(); ++s) v.owner[s] = turn.values[s] == g.interval.hi ? 2 : 1;
      break;
    }
    case GameKind::Concurrent:
      throw UnsupportedStructure("operation requires a turn-based game or MDP");
  }
  return v;
}

/// Largest difference in any observation variable.
inline double prop_distance(const GameStructure& g, State s, State t) {
  if (s >= g.size() || t >= g.size()) throw LookupError("state index out of range");
  double d = 0.0;
  for (const auto& v : g.variables) d = std::max(d, std::abs(v.values[s] - v.values[t]));
  return d;
}

inline double prop_distance(const GameStructure& g, std::string_view s, std::string_view t) {
  return prop_distance(g, g.index_of(s), g.index_of(t));
}

inline void check_mixed_move(std::span<const double> x, std::size_t moves, std::string_view what) {
  if (x.size() != moves)
    throw ContractError(std::string(what) + ": expected " + std::to_string(moves) + " weights");
  double sum = 0.0;
  for (double w : x) {
    if (!(w >= 0.0)) throw ContractError(std::string(what) + ": negative weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > kProbabilityTolerance)
    throw ContractError(std::string(what) + ": weights sum to " + detail::fmt_real(sum));
}

/// delta(s, x1, x2) extended bilinearly to mixed moves, as a dense vector.
inline std::vector<double> mixed_successor(const GameStructure& g, State s,
                                           std::span<const double> x1,
                                           std::span<const double> x2) {
  check_mixed_move(x1, g.moves1[s].size(), "player-1 mixed move");
  check_mixed_move(x2, g.moves2[s].size(), "player-2 mixed move");
  std::vector<double> out(g.size(), 0.0);
  for (std::size_t a = 0; a < x1.size(); ++a)
    for (std::size_t b = 0; b < x2.size(); ++b) {
      const double w = x1[a] * x2[b];
      if (w == 0.0) continue;
      for (const auto& [t, p] : g.delta(s, a, b)) out[t] += w * p;
    }
  return out;
}

/// One-step expectation of k from s when the players use x1 and x2.
inline double expectation(const GameStructure& g, State s, std::span<const double> x1,
                          std::span<const double> x2, std::span<const double> k) {
  if (k.size() != g.size()) throw ContractError("valuation size does not match state count");
  const auto dist = mixed_successor(g, s, x1, x2);
  double e = 0.0;
  for (State t = 0; t < g.size(); ++t) e += dist[t] * k[t];
  return e;
}

/// Expectation of k under a single pure move pair.
inline double expectation(const Distribution& d, std::span<const double> k) {
  double e = 0.0;
  for (const auto& [t, p] : d) e += p * k[t];
  return e;
}

/// Candidate directed metric over the states of one game. Entries flagged
/// divergent hold the last finite iterate of an unbounded sequence.
class MetricMatrix {
 public:
  MetricMatrix() = default;
  explicit MetricMatrix(std::size_t n, double fill = 0.0)
      : n_(n), d_(n * n, fill), divergent_(n * n, 0) {
    for (std::size_t i = 0; i < n; ++i) d_[i * n + i] = 0.0;
  }

  std::size_t size() const { return n_; }
  double operator()(State s, State t) const { return d_[s * n_ + t]; }
  double& operator()(State s, State t) { return d_[s * n_ + t]; }

  bool divergent(State s, State t) const { return divergent_[s * n_ + t] != 0; }
  void set_divergent(State s, State t, bool v = true) { divergent_[s * n_ + t] = v ? 1 : 0; }
  bool any_divergent() const {
    return std::any_of(divergent_.begin(), divergent_.end(), [](char c) { return c != 0; });
  }

  /// +inf for divergent entries.
  double value_or_infinity(State s, State t) const {
    return divergent(s, t) ? std::numeric_limits<double>::infinity() : (*this)(s, t);
  }

  double max_difference(const MetricMatrix& o) const {
    double m = 0.0;
    for (std::size_t i = 0; i < d_.size(); ++i) m = std::max(m, std::abs(d_[i] - o.d_[i]));
    return m;
  }

  bool is_symmetric(double tol) const {
    for (std::size_t s = 0; s < n_; ++s)
      for (std::size_t t = 0; t < s; ++t)
        if (std::abs((*this)(s, t) - (*this)(t, s)) > tol) return false;
    return true;
  }

  bool satisfies_triangle(double tol) const {
    for (std::size_t s = 0; s < n_; ++s)
      for (std::size_t t = 0; t < n_; ++t)
        for (std::size_t u = 0; u < n_; ++u)
          if ((*this)(s, t) > (*this)(s, u) + (*this)(u, t) + tol) return false;
    return true;
  }

  const std::vector<double>& data() const { return d_; }

 private:
  std::size_t n_ = 0;
  std::vector<double> d_;
  std::vector<char> divergent_;
};

/// Shortest-path closure of d: the largest matrix below d that satisfies the
/// triangle inequality. Both admit the same test valuations.
inline MetricMatrix triangle_closure(const MetricMatrix& d) {
  const std::size_t n = d.size();
  MetricMatrix c(n);
  for (State s = 0; s < n; ++s)
    for (State t = 0; t < n; ++t)
      if (s != t) c(s, t) = d(s, t);
  for (State k = 0; k < n; ++k)
    for (State i = 0; i < n; ++i)
      for (State j = 0; j < n; ++j) c(i, j) = std::min(c(i, j), c(i, k) + c(k, j));
  return c;
}

}  // namespace gamemetrics
