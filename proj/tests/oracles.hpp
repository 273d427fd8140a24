#pragma once

// Reference computations for the tests. None of them call into the library's
// solvers: they enumerate grids, strategies or vertices and use plain
// Gaussian elimination.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "gamemetrics/game.hpp"

namespace oracle {

using gamemetrics::GameStructure;
using gamemetrics::State;
using Matrix = std::vector<std::vector<double>>;

/// Solves A x = b by Gaussian elimination with partial pivoting; nullopt when
/// A is (numerically) singular.
inline std::optional<std::vector<double>> gauss_solve(Matrix a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
    if (std::abs(a[p][c]) < 1e-12) return std::nullopt;
    std::swap(a[p], a[c]);
    std::swap(b[p], b[c]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  for (std::size_t i = 0; i < n; ++i) b[i] /= a[i][i];
  return b;
}

/// Owner of each state in an MDP or turn-based game: 1 when player 1 picks.
inline std::vector<int> owners(const GameStructure& g) {
  std::vector<int> out(g.size(), 1);
  const auto* turn = g.find_variable(gamemetrics::kTurnVariable);
  for (State s = 0; s < g.size(); ++s) {
    if (g.moves1[s].size() > 1) out[s] = 1;
    else if (g.moves2[s].size() > 1) out[s] = 2;
    else if (turn) out[s] = turn->values[s] == g.interval.hi ? 2 : 1;
  }
  return out;
}

inline std::size_t choices(const GameStructure& g, State s, int owner) {
  return owner == 1 ? g.moves1[s].size() : g.moves2[s].size();
}

inline const gamemetrics::Distribution& chosen(const GameStructure& g, State s, int owner,
                                              std::size_t m) {
  return owner == 1 ? g.delta(s, m, 0) : g.delta(s, 0, m);
}

/// One-step value for MDP / turn-based games by pure-move enumeration.
inline double pre_state(const GameStructure& g, const std::vector<int>& own, State s,
                        const std::vector<double>& k) {
  double best = own[s] == 1 ? -std::numeric_limits<double>::infinity()
                            : std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < choices(g, s, own[s]); ++m) {
    double e = 0.0;
    for (const auto& [u, p] : chosen(g, s, own[s], m)) e += p * k[u];
    best = own[s] == 1 ? std::max(best, e) : std::min(best, e);
  }
  return best;
}

/// Enumerates every k on the grid lo, lo + step, ..., hi that satisfies
/// k(u) - k(v) <= d(u, v) + slack, calling f(k) for each.
inline void for_each_grid_valuation(std::size_t n, double lo, double hi, double step,
                                    const std::function<double(State, State)>& d,
                                    const std::function<void(const std::vector<double>&)>& f) {
  const int levels = static_cast<int>(std::llround((hi - lo) / step));
  std::vector<double> k(n);
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == n) {
      f(k);
      return;
    }
    for (int l = 0; l <= levels; ++l) {
      k[i] = lo + l * step;
      bool ok = true;
      for (std::size_t j = 0; j < i && ok; ++j)
        ok = k[i] - k[j] <= d(i, j) + 1e-12 && k[j] - k[i] <= d(j, i) + 1e-12;
      if (ok) rec(i + 1);
    }
  };
  rec(0);
}

/// Grid lower approximation of sup over k in C(d) of pre(k)(s) - pre(k)(t).
inline double grid_onestep_sup(const GameStructure& g, State s, State t,
                               const std::function<double(State, State)>& d, double step) {
  const auto own = owners(g);
  double best = -std::numeric_limits<double>::infinity();
  for_each_grid_valuation(g.size(), g.interval.lo, g.interval.hi, step, d,
                          [&](const std::vector<double>& k) {
                            best = std::max(best, pre_state(g, own, s, k) - pre_state(g, own, t, k));
                          });
  return best;
}

/// Value of the policy pair fixing one move per state:
/// w = (1 - alpha) r + alpha P w.
inline std::vector<double> policy_value(const GameStructure& g, const std::vector<int>& own,
                                        const std::vector<std::size_t>& policy,
                                        const std::vector<double>& r, double alpha) {
  const std::size_t n = g.size();
  Matrix a(n, std::vector<double>(n, 0.0));
  std::vector<double> b(n);
  for (State s = 0; s < n; ++s) {
    a[s][s] += 1.0;
    for (const auto& [u, p] : chosen(g, s, own[s], policy[s])) a[s][u] -= alpha * p;
    b[s] = (1.0 - alpha) * r[s];
  }
  return *gauss_solve(a, b);
}

/// Discounted values of an MDP or turn-based game: max over player-1 pure
/// stationary policies of the min over player-2 ones, evaluated per state.
inline std::vector<double> discounted_by_policies(const GameStructure& g,
                                                  const std::vector<double>& r, double alpha) {
  const std::size_t n = g.size();
  const auto own = owners(g);
  std::vector<State> p1, p2;
  for (State s = 0; s < n; ++s) (own[s] == 1 ? p1 : p2).push_back(s);
  std::vector<double> best(n, -std::numeric_limits<double>::infinity());
  std::vector<std::size_t> policy(n, 0);
  std::function<void(std::size_t)> outer = [&](std::size_t i) {
    if (i < p1.size()) {
      for (std::size_t m = 0; m < choices(g, p1[i], 1); ++m) {
        policy[p1[i]] = m;
        outer(i + 1);
      }
      return;
    }
    std::vector<double> worst(n, std::numeric_limits<double>::infinity());
    std::function<void(std::size_t)> inner = [&](std::size_t j) {
      if (j < p2.size()) {
        for (std::size_t m = 0; m < choices(g, p2[j], 2); ++m) {
          policy[p2[j]] = m;
          inner(j + 1);
        }
        return;
      }
      const auto w = policy_value(g, own, policy, r, alpha);
      for (State s = 0; s < n; ++s) worst[s] = std::min(worst[s], w[s]);
    };
    inner(0);
    for (State s = 0; s < n; ++s) best[s] = std::max(best[s], worst[s]);
  };
  outer(0);
  return best;
}

/// Row player's value by a fine grid over mixed strategies of a 2-row game.
inline double two_row_game_value(const Matrix& m, std::size_t steps = 20000) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i <= steps; ++i) {
    const double p = static_cast<double>(i) / static_cast<double>(steps);
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < m[0].size(); ++j)
      worst = std::min(worst, p * m[0][j] + (1.0 - p) * m[1][j]);
    best = std::max(best, worst);
  }
  return best;
}

}  // namespace oracle
