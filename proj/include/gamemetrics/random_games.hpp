#pragma once

// Seeded random game structures for property checks. Values come from
// {0, 0.5, 1} and probabilities are multiples of 1/4, so ties and exact zero
// distances occur often; some states are copies of others so that kernels are
// not trivially the identity.

#include <algorithm>
#include <cstddef>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "gamemetrics/game.hpp"

namespace gamemetrics {

struct RandomGameOptions {
  std::size_t max_states = 6;
  std::size_t max_moves = 3;
  std::size_t max_variables = 2;
  bool turn_based = false;
};

namespace detail {

inline std::size_t pick(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

/// Splits 4 quarters over 1..3 distinct targets among the first n states.
inline Distribution random_distribution(std::mt19937_64& rng, std::size_t n) {
  std::vector<State> targets(n);
  for (State i = 0; i < n; ++i) targets[i] = i;
  std::shuffle(targets.begin(), targets.end(), rng);
  const std::size_t k = pick(rng, 1, std::min<std::size_t>(3, n));
  std::vector<int> units(k, 1);
  for (int left = 4 - static_cast<int>(k); left > 0; --left) ++units[pick(rng, 0, k - 1)];
  Distribution d;
  for (std::size_t i = 0; i < k; ++i) d.emplace_back(targets[i], units[i] / 4.0);
  std::sort(d.begin(), d.end());
  return d;
}

inline double random_level(std::mt19937_64& rng) { return 0.5 * static_cast<double>(pick(rng, 0, 2)); }

}  // namespace detail

/// A player-1 MDP, or a turn-based game carrying a `turn` variable. The reward
/// variable is always named "r".
inline GameStructure random_game(std::mt19937_64& rng, const RandomGameOptions& opt = {}) {
  using detail::pick;
  const std::size_t total = pick(rng, 2, std::max<std::size_t>(2, opt.max_states));
  const std::size_t copies = pick(rng, 0, total / 2);
  const std::size_t base = total - copies;

  GameStructure g;
  g.interval = {0.0, 1.0};
  for (State s = 0; s < total; ++s) g.states.push_back("s" + std::to_string(s));
  std::vector<State> origin(total);
  for (State s = 0; s < total; ++s) origin[s] = s < base ? s : pick(rng, 0, base - 1);

  std::vector<std::string> names{"r"};
  if (opt.turn_based) names.insert(names.begin(), kTurnVariable);
  else if (opt.max_variables >= 2 && pick(rng, 0, 1) == 1) names.push_back("q");
  for (const auto& name : names) {
    Variable v{name, std::vector<double>(total)};
    for (State s = 0; s < base; ++s)
      v.values[s] = name == kTurnVariable ? static_cast<double>(pick(rng, 0, 1))
                                          : detail::random_level(rng);
    for (State s = base; s < total; ++s) v.values[s] = v.values[origin[s]];
    g.variables.push_back(std::move(v));
  }

  std::vector<std::vector<Distribution>> options(total);
  for (State s = 0; s < base; ++s) {
    const std::size_t m = pick(rng, 1, std::max<std::size_t>(1, opt.max_moves));
    for (std::size_t a = 0; a < m; ++a) options[s].push_back(detail::random_distribution(rng, total));
  }
  for (State s = base; s < total; ++s) {
    options[s] = options[origin[s]];
    std::shuffle(options[s].begin(), options[s].end(), rng);
  }

  g.moves1.resize(total);
  g.moves2.resize(total);
  g.trans.resize(total);
  for (State s = 0; s < total; ++s) {
    std::vector<std::string> moves;
    for (std::size_t a = 0; a < options[s].size(); ++a) moves.push_back("m" + std::to_string(a));
    const bool second = opt.turn_based && g.variables.front().values[s] == g.interval.hi;
    g.moves1[s] = second ? std::vector<std::string>{kDefaultMove} : moves;
    g.moves2[s] = second ? moves : std::vector<std::string>{kDefaultMove};
    g.trans[s] = options[s];
  }
  return g;
}

/// Concurrent reachability game with goal state "g" (q = 1, absorbing), a
/// safe sink "z" and 1-2 inner states where both players pick among 1-2 moves.
inline GameStructure random_reachability_game(std::mt19937_64& rng) {
  using detail::pick;
  const std::size_t inner = pick(rng, 1, 2);
  const std::size_t n = inner + 2;
  GameStructure g;
  g.interval = {0.0, 1.0};
  for (State s = 0; s < inner; ++s) g.states.push_back("s" + std::to_string(s));
  g.states.push_back("g");
  g.states.push_back("z");
  Variable q{"q", std::vector<double>(n, 0.0)};
  q.values[inner] = 1.0;
  g.variables.push_back(std::move(q));
  g.moves1.resize(n);
  g.moves2.resize(n);
  g.trans.resize(n);
  std::vector<std::pair<std::size_t, std::size_t>> shape(inner);
  for (auto& [m1, m2] : shape) {
    m1 = pick(rng, 1, 2);
    m2 = pick(rng, 1, 2);
  }
  // Alternating control without a turn variable is not a valid structure, so
  // such draws become concurrent at the first inner state.
  if (inner == 2 && shape[0].first != shape[1].first && shape[0].second != shape[1].second &&
      shape[0].first * shape[0].second == 2 && shape[1].first * shape[1].second == 2)
    shape[0] = {2, 2};
  for (State s = 0; s < inner; ++s) {
    const auto [m1, m2] = shape[s];
    for (std::size_t a = 0; a < m1; ++a) g.moves1[s].push_back("a" + std::to_string(a));
    for (std::size_t b = 0; b < m2; ++b) g.moves2[s].push_back("b" + std::to_string(b));
    for (std::size_t i = 0; i < m1 * m2; ++i) g.trans[s].push_back(detail::random_distribution(rng, n));
  }
  for (State s = inner; s < n; ++s) {
    g.moves1[s] = {kDefaultMove};
    g.moves2[s] = {kDefaultMove};
    g.trans[s] = {Distribution{{s, 1.0}}};
  }
  return g;
}

}  // namespace gamemetrics
