#pragma once

// One-step distances for turn-based games and MDPs. The supremum over test
// valuations k in C(d) is never optimized directly: pure moves are enumerated
// on the side whose owner maximizes, and for each of them the dual
// trans-shipping LP is solved with mixed moves on the other side.

#include <algorithm>
#include <cstddef>
#include <vector>

#include "gamemetrics/game.hpp"
#include "gamemetrics/linprog.hpp"
#include "gamemetrics/relations.hpp"

namespace gamemetrics {

namespace detail {

/// Distributions a state's owner can choose among (one per pure move).
inline std::vector<const Distribution*> move_options(const GameStructure& g, const PlayerView& v,
                                                     State s) {
  std::vector<const Distribution*> out;
  if (v.owner[s] == 1) {
    for (std::size_t a = 0; a < g.moves1[s].size(); ++a) out.push_back(&g.delta(s, a, 0));
  } else {
    for (std::size_t b = 0; b < g.moves2[s].size(); ++b) out.push_back(&g.delta(s, 0, b));
  }
  return out;
}

/// One end of a shipping problem: a single distribution, or a mixture over
/// several that the LP is free to choose.
struct ShippingSide {
  std::vector<const Distribution*> options;
};

inline std::vector<State> support_union(const ShippingSide& side) {
  std::vector<State> out;
  for (const Distribution* d : side.options)
    for (const auto& [u, p] : *d)
      if (p > 0.0) out.push_back(u);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline double mass_at(const Distribution& d, State u) {
  auto it = std::lower_bound(d.begin(), d.end(), u,
                             [](const auto& e, State x) { return e.first < x; });
  return it != d.end() && it->first == u ? it->second : 0.0;
}

inline bool is_point_mass(const Distribution& d, State* at) {
  std::size_t count = 0;
  for (const auto& [u, p] : d)
    if (p > 0.0) {
      ++count;
      *at = u;
    }
  return count == 1;
}

// Builds the shipping LP. `allowed` filters the lambda variables (nullptr:
// all pairs); `cost` may be nullptr for pure feasibility.
inline lp::LpProblem shipping_lp(const ShippingSide& from, const ShippingSide& to,
                                 const MetricMatrix* cost, const Relation* allowed) {
  const auto us = support_union(from);
  const auto vs = support_union(to);
  lp::LpProblem p;
  std::vector<std::vector<lp::Term>> row_u(us.size()), row_v(vs.size());
  for (std::size_t i = 0; i < us.size(); ++i)
    for (std::size_t j = 0; j < vs.size(); ++j) {
      if (allowed && !allowed->contains(us[i], vs[j])) continue;
      const auto var = p.add_variable("l");
      if (cost) p.set_objective(var, (*cost)(us[i], vs[j]));
      row_u[i].push_back({var, 1.0});
      row_v[j].push_back({var, 1.0});
    }
  auto add_side = [&](const ShippingSide& side, const std::vector<State>& sup,
                      std::vector<std::vector<lp::Term>>& rows) {
    if (side.options.size() == 1) {
      for (std::size_t i = 0; i < sup.size(); ++i)
        p.add_constraint(std::move(rows[i]), lp::Relation::Equal,
                         mass_at(*side.options[0], sup[i]));
      return;
    }
    std::vector<lp::Term> simplex;
    for (const Distribution* d : side.options) {
      const auto var = p.add_variable("w");
      simplex.push_back({var, 1.0});
      for (std::size_t i = 0; i < sup.size(); ++i) {
        const double m = mass_at(*d, sup[i]);
        if (m != 0.0) rows[i].push_back({var, -m});
      }
    }
    for (auto& r : rows) p.add_constraint(std::move(r), lp::Relation::Equal, 0.0);
    p.add_constraint(std::move(simplex), lp::Relation::Equal, 1.0);
  };
  add_side(from, us, row_u);
  add_side(to, vs, row_v);
  return p;
}

/// Minimum over the sides' mixtures of the cost of shipping `from` into `to`
/// when moving unit mass from u to v costs d(u, v).
inline double min_shipping(const ShippingSide& from, const ShippingSide& to,
                           const MetricMatrix& d) {
  if (from.options.size() == 1 && to.options.size() == 1) {
    const Distribution& a = *from.options[0];
    const Distribution& b = *to.options[0];
    if (a == b) return 0.0;
    State u0 = 0;
    if (is_point_mass(a, &u0)) {
      double c = 0.0;
      for (const auto& [v, q] : b) c += q * d(u0, v);
      return c;
    }
    if (is_point_mass(b, &u0)) {
      double c = 0.0;
      for (const auto& [u, q] : a) c += q * d(u, u0);
      return c;
    }
  }
  const auto out = lp::solve(shipping_lp(from, to, &d, nullptr));
  if (out.status != lp::LpStatus::Optimal)
    throw NumericError("trans-shipping LP did not reach an optimum");
  return std::max(0.0, out.value);
}

/// Whether `from` can be shipped into `to` using only pairs in `allowed`.
inline bool zero_shipping_feasible(const ShippingSide& from, const ShippingSide& to,
                                   const Relation& allowed) {
  return lp::feasible(shipping_lp(from, to, nullptr, &allowed)).has_value();
}

// Enumerates the pure choices: the side owned by player 1 at s and by player 2
// at t is pure, the other side mixes.
template <class F>
void for_each_pure_choice(const GameStructure& g, const PlayerView& v, State s, State t, F&& f) {
  const auto os = move_options(g, v, s);
  const auto ot = move_options(g, v, t);
  std::vector<ShippingSide> from_sides, to_sides;
  if (v.owner[s] == 1)
    for (const Distribution* d : os) from_sides.push_back({{d}});
  else
    from_sides.push_back({os});
  if (v.owner[t] == 2)
    for (const Distribution* d : ot) to_sides.push_back({{d}});
  else
    to_sides.push_back({ot});
  for (const auto& a : from_sides)
    for (const auto& b : to_sides) f(a, b);
}

/// sup over k in C(d) of pre1(k)(s) - pre1(k)(t), for any pair of owners.
/// Direct shipping needs d to satisfy the triangle inequality already.
inline double onestep_sup(const GameStructure& g, const PlayerView& v, State s, State t,
                          const MetricMatrix& d) {
  if (s == t) return 0.0;
  double best = 0.0;
  for_each_pure_choice(g, v, s, t, [&](const ShippingSide& a, const ShippingSide& b) {
    best = std::max(best, min_shipping(a, b, d));
  });
  return best;
}

inline bool onestep_zero_feasible(const GameStructure& g, const PlayerView& v, State s, State t,
                                  const Relation& allowed) {
  bool ok = true;
  for_each_pure_choice(g, v, s, t, [&](const ShippingSide& a, const ShippingSide& b) {
    if (ok && !zero_shipping_feasible(a, b, allowed)) ok = false;
  });
  return ok;
}

inline bool onebis_feasible(const GameStructure& g, const PlayerView& v, State s, State t,
                            const Partition& q) {
  const auto os = move_options(g, v, s);
  const auto ot = move_options(g, v, t);
  const std::size_t nb = q.blocks().size();
  auto class_mass = [&](const Distribution& d) {
    std::vector<double> m(nb, 0.0);
    for (const auto& [u, p] : d) m[q.block_of(u)] += p;
    return m;
  };
  std::vector<std::vector<double>> tmass;
  for (const Distribution* d : ot) tmass.push_back(class_mass(*d));
  for (const Distribution* a : os) {
    const auto need = class_mass(*a);
    if (ot.size() == 1) {
      for (std::size_t c = 0; c < nb; ++c)
        if (tmass[0][c] < need[c] - kProbabilityTolerance) return false;
      continue;
    }
    bool matched = false;
    for (const auto& m : tmass) {
      bool all = true;
      for (std::size_t c = 0; c < nb && all; ++c) all = m[c] >= need[c] - kProbabilityTolerance;
      if (all) {
        matched = true;
        break;
      }
    }
    if (matched) continue;
    lp::LpProblem p;
    std::vector<lp::Term> simplex;
    for (std::size_t b = 0; b < ot.size(); ++b) simplex.push_back({p.add_variable("x"), 1.0});
    p.add_constraint(simplex, lp::Relation::Equal, 1.0);
    for (std::size_t c = 0; c < nb; ++c) {
      if (need[c] <= 0.0) continue;
      std::vector<lp::Term> row;
      for (std::size_t b = 0; b < ot.size(); ++b)
        if (tmass[b][c] != 0.0) row.push_back({b, tmass[b][c]});
      p.add_constraint(std::move(row), lp::Relation::GreaterEq, need[c]);
    }
    if (!lp::feasible(p)) return false;
  }
  return true;
}

inline void require_same_owner(const PlayerView& v, State s, State t) {
  if (v.owner[s] != v.owner[t])
    throw ContractError("states are owned by different players");
}

}  // namespace detail

/// Optimal value of the trans-shipping LP for one pure move. For player-1
/// states `move` indexes Γ1(s) and t mixes; for player-2 states the roles swap
/// and `move` indexes Γ2(t) while s mixes.
inline double onestep_move(const GameStructure& g, State s, State t, const MetricMatrix& d,
                           std::size_t move) {
  const auto v = player_view(g);
  detail::require_same_owner(v, s, t);
  const auto os = detail::move_options(g, v, s);
  const auto ot = detail::move_options(g, v, t);
  const MetricMatrix c = triangle_closure(d);
  if (v.owner[s] == 1) {
    if (move >= os.size()) throw ContractError("move not available at source state");
    return detail::min_shipping({{os[move]}}, {ot}, c);
  }
  if (move >= ot.size()) throw ContractError("move not available at target state");
  return detail::min_shipping({os}, {{ot[move]}}, c);
}

inline double onestep_move(const GameStructure& g, std::string_view s, std::string_view t,
                           const MetricMatrix& d, std::string_view move) {
  const State si = g.index_of(s), ti = g.index_of(t);
  const auto v = player_view(g);
  const std::size_t m =
      v.owner[si] == 1 ? g.move_index(si, 1, move) : g.move_index(ti, 2, move);
  return onestep_move(g, si, ti, d, m);
}

/// Undiscounted one-step simulation distance: propositional distance joined
/// with the best pure move's shipping cost. Pairs with different owners are at
/// the maximal distance.
inline double onestep(const GameStructure& g, State s, State t, const MetricMatrix& d) {
  const auto v = player_view(g);
  if (v.owner[s] != v.owner[t]) return g.theta();
  return std::max(prop_distance(g, s, t), detail::onestep_sup(g, v, s, t, triangle_closure(d)));
}

/// sup over k in C(d) of pre1(k)(s) - pre1(k)(t) without the propositional
/// term; d need not satisfy the triangle inequality.
inline double shipping_sup(const GameStructure& g, State s, State t, const MetricMatrix& d) {
  if (d.size() != g.size()) throw ContractError("metric size does not match state count");
  return detail::onestep_sup(g, player_view(g), s, t, triangle_closure(d));
}

inline double onestep(const GameStructure& g, std::string_view s, std::string_view t,
                      const MetricMatrix& d) {
  return onestep(g, g.index_of(s), g.index_of(t), d);
}

/// Whether every pure move of s has a mixed move of t with at least the same
/// mass on every class of `q`.
inline bool onebis_feasible(const GameStructure& g, State s, State t, const Partition& q) {
  const auto v = player_view(g);
  detail::require_same_owner(v, s, t);
  return detail::onebis_feasible(g, v, s, t, q);
}

}  // namespace gamemetrics
