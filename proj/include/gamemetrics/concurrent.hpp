#pragma once

// Concurrent games. For a fixed test valuation k, the one-step distance term
// reduces to pre1(k)(s) - pre1(k)(t) (player 2 may be restricted to pure moves
// at t), i.e. two matrix-game values. The supremum over k in C(d) has no
// polynomial characterization here, so it is approached from below by
// evaluating feasible valuations only: every reported number is a certified
// lower bound on the exact distance.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gamemetrics/game.hpp"
#include "gamemetrics/metrics.hpp"
#include "gamemetrics/payoffs.hpp"

namespace gamemetrics {

struct EstimatorParams {
  std::size_t samples = 8;
  std::size_t ascent_steps = 12;
  std::optional<double> step_size;  // theta / 4 when unset
  std::uint64_t seed = 1;
};

namespace detail {

inline std::vector<double> metric_closure(const MetricMatrix& d) {
  return triangle_closure(d).data();
}

class TestValuationSearch {
 public:
  TestValuationSearch(const GameStructure& g, State s, State t, const MetricMatrix& d,
                      double box_hi)
      : g_(g), s_(s), t_(t), n_(g.size()), lo_(g.interval.lo), hi_(box_hi),
        c_(metric_closure(d)) {}

  double cost(State u, State v) const { return c_[u * n_ + v]; }

  double objective(const Valuation& k) const {
    return state_value(s_, k) - state_value(t_, k);
  }

  /// Largest feasible valuation below k: k'(u) = min_v k(v) + c(u, v).
  Valuation repair(const Valuation& k) const {
    Valuation out(n_);
    for (State u = 0; u < n_; ++u) {
      double m = k[u];
      for (State v = 0; v < n_; ++v) m = std::min(m, k[v] + cost(u, v));
      out[u] = std::clamp(m, lo_, hi_);
    }
    return out;
  }

  /// Uniform draw in the box, pairwise clipping, then exact repair.
  Valuation sample(std::mt19937_64& rng) const {
    std::uniform_real_distribution<double> unif(lo_, hi_);
    Valuation k(n_);
    for (auto& x : k) x = unif(rng);
    for (int round = 0; round < 50; ++round) {
      bool clean = true;
      for (State u = 0; u < n_; ++u)
        for (State v = 0; v < n_; ++v) {
          const double excess = k[u] - k[v] - cost(u, v);
          if (excess > 0.0) {
            k[u] -= excess / 2.0;
            k[v] += excess / 2.0;
            clean = false;
          }
        }
      if (clean) break;
    }
    for (auto& x : k) x = std::clamp(x, lo_, hi_);
    return repair(k);
  }

  /// Valuations anchored at one state: distance to it and distance from it.
  std::vector<Valuation> anchors() const {
    std::vector<Valuation> out;
    for (State w = 0; w < n_; ++w) {
      Valuation up(n_), down(n_);
      for (State u = 0; u < n_; ++u) {
        up[u] = std::min(hi_, lo_ + cost(u, w));
        down[u] = std::max(lo_, hi_ - cost(w, u));
      }
      out.push_back(std::move(up));
      out.push_back(std::move(down));
    }
    return out;
  }

  /// Coordinate ascent inside C(d); returns the best objective seen.
  double ascend(Valuation k, std::size_t steps, double step) const {
    double best = objective(k);
    std::size_t since_improvement = 0;
    for (std::size_t i = 0; i < steps; ++i) {
      const State u = (i / 2) % n_;
      const double dir = i % 2 == 0 ? 1.0 : -1.0;
      double lo = lo_, hi = hi_;
      for (State v = 0; v < n_; ++v) {
        if (v == u) continue;
        lo = std::max(lo, k[v] - cost(v, u));
        hi = std::min(hi, k[v] + cost(u, v));
      }
      const double old = k[u];
      k[u] = std::clamp(old + dir * step, std::min(lo, old), std::max(hi, old));
      const double f = k[u] == old ? best : objective(k);
      if (f > best + 1e-12) {
        best = f;
        since_improvement = 0;
      } else {
        k[u] = old;
        if (++since_improvement >= 2 * n_) {
          step /= 2.0;
          since_improvement = 0;
        }
      }
    }
    return best;
  }

 private:
  double state_value(State x, const Valuation& k) const {
    return matrix_game_value(expectation_matrix(g_, x, k));
  }

  const GameStructure& g_;
  State s_, t_;
  std::size_t n_;
  double lo_, hi_;
  std::vector<double> c_;
};

inline void check_params(const EstimatorParams& p, double theta) {
  if (p.samples < 1) throw ContractError("estimator needs at least one sample");
  const double step = p.step_size.value_or(theta / 4.0);
  if (!(step > 0.0 && step <= theta)) throw ContractError("step size must lie in (0, theta]");
}

/// Lower bound on sup over k in C(d) of pre1(k)(s) - pre1(k)(t). Sum-combined
/// metrics use an enlarged box so test valuations may exceed theta2.
inline double estimate_sup(const GameStructure& g, State s, State t, const MetricMatrix& d,
                           const EstimatorParams& params, bool unbounded_box) {
  if (s == t) return 0.0;
  double box_hi = g.interval.hi;
  if (unbounded_box) {
    const auto c = metric_closure(d);
    const double cmax = *std::max_element(c.begin(), c.end());
    box_hi = std::max(box_hi, g.interval.lo + cmax);
  }
  TestValuationSearch search(g, s, t, d, box_hi);
  const double step = params.step_size.value_or(g.theta() / 4.0);
  double best = 0.0;
  for (const auto& k : search.anchors())
    best = std::max(best, search.ascend(k, params.ascent_steps, step));
  for (std::size_t i = 0; i < params.samples; ++i) {
    std::seed_seq seq{static_cast<std::uint32_t>(params.seed),
                      static_cast<std::uint32_t>(params.seed >> 32),
                      static_cast<std::uint32_t>(i)};
    std::mt19937_64 rng(seq);
    best = std::max(best, search.ascend(search.sample(rng), params.ascent_steps, step));
  }
  return best;
}

inline void check_proposition(const GameStructure& g, const std::string& q) {
  require_valid(g);
  const Variable& var = g.variable(q);
  for (State s = 0; s < g.size(); ++s) {
    const double x = var.values[s];
    if (x != 0.0 && x != 1.0)
      throw ContractError("proposition '" + q + "' is not 0/1 at state '" + g.states[s] + "'");
    if (x == 1.0) {
      const bool absorbing = g.moves1[s].size() == 1 && g.moves2[s].size() == 1 &&
                             g.delta(s, 0, 0) == Distribution{{s, 1.0}};
      if (!absorbing)
        throw ContractError("goal state '" + g.states[s] + "' is not absorbing");
    }
  }
}

}  // namespace detail

/// Lower bound on the undiscounted one-step simulation distance between s and t.
inline double estimate_onestep(const GameStructure& g, State s, State t, const MetricMatrix& d,
                               const EstimatorParams& params = {}) {
  require_valid(g);
  detail::check_params(params, g.theta());
  if (d.size() != g.size()) throw ContractError("metric size does not match state count");
  return std::max(prop_distance(g, s, t), detail::estimate_sup(g, s, t, d, params, false));
}

/// Picard iteration with the estimated transformer. Each iterate is joined
/// with the previous one; both are below the exact fixpoint, so the result is
/// too. Reported status is HeuristicLowerBound unless the iteration cap hit.
inline FixpointResult estimate_metric_concurrent(const GameStructure& g, const MetricKind& kind,
                                                 const EstimatorParams& params = {},
                                                 const FixpointOptions& opts = {}) {
  require_valid(g);
  kind.check();
  detail::check_params(params, g.theta());
  const std::size_t n = g.size();
  const double theta = g.theta();
  const std::size_t max_iters =
      opts.max_iters.value_or(default_max_iters(theta, opts.tol, kind.alpha));
  const bool sum = kind.combine == Combine::Sum;
  FixpointResult res{MetricMatrix(n), {}};
  res.report.status = FixpointStatus::IterationLimited;
  for (std::size_t it = 1; it <= max_iters; ++it) {
    const MetricMatrix& d = res.metric;
    MetricMatrix next(n);
    for (State s = 0; s < n; ++s)
      for (State t = 0; t < n; ++t) {
        if (s == t) continue;
        const double p = prop_distance(g, s, t);
        if (!sum && p >= theta) {
          next(s, t) = p;
          continue;
        }
        const double m = detail::estimate_sup(g, s, t, d, params, sum);
        next(s, t) = sum ? p + kind.alpha * m : std::max(p, kind.alpha * m);
      }
    if (kind.base == MetricBase::Bisimulation)
      for (State s = 0; s < n; ++s)
        for (State t = 0; t < s; ++t) next(s, t) = next(t, s) = std::max(next(s, t), next(t, s));
    double change = 0.0;
    for (State s = 0; s < n; ++s)
      for (State t = 0; t < n; ++t) {
        next(s, t) = std::max(next(s, t), d(s, t));
        change = std::max(change, next(s, t) - d(s, t));
      }
    res.metric = std::move(next);
    res.report.iterations = it;
    res.report.last_change = change;
    if (change < opts.tol) {
      res.report.status = FixpointStatus::HeuristicLowerBound;
      break;
    }
  }
  return res;
}

/// Adds a fresh absorbing state labelled not-q with a single move per player.
/// Every q-state of g must already be absorbing.
inline GameStructure build_reduction(const GameStructure& g, const std::string& q) {
  detail::check_proposition(g, q);
  GameStructure out = g;
  std::string name = "t'";
  while (std::find(out.states.begin(), out.states.end(), name) != out.states.end()) name += "'";
  const State fresh = out.size();
  out.states.push_back(name);
  for (auto& v : out.variables) v.values.push_back(v.name == q ? 0.0 : g.interval.lo);
  out.moves1.push_back({kDefaultMove});
  out.moves2.push_back({kDefaultMove});
  out.trans.push_back({Distribution{{fresh, 1.0}}});
  return out;
}

/// Least fixpoint of v -> max(q, pre1(v)) by value iteration from q: the
/// optimal probability of reaching q.
inline ValueReport reachability_value(const GameStructure& g, const std::string& q,
                                      double tol = 1e-9, std::size_t max_iters = 100000) {
  detail::check_proposition(g, q);
  const Valuation goal = g.variable(q).values;
  ValueReport rep{goal, 0, false};
  for (std::size_t it = 1; it <= max_iters; ++it) {
    const Valuation p = pre(g, rep.values, Player::One);
    double change = 0.0;
    for (State s = 0; s < g.size(); ++s) {
      const double v = std::max(goal[s], p[s]);
      change = std::max(change, std::abs(v - rep.values[s]));
      rep.values[s] = v;
    }
    rep.iterations = it;
    if (change < tol) {
      rep.converged = true;
      break;
    }
  }
  return rep;
}

}  // namespace gamemetrics
