#pragma once

// Picard iteration for the simulation/bisimulation metrics (max- and
// sum-combined, discounted or not), and LP-feasibility refinement for their
// kernels.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <optional>
#include <string_view>
#include <vector>

#include "gamemetrics/game.hpp"
#include "gamemetrics/matchdist.hpp"
#include "gamemetrics/relations.hpp"

namespace gamemetrics {

enum class MetricBase { Simulation, Bisimulation };
enum class Combine { Max, Sum };

/// Max combine is the classic transformer (discounted when alpha < 1); Sum
/// with alpha = 1 is the undiscounted total-reward metric, which may diverge.
struct MetricKind {
  MetricBase base = MetricBase::Simulation;
  Combine combine = Combine::Max;
  double alpha = 1.0;

  void check() const {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ContractError("discount must lie in (0, 1]");
  }
};

enum class FixpointStatus { Converged, IterationLimited, Divergent, HeuristicLowerBound };

inline std::string_view to_string(FixpointStatus s) {
  switch (s) {
    case FixpointStatus::Converged: return "converged";
    case FixpointStatus::IterationLimited: return "iteration-limited";
    case FixpointStatus::Divergent: return "divergent";
    case FixpointStatus::HeuristicLowerBound: return "heuristic-lower-bound";
  }
  return "?";
}

struct FixpointOptions {
  double tol = 1e-6;
  std::optional<std::size_t> max_iters;  // default_max_iters() when unset
};

struct FixpointReport {
  FixpointStatus status = FixpointStatus::Converged;
  std::size_t iterations = 0;
  double last_change = 0.0;
  std::size_t divergent_pairs = 0;
};

struct FixpointResult {
  MetricMatrix metric;
  FixpointReport report;
};

/// Values above theta * kDivergenceFactor count as unbounded.
inline constexpr double kDivergenceFactor = 1e6;

/// 10 * ceil(log(theta / tol) / log(1 / alpha)) for alpha < 1, else 5000.
inline std::size_t default_max_iters(double theta, double tol, double alpha) {
  if (alpha >= 1.0) return 5000;
  const double n = std::ceil(std::log(theta / tol) / std::log(1.0 / alpha));
  return static_cast<std::size_t>(10.0 * std::max(1.0, n));
}

namespace detail {

inline MetricMatrix apply_transformer(const GameStructure& g, const PlayerView& v,
                                      const MetricMatrix& d, const MetricKind& kind) {
  const std::size_t n = g.size();
  const double theta = g.theta();
  const double dmax = *std::max_element(d.data().begin(), d.data().end());
  const MetricMatrix c = triangle_closure(d);
  MetricMatrix h(n);
  for (State s = 0; s < n; ++s)
    for (State t = 0; t < n; ++t) {
      if (s == t) continue;
      const double p = prop_distance(g, s, t);
      if (kind.combine == Combine::Max && p >= theta && dmax <= theta) {
        h(s, t) = p;
        continue;
      }
      const double m = onestep_sup(g, v, s, t, c);
      h(s, t) = kind.combine == Combine::Max ? std::max(p, kind.alpha * m) : p + kind.alpha * m;
    }
  if (kind.base == MetricBase::Bisimulation) {
    for (State s = 0; s < n; ++s)
      for (State t = 0; t < s; ++t) {
        const double m = std::max(h(s, t), h(t, s));
        h(s, t) = h(t, s) = m;
      }
  }
  return h;
}

}  // namespace detail

/// One application of the metric transformer to d.
inline MetricMatrix apply_transformer(const GameStructure& g, const MetricMatrix& d,
                                      const MetricKind& kind) {
  kind.check();
  if (d.size() != g.size()) throw ContractError("metric size does not match state count");
  return detail::apply_transformer(g, player_view(g), d, kind);
}

/// Picard iteration from the zero metric. Stops when the max-norm change
/// drops below tol. For the undiscounted sum metric, pairs whose value passes
/// theta * 1e6, or whose growth over consecutive windows of iterations shows no
/// decay, are flagged divergent; iteration ends once every other pair has
/// settled.
inline FixpointResult fixpoint(const GameStructure& g, const MetricKind& kind,
                               const FixpointOptions& opts = {}) {
  kind.check();
  if (!(opts.tol > 0.0)) throw ContractError("tolerance must be positive");
  const auto view = player_view(g);
  const std::size_t n = g.size();
  const double theta = g.theta();
  const std::size_t max_iters =
      opts.max_iters.value_or(default_max_iters(theta, opts.tol, kind.alpha));
  const bool may_diverge = kind.combine == Combine::Sum && kind.alpha >= 1.0;
  constexpr std::size_t kWindow = 25;

  FixpointResult res{MetricMatrix(n), {}};
  MetricMatrix& d = res.metric;
  std::deque<MetricMatrix> history;  // last 2 * kWindow + 1 iterates
  if (may_diverge) history.push_back(d);

  for (std::size_t it = 1; it <= max_iters; ++it) {
    MetricMatrix next = detail::apply_transformer(g, view, d, kind);
    double change = 0.0;
    for (State s = 0; s < n; ++s)
      for (State t = 0; t < n; ++t) {
        next.set_divergent(s, t, d.divergent(s, t));
        if (!next.divergent(s, t)) change = std::max(change, std::abs(next(s, t) - d(s, t)));
      }
    if (may_diverge) {
      history.push_back(next);
      if (history.size() > 2 * kWindow + 1) history.pop_front();
      for (State s = 0; s < n; ++s)
        for (State t = 0; t < n; ++t) {
          if (next.divergent(s, t)) continue;
          bool diverging = next(s, t) > theta * kDivergenceFactor;
          if (!diverging && it >= 4 * kWindow) {
            const double g1 = next(s, t) - history[kWindow](s, t);
            const double g0 = history[kWindow](s, t) - history[0](s, t);
            diverging = g1 > kWindow * opts.tol && g1 >= g0 * (1.0 - 1e-9);
          }
          if (diverging) next.set_divergent(s, t);
        }
      change = 0.0;
      for (State s = 0; s < n; ++s)
        for (State t = 0; t < n; ++t)
          if (!next.divergent(s, t)) change = std::max(change, std::abs(next(s, t) - d(s, t)));
    }
    d = std::move(next);
    res.report.iterations = it;
    res.report.last_change = change;
    if (change < opts.tol) {
      res.report.status = FixpointStatus::Converged;
      break;
    }
    res.report.status = FixpointStatus::IterationLimited;
  }
  if (max_iters == 0) res.report.status = FixpointStatus::IterationLimited;
  for (State s = 0; s < n; ++s)
    for (State t = 0; t < n; ++t) res.report.divergent_pairs += d.divergent(s, t) ? 1 : 0;
  if (res.report.divergent_pairs > 0 && res.report.status == FixpointStatus::Converged)
    res.report.status = FixpointStatus::Divergent;
  return res;
}

/// Greatest relation contained in propositional equality that is stable
/// under zero-cost shipping: the kernel of the simulation metric.
inline Relation sim_kernel(const GameStructure& g) {
  const auto view = player_view(g);
  const std::size_t n = g.size();
  Relation r(n);
  for (State s = 0; s < n; ++s)
    for (State t = 0; t < n; ++t) r.set(s, t, prop_distance(g, s, t) == 0.0);
  for (std::size_t round = 0; round <= n * n; ++round) {
    Relation next = r;
    bool changed = false;
    for (State s = 0; s < n; ++s)
      for (State t = 0; t < n; ++t) {
        if (s == t || !r.contains(s, t)) continue;
        if (!detail::onestep_zero_feasible(g, view, s, t, r)) {
          next.set(s, t, false);
          changed = true;
        }
      }
    r = std::move(next);
    if (!changed) break;
  }
  return r;
}

/// Partition refinement from propositional classes; two states stay together
/// while each one's pure moves can be matched class-wise by the other's mixed
/// moves. Split blocks keep each state with the lowest-indexed state it is
/// still equivalent to.
inline Partition bis_kernel(const GameStructure& g) {
  const auto view = player_view(g);
  const std::size_t n = g.size();
  std::vector<std::vector<double>> labels(n);
  for (State s = 0; s < n; ++s)
    for (const auto& var : g.variables) labels[s].push_back(var.values[s]);
  Partition q = Partition::from_labels(labels);
  for (std::size_t round = 0; round <= n * n; ++round) {
    std::vector<std::vector<State>> blocks;
    for (const auto& block : q.blocks()) {
      std::vector<std::vector<State>> groups;
      for (State s : block) {
        bool placed = false;
        for (auto& grp : groups) {
          const State rep = grp.front();
          if (detail::onebis_feasible(g, view, s, rep, q) &&
              detail::onebis_feasible(g, view, rep, s, q)) {
            grp.push_back(s);
            placed = true;
            break;
          }
        }
        if (!placed) groups.push_back({s});
      }
      for (auto& grp : groups) blocks.push_back(std::move(grp));
    }
    Partition next(std::move(blocks));
    const bool stable = next.blocks().size() == q.blocks().size();
    q = std::move(next);
    if (stable) break;
  }
  return q;
}

}  // namespace gamemetrics
