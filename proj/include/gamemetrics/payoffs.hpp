#pragma once

// Matrix games, the one-step `pre` operator, and the discounted / average /
// total payoff values whose differences the metrics bound.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "gamemetrics/game.hpp"
#include "gamemetrics/linprog.hpp"
#include "gamemetrics/metrics.hpp"

namespace gamemetrics {

/// Zero-sum matrix game; the row player maximizes.
class MatrixGame {
 public:
  MatrixGame(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), a_(rows * cols, fill) {}

  MatrixGame(std::initializer_list<std::initializer_list<double>> rows)
      : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
    for (const auto& r : rows) {
      if (r.size() != cols_) throw ContractError("matrix game rows differ in length");
      a_.insert(a_.end(), r.begin(), r.end());
    }
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }

  /// Rows and columns swapped: the column player becomes the maximizer.
  MatrixGame transpose() const {
    MatrixGame m(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) m(j, i) = (*this)(i, j);
    return m;
  }

  /// Negated transpose: the same game seen from the column player.
  MatrixGame negated_transpose() const {
    MatrixGame m(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) m(j, i) = -(*this)(i, j);
    return m;
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> a_;
};

struct MatrixGameSolution {
  double value = 0.0;
  std::vector<double> row_strategy;
  std::vector<double> col_strategy;
};

namespace detail {

inline void check_matrix(const MatrixGame& m) {
  if (m.rows() == 0 || m.cols() == 0) throw ContractError("matrix game must be nonempty");
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (!std::isfinite(m(i, j))) throw ContractError("matrix game entries must be finite");
}

// max_x min_j sum_i x_i m(i, j): maximize v subject to every column paying at
// least v. v is bounded below by the smallest entry.
inline std::pair<double, std::vector<double>> row_player_lp(const MatrixGame& m) {
  double lo = m(0, 0), hi = m(0, 0);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      lo = std::min(lo, m(i, j));
      hi = std::max(hi, m(i, j));
    }
  if (hi - lo <= 0.0) return {lo, std::vector<double>(m.rows(), 1.0 / double(m.rows()))};
  lp::LpProblem p;
  std::vector<lp::Term> simplex;
  for (std::size_t i = 0; i < m.rows(); ++i) simplex.push_back({p.add_variable("x"), 1.0});
  const auto v = p.add_variable("v", lo, hi);
  p.set_objective(v, -1.0);
  p.add_constraint(simplex, lp::Relation::Equal, 1.0);
  for (std::size_t j = 0; j < m.cols(); ++j) {
    std::vector<lp::Term> row;
    for (std::size_t i = 0; i < m.rows(); ++i)
      if (m(i, j) != 0.0) row.push_back({i, m(i, j)});
    row.push_back({v, -1.0});
    p.add_constraint(std::move(row), lp::Relation::GreaterEq, 0.0);
  }
  const auto out = lp::solve(p);
  if (out.status != lp::LpStatus::Optimal) throw NumericError("matrix game LP failed");
  return {out.point[v], std::vector<double>(out.point.begin(), out.point.begin() + m.rows())};
}

}  // namespace detail

/// Minimax value only. Degenerate shapes (a single row or column) need no LP.
inline double matrix_game_value(const MatrixGame& m) {
  detail::check_matrix(m);
  if (m.cols() == 1) {
    double best = m(0, 0);
    for (std::size_t i = 1; i < m.rows(); ++i) best = std::max(best, m(i, 0));
    return best;
  }
  if (m.rows() == 1) {
    double worst = m(0, 0);
    for (std::size_t j = 1; j < m.cols(); ++j) worst = std::min(worst, m(0, j));
    return worst;
  }
  return detail::row_player_lp(m).first;
}

/// Minimax value and optimal mixed strategies for both players.
inline MatrixGameSolution solve_matrix_game(const MatrixGame& m) {
  detail::check_matrix(m);
  auto [value, x] = detail::row_player_lp(m);
  auto [neg, y] = detail::row_player_lp(m.negated_transpose());
  (void)neg;
  return {value, std::move(x), std::move(y)};
}

enum class Player { One = 1, Two = 2 };

/// Expected value of k at s for every pure move pair, as a matrix game.
inline MatrixGame expectation_matrix(const GameStructure& g, State s, const Valuation& k) {
  MatrixGame m(g.moves1[s].size(), g.moves2[s].size());
  for (std::size_t a = 0; a < m.rows(); ++a)
    for (std::size_t b = 0; b < m.cols(); ++b) m(a, b) = expectation(g.delta(s, a, b), k);
  return m;
}

/// Best expectation of k the player can guarantee in one step from each state
/// (player 2 maximizes k as well; pass the negated valuation for opposition).
inline Valuation pre(const GameStructure& g, const Valuation& k, Player player = Player::One) {
  if (k.size() != g.size()) throw ContractError("valuation size does not match state count");
  Valuation out(g.size());
  for (State s = 0; s < g.size(); ++s) {
    MatrixGame m = expectation_matrix(g, s, k);
    out[s] = player == Player::One ? matrix_game_value(m)
                                   : matrix_game_value(m.transpose());
  }
  return out;
}

struct PayoffSpec {
  std::string reward = "r";
  double alpha = 0.9;
  Player player = Player::One;
};

/// Reward valuation as seen by the given player (negated for player 2).
inline Valuation reward_of(const GameStructure& g, const PayoffSpec& spec) {
  const Variable& r = g.variable(spec.reward);
  Valuation v = r.values;
  if (spec.player == Player::Two)
    for (double& x : v) x = -x;
  return v;
}

struct ValueReport {
  Valuation values;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Shapley iteration w' = (1 - alpha) r + alpha pre(w) from w = r. Stops once
/// the change is below tol * (1 - alpha), which bounds the final error by tol.
inline ValueReport discounted_value(const GameStructure& g, const PayoffSpec& spec,
                                    double tol = 1e-9, std::size_t max_iters = 1000000) {
  require_valid(g);
  if (!(spec.alpha > 0.0 && spec.alpha < 1.0)) throw ContractError("discount must lie in (0, 1)");
  const Valuation r = reward_of(g, spec);
  ValueReport rep{r, 0, false};
  for (std::size_t it = 1; it <= max_iters; ++it) {
    const Valuation p = pre(g, rep.values, spec.player);
    double change = 0.0;
    for (State s = 0; s < g.size(); ++s) {
      const double w = (1.0 - spec.alpha) * r[s] + spec.alpha * p[s];
      change = std::max(change, std::abs(w - rep.values[s]));
      rep.values[s] = w;
    }
    rep.iterations = it;
    if (change < tol * (1.0 - spec.alpha)) {
      rep.converged = true;
      break;
    }
  }
  return rep;
}

struct AverageEstimate {
  Valuation values;  // at the last discount
  Valuation spread;  // max - min across the discount sequence, per state
  std::vector<Valuation> per_alpha;
};

/// Discounted values along an increasing sequence of discounts approaching 1.
/// The spread is an uncertainty indicator, not a bound.
inline AverageEstimate average_value_estimate(const GameStructure& g, PayoffSpec spec,
                                              const std::vector<double>& alphas = {0.9, 0.99,
                                                                                   0.999}) {
  if (alphas.empty()) throw ContractError("need at least one discount");
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    if (!(alphas[i] > 0.0 && alphas[i] < 1.0)) throw ContractError("discounts must lie in (0, 1)");
    if (i > 0 && alphas[i] <= alphas[i - 1]) throw ContractError("discounts must increase");
  }
  AverageEstimate est;
  for (double a : alphas) {
    spec.alpha = a;
    est.per_alpha.push_back(discounted_value(g, spec, 1e-9).values);
  }
  est.values = est.per_alpha.back();
  est.spread.assign(g.size(), 0.0);
  for (State s = 0; s < g.size(); ++s) {
    double lo = est.per_alpha[0][s], hi = lo;
    for (const auto& v : est.per_alpha) {
      lo = std::min(lo, v[s]);
      hi = std::max(hi, v[s]);
    }
    est.spread[s] = hi - lo;
  }
  return est;
}

/// n-step total-reward values T(1..n), with u(0) = r, u(i) = r + pre(u(i-1))
/// and T(n) = (1/n) sum_{i=1..n} u(i).
inline std::vector<Valuation> total_reward_iterates(const GameStructure& g, const PayoffSpec& spec,
                                                    std::size_t n) {
  require_valid(g);
  if (n < 1) throw ContractError("need at least one step");
  const Valuation r = reward_of(g, spec);
  Valuation u = r;
  Valuation sum(g.size(), 0.0);
  std::vector<Valuation> out;
  for (std::size_t i = 1; i <= n; ++i) {
    const Valuation p = pre(g, u, spec.player);
    for (State s = 0; s < g.size(); ++s) {
      u[s] = r[s] + p[s];
      sum[s] += u[s];
    }
    Valuation t(g.size());
    for (State s = 0; s < g.size(); ++s) t[s] = sum[s] / double(i);
    out.push_back(std::move(t));
  }
  return out;
}

struct BoundViolation {
  State s;
  State t;
  std::string check;  // which bound failed
  double difference;  // payoff difference
  double bound;       // metric value it exceeded
};

/// Tolerance used by every bound comparison.
inline constexpr double kBoundTolerance = 1e-6;

namespace detail {

inline double payoff_gap(const Valuation& w, State s, State t, MetricBase base, Player player) {
  if (base == MetricBase::Bisimulation) return std::abs(w[s] - w[t]);
  return player == Player::One ? w[s] - w[t] : w[t] - w[s];
}

}  // namespace detail

/// Checks the payoff differences that a metric of the given kind must bound.
///   Max, alpha = 1: discounted (spec.alpha) and average differences.
///   Max, alpha < 1: discounted differences at that alpha; these may
///     legitimately fail and are reported as discounted-metric counterexamples.
///   Sum, alpha < 1: discounted differences at that alpha, and the
///     theta / (1 - alpha) ceiling on the metric itself.
///   Sum, alpha = 1: average and n-step total-reward differences.
/// `total_steps` is the horizon of the total-reward check.
inline std::vector<BoundViolation> check_bounds(const GameStructure& g, const PayoffSpec& spec,
                                                const MetricMatrix& metric,
                                                const MetricKind& kind,
                                                std::size_t total_steps = 50) {
  kind.check();
  if (metric.size() != g.size()) throw ContractError("metric size does not match state count");
  const std::size_t n = g.size();
  std::vector<BoundViolation> out;
  auto check_all = [&](const Valuation& w, const Valuation* slack, const std::string& label) {
    for (State s = 0; s < n; ++s)
      for (State t = 0; t < n; ++t) {
        if (s == t) continue;
        const double bound = metric.value_or_infinity(s, t);
        const double gap = detail::payoff_gap(w, s, t, kind.base, spec.player);
        const double extra = slack ? std::max((*slack)[s], (*slack)[t]) : 0.0;
        if (gap > bound + extra + kBoundTolerance) out.push_back({s, t, label, gap, bound});
      }
  };
  PayoffSpec sp = spec;
  if (kind.combine == Combine::Max) {
    if (kind.alpha >= 1.0) {
      check_all(discounted_value(g, sp).values, nullptr, "discounted<=metric");
      const auto avg = average_value_estimate(g, sp);
      check_all(avg.values, &avg.spread, "average<=metric");
    } else {
      sp.alpha = kind.alpha;
      check_all(discounted_value(g, sp).values, nullptr,
                "discounted<=discounted-metric (counterexample)");
    }
  } else if (kind.alpha < 1.0) {
    sp.alpha = kind.alpha;
    check_all(discounted_value(g, sp).values, nullptr, "discounted<=discounted-total-metric");
    const double ceiling = g.theta() / (1.0 - kind.alpha);
    for (State s = 0; s < n; ++s)
      for (State t = 0; t < n; ++t)
        if (metric.value_or_infinity(s, t) > ceiling + kBoundTolerance)
          out.push_back({s, t, "discounted-total-metric<=theta/(1-alpha)", metric(s, t), ceiling});
  } else {
    const auto avg = average_value_estimate(g, sp);
    check_all(avg.values, &avg.spread, "average<=total-metric");
    const auto totals = total_reward_iterates(g, sp, total_steps);
    for (std::size_t i = 0; i < totals.size(); ++i)
      check_all(totals[i], nullptr, "total(" + std::to_string(i + 1) + ")<=total-metric");
  }
  return out;
}

struct BoundSuiteResult {
  std::vector<BoundViolation> violations;       // must be empty
  std::vector<BoundViolation> counterexamples;  // discounted metric vs. discounted value
  std::vector<std::pair<MetricKind, FixpointReport>> fixpoints;
};

/// Runs every payoff bound and metric ordering for both bases: the
/// undiscounted metric against discounted and average values, the discounted
/// metric below the undiscounted one and below the total metrics, and the
/// discounted and undiscounted total metrics against their payoffs.
inline BoundSuiteResult bound_suite(const GameStructure& g, const PayoffSpec& spec,
                                    const FixpointOptions& opts = {},
                                    std::size_t total_steps = 50) {
  if (!(spec.alpha > 0.0 && spec.alpha < 1.0)) throw ContractError("discount must lie in (0, 1)");
  BoundSuiteResult res;
  const std::size_t n = g.size();
  auto prefix = [](MetricBase base) {
    return std::string(base == MetricBase::Simulation ? "sim: " : "bis: ");
  };
  auto run = [&](MetricBase base, Combine combine, double alpha) {
    const MetricKind kind{base, combine, alpha};
    auto fp = fixpoint(g, kind, opts);
    res.fixpoints.emplace_back(kind, fp.report);
    auto found = check_bounds(g, spec, fp.metric, kind, total_steps);
    for (auto& v : found) v.check = prefix(base) + v.check;
    auto& sink = combine == Combine::Max && alpha < 1.0 ? res.counterexamples : res.violations;
    sink.insert(sink.end(), found.begin(), found.end());
    return fp.metric;
  };
  auto ordered = [&](const MetricMatrix& lo, const MetricMatrix& hi, std::string label) {
    for (State s = 0; s < n; ++s)
      for (State t = 0; t < n; ++t)
        if (lo.value_or_infinity(s, t) > hi.value_or_infinity(s, t) + kBoundTolerance)
          res.violations.push_back({s, t, label, lo.value_or_infinity(s, t), hi.value_or_infinity(s, t)});
  };
  for (MetricBase base : {MetricBase::Simulation, MetricBase::Bisimulation}) {
    const auto d1 = run(base, Combine::Max, 1.0);
    const auto da = run(base, Combine::Max, spec.alpha);
    const auto ta = run(base, Combine::Sum, spec.alpha);
    const auto t1 = run(base, Combine::Sum, 1.0);
    ordered(da, d1, prefix(base) + "discounted-metric<=metric");
    ordered(ta, t1, prefix(base) + "discounted-total-metric<=total-metric");
    ordered(d1, t1, prefix(base) + "metric<=total-metric");
    ordered(da, ta, prefix(base) + "discounted-metric<=discounted-total-metric");
  }
  return res;
}

}  // namespace gamemetrics
