#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "gamemetrics/matchdist.hpp"
#include "gamemetrics/metrics.hpp"
#include "gamemetrics/random_games.hpp"
#include "oracles.hpp"

using namespace gamemetrics;

namespace {

MetricMatrix prop_matrix(const GameStructure& g) {
  MetricMatrix d(g.size());
  for (State s = 0; s < g.size(); ++s)
    for (State t = 0; t < g.size(); ++t) d(s, t) = prop_distance(g, s, t);
  return d;
}

/// Random directed distances on n states in multiples of 1/8, optionally
/// closed under shortest paths.
MetricMatrix random_metric(std::mt19937_64& rng, std::size_t n, bool close = true) {
  std::uniform_int_distribution<int> eighths(0, 8);
  MetricMatrix d(n);
  for (State s = 0; s < n; ++s)
    for (State t = 0; t < n; ++t)
      if (s != t) d(s, t) = eighths(rng) / 8.0;
  if (!close) return d;
  for (State k = 0; k < n; ++k)
    for (State i = 0; i < n; ++i)
      for (State j = 0; j < n; ++j) d(i, j) = std::min(d(i, j), d(i, k) + d(k, j));
  return d;
}

}  // namespace

TEST(OneStepMove, TransShippingCostsAtTAndPrimes) {
  const double eps = 0.1;
  const auto g = fixtures::fig3(eps);
  const auto d = prop_matrix(g);
  EXPECT_NEAR(onestep_move(g, "t", "w'", d, "b"), eps, 1e-9);
  EXPECT_NEAR(onestep_move(g, "t", "w'", d, "c"), eps, 1e-9);
  EXPECT_NEAR(onestep_move(g, "t", "w'", d, "f"), 0.0, 1e-9);
  EXPECT_NEAR(onestep_move(g, "t", "t'", d, "b"), 0.5 - eps, 1e-9);
  EXPECT_NEAR(onestep_move(g, "t", "t'", d, "c"), 0.5 + eps, 1e-9);
  EXPECT_NEAR(onestep_move(g, "t", "t'", d, "f"), eps, 1e-9);
  EXPECT_THROW(onestep_move(g, "t", "t'", d, "zz"), LookupError);
}

TEST(OneStep, TakesWorstMoveAndPropositionalDistance) {
  const auto g = fixtures::fig3(0.1);
  const auto d = prop_matrix(g);
  EXPECT_NEAR(onestep(g, "t", "t'", d), 0.6, 1e-9);
  EXPECT_NEAR(onestep(g, "t", "w'", d), 0.1, 1e-9);
  EXPECT_NEAR(onestep(g, "t", "u", d), 1.0, 1e-9);
  EXPECT_EQ(onestep(g, "s", "s", d), 0.0);
}

TEST(OneStep, PlayerTwoStatesMixOnTheSourceSide) {
  const auto g = fixtures::small_turn_based();
  const auto d = prop_matrix(g);
  const State q1 = g.index_of("q1"), q2 = g.index_of("q2");
  // Player 2 at q2 can reach lo; from q1 the best it can do is mid/hi halves.
  // Matching q2's move y (to lo) needs shipping q1's mixture into lo.
  const double via_y = onestep_move(g, q1, q2, d, 1);
  const double via_x = onestep_move(g, q1, q2, d, 0);
  EXPECT_NEAR(via_x, 0.0, 1e-9);
  EXPECT_NEAR(via_y, 0.5 * 0.5 + 0.5 * 1.0, 1e-9);
  EXPECT_NEAR(onestep(g, q1, q2, d), std::max(via_x, via_y), 1e-9);
  // Reverse direction: q1's move y is matched best by q2's move x.
  EXPECT_NEAR(onestep(g, q2, q1, d), 0.25, 1e-9);
  EXPECT_THROW(onestep_move(g, g.index_of("p"), q1, d, 0), ContractError);
  EXPECT_EQ(onestep(g, g.index_of("p"), q1, d), g.theta());
}

TEST(OneBis, ClassMassMatching) {
  const auto g = fixtures::fig3(0.0);
  std::vector<std::vector<double>> labels;
  for (State s = 0; s < g.size(); ++s) {
    std::vector<double> l;
    for (const auto& v : g.variables) l.push_back(v.values[s]);
    labels.push_back(l);
  }
  const auto q = Partition::from_labels(labels);
  const State t = g.index_of("t"), w = g.index_of("w'"), tp = g.index_of("t'");
  EXPECT_TRUE(onebis_feasible(g, t, w, q));
  EXPECT_TRUE(onebis_feasible(g, w, t, q));
  EXPECT_FALSE(onebis_feasible(g, t, tp, q));
  EXPECT_TRUE(onebis_feasible(g, tp, t, q));
}

TEST(MatchdistProperty, LpEqualsGridSupremum) {
  std::mt19937_64 rng(21);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = random_game(rng, {4, 3, 2, trial % 2 == 1});
    // Odd trials skip the closure: the test valuations only see its closure.
    const auto d = random_metric(rng, g.size(), trial % 2 == 0);
    for (State s = 0; s < g.size(); ++s)
      for (State t = 0; t < g.size(); ++t) {
        if (s == t) continue;
        const double lp = shipping_sup(g, s, t, d);
        const double grid =
            oracle::grid_onestep_sup(g, s, t, [&](State a, State b) { return d(a, b); }, 1.0 / 32.0);
        // Grid points are feasible, so the grid can only fall short of the LP.
        EXPECT_GE(lp, grid - 1e-9) << "trial " << trial;
        worst = std::max(worst, lp - grid);
      }
  }
  EXPECT_LT(worst, 0.05);
}

TEST(MatchdistProperty, ShippingRespectsTriangleBounds) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 40; ++trial) {
    const auto g = random_game(rng, {5, 3, 2, false});
    const auto d = random_metric(rng, g.size());
    for (State s = 0; s < g.size(); ++s)
      for (State t = 0; t < g.size(); ++t)
        for (State u = 0; u < g.size(); ++u) {
          const double st = onestep(g, s, t, d), su = onestep(g, s, u, d), ut = onestep(g, u, t, d);
          EXPECT_LE(st, su + ut + 1e-9);
          EXPECT_GE(st, prop_distance(g, s, t) - 1e-12);
          EXPECT_LE(st, g.theta() + 1e-9);
        }
  }
}
