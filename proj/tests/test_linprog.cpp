#include <gtest/gtest.h>

#include <random>

#include "gamemetrics/linprog.hpp"
#include "oracles.hpp"

using namespace gamemetrics;
using lp::LpProblem;
using lp::LpStatus;
using lp::Relation;

TEST(Linprog, SmallMaximization) {
  // max 3x + 2y  s.t. x + y <= 4, x + 3y <= 6, x <= 3
  LpProblem p;
  const auto x = p.add_variable("x", 0.0, 3.0);
  const auto y = p.add_variable("y");
  p.set_objective(x, -3.0);
  p.set_objective(y, -2.0);
  p.add_constraint({{x, 1.0}, {y, 1.0}}, Relation::LessEq, 4.0);
  p.add_constraint({{x, 1.0}, {y, 3.0}}, Relation::LessEq, 6.0);
  const auto out = lp::solve(p);
  ASSERT_EQ(out.status, LpStatus::Optimal);
  EXPECT_NEAR(out.value, -11.0, 1e-9);
  EXPECT_NEAR(out.point[x], 3.0, 1e-9);
  EXPECT_NEAR(out.point[y], 1.0, 1e-9);
}

TEST(Linprog, DetectsInfeasible) {
  LpProblem p;
  const auto x = p.add_variable("x", 2.0);
  p.add_constraint({{x, 1.0}}, Relation::LessEq, 1.0);
  EXPECT_EQ(lp::solve(p).status, LpStatus::Infeasible);
  EXPECT_FALSE(lp::feasible(p).has_value());
}

TEST(Linprog, DetectsUnbounded) {
  LpProblem p;
  const auto x = p.add_variable("x");
  const auto y = p.add_variable("y");
  p.set_objective(x, -1.0);
  p.add_constraint({{x, 1.0}, {y, -1.0}}, Relation::LessEq, 1.0);
  EXPECT_EQ(lp::solve(p).status, LpStatus::Unbounded);
}

TEST(Linprog, FreeVariablesAndEqualities) {
  // min x + y  s.t. x - y = -3, x >= -10 free above, y free
  LpProblem p;
  const auto x = p.add_variable("x", -10.0);
  const auto y = p.add_variable("y", -lp::kInfinity, lp::kInfinity);
  p.set_objective(x, 1.0);
  p.set_objective(y, 1.0);
  p.add_constraint({{x, 1.0}, {y, -1.0}}, Relation::Equal, -3.0);
  const auto out = lp::solve(p);
  ASSERT_EQ(out.status, LpStatus::Optimal);
  EXPECT_NEAR(out.point[x], -10.0, 1e-9);
  EXPECT_NEAR(out.point[y], -7.0, 1e-9);
  EXPECT_NEAR(out.value, -17.0, 1e-9);
}

TEST(Linprog, BealeCyclingExampleTerminates) {
  LpProblem p;
  const auto x4 = p.add_variable("x4");
  const auto x5 = p.add_variable("x5");
  const auto x6 = p.add_variable("x6");
  const auto x7 = p.add_variable("x7");
  p.set_objective(x4, -0.75);
  p.set_objective(x5, 20.0);
  p.set_objective(x6, -0.5);
  p.set_objective(x7, 6.0);
  p.add_constraint({{x4, 0.25}, {x5, -8.0}, {x6, -1.0}, {x7, 9.0}}, Relation::LessEq, 0.0);
  p.add_constraint({{x4, 0.5}, {x5, -12.0}, {x6, -0.5}, {x7, 3.0}}, Relation::LessEq, 0.0);
  p.add_constraint({{x6, 1.0}}, Relation::LessEq, 1.0);
  const auto out = lp::solve(p);
  ASSERT_EQ(out.status, LpStatus::Optimal);
  EXPECT_NEAR(out.value, -1.25, 1e-9);
}

TEST(Linprog, RedundantEqualityRows) {
  LpProblem p;
  const auto x = p.add_variable("x");
  const auto y = p.add_variable("y");
  p.set_objective(x, 1.0);
  p.add_constraint({{x, 1.0}, {y, 1.0}}, Relation::Equal, 1.0);
  p.add_constraint({{x, 2.0}, {y, 2.0}}, Relation::Equal, 2.0);
  p.add_constraint({{x, 1.0}}, Relation::GreaterEq, 0.25);
  const auto out = lp::solve(p);
  ASSERT_EQ(out.status, LpStatus::Optimal);
  EXPECT_NEAR(out.value, 0.25, 1e-9);
  EXPECT_LT(lp::max_violation(p, out.point), 1e-9);
}

TEST(Linprog, FeasibleReturnsWitness) {
  LpProblem p;
  const auto a = p.add_variable("a", 0.0, 1.0);
  const auto b = p.add_variable("b", 0.0, 1.0);
  p.add_constraint({{a, 1.0}, {b, 1.0}}, Relation::Equal, 1.0);
  p.add_constraint({{a, 1.0}, {b, -1.0}}, Relation::GreaterEq, 0.5);
  const auto pt = lp::feasible(p);
  ASSERT_TRUE(pt.has_value());
  EXPECT_LT(lp::max_violation(p, *pt), 1e-9);
}

TEST(Linprog, RejectsMalformedProblems) {
  LpProblem p;
  const auto x = p.add_variable("x", 1.0, 0.0);
  EXPECT_THROW(lp::solve(p), ContractError);
  LpProblem q;
  q.add_variable("x");
  q.add_constraint({{x + 5, 1.0}}, Relation::LessEq, 1.0);
  EXPECT_THROW(lp::solve(q), ContractError);
  EXPECT_THROW(q.set_objective(7, 1.0), ContractError);
  EXPECT_EQ(q.find("x"), 0u);
  EXPECT_FALSE(q.find("nope").has_value());
}

namespace {

// Optimum of min c.x over a box and random <= rows, by enumerating every
// vertex: each choice of 3 tight constraints among rows and box faces.
double vertex_oracle(const std::vector<std::vector<double>>& rows, const std::vector<double>& rhs,
                     const std::vector<double>& c, double box) {
  std::vector<std::vector<double>> all = rows;
  std::vector<double> b = rhs;
  for (std::size_t j = 0; j < 3; ++j) {
    std::vector<double> e(3, 0.0);
    e[j] = 1.0;
    all.push_back(e);
    b.push_back(box);
    e[j] = -1.0;
    all.push_back(e);
    b.push_back(0.0);
  }
  double best = std::numeric_limits<double>::infinity();
  const std::size_t m = all.size();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      for (std::size_t k = j + 1; k < m; ++k) {
        auto x = oracle::gauss_solve({all[i], all[j], all[k]}, {b[i], b[j], b[k]});
        if (!x) continue;
        bool ok = true;
        for (std::size_t r = 0; r < m && ok; ++r) {
          double lhs = 0.0;
          for (std::size_t t = 0; t < 3; ++t) lhs += all[r][t] * (*x)[t];
          ok = lhs <= b[r] + 1e-9;
        }
        if (ok) best = std::min(best, c[0] * (*x)[0] + c[1] * (*x)[1] + c[2] * (*x)[2]);
      }
  return best;
}

}  // namespace

TEST(LinprogProperty, MatchesVertexEnumeration) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> coef(-4, 4);
  int feasible_cases = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const int m = 1 + trial % 4;
    std::vector<std::vector<double>> rows(m, std::vector<double>(3));
    std::vector<double> rhs(m), c(3);
    LpProblem p;
    for (int j = 0; j < 3; ++j) p.add_variable("x", 0.0, 5.0);
    for (auto& v : c) v = coef(rng);
    for (int j = 0; j < 3; ++j) p.set_objective(j, c[j]);
    for (int i = 0; i < m; ++i) {
      std::vector<lp::Term> terms;
      for (int j = 0; j < 3; ++j) {
        rows[i][j] = coef(rng);
        terms.push_back({static_cast<std::size_t>(j), rows[i][j]});
      }
      rhs[i] = coef(rng);
      p.add_constraint(terms, Relation::LessEq, rhs[i]);
    }
    const double expect = vertex_oracle(rows, rhs, c, 5.0);
    const auto out = lp::solve(p);
    if (std::isinf(expect)) {
      EXPECT_EQ(out.status, LpStatus::Infeasible) << "trial " << trial;
      EXPECT_FALSE(lp::feasible(p).has_value());
      continue;
    }
    ++feasible_cases;
    ASSERT_EQ(out.status, LpStatus::Optimal) << "trial " << trial;
    EXPECT_NEAR(out.value, expect, 1e-7) << "trial " << trial;
    EXPECT_LT(lp::max_violation(p, out.point), 1e-7);
    const auto pt = lp::feasible(p);
    ASSERT_TRUE(pt.has_value());
    EXPECT_LT(lp::max_violation(p, *pt), 1e-7);
  }
  EXPECT_GT(feasible_cases, 100);
}
