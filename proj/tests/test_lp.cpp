#include <gtest/gtest.h>

#include "bm/lp.hpp"

using bm::lp::Problem;
using bm::lp::Relation;
using bm::lp::Status;
using Eigen::VectorXd;

namespace {

VectorXd v(std::initializer_list<double> xs) {
  VectorXd out(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) out[i++] = x;
  return out;
}

}  // namespace

TEST(Lp, TextbookMaximization) {
  // max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18 -> 36 at (2, 6)
  Problem p(2);
  p.objective = v({-3, -5});
  p.add_row(v({1, 0}), Relation::LessEqual, 4);
  p.add_row(v({0, 2}), Relation::LessEqual, 12);
  p.add_row(v({3, 2}), Relation::LessEqual, 18);
  auto r = bm::lp::solve(p);
  ASSERT_EQ(r.status, Status::Optimal);
  EXPECT_NEAR(r.value, -36.0, 1e-12);
  EXPECT_NEAR(r.x[0], 2.0, 1e-12);
  EXPECT_NEAR(r.x[1], 6.0, 1e-12);
}

TEST(Lp, EqualityAndGreaterRows) {
  // min x + y s.t. x + 2y = 4, x >= 1 -> x = 1, y = 1.5
  Problem p(2);
  p.objective = v({1, 1});
  p.add_row(v({1, 2}), Relation::Equal, 4);
  p.add_row(v({1, 0}), Relation::GreaterEqual, 1);
  auto r = bm::lp::solve(p);
  ASSERT_EQ(r.status, Status::Optimal);
  EXPECT_NEAR(r.value, 2.5, 1e-12);
}

TEST(Lp, DetectsInfeasible) {
  Problem p(1);
  p.add_row(v({1}), Relation::LessEqual, 1);
  p.add_row(v({1}), Relation::GreaterEqual, 2);
  EXPECT_EQ(bm::lp::solve(p).status, Status::Infeasible);
}

TEST(Lp, DetectsUnbounded) {
  Problem p(2);
  p.objective = v({-1, 0});
  p.add_row(v({0, 1}), Relation::LessEqual, 1);
  EXPECT_EQ(bm::lp::solve(p).status, Status::Unbounded);
}

TEST(Lp, FreeVariablesAndNegativeRhs) {
  // min x s.t. x >= -3 with x free, written as -x <= 3.
  Problem p(1);
  p.objective = v({1});
  p.free[0] = true;
  p.add_row(v({-1}), Relation::LessEqual, 3);
  auto r = bm::lp::solve(p);
  ASSERT_EQ(r.status, Status::Optimal);
  EXPECT_NEAR(r.x[0], -3.0, 1e-12);
}

TEST(Lp, RedundantEqualityRows) {
  Problem p(2);
  p.objective = v({1, 2});
  p.add_row(v({1, 1}), Relation::Equal, 1);
  p.add_row(v({2, 2}), Relation::Equal, 2);
  auto r = bm::lp::solve(p);
  ASSERT_EQ(r.status, Status::Optimal);
  EXPECT_NEAR(r.value, 1.0, 1e-12);
}

TEST(Lp, DegenerateCyclingExample) {
  // Beale's example, which cycles under the textbook largest-coefficient rule.
  Problem p(4);
  p.objective = v({-0.75, 150, -0.02, 6});
  p.add_row(v({0.25, -60, -0.04, 9}), Relation::LessEqual, 0);
  p.add_row(v({0.5, -90, -0.02, 3}), Relation::LessEqual, 0);
  p.add_row(v({0, 0, 1, 0}), Relation::LessEqual, 1);
  auto r = bm::lp::solve(p);
  ASSERT_EQ(r.status, Status::Optimal);
  EXPECT_NEAR(r.value, -0.05, 1e-12);
}
