#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "bm/constructions.hpp"
#include "bm/geometry.hpp"
#include "bm/hull.hpp"
#include "bm/oracles.hpp"
#include "test_util.hpp"

using bm::BodyExpr;
using bm::ErrorCode;
using bm::Mat;
using bm::Vec;
using testutil::cols;
using testutil::expect_code;
using testutil::vec;
using V2 = Eigen::Vector2d;

TEST(LpSumFormula, SpecExamples) {
  const std::vector<double> d{std::sqrt(2.0), std::sqrt(3.0)};
  EXPECT_NEAR(bm::thm_lp_sum_to_euclidean(d, 2.0), std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(bm::thm_lp_sum_to_euclidean(d, 1.0), 2.2360679774997897, 1e-15);
  EXPECT_NEAR(bm::thm_lp_sum_to_euclidean(d, bm::kInf), 2.2360679774997897, 1e-15);
  EXPECT_NEAR(bm::thm_lp_sum_to_euclidean(d, 4.0), 1.8988289221159418, 1e-15);
}

TEST(LpSumFormula, Errors) {
  expect_code(ErrorCode::InvalidP, [] { bm::thm_lp_sum_to_euclidean({1.0}, 0.5); });
  expect_code(ErrorCode::InvalidP, [] { bm::thm_lp_sum_to_euclidean({1.0}, std::nan("")); });
  expect_code(ErrorCode::HypothesisViolated, [] { bm::thm_lp_sum_to_euclidean({0.9, 2.0}, 3.0); });
  expect_code(ErrorCode::HypothesisViolated, [] { bm::thm_lp_sum_to_euclidean({}, 3.0); });
}

TEST(LpSumFormula, ExponentIsSelfDual) {
  for (double p : {1.1, 1.25, 4.0 / 3.0, 1.5, 1.9, 2.5, 3.0, 4.0, 10.0}) {
    const double q = p / (p - 1.0);
    EXPECT_NEAR(bm::sum_exponent(p), bm::sum_exponent(q), 1e-12 * bm::sum_exponent(p)) << "p = " << p;
  }
  EXPECT_EQ(bm::sum_exponent(1.0), 2.0);
  EXPECT_EQ(bm::sum_exponent(bm::kInf), 2.0);
  EXPECT_TRUE(std::isinf(bm::sum_exponent(2.0)));
}

TEST(LpSumFormula, SmallestAtTwoLargestAtEnds) {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> dist(1.0, 3.0);
  const std::vector<double> grid{1.0, 1.2, 1.5, 1.8, 2.0, 2.5, 3.0, 5.0, 10.0, bm::kInf};
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> d(2 + trial % 3);
    for (double& x : d) x = dist(rng);
    const double lo = bm::thm_lp_sum_to_euclidean(d, 2.0);
    const double hi = bm::thm_lp_sum_to_euclidean(d, 1.0);
    for (double p : grid) {
      const double f = bm::thm_lp_sum_to_euclidean(d, p);
      EXPECT_GE(f, lo - 1e-12);
      EXPECT_LE(f, hi + 1e-12);
    }
  }
}

TEST(NtjValue, SpecExamples) {
  EXPECT_EQ(bm::ntj_value(4, 4.0 / 3.0), 2.0);
  for (double p : {1.1, 1.5, 2.0}) EXPECT_EQ(bm::ntj_value(1, p), 1.0);
  for (int n = 1; n <= 6; ++n) EXPECT_EQ(bm::ntj_value(n, 2.0), 1.0);
  expect_code(ErrorCode::InvalidP, [] { bm::ntj_value(3, 1.0); });
  expect_code(ErrorCode::InvalidP, [] { bm::ntj_value(3, 2.5); });
  expect_code(ErrorCode::HypothesisViolated, [] { bm::ntj_value(0, 1.5); });
}

TEST(NtjValue, AgreesWithLpSumFormula) {
  for (int n = 1; n <= 6; ++n) {
    for (double p : {1.1, 4.0 / 3.0, 1.5, 1.9, 2.0}) {
      const double each = std::pow(static_cast<double>(n), (2.0 - p) / (2.0 * p));
      const double q = p == 2.0 ? 2.0 : p / (p - 1.0);
      const std::vector<double> d(static_cast<std::size_t>(n), each);
      EXPECT_NEAR(bm::ntj_value(n, p), bm::thm_lp_sum_to_euclidean(d, q), 1e-12) << "n = " << n << " p = " << p;
    }
  }
}

TEST(HannerDistance, SpecExamples) {
  EXPECT_EQ(bm::hanner_distance(1), 1.0);
  EXPECT_EQ(bm::hanner_distance(2), std::sqrt(2.0));
  EXPECT_EQ(bm::hanner_distance(4), 2.0);
}

TEST(VertexAbsorbing, SpecExample) {
  const BodyExpr B1 = BodyExpr::polytope(cols({{1, 0}, {-1, 0}, {0, 0.5}, {0, -0.5}}));
  const BodyExpr B2 = BodyExpr::polytope(cols({{1, 0}, {-1, 0}}));
  Mat T = Mat::Zero(2, 2);
  T(0, 0) = 1.0;
  EXPECT_TRUE(bm::lemma_vertex_absorbing_check(B1, B2, vec({0, 1}), T, true));
  expect_code(ErrorCode::HypothesisViolated,
              [&] { bm::lemma_vertex_absorbing_check(B1, B2, vec({0, 0.25}), T, true); });
}

TEST(VertexAbsorbing, HypothesisFailuresAreNamed) {
  const BodyExpr B1 = BodyExpr::polytope(cols({{1, 0}, {-1, 0}, {0, 0.5}, {0, -0.5}}));
  const BodyExpr B2 = BodyExpr::polytope(cols({{1, 0}, {-1, 0}}));
  // T keeps e2, so T(v) leaves T(B1).
  expect_code(ErrorCode::HypothesisViolated,
              [&] { bm::lemma_vertex_absorbing_check(B1, B2, vec({0, 1}), Mat::Identity(2, 2), true); });
  // Without -v the hull misses the lower half of B1.
  Mat T = Mat::Zero(2, 2);
  T(0, 0) = 1.0;
  try {
    bm::lemma_vertex_absorbing_check(B1, B2, vec({0, 1}), T, false);
    ADD_FAILURE() << "expected HypothesisViolated";
  } catch (const bm::Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::HypothesisViolated);
    EXPECT_NE(std::string(e.what()).find("conv(B2 u {v})"), std::string::npos) << e.what();
  }
  expect_code(ErrorCode::DimensionMismatch, [&] { bm::lemma_vertex_absorbing_check(B1, B2, vec({0, 1, 0}), T, true); });
}

TEST(VertexAbsorbing, RandomInstances) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto inst = bm::random_vertex_absorbing_instance(seed);
    EXPECT_TRUE(bm::lemma_vertex_absorbing_check(inst.B1, inst.B2, inst.v, inst.T, inst.symmetric)) << "seed " << seed;
  }
}

TEST(ProjConstruct, SpecExamples) {
  const BodyExpr B = bm::embed(bm::cube(2), 3);
  const Vec e3 = Vec::Unit(3, 2);
  const Mat P0 = bm::lemma_proj_construct(B, 1.5, Vec::Zero(3), e3);
  EXPECT_LT((P0 * e3).norm(), 1e-15);

  const Vec u = vec({0.3, 0, -0.5});
  const Mat P = bm::lemma_proj_construct(B, 1.0, u, e3 + u);
  EXPECT_TRUE((P * e3).isApprox(vec({-0.3, 0, 0}), 1e-15));
  EXPECT_TRUE((P * P).isApprox(P, 1e-15));
}

TEST(ProjConstruct, Errors) {
  const BodyExpr B = bm::embed(bm::cube(2), 3);
  const Vec e3 = Vec::Unit(3, 2);
  expect_code(ErrorCode::HypothesisViolated, [&] { bm::lemma_proj_construct(B, 2.5, Vec::Zero(3), e3); });
  expect_code(ErrorCode::HypothesisViolated, [&] { bm::lemma_proj_construct(B, 1.5, Vec::Zero(3), 0.5 * e3); });
  expect_code(ErrorCode::HypothesisViolated, [&] { bm::lemma_proj_construct(bm::cube(3), 1.5, Vec::Zero(3), e3); });
  expect_code(ErrorCode::DimensionMismatch, [&] { bm::lemma_proj_construct(B, 1.5, Vec::Zero(2), e3); });
}

TEST(ProjConstruct, RandomInstances) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto inst = bm::random_proj_instance(seed);
    const Mat P = bm::lemma_proj_construct(inst.B, inst.d, inst.u, inst.v);
    const int n = inst.B.dim();
    const Mat VB = inst.B.polytope().vertices;
    EXPECT_TRUE(bm::in_hull(VB, P * Vec::Unit(n, n - 1), 1e-9)) << "seed " << seed;
    EXPECT_TRUE(bm::in_hull(VB, P * (inst.v - inst.u), 1e-9)) << "seed " << seed;
    EXPECT_TRUE((P * P).isApprox(P, 1e-12));
    EXPECT_LT(P.row(n - 1).norm(), 1e-15);
  }
}

TEST(Triangles, SpecExamples) {
  const auto same = bm::lemma_triangles_check(V2(0, 0), 1.0, V2(-1, 0), V2(0, 1), V2(1, 0));
  EXPECT_EQ(same.condition, 1);
  EXPECT_EQ(same.mu, 1.0);
  const double d = 1.3;
  const V2 y(0.1, -0.2);
  const auto scaled = bm::lemma_triangles_check(y, d, d * (y - V2(1, 0)), d * (y + V2(0, 1)), d * (y + V2(1, 0)));
  EXPECT_EQ(scaled.condition, 1);
  EXPECT_NEAR(scaled.mu, 1.0, 1e-12);
}

TEST(Triangles, Errors) {
  expect_code(ErrorCode::HypothesisViolated,
              [] { bm::lemma_triangles_check(V2(0, 0), 1.6, V2(-1, 0), V2(0, 1), V2(1, 0)); });
  // 0 outside T.
  expect_code(ErrorCode::HypothesisViolated,
              [] { bm::lemma_triangles_check(V2(0, 0.5), 1.0, V2(-1, 0.5), V2(0, 1.5), V2(1, 0.5)); });
  // v'_2 < v''_2.
  expect_code(ErrorCode::HypothesisViolated,
              [] { bm::lemma_triangles_check(V2(0, 0), 1.0, V2(-1, 0), V2(1, 0), V2(0, 1)); });
}

TEST(Triangles, RandomInstances) {
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    const auto inst = bm::random_triangle_instance(seed);
    const auto res = bm::lemma_triangles_check(inst.y, inst.d, inst.v, inst.v1, inst.v2);
    EXPECT_LT(res.mu, 4.0 / 3.0) << "seed " << seed;
    EXPECT_TRUE(res.condition == 1 || res.condition == 2);
  }
}

TEST(Generators, DeterministicPerSeed) {
  const auto a = bm::random_triangle_instance(17), b = bm::random_triangle_instance(17);
  EXPECT_EQ(a.y, b.y);
  EXPECT_EQ(a.v2, b.v2);
  const auto p = bm::random_proj_instance(17), q = bm::random_proj_instance(17);
  EXPECT_EQ(p.v, q.v);
  const auto s = bm::random_vertex_absorbing_instance(17), t = bm::random_vertex_absorbing_instance(17);
  EXPECT_EQ(s.T, t.T);
}
