#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "bm/constructions.hpp"
#include "bm/distance.hpp"
#include "bm/geometry.hpp"
#include "test_util.hpp"

using bm::BodyExpr;
using bm::ErrorCode;
using bm::LinearMap;
using bm::Mat;
using bm::Vec;
using testutil::cols;
using testutil::expect_code;
using testutil::vec;

TEST(InclusionScale, SpecExamples) {
  EXPECT_NEAR(bm::inclusion_scale(bm::cube(2), bm::cross_polytope(2)), 2.0, 1e-12);
  for (int n = 1; n <= 4; ++n) EXPECT_NEAR(bm::inclusion_scale(bm::cross_polytope(n), bm::cube(n)), 1.0, 1e-12);
  EXPECT_NEAR(bm::inclusion_scale(bm::cube(3), bm::cube(3)), 1.0, 1e-12);
}

TEST(InclusionScale, SampledCompositeBodies) {
  // Euclidean disc as an l_2-sum of segments: inside the square at scale 1,
  // inside the diamond at scale sqrt 2.
  const BodyExpr disc = bm::lp_sum({bm::segment(), bm::segment()}, 2.0);
  EXPECT_NEAR(bm::inclusion_scale(disc, bm::cube(2)), 1.0, 1e-9);
  EXPECT_NEAR(bm::inclusion_scale(disc, bm::cross_polytope(2)), std::sqrt(2.0), 1e-9);
  EXPECT_NEAR(bm::inclusion_scale(bm::cube(2), disc), std::sqrt(2.0), 1e-9);
  bm::SamplingOptions off;
  off.allow_sampling = false;
  expect_code(ErrorCode::NotVertexEnumerable, [&] { bm::inclusion_scale(disc, BodyExpr::ball(2), off); });
}

TEST(InclusionScale, ProductOfBothDirectionsIsAtLeastOne) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 2;
    const BodyExpr a = testutil::random_polytope(n, trial % 3 == 0, rng);
    const BodyExpr b = testutil::random_polytope(n, trial % 3 == 0, rng);
    EXPECT_GE(bm::inclusion_scale(a, b) * bm::inclusion_scale(b, a), 1.0 - 1e-12);
  }
}

TEST(InclusionScale, Errors) {
  expect_code(ErrorCode::DimensionMismatch, [] { bm::inclusion_scale(bm::cube(2), bm::cube(3)); });
  const BodyExpr off_centre = BodyExpr::polytope(cols({{1, 1}, {2, 1}, {1, 2}}));
  expect_code(ErrorCode::OriginNotInterior, [&] { bm::inclusion_scale(bm::cube(2), off_centre); });
}

TEST(ApplyMap, SpecExamples) {
  const BodyExpr sq = bm::cube(2);
  EXPECT_TRUE(bm::same_vertex_set(bm::apply_map(LinearMap::identity(2), sq).polytope().vertices, sq.polytope().vertices));
  EXPECT_TRUE(bm::same_vertex_set(bm::apply_map(LinearMap(2.0 * Mat::Identity(2, 2)), sq).polytope().vertices,
                                  2.0 * sq.polytope().vertices));
  const double c = std::cos(std::numbers::pi / 4), s = std::sin(std::numbers::pi / 4);
  Mat rot(2, 2);
  rot << c, -s, s, c;
  const BodyExpr diamond = bm::apply_map(LinearMap(rot / std::sqrt(2.0)), sq);
  EXPECT_TRUE(bm::same_vertex_set(diamond.polytope().vertices, bm::cross_polytope(2).polytope().vertices));
}

TEST(ApplyMap, GaugeOfImage) {
  std::mt19937_64 rng(3);
  const BodyExpr K = testutil::random_polytope(3, false, rng);
  Mat M = Mat::Random(3, 3) + 2.0 * Mat::Identity(3, 3);
  const LinearMap T(M);
  const BodyExpr TK = bm::apply_map(T, K);
  const BodyExpr composite = BodyExpr::linear_image(M, K);
  for (int i = 0; i < 20; ++i) {
    const Vec x = testutil::gaussian(3, rng);
    EXPECT_NEAR(bm::gauge(TK, x), bm::gauge(K, T.apply_inverse(x)), 1e-9);
    EXPECT_NEAR(bm::gauge(composite, x), bm::gauge(TK, x), 1e-9);
  }
  expect_code(ErrorCode::SingularMap, [] { LinearMap(Mat::Zero(2, 2)); });
}

TEST(Project, SpecExamples) {
  Mat P = Mat::Identity(3, 3);
  P(2, 2) = 0.0;
  const BodyExpr shadow = bm::project(P, bm::cross_polytope(3));
  EXPECT_EQ(shadow.polytope().vertices.cols(), 4);
  EXPECT_EQ(shadow.affine_dim(), 2);
  const BodyExpr same = bm::project(Mat::Identity(3, 3), bm::cube(3));
  EXPECT_TRUE(bm::same_vertex_set(same.polytope().vertices, bm::cube(3).polytope().vertices));

  // x -> x - x_3 w with w = e3 kills the apexes of the double cone over B_1^2.
  const BodyExpr base = bm::embed(bm::cross_polytope(2), 3);
  const BodyExpr dc = bm::double_cone(base, {Vec::Unit(3, 2)});
  const BodyExpr flat = bm::project(P, dc);
  EXPECT_TRUE(bm::same_vertex_set(flat.polytope().vertices, base.polytope().vertices));
}

TEST(Project, PruningIsIdempotent) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 20; ++i) {
    const BodyExpr K = testutil::random_polytope(3, false, rng);
    const Mat v = K.polytope().vertices;
    EXPECT_EQ(bm::prune_redundant(v), v);
  }
}

TEST(Project, Errors) {
  Mat Q = Mat::Identity(2, 2);
  Q(0, 1) = 0.5;
  Q(1, 1) = 0.5;
  expect_code(ErrorCode::NotIdempotent, [&] { bm::project(Q, bm::cube(2)); });
  expect_code(ErrorCode::NotVertexEnumerable, [] { bm::project(Mat::Identity(2, 2), BodyExpr::ball(2)); });
}

TEST(Polar, SpecExamples) {
  EXPECT_TRUE(bm::same_vertex_set(bm::polar(bm::cross_polytope(2)).polytope().vertices, bm::cube(2).polytope().vertices));
  EXPECT_TRUE(bm::same_vertex_set(bm::polar(bm::cube(3)).polytope().vertices, bm::cross_polytope(3).polytope().vertices));
  // Facet normals of the unit hexagon sit at 30 degrees; their polar vertices
  // have norm 1 / cos(30 deg) = 2 / sqrt 3.
  const BodyExpr dual = bm::polar(bm::regular_polygon(6));
  const BodyExpr expected = bm::apply_map(LinearMap(2.0 / std::sqrt(3.0) * Mat::Identity(2, 2)),
                                          bm::regular_polygon(6, std::numbers::pi / 6));
  EXPECT_TRUE(bm::same_vertex_set(dual.polytope().vertices, expected.polytope().vertices));
}

TEST(Polar, Errors) {
  expect_code(ErrorCode::DimensionTooHigh, [] { bm::polar(bm::cube(4)); });
  const BodyExpr off_centre = BodyExpr::polytope(cols({{1, 1}, {2, 1}, {1, 2}}));
  expect_code(ErrorCode::OriginNotInterior, [&] { bm::polar(off_centre); });
}

TEST(Polar, InvolutionOnRandomPolytopes) {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 100; ++i) {
    const BodyExpr K = testutil::random_polytope(2 + i % 2, i % 2 == 0, rng);
    const BodyExpr back = bm::polar(bm::polar(K));
    EXPECT_TRUE(bm::same_vertex_set(back.polytope().vertices, K.polytope().vertices, 1e-9)) << "polytope " << i;
  }
}

TEST(Polar, GaugeSupportDualityOnRandomPolytopes) {
  // The polar vertex list comes from facet enumeration of K, and its gauge is
  // taken by the LP route, so neither side reuses the other's data.
  std::mt19937_64 rng(77);
  for (int i = 0; i < 100; ++i) {
    const int n = 2 + i % 2;
    const BodyExpr K = testutil::random_polytope(n, true, rng);
    const BodyExpr P = bm::polar(K);
    for (int j = 0; j < 100; ++j) {
      const Vec x = testutil::gaussian(n, rng);
      const double h = bm::support(K, x);
      EXPECT_NEAR(bm::detail::polytope_gauge_lp(P.polytope().vertices, x), h, 1e-9 * std::max(1.0, h));
      EXPECT_NEAR(bm::gauge(P, x), h, 1e-9 * std::max(1.0, h));
    }
  }
}

TEST(RadialExtremes, CrossPolytope) {
  const auto ext = bm::radial_extremes(bm::cross_polytope(2));
  EXPECT_NEAR(ext.r, 1.0 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(ext.R, 1.0, 1e-12);
  EXPECT_TRUE(bm::same_vertex_set(ext.inner, 0.5 * cols({{1, 1}, {-1, 1}, {-1, -1}, {1, -1}}), 1e-9));
  EXPECT_TRUE(bm::same_vertex_set(ext.outer, bm::cross_polytope(2).polytope().vertices, 1e-9));
}

TEST(RadialExtremes, Cube) {
  for (int n = 2; n <= 3; ++n) {
    const auto ext = bm::radial_extremes(bm::cube(n));
    EXPECT_NEAR(ext.r, 1.0, 1e-12);
    EXPECT_NEAR(ext.R, std::sqrt(static_cast<double>(n)), 1e-12);
    EXPECT_EQ(ext.inner.cols(), 2 * n);
    EXPECT_EQ(ext.outer.cols(), 1 << n);
  }
}

TEST(RadialExtremes, Ball) {
  const auto ext = bm::radial_extremes(BodyExpr::ball(2));
  EXPECT_NEAR(ext.r, 1.0, 1e-12);
  EXPECT_NEAR(ext.R, 1.0, 1e-12);
}

TEST(VerifyChain, SquareAndDiamond) {
  EXPECT_TRUE(bm::verify_chain(bm::cross_polytope(2), bm::cube(2), LinearMap::identity(2), 2.0, 1e-9));
  EXPECT_FALSE(bm::verify_chain(bm::cross_polytope(2), bm::cube(2), LinearMap::identity(2), 1.9, 1e-9));
  const double c = std::sqrt(0.5);
  Mat rot(2, 2);
  rot << c, -c, c, c;
  EXPECT_TRUE(bm::verify_chain(bm::cross_polytope(2), bm::cube(2), LinearMap(rot / std::sqrt(2.0)), 1.0, 1e-9));
}
