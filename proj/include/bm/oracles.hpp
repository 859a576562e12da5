#pragma once

// Closed-form distance values and executable checkers for the projection and
// triangle lemmas, plus random instance generators for each checker.

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "bm/body.hpp"
#include "bm/constructions.hpp"
#include "bm/geometry.hpp"
#include "bm/hull.hpp"

namespace bm {

/// Exponent r = 2p/|p-2| with r(2) = inf and r(inf) = 2.
inline double sum_exponent(double p) {
  if (std::isnan(p) || p < 1.0) fail(ErrorCode::InvalidP, "p must lie in [1, inf]");
  if (std::isinf(p)) return 2.0;
  if (p == 2.0) return kInf;
  return 2.0 * p / std::abs(p - 2.0);
}

/// Distance of the l_p-sum of spaces at distances d_i from Euclidean space.
inline double thm_lp_sum_to_euclidean(const std::vector<double>& d, double p) {
  const double r = sum_exponent(p);
  if (d.empty()) fail(ErrorCode::HypothesisViolated, "need at least one summand distance");
  for (double x : d)
    if (!(x >= 1.0)) fail(ErrorCode::HypothesisViolated, "summand distances must be >= 1");
  return lp_norm(Eigen::Map<const Vec>(d.data(), static_cast<Eigen::Index>(d.size())), r);
}

/// n^{(2-p)/p}, written as n^{2/p - 1} so that n = 4, p = 4/3 rounds to 2.
inline double ntj_value(int n, double p) {
  if (std::isnan(p) || !(p > 1.0 && p <= 2.0)) fail(ErrorCode::InvalidP, "p must lie in (1, 2]");
  if (n < 1) fail(ErrorCode::HypothesisViolated, "n must be >= 1");
  return std::pow(static_cast<double>(n), 2.0 / p - 1.0);
}

inline double hanner_distance(int n) { return std::sqrt(static_cast<double>(n)); }

namespace detail {

inline Mat vertices_of(const BodyExpr& body, const char* what) {
  auto pb = as_polytope(body);
  if (!pb) fail(ErrorCode::NotVertexEnumerable, std::string(what) + " must be polytope-representable");
  return pb->polytope().vertices;
}

inline Mat append_columns(const Mat& a, const std::vector<Vec>& extra) {
  Mat out(a.rows(), a.cols() + static_cast<Eigen::Index>(extra.size()));
  out.leftCols(a.cols()) = a;
  for (std::size_t k = 0; k < extra.size(); ++k) out.col(a.cols() + static_cast<Eigen::Index>(k)) = extra[k];
  return out;
}

}  // namespace detail

/// Checks the hypotheses of the vertex-absorbing lemma and returns whether
/// T(conv(B2 u {v})) and T(B2) have the same pruned vertex set. In the
/// symmetric variant both v and -v are adjoined.
inline bool lemma_vertex_absorbing_check(const BodyExpr& B1, const BodyExpr& B2, const Vec& v, const Mat& T,
                                         bool symmetric, double tol = 1e-9) {
  const int n = B2.dim();
  if (B1.dim() != n || v.size() != n || T.rows() != n || T.cols() != n)
    fail(ErrorCode::DimensionMismatch, "B1, B2, v and T must share the ambient dimension");
  if (symmetric && !(B1.symmetric() && B2.symmetric()))
    fail(ErrorCode::HypothesisViolated, "symmetric variant needs 0-symmetric B1 and B2");
  const Mat V1 = detail::vertices_of(B1, "B1");
  const Mat V2 = detail::vertices_of(B2, "B2");
  std::vector<Vec> adjoin{v};
  if (symmetric) adjoin.push_back(-v);
  const Mat hull_with_v = detail::append_columns(V2, adjoin);
  for (int j = 0; j < V1.cols(); ++j)
    if (!in_hull(hull_with_v, V1.col(j), tol))
      fail(ErrorCode::HypothesisViolated, symmetric ? "B1 is not contained in conv(B2 u {+-v})"
                                                    : "B1 is not contained in conv(B2 u {v})");
  if (in_hull(V1, v, tol)) fail(ErrorCode::HypothesisViolated, "v lies in B1");
  const Mat TV1 = T * V1;
  if (!in_hull(TV1, T * v, tol)) fail(ErrorCode::HypothesisViolated, "T(v) is not in T(B1)");

  const Mat lhs = prune_redundant(T * hull_with_v, tol);
  const Mat rhs = prune_redundant(T * V2, tol);
  return same_vertex_set(lhs, rhs, 1e3 * tol * std::max(1.0, scale_of(rhs)));
}

/// Builds the projection P(x) = x - x_n w onto {x_n = 0} from the cone
/// lemma and verifies P(e^n) in B and P(v - u) in B before returning it.
inline Mat lemma_proj_construct(const BodyExpr& B, double d, const Vec& u, const Vec& v, double tol = 1e-9) {
  const int n = B.dim();
  if (n < 2 || u.size() != n || v.size() != n) fail(ErrorCode::DimensionMismatch, "B, u and v must share the dimension");
  if (std::isnan(d) || d < 1.0 || d > 2.0) fail(ErrorCode::HypothesisViolated, "d must lie in [1, 2]");
  const Mat VB = detail::vertices_of(B, "B");
  if (VB.row(n - 1).cwiseAbs().maxCoeff() > tol * std::max(1.0, scale_of(VB)))
    fail(ErrorCode::HypothesisViolated, "B must lie in the hyperplane x_n = 0");
  const Vec zero = Vec::Zero(n);
  if (!in_hull(VB, zero, tol)) fail(ErrorCode::HypothesisViolated, "B must contain the origin");
  const Vec en = Vec::Unit(n, n - 1);
  Mat C = VB.colwise() + u;
  C = detail::append_columns(C, {en + u});
  if (!in_hull(C, zero, tol)) fail(ErrorCode::HypothesisViolated, "the cone conv((B+u) u {e^n+u}) must contain 0");
  if (!in_hull(d * C, v, tol)) fail(ErrorCode::HypothesisViolated, "v must lie in dC");
  if (v[n - 1] < u[n - 1] + 1.0 - tol) fail(ErrorCode::HypothesisViolated, "need v_n >= u_n + 1");

  Vec piu = u;
  piu[n - 1] = 0.0;
  const Vec w = en + piu / (v[n - 1] - u[n - 1]);
  const Mat P = Mat::Identity(n, n) - w * en.transpose();
  if (!in_hull(VB, P * en, tol)) fail(ErrorCode::Internal, "constructed projection maps e^n outside B");
  if (!in_hull(VB, P * (v - u), tol)) fail(ErrorCode::Internal, "constructed projection maps v - u outside B");
  return P;
}

struct TriangleCondition {
  int condition = 0;  // 1 or 2
  double mu = 0.0;
};

/// Decides which of the two alternatives of the triangle lemma holds for
/// T = conv{y - e1, y + e1, y + e2} inside S = conv{v, v', v''} inside dT.
inline TriangleCondition lemma_triangles_check(const Eigen::Vector2d& y, double d, const Eigen::Vector2d& v,
                                               const Eigen::Vector2d& v1, const Eigen::Vector2d& v2,
                                               double tol = 1e-9) {
  const Eigen::Vector2d e1(1.0, 0.0), e2(0.0, 1.0);
  Mat Tm(2, 3);
  Tm << y - e1, y + e1, y + e2;
  Mat Sm(2, 3);
  Sm << v, v1, v2;
  if (!in_hull(Tm, Vec::Zero(2), tol)) fail(ErrorCode::HypothesisViolated, "0 must lie in T");
  if (std::isnan(d) || d < 1.0 || d > 1.5) fail(ErrorCode::HypothesisViolated, "d must lie in [1, 3/2]");
  for (int j = 0; j < 3; ++j) {
    if (!in_hull(Sm, Tm.col(j), tol)) fail(ErrorCode::HypothesisViolated, "T is not contained in S");
    if (!in_hull(d * Tm, Sm.col(j), tol)) fail(ErrorCode::HypothesisViolated, "S is not contained in dT");
  }
  Mat seg(2, 2);
  seg << d * (y - e1), d * y;
  if (!in_hull(seg, v, tol)) fail(ErrorCode::HypothesisViolated, "v must lie on [d(y - e1), dy]");
  if (v1[1] < v2[1] - tol) fail(ErrorCode::HypothesisViolated, "need v'_2 >= v''_2");

  constexpr double kMuMax = 4.0 / 3.0;
  const double drop = v2[1] - v1[1];
  if (std::abs(drop) <= tol) {
    if (std::abs(v[1] - v1[1]) <= tol) return {1, 1.0};
  } else {
    double mu = (v[1] - v1[1]) / drop;
    if (mu >= 1.0 - tol && mu < kMuMax) return {1, std::max(mu, 1.0)};
  }
  // Line through y + e2 with direction v'' - v' meets x_2 = y_2 at z.
  const Eigen::Vector2d w = v2 - v1;
  if (std::abs(w[1]) > tol) {
    const double z1 = y[0] - w[0] / w[1];
    double mu = (z1 - y[0] + 1.0) / 2.0;
    if (mu >= 0.5 - tol && mu < kMuMax) return {2, std::max(mu, 0.5)};
  }
  fail(ErrorCode::NoConditionHolds, "neither alternative of the triangle lemma holds");
}

// Random valid instances for the three checkers.

struct VertexAbsorbingInstance {
  BodyExpr B1, B2;
  Vec v;
  Mat T;
  bool symmetric = false;
};

struct ProjInstance {
  BodyExpr B;
  double d = 1.0;
  Vec u, v;
};

struct TriangleInstance {
  Eigen::Vector2d y, v, v1, v2;
  double d = 1.0;
};

namespace detail {

inline Vec random_unit(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vec x(n);
  for (int i = 0; i < n; ++i) x[i] = g(rng);
  return x / x.norm();
}

inline Vec random_weights(int k, std::mt19937_64& rng) {
  std::exponential_distribution<double> e(1.0);
  Vec w(k);
  for (int i = 0; i < k; ++i) w[i] = e(rng);
  return w / w.sum();
}

inline Mat random_points_around_origin(int n, int count, bool symmetric, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> rad(0.5, 1.0);
  const int base = symmetric ? count / 2 : count;
  Mat pts(n, symmetric ? 2 * base : base);
  for (int j = 0; j < base; ++j) {
    const Vec x = rad(rng) * random_unit(n, rng);
    pts.col(j) = x;
    if (symmetric) pts.col(base + j) = -x;
  }
  return pts;
}

}  // namespace detail

/// Instance of the vertex-absorbing lemma. T kills w - v for a point w of B2,
/// and B1 contains a point of the segment [w, v], so T(v) lies in T(B1).
inline VertexAbsorbingInstance random_vertex_absorbing_instance(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (;;) {
    const int n = 2 + static_cast<int>(rng() % 2);
    const bool symmetric = (rng() % 2) == 0;
    const Mat V2 = detail::random_points_around_origin(n, 2 * n + 2 + static_cast<int>(rng() % 4), symmetric, rng);
    if (affine_span(V2).rank < n) continue;
    const Vec v = (1.3 + unit(rng)) * detail::random_unit(n, rng);
    if (in_hull(V2, v)) continue;
    const Vec w = V2 * detail::random_weights(static_cast<int>(V2.cols()), rng);
    const Vec k = w - v;
    const Vec a = k + 0.3 * detail::random_unit(n, rng) * k.norm();
    if (std::abs(a.dot(k)) < 1e-3 * a.norm() * k.norm()) continue;
    const Mat T = Mat::Identity(n, n) - k * a.transpose() / a.dot(k);

    // Points of conv(B2 u {v}) with v-weight at most 0.8, plus one on [w, v].
    const int extra = 3 + static_cast<int>(rng() % 3);
    std::vector<Vec> pts;
    const double lam = 0.8 * unit(rng);
    pts.push_back((1.0 - lam) * w + lam * v);
    for (int j = 0; j < extra; ++j) {
      const double t = 0.8 * unit(rng);
      const Vec b = V2 * detail::random_weights(static_cast<int>(V2.cols()), rng);
      pts.push_back((1.0 - t) * b + t * v);
    }
    Mat V1(n, static_cast<Eigen::Index>(symmetric ? 2 * pts.size() : pts.size()));
    for (std::size_t j = 0; j < pts.size(); ++j) {
      V1.col(static_cast<Eigen::Index>(j)) = pts[j];
      if (symmetric) V1.col(static_cast<Eigen::Index>(pts.size() + j)) = -pts[j];
    }
    try {
      VertexAbsorbingInstance inst{BodyExpr::polytope(V1), BodyExpr::polytope(V2), v, T, symmetric};
      lemma_vertex_absorbing_check(inst.B1, inst.B2, inst.v, inst.T, inst.symmetric);
      return inst;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::HypothesisViolated && e.code() != ErrorCode::OriginNotInterior) throw;
    }
  }
}

/// Instance of the cone projection lemma in dimension 3 or 4: B is a random
/// polytope in {x_n = 0} containing 0, pi_Y(u) = -(1 + u_n) b for some b in B,
/// and v is a point of dC at height at least u_n + 1.
inline ProjInstance random_proj_instance(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (;;) {
    const int n = 3 + static_cast<int>(rng() % 2);
    Mat base = detail::random_points_around_origin(n - 1, 3 + 2 * n, (rng() % 2) == 0, rng);
    if (affine_span(base).rank < n - 1 || !in_hull(base, Vec::Zero(n - 1))) continue;
    Mat VB = Mat::Zero(n, base.cols());
    VB.topRows(n - 1) = base;
    const double d = 1.0 + unit(rng);
    const double un = -unit(rng);
    const Vec b = VB * detail::random_weights(static_cast<int>(VB.cols()), rng);
    Vec u = -(1.0 + un) * b;
    u[n - 1] = un;
    const Vec b2 = VB * detail::random_weights(static_cast<int>(VB.cols()), rng);
    const double h = (un + 1.0) + unit(rng) * (d * (1.0 + un) - (un + 1.0));
    const double t = h / d - un;
    const Vec en = Vec::Unit(n, n - 1);
    const Vec v = d * ((1.0 - t) * (b2 + u) + t * (en + u));
    ProjInstance inst{BodyExpr::polytope(VB), d, u, v};
    try {
      lemma_proj_construct(inst.B, inst.d, inst.u, inst.v);
      return inst;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::HypothesisViolated) throw;
    }
  }
}

namespace detail {

inline double cross2(const Eigen::Vector2d& a, const Eigen::Vector2d& b) { return a[0] * b[1] - a[1] * b[0]; }

/// Point-in-triangle for a counterclockwise triangle (a, b, c).
inline bool in_ccw_triangle(const Eigen::Vector2d& p, const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                            const Eigen::Vector2d& c, double tol) {
  return cross2(b - a, p - a) >= -tol && cross2(c - b, p - b) >= -tol && cross2(a - c, p - c) >= -tol;
}

}  // namespace detail

/// Instance of the triangle lemma. v' is drawn from the cap of dT above the
/// apex of T, v from the part of [d(y - e1), dy] that keeps y - e1 inside S,
/// and v'' from dT until T fits inside S.
inline TriangleInstance random_triangle_instance(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Eigen::Vector2d e1(1.0, 0.0), e2(0.0, 1.0);
  auto in_triangle = [&](const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c) {
    double s = unit(rng), t = unit(rng);
    if (s + t > 1.0) s = 1.0 - s, t = 1.0 - t;
    return Eigen::Vector2d(a + s * (b - a) + t * (c - a));
  };
  for (;;) {
    TriangleInstance inst;
    const double y2 = -unit(rng);
    const double reach = 1.0 + y2;
    inst.y = Eigen::Vector2d(reach * (2.0 * unit(rng) - 1.0), y2);
    inst.d = 1.0 + 0.5 * unit(rng);
    const double d = inst.d;
    const Eigen::Vector2d& y = inst.y;
    const Eigen::Vector2d a = d * (y - e1), b = d * (y + e1), c = d * (y + e2);
    const Eigen::Vector2d t0 = y - e1, t1 = y + e1, t2 = y + e2;
    const double cap = (d - 1.0) * (1.0 + y2);
    inst.v1 = in_triangle(c, c + cap * (-e1 - e2), c + cap * (e1 - e2));
    // The edge from v to v' must pass to the left of y - e1.
    const double drop = inst.v1[1] - t0[1];
    double qx = d * y[0];
    if (drop > 1e-12) {
      const double k = (inst.v1[1] - d * y2) / drop;
      qx = inst.v1[0] + k * (t0[0] - inst.v1[0]);
    }
    const double hi = std::min(qx, d * y[0]);
    if (hi < a[0]) continue;
    inst.v = Eigen::Vector2d(a[0] + unit(rng) * (hi - a[0]), d * y2);
    for (int attempt = 0; attempt < 200; ++attempt) {
      const Eigen::Vector2d w = in_triangle(a, b, c);
      if (w[1] > inst.v1[1]) continue;
      if (detail::cross2(inst.v1 - inst.v, w - inst.v) >= 0.0) continue;  // need v, v'', v' counterclockwise
      if (!detail::in_ccw_triangle(t0, inst.v, w, inst.v1, 0.0) || !detail::in_ccw_triangle(t1, inst.v, w, inst.v1, 0.0) ||
          !detail::in_ccw_triangle(t2, inst.v, w, inst.v1, 0.0))
        continue;
      inst.v2 = w;
      try {
        lemma_triangles_check(inst.y, inst.d, inst.v, inst.v1, inst.v2);
        return inst;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::HypothesisViolated) throw;
      }
    }
  }
}

}  // namespace bm
