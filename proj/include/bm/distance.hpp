#pragma once

// Numerical Banach-Mazur distance: the exact ratio for a fixed position and
// a multi-start Nelder-Mead search over positions. Results are upper bounds.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

#include "bm/body.hpp"
#include "bm/geometry.hpp"
#include "bm/lp.hpp"
#include "bm/nelder_mead.hpp"
#include "bm/parallel.hpp"

namespace bm {

struct DistanceConfig {
  int restarts = 200;
  std::uint64_t seed = 0;
  int max_iters = 2000;
  double tol = 1e-9;
  /// Fix both translations at zero (both bodies must be 0-symmetric).
  bool symmetric = true;
  unsigned threads = 0;
  SamplingOptions sampling;
};

struct DistanceEstimate {
  double upper = kInf;
  std::optional<double> certified;
  /// K + shift is contained in witness(L) = M (L + witness.pre()), which is
  /// contained in upper * (K + shift).
  LinearMap witness = LinearMap::identity(1);
  Vec shift;
  int restarts_used = 0;
  std::uint64_t best_restart_seed = 0;
  int best_restart = 0;
  /// Largest inclusion violation of the chain at the witness (gauge units).
  double residual = 0.0;
};

namespace detail {

/// Facet data of a polytope-representable body scaled to a.x <= 1 form is not
/// possible for non-interior origins, so rows keep their offsets.
struct PolyData {
  Mat vertices;  // n x m
  Mat normals;   // f x n
  Vec offsets;   // f
};

inline std::optional<PolyData> poly_data(const BodyExpr& body) {
  auto p = as_polytope(body);
  if (!p || !p->polytope().facets) return std::nullopt;
  return PolyData{p->polytope().vertices, p->polytope().facets->normals, p->polytope().facets->offsets};
}

/// max_{g,i} A_g (x_i + shift_in) / (b_g + A_g shift_out) for the inclusion
/// conv(X) + shift_in inside (P + shift_out); +inf when shift_out leaves P.
inline double poly_scale(const Mat& A, const Vec& b, const Mat& X, const Vec& shift_in, const Vec& shift_out) {
  const Vec denom = b + A * shift_out;
  if (denom.minCoeff() <= 1e-9 * std::max(1.0, b.maxCoeff())) return kInf;
  const Mat num = (A * X).colwise() + A * shift_in;
  return std::max(0.0, (num.array().colwise() / denom.array()).maxCoeff());
}

}  // namespace detail

/// Ratio s * t for the position K + u inside M (L + v), where s and t are the
/// two inclusion scales. Scale-invariant in M.
inline double position_ratio(const BodyExpr& K, const BodyExpr& L, const LinearMap& T, const Vec& u = Vec(),
                             const SamplingOptions& opt = {}) {
  if (K.dim() != L.dim() || T.dim() != K.dim()) fail(ErrorCode::DimensionMismatch, "bodies and map differ in dimension");
  const int n = K.dim();
  const Vec shift = u.size() == 0 ? Vec::Zero(n) : u;
  const Vec& v = T.pre();
  auto pk = detail::poly_data(K);
  auto pl = detail::poly_data(L);
  if (pk && pl) {
    // K + u inside s M (L + v)  <=>  M^-1 (K + u) inside s (L + v).
    const double s = detail::poly_scale(pl->normals, pl->offsets, T.inverse() * pk->vertices, T.inverse() * shift, v);
    const double t = detail::poly_scale(pk->normals * T.matrix(), pk->offsets, pl->vertices, v, T.inverse() * shift);
    if (!std::isfinite(s) || !std::isfinite(t)) fail(ErrorCode::OriginNotInterior, "translations move the origin out of a body");
    return s * t;
  }
  const BodyExpr Ku = shift.isZero(0.0) ? K : BodyExpr::translate(shift, K);
  const BodyExpr TL = apply_map(LinearMap(T.matrix(), T.pre()), L);
  return inclusion_scale(Ku, TL, opt) * inclusion_scale(TL, Ku, opt);
}

namespace detail {

/// Vertices of `inner` satisfy a.x <= scale (1 + tol) b for every facet of
/// `outer`, with an absolute slack of tol times the size of the bodies. The
/// origin may sit on the boundary of either polytope.
inline bool facet_inclusion(const BodyExpr& inner, const BodyExpr& outer, double scale, double tol) {
  const Mat& v = inner.polytope().vertices;
  const Facets& f = *outer.polytope().facets;
  const double size = std::max({1.0, scale_of(v), scale * scale_of(outer.polytope().vertices)});
  const Mat lhs = f.normals * v;
  for (int k = 0; k < f.count(); ++k) {
    const double bound = scale * f.offsets[k] * (1.0 + tol) + tol * size;
    if (lhs.row(k).maxCoeff() > bound) return false;
  }
  return true;
}

}  // namespace detail

/// K inside (1 + tol) T(L) and T(L) inside rho (1 + tol) K. Polytopes are
/// compared facet by facet, which also covers an origin on the boundary;
/// other bodies go through inclusion_scale and the direction grid.
inline bool verify_chain(const BodyExpr& K, const BodyExpr& L, const LinearMap& T, double rho, double tol,
                         const SamplingOptions& opt = {}) {
  const BodyExpr TL = apply_map(T, L);
  auto pk = as_polytope(K);
  auto pl = as_polytope(TL);
  if (pk && pl && pk->polytope().facets && pl->polytope().facets)
    return detail::facet_inclusion(*pk, *pl, 1.0, tol) && detail::facet_inclusion(*pl, *pk, rho, tol);
  return inclusion_scale(K, TL, opt) <= 1.0 + tol && inclusion_scale(TL, K, opt) <= rho * (1.0 + tol);
}

namespace detail {

inline std::vector<Mat> signed_permutations(int n, std::size_t cap) {
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<Mat> out;
  do {
    for (int signs = 0; signs < (1 << n) && out.size() < cap; ++signs) {
      Mat m = Mat::Zero(n, n);
      for (int r = 0; r < n; ++r) m(r, perm[static_cast<std::size_t>(r)]) = (signs >> r) & 1 ? -1.0 : 1.0;
      out.push_back(m);
    }
  } while (out.size() < cap && std::next_permutation(perm.begin(), perm.end()));
  return out;
}

inline Mat random_orthogonal(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Mat a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = g(rng);
  Eigen::HouseholderQR<Mat> qr(a);
  Mat q = qr.householderQ();
  Vec d = qr.matrixQR().diagonal();
  for (int k = 0; k < n; ++k)
    if (d[k] < 0) q.col(k) *= -1.0;
  return q;
}

inline Vec centroid_of(const BodyExpr& body) {
  if (auto p = as_polytope(body)) return p->polytope().vertices.rowwise().mean();
  return Vec::Zero(body.dim());
}

inline double circumradius_of(const BodyExpr& body) {
  if (auto p = as_polytope(body)) return p->polytope().vertices.colwise().norm().maxCoeff();
  const Mat grid = direction_grid(body.dim());
  double r = 0.0;
  for (int k = 0; k < grid.cols(); ++k) r = std::max(r, 1.0 / gauge(body, grid.col(k)));
  return r;
}

/// Signed permutations first (restart 0 is the identity), then random
/// orthogonal matrices with random axis scalings. Depends only on the
/// restart index and the seed.
inline Mat restart_matrix(int n, int restart, std::mt19937_64& rng) {
  static constexpr std::size_t kPermCap = 48;
  const auto perms = signed_permutations(n, kPermCap);
  if (static_cast<std::size_t>(restart) < perms.size()) return perms[static_cast<std::size_t>(restart)];
  Mat q = random_orthogonal(n, rng);
  std::uniform_real_distribution<double> scale(std::log(0.5), std::log(2.0));
  Vec s(n);
  for (int k = 0; k < n; ++k) s[k] = std::exp(scale(rng));
  return q * s.asDiagonal() * random_orthogonal(n, rng);
}

}  // namespace detail

namespace detail {

struct TranslationFit {
  double rho = kInf;
  double lambda = 1.0;
  Vec u, v;
};

/// Best translations for a fixed linear part M of two polytopes. Solves
///   min rho  s.t.  K in lambda M L + t,  lambda M L + t in rho K + c
/// over lambda >= 0, rho >= 0 and free t, c. Only the extreme vertex per
/// facet enters, so there is one row per facet of each body. Then
/// u = c / (rho - 1) and M (L + v) = lambda M L + t + u with M scaled by lambda.
inline std::optional<TranslationFit> translation_lp(const PolyData& K, const PolyData& L, const Mat& M, const Mat& Minv) {
  const int n = static_cast<int>(M.rows());
  const int nv = 2 + 2 * n;  // lambda, rho, t, c
  lp::Problem prob(nv);
  prob.objective[1] = 1.0;
  for (int k = 0; k < n; ++k) {
    prob.free[static_cast<std::size_t>(2 + k)] = true;
    prob.free[static_cast<std::size_t>(2 + n + k)] = true;
  }
  const Mat AL = L.normals * Minv;  // facets of M L: AL y <= bL
  const Vec reachK = (AL * K.vertices).rowwise().maxCoeff();
  for (int g = 0; g < AL.rows(); ++g) {
    Vec row = Vec::Zero(nv);
    row[0] = -L.offsets[g];
    row.segment(2, n) = -AL.row(g).transpose();
    prob.add_row(std::move(row), lp::Relation::LessEqual, -reachK[g]);
  }
  const Vec reachL = (K.normals * (M * L.vertices)).rowwise().maxCoeff();
  for (int f = 0; f < K.normals.rows(); ++f) {
    Vec row = Vec::Zero(nv);
    row[0] = reachL[f];
    row[1] = -K.offsets[f];
    row.segment(2, n) = K.normals.row(f).transpose();
    row.segment(2 + n, n) = -K.normals.row(f).transpose();
    prob.add_row(std::move(row), lp::Relation::LessEqual, 0.0);
  }
  const auto res = lp::solve(prob);
  if (res.status != lp::Status::Optimal || !(res.x[0] > 0.0)) return std::nullopt;
  TranslationFit fit;
  fit.rho = res.x[1];
  const double lambda = res.x[0];
  fit.lambda = lambda;
  const Vec t = res.x.segment(2, n);
  const Vec c = res.x.segment(2 + n, n);
  fit.u = fit.rho > 1.0 + 1e-12 ? Vec(c / (fit.rho - 1.0)) : Vec::Zero(n);
  fit.v = Minv * (t + fit.u) / lambda;
  return fit;
}

}  // namespace detail

/// Multi-start minimization of the position ratio over M (Frobenius
/// normalized) and, for non-symmetric inputs, the translations u and v. For
/// two polytopes the translations are not searched: each M is scored with the
/// exact optimum of translation_lp.
inline DistanceEstimate estimate_distance(const BodyExpr& K, const BodyExpr& L, const DistanceConfig& cfg = {}) {
  if (K.dim() != L.dim()) fail(ErrorCode::DimensionMismatch, "bodies live in different dimensions");
  if (cfg.symmetric && (!K.symmetric() || !L.symmetric()))
    fail(ErrorCode::SymmetryFlagViolated, "symmetric search requested for a body that is not 0-symmetric");
  if (cfg.restarts < 1) fail(ErrorCode::InvalidBody, "at least one restart is required");
  const int n = K.dim();
  const int nm = n * n;
  auto pk = detail::poly_data(K);
  auto pl = detail::poly_data(L);
  const bool lp_translations = !cfg.symmetric && pk && pl;
  const bool searched_translations = !cfg.symmetric && !lp_translations;
  const int nvars = searched_translations ? nm + 2 * n : nm;
  const Vec ck = detail::centroid_of(K);
  const Vec cl = detail::centroid_of(L);
  const double rk = detail::circumradius_of(K);
  const double rl = detail::circumradius_of(L);
  // u and v live in boxes of half-width twice the circumradius about -centroid.
  const Vec u0 = -ck, v0 = -cl;
  auto clamp_box = [](const Vec& x, const Vec& centre, double half) {
    return Vec(x.array().max(centre.array() - half).min(centre.array() + half));
  };

  struct Decoded {
    Mat M;
    Vec u, v;
  };
  auto decode = [&](const Vec& x) {
    Decoded d;
    d.M = Eigen::Map<const Mat>(x.data(), n, n);
    const double fn = d.M.norm();
    if (fn > 0) d.M /= fn;
    if (!searched_translations) {
      d.u = Vec::Zero(n);
      d.v = Vec::Zero(n);
    } else {
      d.u = clamp_box(x.segment(nm, n), u0, 2.0 * rk);
      d.v = clamp_box(x.segment(nm + n, n), v0, 2.0 * rl);
    }
    return d;
  };

  constexpr double kPenalty = 1e6;
  auto objective = [&](const Vec& x) -> double {
    const Decoded d = decode(x);
    Eigen::FullPivLU<Mat> lu(d.M);
    if (!lu.isInvertible() || std::abs(lu.determinant()) < 1e-12) return kPenalty;
    const Mat Minv = lu.inverse();
    if (lp_translations) {
      const auto fit = detail::translation_lp(*pk, *pl, d.M, Minv);
      return fit ? fit->rho : kPenalty;
    }
    if (pk && pl) {
      const double s = detail::poly_scale(pl->normals, pl->offsets, Minv * pk->vertices, Minv * d.u, d.v);
      const double t = detail::poly_scale(pk->normals * d.M, pk->offsets, pl->vertices, d.v, Minv * d.u);
      if (!std::isfinite(s) || !std::isfinite(t)) return kPenalty;
      return s * t;
    }
    try {
      return position_ratio(K, L, LinearMap(d.M, d.v), d.u, cfg.sampling);
    } catch (const Error&) {
      return kPenalty;
    }
  };

  struct RestartResult {
    double value = kInf;
    Vec x;
  };
  std::vector<RestartResult> results(static_cast<std::size_t>(cfg.restarts));
  parallel_for(
      static_cast<std::size_t>(cfg.restarts),
      [&](std::size_t i) {
        const int r = static_cast<int>(i);
        std::mt19937_64 rng(cfg.seed + i);
        Vec x0(nvars);
        Mat M0 = detail::restart_matrix(n, r, rng);
        M0 /= M0.norm();
        x0.head(nm) = Eigen::Map<const Vec>(M0.data(), nm);
        Vec step = Vec::Constant(nvars, 0.15 / std::sqrt(static_cast<double>(n)));
        if (searched_translations) {
          std::uniform_real_distribution<double> jitter(-0.25, 0.25);
          Vec u = u0, v = v0;
          if (r > 0) {
            for (int k = 0; k < n; ++k) {
              u[k] += jitter(rng) * rk;
              v[k] += jitter(rng) * rl;
            }
          }
          x0.segment(nm, n) = u;
          x0.segment(nm + n, n) = v;
          step.segment(nm, n).setConstant(0.1 * rk);
          step.segment(nm + n, n).setConstant(0.1 * rl);
        }
        NelderMeadOptions nmo;
        nmo.max_iters = cfg.max_iters;
        nmo.ftol = cfg.tol;
        nmo.xtol = cfg.tol * 1e-2;
        nmo.step = step;
        auto res = nelder_mead(objective, x0, nmo);
        results[i] = {res.value, res.x};
      },
      cfg.threads);

  int best = 0;
  for (int i = 1; i < cfg.restarts; ++i)
    if (results[static_cast<std::size_t>(i)].value < results[static_cast<std::size_t>(best)].value) best = i;
  const auto& win = results[static_cast<std::size_t>(best)];
  if (!(win.value < kPenalty)) fail(ErrorCode::Internal, "no restart produced a valid position");

  const Decoded d = decode(win.x);
  DistanceEstimate out;
  out.restarts_used = cfg.restarts;
  out.best_restart = best;
  out.best_restart_seed = cfg.seed + static_cast<std::uint64_t>(best);
  if (lp_translations) {
    // The homothety centre from the LP may lie on the boundary of K, so the
    // residual is measured as an absolute facet violation instead of a gauge.
    const auto fit = detail::translation_lp(*pk, *pl, d.M, d.M.inverse());
    if (!fit) fail(ErrorCode::Internal, "translation LP failed at the best position");
    out.shift = fit->u;
    out.witness = LinearMap(fit->lambda * d.M, fit->v);
    out.upper = std::max(1.0, fit->rho);
    const Mat Ku = pk->vertices.colwise() + fit->u;
    const Mat W = out.witness.matrix() * (pl->vertices.colwise() + fit->v);
    const Mat pulled = (out.witness.inverse() * Ku).colwise() - fit->v;
    const double v1 = ((pl->normals * pulled).colwise() - pl->offsets).maxCoeff() / std::max(1.0, scale_of(pl->vertices));
    const Mat shrunk = (W / out.upper).colwise() - fit->u;
    const double v2 = ((pk->normals * shrunk).colwise() - pk->offsets).maxCoeff() / std::max(1.0, scale_of(pk->vertices));
    out.residual = std::max({0.0, v1, v2});
    return out;
  }
  // Rescale M so that K + u is contained in M (L + v) with unit scale.
  LinearMap raw(d.M, d.v);
  out.shift = d.u;
  double s = 0.0, t = 0.0;
  if (pk && pl) {
    s = detail::poly_scale(pl->normals, pl->offsets, raw.inverse() * pk->vertices, raw.inverse() * d.u, d.v);
    t = detail::poly_scale(pk->normals * d.M, pk->offsets, pl->vertices, d.v, raw.inverse() * d.u);
  } else {
    const BodyExpr Ku = d.u.isZero(0.0) ? K : BodyExpr::translate(d.u, K);
    const BodyExpr TL = apply_map(raw, L);
    s = inclusion_scale(Ku, TL, cfg.sampling);
    t = inclusion_scale(TL, Ku, cfg.sampling);
  }
  out.witness = LinearMap(s * d.M, d.v);
  out.upper = std::max(1.0, s * t);
  // Residual of the chain K + u in W in upper (K + u) at the rescaled witness.
  const BodyExpr Ku = d.u.isZero(0.0) ? K : BodyExpr::translate(d.u, K);
  const BodyExpr W = apply_map(out.witness, L);
  const double s1 = inclusion_scale(Ku, W, cfg.sampling);
  const double t1 = inclusion_scale(W, Ku, cfg.sampling);
  out.residual = std::max({0.0, s1 - 1.0, t1 / out.upper - 1.0});
  return out;
}

}  // namespace bm
