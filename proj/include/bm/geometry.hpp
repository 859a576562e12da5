#pragma once

// Operations on BodyExpr values: inclusion scales, linear images, projections,
// polars and radial extremes.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "bm/body.hpp"

namespace bm {

struct SamplingOptions {
  /// Allow direction-grid evaluation for bodies without a vertex list.
  bool allow_sampling = true;
  int grid_2d = 2048;
  int grid_3d = 4096;
  int grid_nd = 8192;
  /// Directions refined by local search after the grid pass.
  int refine_top = 8;
  std::uint64_t seed = 0;
};

/// Unit directions: uniform angles (n = 2), a Fibonacci sphere (n = 3), or
/// coordinate and diagonal axes topped up with seeded Gaussian samples.
inline Mat direction_grid(int n, const SamplingOptions& opt = {}) {
  if (n == 1) {
    Mat out(1, 2);
    out << 1.0, -1.0;
    return out;
  }
  if (n == 2) {
    Mat out(2, opt.grid_2d);
    for (int k = 0; k < opt.grid_2d; ++k) {
      const double a = 2.0 * M_PI * k / opt.grid_2d;
      out(0, k) = std::cos(a);
      out(1, k) = std::sin(a);
    }
    return out;
  }
  if (n == 3) {
    const int m = opt.grid_3d;
    Mat out(3, m);
    const double golden = M_PI * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < m; ++k) {
      const double z = 1.0 - (2.0 * k + 1.0) / m;
      const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
      out(0, k) = rho * std::cos(golden * k);
      out(1, k) = rho * std::sin(golden * k);
      out(2, k) = z;
    }
    return out;
  }
  std::vector<Vec> dirs;
  for (int i = 0; i < n; ++i) {
    for (double s : {1.0, -1.0}) dirs.push_back(s * Vec::Unit(n, i));
    for (int j = i + 1; j < n; ++j) {
      for (double s : {1.0, -1.0}) {
        for (double t : {1.0, -1.0}) {
          Vec d = Vec::Zero(n);
          d[i] = s;
          d[j] = t;
          dirs.push_back(d / std::sqrt(2.0));
        }
      }
    }
  }
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> g;
  while (static_cast<int>(dirs.size()) < opt.grid_nd) {
    Vec d(n);
    for (int k = 0; k < n; ++k) d[k] = g(rng);
    if (d.norm() > 1e-12) dirs.push_back(d.normalized());
  }
  Mat out(n, static_cast<Eigen::Index>(dirs.size()));
  for (std::size_t k = 0; k < dirs.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = dirs[k];
  return out;
}

namespace detail {

inline double golden_max(const std::function<double(double)>& f, double lo, double hi, int iters = 60) {
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < iters && b - a > 1e-13; ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = f(d);
    }
  }
  return fc >= fd ? c : d;
}

/// Local maximization of f over the unit sphere from u: repeated golden-section
/// searches along great circles through the current point.
inline Vec refine_on_sphere(const std::function<double(const Vec&)>& f, Vec u, double width, int sweeps = 6) {
  const int n = static_cast<int>(u.size());
  double best = f(u);
  for (int s = 0; s < sweeps; ++s) {
    // Orthonormal tangent frame at u.
    Mat frame = Mat::Identity(n, n);
    frame.col(0) = u;
    Eigen::HouseholderQR<Mat> qr(frame);
    Mat q = qr.householderQ();
    for (int k = 1; k < n; ++k) {
      const Vec w = q.col(k);
      auto along = [&](double t) { return f(std::cos(t) * u + std::sin(t) * w); };
      const double t = golden_max(along, -width, width);
      const Vec cand = (std::cos(t) * u + std::sin(t) * w).normalized();
      const double val = f(cand);
      if (val > best) {
        best = val;
        u = cand;
      }
    }
    width *= 0.3;
  }
  return u;
}

/// max over unit u of f(u): grid pass, then refinement of the best few.
inline std::pair<double, Vec> sphere_max(const std::function<double(const Vec&)>& f, int n, const SamplingOptions& opt) {
  const Mat grid = direction_grid(n, opt);
  std::vector<std::pair<double, int>> vals;
  vals.reserve(static_cast<std::size_t>(grid.cols()));
  for (int k = 0; k < grid.cols(); ++k) vals.emplace_back(f(grid.col(k)), k);
  const int top = std::min<int>(opt.refine_top, static_cast<int>(vals.size()));
  std::partial_sort(vals.begin(), vals.begin() + top, vals.end(),
                    [](const auto& a, const auto& b) { return a.first > b.first || (a.first == b.first && a.second < b.second); });
  double best = vals[0].first;
  Vec arg = grid.col(vals[0].second);
  if (n == 1) return {best, arg};
  const double width = n == 2 ? 2.0 * M_PI / opt.grid_2d : (n == 3 ? 3.6 / std::sqrt(static_cast<double>(opt.grid_3d)) : 0.5);
  for (int i = 0; i < top; ++i) {
    const Vec u = refine_on_sphere(f, grid.col(vals[static_cast<std::size_t>(i)].second), width);
    const double v = f(u);
    if (v > best) {
      best = v;
      arg = u;
    }
  }
  return {best, arg};
}

}  // namespace detail

/// Minimal rho with K subset of rho * L.
inline double inclusion_scale(const BodyExpr& K, const BodyExpr& L, const SamplingOptions& opt = {}) {
  if (K.dim() != L.dim()) fail(ErrorCode::DimensionMismatch, "bodies live in different dimensions");
  if (!L.origin_interior()) fail(ErrorCode::OriginNotInterior, "outer body must contain the origin in its interior");
  if (auto pk = as_polytope(K)) {
    const auto& v = pk->polytope().vertices;
    const auto pl = L.is_polytope() ? std::optional<BodyExpr>(L) : as_polytope(L);
    if (pl && pl->polytope().facets) {
      const auto& f = *pl->polytope().facets;
      const Mat ratios = (f.normals * v).array().colwise() / f.offsets.array();
      return std::max(0.0, ratios.maxCoeff());
    }
    double rho = 0.0;
    for (int j = 0; j < v.cols(); ++j) rho = std::max(rho, gauge(L, v.col(j)));
    return rho;
  }
  if (auto pl = as_polytope(L); pl && pl->polytope().facets) {
    const auto& f = *pl->polytope().facets;
    double rho = 0.0;
    for (int k = 0; k < f.count(); ++k) rho = std::max(rho, support(K, f.normals.row(k).transpose()) / f.offsets[k]);
    return rho;
  }
  if (!opt.allow_sampling) fail(ErrorCode::NotVertexEnumerable, "inner body has no vertex list and sampling is disabled");
  // max_{x in K} gauge_L(x) = max_u h_K(u) / h_L(u).
  auto ratio = [&](const Vec& u) { return support(K, u) / support(L, u); };
  return std::max(0.0, detail::sphere_max(ratio, K.dim(), opt).first);
}

/// T(K) where T x = M (x + pre) + post. Polytope leaves are transformed in place.
inline BodyExpr apply_map(const LinearMap& T, const BodyExpr& K) {
  if (T.dim() != K.dim()) fail(ErrorCode::DimensionMismatch, "map size differs from body dimension");
  if (K.is_polytope()) {
    const Vec shift = T.matrix() * T.pre() + T.post();
    return detail::transform_polytope(K, T.matrix(), T.inverse(), shift);
  }
  BodyExpr body = K;
  if (!T.pre().isZero(0.0)) body = BodyExpr::translate(T.pre(), body);
  if (body.kind() == BodyExpr::Kind::LinearImage) {
    body = BodyExpr::linear_image(T.matrix() * body.linear_image().matrix, body.child());
  } else if (!T.matrix().isIdentity(0.0)) {
    body = BodyExpr::linear_image(T.matrix(), body);
  }
  if (!T.post().isZero(0.0)) body = BodyExpr::translate(T.post(), body);
  return body;
}

/// Image of a polytope-representable body under an idempotent matrix, pruned.
inline BodyExpr project(const Mat& P, const BodyExpr& K) {
  if (P.rows() != P.cols() || P.rows() != K.dim()) fail(ErrorCode::DimensionMismatch, "projection size differs from body dimension");
  const double err = (P * P - P).cwiseAbs().maxCoeff();
  if (!(err <= 1e-10)) fail(ErrorCode::NotIdempotent, "P*P differs from P by " + std::to_string(err));
  auto pk = as_polytope(K);
  if (!pk) fail(ErrorCode::NotVertexEnumerable, "projection needs a polytope-representable body");
  return BodyExpr::polytope(P * pk->polytope().vertices);
}

/// Polar body {y : <x, y> <= 1 for all x in K} of a polytope in dimension <= 3.
inline BodyExpr polar(const BodyExpr& K) {
  if (K.dim() > 3) fail(ErrorCode::DimensionTooHigh, "polar is supported up to dimension 3");
  auto pk = as_polytope(K);
  if (!pk) fail(ErrorCode::NotVertexEnumerable, "polar needs a polytope-representable body");
  if (!pk->origin_interior()) fail(ErrorCode::OriginNotInterior, "polar needs the origin in the interior");
  const auto& data = pk->polytope();
  Mat verts = *detail::polar_vertices_of(*pk);
  auto facets = detail::facets_from_polar_vertices(data.vertices);
  return BodyExpr::polytope_trusted(std::move(verts), std::move(facets));
}

/// True when the two vertex lists agree as sets within tol.
inline bool same_vertex_set(const Mat& a, const Mat& b, double tol = 1e-9) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  auto covered = [tol](const Mat& x, const Mat& y) {
    for (int j = 0; j < x.cols(); ++j) {
      bool hit = false;
      for (int k = 0; k < y.cols() && !hit; ++k) hit = (x.col(j) - y.col(k)).cwiseAbs().maxCoeff() <= tol;
      if (!hit) return false;
    }
    return true;
  };
  return covered(a, b) && covered(b, a);
}

struct RadialExtremes {
  double r = 0.0;
  double R = 0.0;
  Mat inner;  // boundary points at norm r, one per column
  Mat outer;  // boundary points at norm R
};

namespace detail {

inline Mat stack_columns(const std::vector<Vec>& cols, int n) {
  Mat out(n, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = cols[k];
  return out;
}

/// Greedy clustering: points within `radius` of a cluster seed are merged
/// into the cluster centroid.
inline Mat cluster_points(const Mat& pts, double radius) {
  std::vector<Vec> sums;
  std::vector<Vec> seeds;
  std::vector<int> counts;
  for (int j = 0; j < pts.cols(); ++j) {
    bool merged = false;
    for (std::size_t c = 0; c < seeds.size() && !merged; ++c) {
      if ((pts.col(j) - seeds[c]).norm() <= radius) {
        sums[c] += pts.col(j);
        ++counts[c];
        merged = true;
      }
    }
    if (!merged) {
      seeds.emplace_back(pts.col(j));
      sums.emplace_back(pts.col(j));
      counts.push_back(1);
    }
  }
  std::vector<Vec> out;
  for (std::size_t c = 0; c < sums.size(); ++c) out.push_back(sums[c] / counts[c]);
  return stack_columns(out, static_cast<int>(pts.rows()));
}

}  // namespace detail

/// Inradius and circumradius about the origin together with the boundary
/// points attaining them within relative tolerance `tol`.
inline RadialExtremes radial_extremes(const BodyExpr& K, double tol = 1e-7, const SamplingOptions& opt = {}) {
  if (!K.origin_interior()) fail(ErrorCode::OriginNotInterior, "radial extremes need the origin in the interior");
  const int n = K.dim();
  RadialExtremes out;
  auto pk = as_polytope(K);
  if (pk && pk->polytope().facets) {
    const auto& data = pk->polytope();
    const auto& f = *data.facets;
    Vec norms = data.vertices.colwise().norm();
    out.R = norms.maxCoeff();
    std::vector<Vec> outer, inner;
    for (int j = 0; j < norms.size(); ++j)
      if (norms[j] >= out.R * (1.0 - tol)) outer.emplace_back(data.vertices.col(j));
    // Normals are unit vectors, so the distance to facet k is offsets[k] and
    // the foot of the perpendicular is offsets[k] * normal_k. That foot lies
    // in the facet whenever the facet is nearest.
    out.r = f.offsets.minCoeff();
    for (int k = 0; k < f.count(); ++k)
      if (f.offsets[k] <= out.r * (1.0 + tol)) inner.emplace_back(f.offsets[k] * f.normals.row(k).transpose());
    out.outer = detail::stack_columns(outer, n);
    out.inner = detail::stack_columns(inner, n);
    return out;
  }
  if (!opt.allow_sampling) fail(ErrorCode::NotVertexEnumerable, "body has no vertex list and sampling is disabled");
  // Radial function 1 / gauge on the direction grid, then local refinement of
  // every grid point that is within tolerance of the extreme values.
  const Mat grid = direction_grid(n, opt);
  Vec radial(grid.cols());
  for (int k = 0; k < grid.cols(); ++k) radial[k] = 1.0 / gauge(K, grid.col(k));
  const double coarse_r = radial.minCoeff();
  const double coarse_R = radial.maxCoeff();
  auto rad = [&](const Vec& u) { return 1.0 / gauge(K, u); };
  auto neg_rad = [&](const Vec& u) { return -1.0 / gauge(K, u); };
  const double width = n == 2 ? 2.0 * M_PI / opt.grid_2d : 0.1;
  // A loose pre-filter keeps the number of refinements small.
  const double pre = std::max(1e-3, 10 * tol);
  std::vector<Vec> outer, inner;
  std::vector<double> outer_v, inner_v;
  for (int k = 0; k < grid.cols(); ++k) {
    if (radial[k] >= coarse_R * (1.0 - pre)) {
      Vec u = detail::refine_on_sphere(rad, grid.col(k), width, n == 2 ? 3 : 6);
      outer.push_back(u * rad(u));
      outer_v.push_back(rad(u));
    }
    if (radial[k] <= coarse_r * (1.0 + pre)) {
      Vec u = detail::refine_on_sphere(neg_rad, grid.col(k), width, n == 2 ? 3 : 6);
      inner.push_back(u * rad(u));
      inner_v.push_back(rad(u));
    }
  }
  out.R = *std::max_element(outer_v.begin(), outer_v.end());
  out.r = *std::min_element(inner_v.begin(), inner_v.end());
  std::vector<Vec> keep_outer, keep_inner;
  for (std::size_t i = 0; i < outer.size(); ++i)
    if (outer_v[i] >= out.R * (1.0 - tol)) keep_outer.push_back(outer[i]);
  for (std::size_t i = 0; i < inner.size(); ++i)
    if (inner_v[i] <= out.r * (1.0 + tol)) keep_inner.push_back(inner[i]);
  const double cluster = 1e-6 * std::max(1.0, out.R);
  out.outer = detail::cluster_points(detail::stack_columns(keep_outer, n), cluster);
  out.inner = detail::cluster_points(detail::stack_columns(keep_inner, n), cluster);
  return out;
}

}  // namespace bm
