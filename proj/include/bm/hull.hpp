#pragma once

// Point-set primitives behind the polytope leaf: affine spans, LP-based
// redundancy pruning and membership, and facet enumeration.
//
// Point sets are stored column-wise (dim x count).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "bm/errors.hpp"
#include "bm/lp.hpp"

namespace bm {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Halfspace description {x : normals.row(k) . x <= offsets[k]} with unit rows.
struct Facets {
  Mat normals;  // count x dim
  Vec offsets;  // count

  int count() const { return static_cast<int>(normals.rows()); }
};

struct AffineSpan {
  Vec origin;
  Mat basis;  // dim x rank, orthonormal columns
  int rank = 0;
};

inline double scale_of(const Mat& points) {
  double s = 0.0;
  for (int j = 0; j < points.cols(); ++j) s = std::max(s, points.col(j).norm());
  return std::max(s, 1e-300);
}

inline AffineSpan affine_span(const Mat& points, double rel_tol = 1e-9) {
  AffineSpan span;
  const int n = static_cast<int>(points.rows());
  span.origin = points.rowwise().mean();
  if (points.cols() <= 1) {
    span.basis = Mat(n, 0);
    return span;
  }
  Mat centered = points.colwise() - span.origin;
  Eigen::JacobiSVD<Mat> svd(centered, Eigen::ComputeFullU);
  const auto& sv = svd.singularValues();
  const double cutoff = rel_tol * std::max(scale_of(points), 1.0) * std::sqrt(static_cast<double>(points.cols()));
  int rank = 0;
  for (int k = 0; k < sv.size(); ++k)
    if (sv[k] > cutoff) ++rank;
  span.rank = rank;
  span.basis = svd.matrixU().leftCols(rank);
  return span;
}

/// l1 distance from x to conv(columns of `points` except `skip`), via LP.
inline double hull_distance(const Mat& points, const Vec& x, int skip = -1) {
  const int n = static_cast<int>(points.rows());
  const int m = static_cast<int>(points.cols());
  std::vector<int> cols;
  for (int j = 0; j < m; ++j)
    if (j != skip) cols.push_back(j);
  const int k = static_cast<int>(cols.size());
  if (k == 0) return (x).lpNorm<1>();
  const int vars = k + 2 * n;
  lp::Problem prob(vars);
  for (int i = 0; i < 2 * n; ++i) prob.objective[k + i] = 1.0;
  for (int r = 0; r < n; ++r) {
    Vec row = Vec::Zero(vars);
    for (int j = 0; j < k; ++j) row[j] = points(r, cols[static_cast<std::size_t>(j)]);
    row[k + r] = 1.0;
    row[k + n + r] = -1.0;
    prob.add_row(std::move(row), lp::Relation::Equal, x[r]);
  }
  Vec ones = Vec::Zero(vars);
  ones.head(k).setOnes();
  prob.add_row(std::move(ones), lp::Relation::Equal, 1.0);
  const auto res = lp::solve(prob);
  if (res.status != lp::Status::Optimal) fail(ErrorCode::Internal, "hull distance LP did not converge");
  return std::max(res.value, 0.0);
}

inline bool in_hull(const Mat& points, const Vec& x, double tol = 1e-9) {
  return hull_distance(points, x) <= tol * std::max(1.0, scale_of(points));
}

/// Removes near-duplicate columns (within tol), keeping first occurrences.
inline Mat dedupe_points(const Mat& points, double tol = 1e-12) {
  std::vector<int> keep;
  const double t = tol * std::max(1.0, scale_of(points));
  for (int j = 0; j < points.cols(); ++j) {
    bool dup = false;
    for (int k : keep) {
      if ((points.col(j) - points.col(k)).norm() <= t) {
        dup = true;
        break;
      }
    }
    if (!dup) keep.push_back(j);
  }
  Mat out(points.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t i = 0; i < keep.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = points.col(keep[i]);
  return out;
}

/// Drops every point lying within `tol` (scaled) of the hull of the others.
/// Points are removed one at a time so that mutually redundant duplicates
/// leave a single representative.
inline Mat prune_redundant(const Mat& input, double tol = 1e-9) {
  Mat points = dedupe_points(input);
  const double t = tol * std::max(1.0, scale_of(points));
  int j = 0;
  while (j < points.cols() && points.cols() > 1) {
    if (hull_distance(points, points.col(j), j) <= t) {
      Mat next(points.rows(), points.cols() - 1);
      next << points.leftCols(j), points.rightCols(points.cols() - j - 1);
      points = std::move(next);
    } else {
      ++j;
    }
  }
  return points;
}

namespace detail {

inline void push_facet(std::vector<std::pair<Vec, double>>& out, Vec normal, double offset, double tol) {
  const double len = normal.norm();
  normal /= len;
  offset /= len;
  for (const auto& [nrm, off] : out) {
    if ((nrm - normal).norm() <= tol && std::abs(off - offset) <= tol * std::max(1.0, std::abs(off))) return;
  }
  out.emplace_back(std::move(normal), offset);
}

inline Facets pack(const std::vector<std::pair<Vec, double>>& planes, int dim) {
  Facets f;
  f.normals.resize(static_cast<Eigen::Index>(planes.size()), dim);
  f.offsets.resize(static_cast<Eigen::Index>(planes.size()));
  for (std::size_t i = 0; i < planes.size(); ++i) {
    f.normals.row(static_cast<Eigen::Index>(i)) = planes[i].first.transpose();
    f.offsets[static_cast<Eigen::Index>(i)] = planes[i].second;
  }
  return f;
}

inline Facets facets_1d(const Mat& pts) {
  std::vector<std::pair<Vec, double>> planes;
  Vec up(1), down(1);
  up << 1.0;
  down << -1.0;
  planes.emplace_back(up, pts.row(0).maxCoeff());
  planes.emplace_back(down, -pts.row(0).minCoeff());
  return pack(planes, 1);
}

// Angular sort of the (irredundant) vertices around their centroid; each
// consecutive pair spans one edge.
inline Facets facets_2d(const Mat& pts) {
  const Eigen::Vector2d c = pts.rowwise().mean();
  std::vector<int> order(static_cast<std::size_t>(pts.cols()));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return std::atan2(pts(1, a) - c[1], pts(0, a) - c[0]) < std::atan2(pts(1, b) - c[1], pts(0, b) - c[0]);
  });
  std::vector<std::pair<Vec, double>> planes;
  const double tol = 1e-9;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const Eigen::Vector2d a = pts.col(order[i]);
    const Eigen::Vector2d b = pts.col(order[(i + 1) % order.size()]);
    Vec normal(2);
    normal << (b - a)[1], -(b - a)[0];
    if (normal.norm() <= 1e-300) continue;
    push_facet(planes, normal, normal.dot(Vec(a)), tol);
  }
  return pack(planes, 2);
}

struct Tri {
  int a, b, c;
  Eigen::Vector3d normal;
  double offset;
  bool alive = true;
};

inline bool outside_triangle(const Eigen::Vector3d& p, const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                             const Eigen::Vector3d& c, const Eigen::Vector3d& n, double eps) {
  // p assumed (nearly) in the plane; outside if beyond any edge.
  const Eigen::Vector3d v[3] = {a, b, c};
  for (int k = 0; k < 3; ++k) {
    const Eigen::Vector3d& s = v[k];
    const Eigen::Vector3d& e = v[(k + 1) % 3];
    if ((e - s).cross(p - s).dot(n) < -eps) return true;
  }
  return false;
}

// Incremental convex hull in R^3. Coplanar triangles are merged into one
// facet plane at the end.
inline Facets facets_3d(const Mat& pts) {
  const int m = static_cast<int>(pts.cols());
  const double scale = std::max(1.0, scale_of(pts));
  const double eps = 1e-10 * scale;
  auto P = [&](int i) -> Eigen::Vector3d { return pts.col(i); };

  int i0 = 0, i1 = -1, i2 = -1, i3 = -1;
  double best = -1;
  for (int i = 0; i < m; ++i) {
    const double d = (P(i) - P(i0)).norm();
    if (d > best) best = d, i1 = i;
  }
  best = -1;
  for (int i = 0; i < m; ++i) {
    const double d = (P(i) - P(i0)).cross(P(i1) - P(i0)).norm();
    if (d > best) best = d, i2 = i;
  }
  const Eigen::Vector3d n012 = (P(i1) - P(i0)).cross(P(i2) - P(i0));
  best = -1;
  for (int i = 0; i < m; ++i) {
    const double d = std::abs(n012.dot(P(i) - P(i0)));
    if (d > best) best = d, i3 = i;
  }
  if (best <= eps * n012.norm() || n012.norm() <= eps * eps) fail(ErrorCode::InvalidBody, "3D hull of a flat point set");

  const Eigen::Vector3d interior = (P(i0) + P(i1) + P(i2) + P(i3)) / 4.0;
  std::vector<Tri> tris;
  auto make = [&](int a, int b, int c) {
    Eigen::Vector3d n = (P(b) - P(a)).cross(P(c) - P(a));
    if (n.dot(interior - P(a)) > 0) {
      std::swap(b, c);
      n = -n;
    }
    const double len = n.norm();
    Tri t{a, b, c, n / len, (n / len).dot(P(a))};
    tris.push_back(t);
  };
  make(i0, i1, i2);
  make(i0, i1, i3);
  make(i0, i2, i3);
  make(i1, i2, i3);

  for (int p = 0; p < m; ++p) {
    if (p == i0 || p == i1 || p == i2 || p == i3) continue;
    const Eigen::Vector3d q = P(p);
    std::vector<std::size_t> visible;
    bool strictly = false;
    for (std::size_t k = 0; k < tris.size(); ++k) {
      const Tri& t = tris[k];
      if (!t.alive) continue;
      const double d = t.normal.dot(q) - t.offset;
      if (d > eps) {
        visible.push_back(k);
        strictly = true;
      } else if (d >= -eps && outside_triangle(q, P(t.a), P(t.b), P(t.c), t.normal, eps * scale)) {
        visible.push_back(k);
      }
    }
    if (!strictly) continue;
    std::set<std::pair<int, int>> edges;
    for (std::size_t k : visible) {
      const Tri& t = tris[k];
      edges.insert({t.a, t.b});
      edges.insert({t.b, t.c});
      edges.insert({t.c, t.a});
    }
    for (std::size_t k : visible) tris[k].alive = false;
    for (const auto& [a, b] : edges) {
      if (edges.count({b, a})) continue;
      Eigen::Vector3d n = (P(b) - P(a)).cross(q - P(a));
      const double len = n.norm();
      if (len <= 1e-14 * scale * scale) continue;
      // Horizon edges are oriented consistently with the removed faces, so
      // (a, b, p) is already outward.
      tris.push_back(Tri{a, b, p, n / len, (n / len).dot(P(a))});
    }
  }

  std::vector<std::pair<Vec, double>> planes;
  for (const Tri& t : tris) {
    if (!t.alive) continue;
    push_facet(planes, Vec(t.normal), t.offset, 1e-8);
  }
  return pack(planes, 3);
}

inline double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Brute force over affinely independent d-subsets; usable for the small
// vertex counts that occur in dimensions 4-6.
inline std::optional<Facets> facets_nd(const Mat& pts, double budget) {
  const int d = static_cast<int>(pts.rows());
  const int m = static_cast<int>(pts.cols());
  if (binomial(m, d) > budget) return std::nullopt;
  const double scale = std::max(1.0, scale_of(pts));
  const double eps = 1e-9 * scale;
  std::vector<std::pair<Vec, double>> planes;
  std::vector<int> idx(static_cast<std::size_t>(d));
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    Mat diffs(d - 1, d);
    for (int k = 1; k < d; ++k) diffs.row(k - 1) = (pts.col(idx[static_cast<std::size_t>(k)]) - pts.col(idx[0])).transpose();
    Eigen::FullPivLU<Mat> lu(diffs);
    lu.setThreshold(1e-10);
    if (lu.rank() == d - 1) {
      Mat kernel = lu.kernel();
      Vec normal = kernel.col(0).normalized();
      const double off = normal.dot(pts.col(idx[0]));
      const Vec proj = pts.transpose() * normal;
      const double hi = proj.maxCoeff() - off;
      const double lo = proj.minCoeff() - off;
      if (hi <= eps) push_facet(planes, normal, off, 1e-8);
      else if (lo >= -eps) push_facet(planes, -normal, -off, 1e-8);
    }
    int k = d - 1;
    while (k >= 0 && idx[static_cast<std::size_t>(k)] == m - d + k) --k;
    if (k < 0) break;
    ++idx[static_cast<std::size_t>(k)];
    for (int j = k + 1; j < d; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
  return pack(planes, d);
}

}  // namespace detail

/// Facet planes of a full-dimensional polytope given by irredundant vertices.
/// Returns nullopt when the vertex count makes enumeration too expensive
/// (dimension >= 4 only).
inline std::optional<Facets> compute_facets(const Mat& vertices, double budget = 3e6) {
  switch (vertices.rows()) {
    case 1: return detail::facets_1d(vertices);
    case 2: return detail::facets_2d(vertices);
    case 3: return detail::facets_3d(vertices);
    default: return detail::facets_nd(vertices, budget);
  }
}

}  // namespace bm
