#pragma once

// Random planar bodies for the theorem suites.

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <random>

#include "bm/body.hpp"

namespace bm {

/// 0-symmetric polygon: k in {3, 4, 5} directions in [0, pi) with radii in
/// [0.5, 1], their negations, and the convex hull of all 2k points.
inline BodyExpr random_symmetric_polygon(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> angle(0.0, std::numbers::pi);
  std::uniform_real_distribution<double> radius(0.5, 1.0);
  for (;;) {
    const int k = 3 + static_cast<int>(rng() % 3);
    Mat pts(2, 2 * k);
    for (int j = 0; j < k; ++j) {
      const double a = angle(rng), r = radius(rng);
      pts.col(j) << r * std::cos(a), r * std::sin(a);
      pts.col(k + j) = -pts.col(j);
    }
    if (affine_span(pts).rank < 2) continue;
    return BodyExpr::polytope(pts);
  }
}

/// Polygon with 3 to 7 vertices at random angles and radii in [0.5, 1]
/// around the origin; redrawn until the origin is interior.
inline BodyExpr random_planar_polygon(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> radius(0.5, 1.0);
  for (;;) {
    const int k = 3 + static_cast<int>(rng() % 5);
    Mat pts(2, k);
    for (int j = 0; j < k; ++j) {
      const double a = angle(rng), r = radius(rng);
      pts.col(j) << r * std::cos(a), r * std::sin(a);
    }
    if (affine_span(pts).rank < 2) continue;
    BodyExpr body = BodyExpr::polytope(pts);
    if (body.origin_interior()) return body;
  }
}

}  // namespace bm
