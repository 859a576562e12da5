#pragma once

// Deterministic SVG overlays of planar bodies. Coordinates are printed with 9
// significant digits so identical input gives byte-identical files.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "bm/body.hpp"
#include "bm/geometry.hpp"

namespace bm {

inline constexpr int kSvgBoundarySamples = 256;

namespace detail {

inline std::string sig9(double x) {
  if (std::abs(x) < 1e-300) x = 0.0;  // no "-0"
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

/// Boundary polygon of a planar body in counter-clockwise order.
inline Mat planar_outline(const BodyExpr& body) {
  if (body.dim() != 2) fail(ErrorCode::NotPlanar, "only planar bodies can be rendered (got dimension " + std::to_string(body.dim()) + ")");
  Mat pts;
  if (auto p = as_polytope(body)) {
    pts = p->polytope().vertices;
  } else {
    pts.resize(2, kSvgBoundarySamples);
    for (int k = 0; k < kSvgBoundarySamples; ++k) {
      const double a = 2.0 * std::numbers::pi * k / kSvgBoundarySamples;
      Vec u(2);
      u << std::cos(a), std::sin(a);
      pts.col(k) = u / gauge(body, u);
    }
  }
  const Vec c = pts.rowwise().mean();
  std::vector<int> order(static_cast<std::size_t>(pts.cols()));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return std::atan2(pts(1, a) - c[1], pts(0, a) - c[0]) < std::atan2(pts(1, b) - c[1], pts(0, b) - c[0]);
  });
  Mat out(2, pts.cols());
  for (std::size_t i = 0; i < order.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = pts.col(order[i]);
  return out;
}

}  // namespace detail

/// Overlay of planar bodies; stroke styles cycle solid, dashed, dotted.
/// Bodies without a vertex description are drawn from 256 boundary samples.
inline std::string render_svg(const std::vector<BodyExpr>& bodies) {
  if (bodies.empty()) fail(ErrorCode::InvalidBody, "render needs at least one body");
  std::vector<Mat> outlines;
  for (const auto& b : bodies) outlines.push_back(detail::planar_outline(b));
  double x0 = kInf, y0 = kInf, x1 = -kInf, y1 = -kInf;
  for (const auto& o : outlines) {
    x0 = std::min(x0, o.row(0).minCoeff());
    x1 = std::max(x1, o.row(0).maxCoeff());
    y0 = std::min(y0, o.row(1).minCoeff());
    y1 = std::max(y1, o.row(1).maxCoeff());
  }
  const double span = std::max({x1 - x0, y1 - y0, 1e-9});
  const double margin = 0.05 * span;
  x0 -= margin;
  y0 -= margin;
  const double w = x1 - x0 + margin, h = y1 - y0 + margin;
  const double stroke = span / 200.0;
  const double dot = span / 120.0;
  using detail::sig9;

  // Dash pattern in stroke widths; {0, 0} is solid.
  static constexpr std::array<std::array<double, 2>, 3> kDash{{{0, 0}, {4, 2}, {1, 2}}};
  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" + sig9(x0) + " " + sig9(-(y0 + h)) + " " + sig9(w) + " " + sig9(h) +
       "\">\n";
  for (std::size_t i = 0; i < outlines.size(); ++i) {
    const Mat& o = outlines[i];
    // SVG y grows downward; negate to keep the usual orientation.
    std::string d;
    for (Eigen::Index k = 0; k < o.cols(); ++k) d += (k == 0 ? "M " : " L ") + sig9(o(0, k)) + " " + sig9(-o(1, k));
    d += " Z";
    s += "  <path d=\"" + d + "\" fill=\"none\" stroke=\"black\" stroke-width=\"" + sig9(stroke) + "\"";
    const auto& dash = kDash[i % kDash.size()];
    if (dash[0] > 0) s += " stroke-dasharray=\"" + sig9(dash[0] * stroke) + " " + sig9(dash[1] * stroke) + "\"";
    s += "/>\n";
    if (bodies[i].is_polytope() || as_polytope(bodies[i]))
      for (Eigen::Index k = 0; k < o.cols(); ++k)
        s += "  <circle cx=\"" + sig9(o(0, k)) + "\" cy=\"" + sig9(-o(1, k)) + "\" r=\"" + sig9(dot) + "\"/>\n";
  }
  s += "</svg>\n";
  return s;
}

}  // namespace bm
