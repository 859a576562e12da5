#pragma once

// Builders for the body families used throughout: l_p-sums, cones, double
// cones, Hanner polytopes and a few standard bodies.

#include <Eigen/Dense>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <set>
#include <optional>
#include <bit>
#include <string>
#include <string_view>
#include <vector>

#include "bm/body.hpp"
#include "bm/geometry.hpp"

namespace bm {

/// l_p-sum of bodies. For p in {1, inf} with polytope-representable summands
/// the result is folded into a single polytope leaf.
inline BodyExpr lp_sum(const std::vector<BodyExpr>& bodies, double p) {
  if (std::isnan(p) || p < 1.0) fail(ErrorCode::InvalidP, "l_p-sum exponent must lie in [1, inf]");
  if (bodies.empty()) fail(ErrorCode::InvalidBody, "l_p-sum needs at least one summand");
  for (const auto& b : bodies)
    if (!b.origin_interior()) fail(ErrorCode::OriginNotInterior, "l_p-sum summands must contain the origin in their interior");
  if (p == 1.0 || std::isinf(p)) {
    std::vector<BodyExpr> parts;
    for (const auto& b : bodies) {
      auto pb = as_polytope(b);
      if (!pb) break;
      parts.push_back(*pb);
    }
    if (parts.size() == bodies.size()) return detail::polytope_lp_sum(parts, p == 1.0);
  }
  return BodyExpr::lp_sum_node(p, bodies);
}

/// Polytope leaf with the vertices of a polytope-representable body padded by
/// zero coordinates up to dimension n.
inline BodyExpr embed(const BodyExpr& body, int n) {
  if (body.dim() > n) fail(ErrorCode::DimensionMismatch, "cannot embed a body into a smaller dimension");
  auto pb = as_polytope(body);
  if (!pb) fail(ErrorCode::NotVertexEnumerable, "embedding needs a polytope-representable body");
  if (body.dim() == n) return *pb;
  Mat v = Mat::Zero(n, pb->polytope().vertices.cols());
  v.topRows(body.dim()) = pb->polytope().vertices;
  return BodyExpr::polytope_trusted(std::move(v), std::nullopt);
}

namespace detail {

inline BodyExpr cone_hull(const BodyExpr& base, const std::vector<Vec>& apexes, bool with_negations) {
  if (apexes.empty()) fail(ErrorCode::DegenerateCone, "a cone needs at least one apex");
  const int n = static_cast<int>(apexes.front().size());
  for (const auto& a : apexes)
    if (a.size() != n) fail(ErrorCode::DimensionMismatch, "apexes have different lengths");
  const BodyExpr b = embed(base, n);
  const Mat& bv = b.polytope().vertices;
  const int extra = static_cast<int>(apexes.size()) * (with_negations ? 2 : 1);
  Mat pts(n, bv.cols() + extra);
  pts.leftCols(bv.cols()) = bv;
  int col = static_cast<int>(bv.cols());
  for (const auto& a : apexes) {
    pts.col(col++) = a;
    if (with_negations) pts.col(col++) = -a;
  }
  if (affine_span(pts).rank < n) fail(ErrorCode::DegenerateCone, "cone is not full-dimensional");
  return BodyExpr::polytope(pts);
}

}  // namespace detail

/// conv(B u {apexes}); B is zero-padded when it lives in fewer coordinates.
inline BodyExpr cone(const BodyExpr& base, const std::vector<Vec>& apexes) {
  return detail::cone_hull(base, apexes, false);
}

/// conv(B u {+-apexes}) over a 0-symmetric base.
inline BodyExpr double_cone(const BodyExpr& base, const std::vector<Vec>& apexes) {
  auto pb = as_polytope(base);
  if (!pb) fail(ErrorCode::NotVertexEnumerable, "double cone needs a polytope base");
  if (!pb->symmetric()) fail(ErrorCode::NotSymmetricBase, "double cone base must be 0-symmetric");
  return detail::cone_hull(*pb, apexes, true);
}

// ---------------------------------------------------------------------------
// Hanner polytopes

struct HannerSpec {
  enum class Op { Segment, L1, Linf };
  Op op = Op::Segment;
  std::vector<HannerSpec> children;

  int dim() const {
    if (op == Op::Segment) return 1;
    int n = 0;
    for (const auto& c : children) n += c.dim();
    return n;
  }
};

namespace detail {

class HannerParser {
 public:
  explicit HannerParser(std::string_view text) : s_(text) {}

  HannerSpec parse() {
    HannerSpec out = node();
    skip();
    if (pos_ != s_.size()) error("unexpected trailing input");
    return out;
  }

 private:
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  [[noreturn]] void error(const std::string& what) const {
    fail(ErrorCode::MalformedSpec, what + " at offset " + std::to_string(pos_) + " in \"" + std::string(s_) + "\"");
  }
  std::string word() {
    skip();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    return std::string(s_.substr(start, pos_ - start));
  }
  HannerSpec node() {
    const std::string w = word();
    HannerSpec out;
    if (w == "seg") return out;
    if (w == "l1") out.op = HannerSpec::Op::L1;
    else if (w == "linf") out.op = HannerSpec::Op::Linf;
    else error(w.empty() ? "expected seg, l1 or linf" : "unknown node '" + w + "'");
    skip();
    if (pos_ >= s_.size() || s_[pos_] != '(') error("expected '('");
    ++pos_;
    while (true) {
      out.children.push_back(node());
      skip();
      if (pos_ < s_.size() && s_[pos_] == ',') {
        ++pos_;
        continue;
      }
      if (pos_ < s_.size() && s_[pos_] == ')') {
        ++pos_;
        break;
      }
      error("expected ',' or ')'");
    }
    return out;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Grammar: seg | l1(spec, ...) | linf(spec, ...).
inline HannerSpec parse_hanner(std::string_view text) { return detail::HannerParser(text).parse(); }

inline std::string to_string(const HannerSpec& spec) {
  if (spec.op == HannerSpec::Op::Segment) return "seg";
  std::string out = spec.op == HannerSpec::Op::L1 ? "l1(" : "linf(";
  for (std::size_t i = 0; i < spec.children.size(); ++i) {
    if (i) out += ",";
    out += to_string(spec.children[i]);
  }
  return out + ")";
}

inline BodyExpr segment() {
  Mat v(1, 2);
  v << 1.0, -1.0;
  return BodyExpr::polytope_trusted(std::move(v), std::nullopt);
}

/// Hanner polytope as the iterated sum of unit segments.
inline BodyExpr hanner(const HannerSpec& spec) {
  if (spec.op == HannerSpec::Op::Segment) return segment();
  if (spec.children.empty()) fail(ErrorCode::MalformedSpec, "sum node without children");
  std::vector<BodyExpr> parts;
  for (const auto& c : spec.children) parts.push_back(hanner(c));
  return lp_sum(parts, spec.op == HannerSpec::Op::L1 ? 1.0 : kInf);
}

struct PositionedBody {
  BodyExpr body;
  /// Euclidean ball of radius 1 inside, radius d outside.
  double d = 1.0;
};

/// Hanner polytope positioned with B_2 inside C inside sqrt(n) B_2, built
/// recursively: products keep the children as they are, l_1-sums rescale
/// child i by 1/d_i and the whole sum by the Euclidean norm of (d_i).
inline PositionedBody hanner_in_position(const HannerSpec& spec) {
  if (spec.op == HannerSpec::Op::Segment) return {segment(), 1.0};
  if (spec.children.empty()) fail(ErrorCode::MalformedSpec, "sum node without children");
  std::vector<BodyExpr> parts;
  Vec ds(static_cast<Eigen::Index>(spec.children.size()));
  for (std::size_t i = 0; i < spec.children.size(); ++i) {
    auto child = hanner_in_position(spec.children[i]);
    ds[static_cast<Eigen::Index>(i)] = child.d;
    if (spec.op == HannerSpec::Op::L1) {
      const int m = child.body.dim();
      child.body = apply_map(LinearMap(Mat::Identity(m, m) / child.d), child.body);
    }
    parts.push_back(child.body);
  }
  const double d = ds.norm();
  if (spec.op == HannerSpec::Op::Linf) return {lp_sum(parts, kInf), d};
  BodyExpr sum = lp_sum(parts, 1.0);
  const int n = sum.dim();
  return {apply_map(LinearMap(Mat::Identity(n, n) * d), sum), d};
}

/// All Hanner trees with n leaves whose internal nodes are binary.
inline std::vector<HannerSpec> enumerate_hanner_trees(int n) {
  if (n == 1) return {HannerSpec{}};
  std::vector<HannerSpec> out;
  for (int left = 1; left < n; ++left) {
    const auto ls = enumerate_hanner_trees(left);
    const auto rs = enumerate_hanner_trees(n - left);
    for (auto op : {HannerSpec::Op::L1, HannerSpec::Op::Linf}) {
      for (const auto& a : ls) {
        for (const auto& b : rs) out.push_back(HannerSpec{op, {a, b}});
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Standard bodies

namespace detail {

inline Mat cross_vertices(int n) {
  Mat v = Mat::Zero(n, 2 * n);
  for (int k = 0; k < n; ++k) {
    v(k, 2 * k) = 1.0;
    v(k, 2 * k + 1) = -1.0;
  }
  return v;
}

inline Mat cube_vertices(int n) {
  Mat v(n, 1 << n);
  for (int s = 0; s < (1 << n); ++s)
    for (int k = 0; k < n; ++k) v(k, s) = (s >> k) & 1 ? 1.0 : -1.0;
  return v;
}

}  // namespace detail

// The cube and the cross-polytope are polar to each other, which supplies
// the facets without enumeration.
inline BodyExpr cross_polytope(int n) {
  return BodyExpr::polytope_trusted(detail::cross_vertices(n), detail::facets_from_polar_vertices(detail::cube_vertices(n)));
}

inline BodyExpr cube(int n) {
  return BodyExpr::polytope_trusted(detail::cube_vertices(n), detail::facets_from_polar_vertices(detail::cross_vertices(n)));
}

/// Regular simplex with centroid 0, inradius 1 and circumradius n.
inline BodyExpr simplex_regular_centered(int n) {
  // Orthonormal basis of the hyperplane sum(x) = 0 in R^{n+1} (Helmert rows).
  Mat basis = Mat::Zero(n, n + 1);
  for (int k = 1; k <= n; ++k) {
    const double s = 1.0 / std::sqrt(static_cast<double>(k * (k + 1)));
    for (int j = 0; j < k; ++j) basis(k - 1, j) = s;
    basis(k - 1, k) = -k * s;
  }
  Mat centred = Mat::Identity(n + 1, n + 1);
  centred.array() -= 1.0 / (n + 1);
  Mat v = basis * centred;
  v *= n / v.col(0).norm();
  return BodyExpr::polytope_trusted(std::move(v), std::nullopt);
}

/// Regular m-gon with circumradius 1 and a vertex at angle `phase`.
inline BodyExpr regular_polygon(int m, double phase = 0.0) {
  if (m < 3) fail(ErrorCode::InvalidBody, "a polygon needs at least 3 vertices");
  Mat v(2, m);
  for (int k = 0; k < m; ++k) {
    const double a = phase + 2.0 * M_PI * k / m;
    v(0, k) = std::cos(a);
    v(1, k) = std::sin(a);
  }
  return BodyExpr::polytope_trusted(std::move(v), std::nullopt);
}

inline constexpr int kDiscVertices = 512;

/// Polygonal stand-in for the unit disc.
inline BodyExpr polygon_disc(int m = kDiscVertices) { return regular_polygon(m); }

/// Named standard bodies: cross_polytope, cube, simplex_regular_centered,
/// regular_polygon, polygon_disc, segment.
inline BodyExpr standard_body(const std::string& name, int n, std::optional<int> m = std::nullopt) {
  auto need_dim = [&](int lo) {
    if (n < lo) fail(ErrorCode::InvalidBody, name + " needs dimension >= " + std::to_string(lo));
  };
  if (name == "cross_polytope") return need_dim(1), cross_polytope(n);
  if (name == "cube") return need_dim(1), cube(n);
  if (name == "simplex_regular_centered") return need_dim(1), simplex_regular_centered(n);
  if (name == "segment") return segment();
  if (name == "regular_polygon" || name == "polygon_disc") {
    if (n != 2) fail(ErrorCode::DimensionMismatch, name + " is planar (n = 2)");
    if (name == "regular_polygon") {
      if (!m) fail(ErrorCode::InvalidBody, "regular_polygon needs a vertex count m");
      return regular_polygon(*m);
    }
    return polygon_disc(m.value_or(kDiscVertices));
  }
  fail(ErrorCode::UnknownName, "unknown standard body '" + name + "'");
}

// Planar equilateral family (experimental). The bodies are
// K_A = conv(cos(pi/4N) D u {+-w_j : j in A}) where w_0, ..., w_{2N-1} are
// half of the vertices of the regular 4N-gon and A runs over subsets of size N
// that are pairwise inequivalent under the dihedral symmetries of the 4N-gon.

inline constexpr int kEquilateralDiscVertices = 128;

using EquilateralGenerator = std::function<std::vector<BodyExpr>(int N, int count)>;

namespace detail {

/// Canonical representative of a subset of Z_{2N} under rotations and
/// reflections (smallest bitmask in the orbit).
inline unsigned dihedral_canonical(unsigned mask, int m) {
  unsigned best = mask;
  for (int refl = 0; refl < 2; ++refl) {
    for (int shift = 0; shift < m; ++shift) {
      unsigned img = 0;
      for (int j = 0; j < m; ++j) {
        if (!((mask >> j) & 1u)) continue;
        const int k = refl ? (m - j) % m : j;
        img |= 1u << ((k + shift) % m);
      }
      best = std::min(best, img);
    }
  }
  return best;
}

inline std::vector<unsigned> cap_subset_classes(int N) {
  const int m = 2 * N;
  std::set<unsigned> classes;
  for (unsigned mask = 0; mask < (1u << m); ++mask)
    if (std::popcount(mask) == N) classes.insert(dihedral_canonical(mask, m));
  return {classes.begin(), classes.end()};
}

inline BodyExpr cap_subset_body(int N, unsigned mask) {
  const int m4 = 4 * N;
  const double c = std::cos(M_PI / m4);
  const int disc = kEquilateralDiscVertices;
  Mat pts(2, disc + 2 * std::popcount(mask));
  for (int k = 0; k < disc; ++k) {
    const double a = 2.0 * M_PI * (k + 0.5) / disc;
    pts.col(k) << c * std::cos(a), c * std::sin(a);
  }
  int col = disc;
  for (int j = 0; j < 2 * N; ++j) {
    if (!((mask >> j) & 1u)) continue;
    const double a = 2.0 * M_PI * j / m4;
    pts.col(col++) << std::cos(a), std::sin(a);
    pts.col(col++) << -std::cos(a), -std::sin(a);
  }
  return BodyExpr::polytope(pts);
}

}  // namespace detail

/// Number of bodies the default generator can produce for a given N.
inline int cap_subset_capacity(int N) {
  if (N < 1 || N > 10) return 0;
  return static_cast<int>(detail::cap_subset_classes(N).size());
}

inline std::vector<BodyExpr> cap_subset_generator(int N, int count) {
  if (N < 1 || N > 10) fail(ErrorCode::GeneratorCapacityExceeded, "N must lie in [1, 10]");
  const auto classes = detail::cap_subset_classes(N);
  if (count > static_cast<int>(classes.size()))
    fail(ErrorCode::GeneratorCapacityExceeded, "N = " + std::to_string(N) + " admits at most " +
                                                   std::to_string(classes.size()) + " bodies, " +
                                                   std::to_string(count) + " requested");
  std::vector<BodyExpr> out;
  for (int i = 0; i < count; ++i) out.push_back(detail::cap_subset_body(N, classes[static_cast<std::size_t>(i)]));
  return out;
}

/// Experimental: planar symmetric bodies meant to be pairwise at distance
/// 1/cos^2(pi/4N). Nothing here proves that they are; callers measure it.
inline std::vector<BodyExpr> equilateral_family(int N, int count, const EquilateralGenerator& gen = cap_subset_generator) {
  if (N < 2) fail(ErrorCode::InvalidBody, "N must be >= 2");
  if (count < 1) fail(ErrorCode::InvalidBody, "count must be >= 1");
  return gen(N, count);
}

inline double equilateral_target(int N) {
  const double c = std::cos(M_PI / (4.0 * N));
  return 1.0 / (c * c);
}

}  // namespace bm
