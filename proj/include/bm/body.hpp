#pragma once

// Convex-body expressions: polytope and Euclidean-ball leaves combined by
// l_p-sums, invertible linear images and translations. Values are immutable
// and cheap to copy (shared tree nodes).

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bm/errors.hpp"
#include "bm/hull.hpp"

namespace bm {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Conjugate exponent p* = p / (p - 1) with 1* = inf and inf* = 1.
inline double conjugate_exponent(double p) {
  if (p == 1.0) return kInf;
  if (std::isinf(p)) return 1.0;
  return p / (p - 1.0);
}

/// l_p norm of a vector of nonnegative numbers, p in [1, inf].
inline double lp_norm(const Vec& values, double p) {
  if (values.size() == 0) return 0.0;
  if (std::isinf(p)) return values.cwiseAbs().maxCoeff();
  if (p == 1.0) return values.cwiseAbs().sum();
  const double m = values.cwiseAbs().maxCoeff();
  if (m == 0.0) return 0.0;
  double s = 0.0;
  for (int i = 0; i < values.size(); ++i) s += std::pow(std::abs(values[i]) / m, p);
  return m * std::pow(s, 1.0 / p);
}

/// x -> matrix * (x + pre) + post. Both translations vanish in the symmetric setting.
class LinearMap {
 public:
  explicit LinearMap(Mat matrix, Vec pre = Vec(), Vec post = Vec()) : matrix_(std::move(matrix)) {
    const auto n = matrix_.rows();
    if (matrix_.cols() != n) fail(ErrorCode::SingularMap, "matrix must be square");
    pre_ = pre.size() == 0 ? Vec::Zero(n) : std::move(pre);
    post_ = post.size() == 0 ? Vec::Zero(n) : std::move(post);
    if (pre_.size() != n || post_.size() != n) fail(ErrorCode::DimensionMismatch, "translation length differs from matrix size");
    if (!matrix_.allFinite()) fail(ErrorCode::SingularMap, "matrix has non-finite entries");
    Eigen::FullPivLU<Mat> lu(matrix_);
    if (!lu.isInvertible()) fail(ErrorCode::SingularMap, "matrix is not invertible");
    inverse_ = lu.inverse();
    const double err = (matrix_ * inverse_ - Mat::Identity(n, n)).cwiseAbs().maxCoeff();
    if (!(err <= 1e-10)) fail(ErrorCode::SingularMap, "matrix is numerically singular (inverse residual " + std::to_string(err) + ")");
  }

  static LinearMap identity(int n) { return LinearMap(Mat::Identity(n, n)); }

  int dim() const { return static_cast<int>(matrix_.rows()); }
  const Mat& matrix() const { return matrix_; }
  const Mat& inverse() const { return inverse_; }
  const Vec& pre() const { return pre_; }
  const Vec& post() const { return post_; }
  bool is_linear() const { return pre_.isZero(0.0) && post_.isZero(0.0); }

  Vec apply(const Vec& x) const { return matrix_ * (x + pre_) + post_; }
  Vec apply_inverse(const Vec& y) const { return inverse_ * (y - post_) - pre_; }

  LinearMap scaled(double s) const { return LinearMap(s * matrix_, pre_, s * post_); }

 private:
  Mat matrix_;
  Mat inverse_;
  Vec pre_;
  Vec post_;
};

class BodyExpr;

namespace detail {
struct Node;
}

class BodyExpr {
 public:
  enum class Kind { Polytope, Ball, LpSum, LinearImage, Translate };

  struct PolytopeData {
    Mat vertices;  // dim x count, irredundant
    AffineSpan span;
    std::optional<Facets> facets;  // present for full-dimensional leaves when enumerable
  };
  struct LpSumData {
    double p;
    std::vector<BodyExpr> children;
    std::vector<int> offsets;  // first coordinate of each block
  };
  struct LinearImageData {
    Mat matrix;
    Mat inverse;
  };
  struct TranslateData {
    Vec offset;
  };

  Kind kind() const;
  int dim() const;
  bool symmetric() const;
  bool origin_interior() const;
  /// Dimension of the affine hull (equals dim() for every non-polytope node).
  int affine_dim() const;

  const PolytopeData& polytope() const;
  const LpSumData& lp_sum() const;
  const LinearImageData& linear_image() const;
  const TranslateData& translation() const;
  /// Child of a LinearImage or Translate node.
  const BodyExpr& child() const;

  bool is_polytope() const { return kind() == Kind::Polytope; }

  // Node constructors. Higher-level builders live in constructions.hpp.
  static BodyExpr polytope(const Mat& vertices);
  /// Vertices must already be irredundant; facets, when given, are trusted.
  static BodyExpr polytope_trusted(Mat vertices, std::optional<Facets> facets);
  static BodyExpr ball(int dim);
  static BodyExpr lp_sum_node(double p, std::vector<BodyExpr> children);
  static BodyExpr linear_image(const Mat& matrix, BodyExpr child);
  static BodyExpr translate(const Vec& offset, BodyExpr child);

  friend bool operator==(const BodyExpr& a, const BodyExpr& b);

 private:
  explicit BodyExpr(std::shared_ptr<const detail::Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const detail::Node> node_;
};

namespace detail {

struct BallData {};

struct Node {
  BodyExpr::Kind kind;
  int dim = 0;
  int affine_dim = 0;
  bool symmetric = false;
  bool origin_interior = false;
  std::variant<BodyExpr::PolytopeData, BallData, BodyExpr::LpSumData, BodyExpr::LinearImageData, BodyExpr::TranslateData> data;
  std::optional<BodyExpr> child;
};

inline bool vertex_set_symmetric(const Mat& v, double tol = 1e-9) {
  const double t = tol * std::max(1.0, scale_of(v));
  for (int j = 0; j < v.cols(); ++j) {
    bool found = false;
    for (int k = 0; k < v.cols() && !found; ++k) found = (v.col(j) + v.col(k)).norm() <= t;
    if (!found) return false;
  }
  return true;
}

/// Gauge by linear programming: min t s.t. x = sum c_i v_i, sum c_i = t, c >= 0.
inline double polytope_gauge_lp(const Mat& vertices, const Vec& x) {
  const int m = static_cast<int>(vertices.cols());
  const int n = static_cast<int>(vertices.rows());
  lp::Problem prob(m);
  prob.objective.setOnes();
  for (int r = 0; r < n; ++r) prob.add_row(vertices.row(r).transpose(), lp::Relation::Equal, x[r]);
  const auto res = lp::solve(prob);
  if (res.status == lp::Status::Infeasible) return kInf;
  if (res.status != lp::Status::Optimal) fail(ErrorCode::Internal, "gauge LP failed");
  return std::max(res.value, 0.0);
}

inline Facets transform_facets(const Facets& f, const Mat& inverse, const Vec& shift) {
  // A x <= b, y = M x + c  =>  (A M^-1) y <= b + A M^-1 c
  Facets out;
  out.normals = f.normals * inverse;
  out.offsets = f.offsets + out.normals * shift;
  for (int k = 0; k < out.normals.rows(); ++k) {
    const double len = out.normals.row(k).norm();
    out.normals.row(k) /= len;
    out.offsets[k] /= len;
  }
  return out;
}

}  // namespace detail

inline BodyExpr::Kind BodyExpr::kind() const { return node_->kind; }
inline int BodyExpr::dim() const { return node_->dim; }
inline bool BodyExpr::symmetric() const { return node_->symmetric; }
inline bool BodyExpr::origin_interior() const { return node_->origin_interior; }
inline int BodyExpr::affine_dim() const { return node_->affine_dim; }

inline const BodyExpr::PolytopeData& BodyExpr::polytope() const {
  if (kind() != Kind::Polytope) fail(ErrorCode::NotVertexEnumerable, "body is not a polytope leaf");
  return std::get<PolytopeData>(node_->data);
}
inline const BodyExpr::LpSumData& BodyExpr::lp_sum() const { return std::get<LpSumData>(node_->data); }
inline const BodyExpr::LinearImageData& BodyExpr::linear_image() const { return std::get<LinearImageData>(node_->data); }
inline const BodyExpr::TranslateData& BodyExpr::translation() const { return std::get<TranslateData>(node_->data); }
inline const BodyExpr& BodyExpr::child() const { return *node_->child; }

inline BodyExpr BodyExpr::polytope_trusted(Mat vertices, std::optional<Facets> facets) {
  if (vertices.cols() == 0) fail(ErrorCode::InvalidBody, "polytope needs at least one vertex");
  if (!vertices.allFinite()) fail(ErrorCode::InvalidBody, "polytope vertices must be finite");
  auto node = std::make_shared<detail::Node>();
  node->kind = Kind::Polytope;
  node->dim = static_cast<int>(vertices.rows());
  PolytopeData data;
  data.span = affine_span(vertices);
  node->affine_dim = data.span.rank;
  const bool full = data.span.rank == node->dim;
  if (full && !facets) facets = compute_facets(vertices);
  if (!full) facets.reset();
  node->symmetric = detail::vertex_set_symmetric(vertices);
  if (full) {
    if (facets) {
      node->origin_interior = facets->offsets.minCoeff() > 1e-12 * std::max(1.0, scale_of(vertices));
    } else {
      bool interior = true;
      for (int k = 0; k < node->dim && interior; ++k) {
        for (double s : {1.0, -1.0}) {
          Vec e = Vec::Zero(node->dim);
          e[k] = s;
          if (!std::isfinite(detail::polytope_gauge_lp(vertices, e))) interior = false;
        }
      }
      // Finite gauges along all +-e_k put a cross-polytope around 0 inside.
      node->origin_interior = interior;
    }
  }
  data.vertices = std::move(vertices);
  data.facets = std::move(facets);
  node->data = std::move(data);
  return BodyExpr(node);
}

inline BodyExpr BodyExpr::polytope(const Mat& vertices) {
  if (vertices.cols() == 0) fail(ErrorCode::InvalidBody, "polytope needs at least one vertex");
  if (!vertices.allFinite()) fail(ErrorCode::InvalidBody, "polytope vertices must be finite");
  return polytope_trusted(prune_redundant(vertices), std::nullopt);
}

inline BodyExpr BodyExpr::ball(int dim) {
  if (dim < 1) fail(ErrorCode::InvalidBody, "ball dimension must be positive");
  auto node = std::make_shared<detail::Node>();
  node->kind = Kind::Ball;
  node->dim = dim;
  node->affine_dim = dim;
  node->symmetric = true;
  node->origin_interior = true;
  node->data = detail::BallData{};
  return BodyExpr(node);
}

inline BodyExpr BodyExpr::lp_sum_node(double p, std::vector<BodyExpr> children) {
  if (!(p >= 1.0)) fail(ErrorCode::InvalidP, "l_p-sum exponent must lie in [1, inf]");
  if (children.empty()) fail(ErrorCode::InvalidBody, "l_p-sum needs at least one summand");
  auto node = std::make_shared<detail::Node>();
  node->kind = Kind::LpSum;
  LpSumData data{p, {}, {}};
  bool sym = true;
  int offset = 0;
  for (auto& c : children) {
    if (!c.origin_interior()) fail(ErrorCode::OriginNotInterior, "l_p-sum summands must contain the origin in their interior");
    sym = sym && c.symmetric();
    data.offsets.push_back(offset);
    offset += c.dim();
  }
  data.children = std::move(children);
  node->dim = offset;
  node->affine_dim = offset;
  node->symmetric = sym;
  node->origin_interior = true;
  node->data = std::move(data);
  return BodyExpr(node);
}

double gauge(const BodyExpr& body, const Vec& x);

inline BodyExpr BodyExpr::linear_image(const Mat& matrix, BodyExpr child) {
  LinearMap map(matrix);
  if (map.dim() != child.dim()) fail(ErrorCode::DimensionMismatch, "linear image matrix size differs from body dimension");
  auto node = std::make_shared<detail::Node>();
  node->kind = Kind::LinearImage;
  node->dim = child.dim();
  node->affine_dim = child.affine_dim();
  node->symmetric = child.symmetric();
  node->origin_interior = child.origin_interior();
  node->data = LinearImageData{map.matrix(), map.inverse()};
  node->child = std::move(child);
  return BodyExpr(node);
}

inline BodyExpr BodyExpr::translate(const Vec& offset, BodyExpr child) {
  if (offset.size() != child.dim()) fail(ErrorCode::DimensionMismatch, "translation length differs from body dimension");
  auto node = std::make_shared<detail::Node>();
  node->kind = Kind::Translate;
  node->dim = child.dim();
  node->affine_dim = child.affine_dim();
  node->symmetric = child.symmetric() && offset.isZero(0.0);
  if (child.is_polytope() && child.polytope().facets) {
    // 0 is interior to child + offset iff -offset is interior to child.
    const Facets& f = *child.polytope().facets;
    const Vec slack = f.offsets + f.normals * offset;
    node->origin_interior = slack.minCoeff() > 1e-9 * std::max(1.0, scale_of(child.polytope().vertices));
  } else {
    node->origin_interior = child.origin_interior() && gauge(child, -offset) < 1.0 - 1e-12;
  }
  node->data = TranslateData{offset};
  node->child = std::move(child);
  return BodyExpr(node);
}

inline bool operator==(const BodyExpr& a, const BodyExpr& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind() || a.dim() != b.dim()) return false;
  switch (a.kind()) {
    case BodyExpr::Kind::Polytope: {
      const auto& va = a.polytope().vertices;
      const auto& vb = b.polytope().vertices;
      return va.cols() == vb.cols() && va == vb;
    }
    case BodyExpr::Kind::Ball: return true;
    case BodyExpr::Kind::LpSum: {
      const auto& la = a.lp_sum();
      const auto& lb = b.lp_sum();
      if (la.p != lb.p || la.children.size() != lb.children.size()) return false;
      for (std::size_t i = 0; i < la.children.size(); ++i)
        if (!(la.children[i] == lb.children[i])) return false;
      return true;
    }
    case BodyExpr::Kind::LinearImage: return a.linear_image().matrix == b.linear_image().matrix && a.child() == b.child();
    case BodyExpr::Kind::Translate: return a.translation().offset == b.translation().offset && a.child() == b.child();
  }
  return false;
}

inline void require_dim(const BodyExpr& body, const Vec& x) {
  if (x.size() != body.dim())
    fail(ErrorCode::DimensionMismatch, "vector of length " + std::to_string(x.size()) + " for body of dimension " + std::to_string(body.dim()));
}

/// Minkowski functional min{t >= 0 : x in tK}.
inline double gauge(const BodyExpr& body, const Vec& x) {
  require_dim(body, x);
  if (!body.origin_interior()) fail(ErrorCode::OriginNotInterior, "gauge requires the origin in the interior");
  switch (body.kind()) {
    case BodyExpr::Kind::Polytope: {
      const auto& poly = body.polytope();
      if (poly.facets) {
        const Vec ratios = (poly.facets->normals * x).cwiseQuotient(poly.facets->offsets);
        return std::max(0.0, ratios.maxCoeff());
      }
      return detail::polytope_gauge_lp(poly.vertices, x);
    }
    case BodyExpr::Kind::Ball: return x.norm();
    case BodyExpr::Kind::LpSum: {
      const auto& s = body.lp_sum();
      Vec parts(static_cast<Eigen::Index>(s.children.size()));
      for (std::size_t i = 0; i < s.children.size(); ++i) {
        const auto& c = s.children[i];
        parts[static_cast<Eigen::Index>(i)] = gauge(c, x.segment(s.offsets[i], c.dim()));
      }
      return lp_norm(parts, s.p);
    }
    case BodyExpr::Kind::LinearImage: return gauge(body.child(), body.linear_image().inverse * x);
    case BodyExpr::Kind::Translate: {
      // Smallest t with gauge_C(x - t o) <= t; the difference is convex in t.
      if (x.isZero(0.0)) return 0.0;
      const auto& o = body.translation().offset;
      const auto& c = body.child();
      auto h = [&](double t) { return gauge(c, x - t * o) - t; };
      double hi = std::max(1e-300, gauge(c, x));
      while (h(hi) > 0.0) hi *= 2.0;
      double lo = 0.0;
      for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (h(mid) > 0.0 ? lo : hi) = mid;
      }
      return hi;
    }
  }
  fail(ErrorCode::Internal, "unknown body kind");
}

/// Support function max_{y in K} <y, u>.
inline double support(const BodyExpr& body, const Vec& u) {
  require_dim(body, u);
  switch (body.kind()) {
    case BodyExpr::Kind::Polytope: return (body.polytope().vertices.transpose() * u).maxCoeff();
    case BodyExpr::Kind::Ball: return u.norm();
    case BodyExpr::Kind::LpSum: {
      const auto& s = body.lp_sum();
      Vec parts(static_cast<Eigen::Index>(s.children.size()));
      for (std::size_t i = 0; i < s.children.size(); ++i) {
        const auto& c = s.children[i];
        parts[static_cast<Eigen::Index>(i)] = std::max(0.0, support(c, u.segment(s.offsets[i], c.dim())));
      }
      return lp_norm(parts, conjugate_exponent(s.p));
    }
    case BodyExpr::Kind::LinearImage: return support(body.child(), body.linear_image().matrix.transpose() * u);
    case BodyExpr::Kind::Translate: return support(body.child(), u) + u.dot(body.translation().offset);
  }
  fail(ErrorCode::Internal, "unknown body kind");
}

/// Membership test with relative tolerance.
inline bool contains(const BodyExpr& body, const Vec& x, double tol = 1e-9) {
  require_dim(body, x);
  if (body.is_polytope()) {
    const auto& poly = body.polytope();
    if (poly.facets) {
      return ((poly.facets->normals * x - poly.facets->offsets).array() <= tol * std::max(1.0, scale_of(poly.vertices))).all();
    }
    return in_hull(poly.vertices, x, tol);
  }
  if (body.origin_interior()) return gauge(body, x) <= 1.0 + tol;
  fail(ErrorCode::OriginNotInterior, "membership in a composite body needs the origin in its interior");
}

/// Folds linear images, translations and l_1 / l_inf sums of polytopes into
/// a single polytope leaf. Returns nullopt for genuinely curved bodies.
std::optional<BodyExpr> as_polytope(const BodyExpr& body);

namespace detail {

inline BodyExpr transform_polytope(const BodyExpr& poly, const Mat& matrix, const Mat& inverse, const Vec& shift) {
  const auto& data = poly.polytope();
  Mat verts = (matrix * data.vertices).colwise() + shift;
  std::optional<Facets> facets;
  if (data.facets) facets = transform_facets(*data.facets, inverse, shift);
  return BodyExpr::polytope_trusted(std::move(verts), std::move(facets));
}

// Facets normalized to <a, x> <= 1; requires origin interior.
inline std::optional<Mat> polar_vertices_of(const BodyExpr& poly) {
  const auto& data = poly.polytope();
  if (!data.facets) return std::nullopt;
  Mat out = data.facets->normals.transpose();
  for (int k = 0; k < out.cols(); ++k) out.col(k) /= data.facets->offsets[k];
  return out;
}

inline std::optional<Facets> facets_from_polar_vertices(const std::optional<Mat>& polar) {
  if (!polar) return std::nullopt;
  Facets f;
  f.normals = polar->transpose();
  f.offsets = Vec::Ones(polar->cols());
  for (int k = 0; k < f.normals.rows(); ++k) {
    const double len = f.normals.row(k).norm();
    f.normals.row(k) /= len;
    f.offsets[k] /= len;
  }
  return f;
}

/// Polytope l_1- or l_inf-sum of origin-interior polytope leaves. Vertices and
/// facets are assembled blockwise: the polar of an l_1-sum is the l_inf-sum of
/// the polars.
inline BodyExpr polytope_lp_sum(const std::vector<BodyExpr>& parts, bool l1) {
  int total = 0;
  for (const auto& b : parts) total += b.dim();
  std::vector<const Mat*> verts;
  std::vector<std::optional<Mat>> polars;
  bool have_polars = true;
  for (const auto& b : parts) {
    verts.push_back(&b.polytope().vertices);
    polars.push_back(polar_vertices_of(b));
    have_polars = have_polars && polars.back().has_value();
  }
  // "Union" assembly: each block's points embedded with zeros elsewhere.
  auto union_of = [&](const std::vector<const Mat*>& blocks) {
    int count = 0;
    for (auto* m : blocks) count += static_cast<int>(m->cols());
    Mat out = Mat::Zero(total, count);
    int col = 0, row = 0;
    for (auto* m : blocks) {
      out.block(row, col, m->rows(), m->cols()) = *m;
      col += static_cast<int>(m->cols());
      row += static_cast<int>(m->rows());
    }
    return out;
  };
  // "Product" assembly: every combination of one column per block.
  auto product_of = [&](const std::vector<const Mat*>& blocks) {
    Mat out = Mat::Zero(total, 1);
    int row = 0;
    for (auto* m : blocks) {
      Mat next(total, out.cols() * m->cols());
      int col = 0;
      for (int a = 0; a < out.cols(); ++a) {
        for (int b = 0; b < m->cols(); ++b) {
          next.col(col) = out.col(a);
          next.block(row, col, m->rows(), 1) = m->col(b);
          ++col;
        }
      }
      out = std::move(next);
      row += static_cast<int>(m->rows());
    }
    return out;
  };
  Mat vertices = l1 ? union_of(verts) : product_of(verts);
  std::optional<Facets> facets;
  if (have_polars) {
    std::vector<const Mat*> pv;
    for (auto& p : polars) pv.push_back(&*p);
    facets = facets_from_polar_vertices(l1 ? product_of(pv) : union_of(pv));
  }
  // Extreme points of the summands stay extreme in both sums, so the lists
  // are irredundant; pruning is still applied as a guard for loose inputs.
  if (!have_polars) vertices = prune_redundant(vertices);
  return BodyExpr::polytope_trusted(std::move(vertices), std::move(facets));
}

}  // namespace detail

inline std::optional<BodyExpr> as_polytope(const BodyExpr& body) {
  switch (body.kind()) {
    case BodyExpr::Kind::Polytope: return body;
    case BodyExpr::Kind::Ball: return std::nullopt;
    case BodyExpr::Kind::LinearImage: {
      auto c = as_polytope(body.child());
      if (!c) return std::nullopt;
      const auto& li = body.linear_image();
      return detail::transform_polytope(*c, li.matrix, li.inverse, Vec::Zero(body.dim()));
    }
    case BodyExpr::Kind::Translate: {
      auto c = as_polytope(body.child());
      if (!c) return std::nullopt;
      const int n = body.dim();
      return detail::transform_polytope(*c, Mat::Identity(n, n), Mat::Identity(n, n), body.translation().offset);
    }
    case BodyExpr::Kind::LpSum: {
      const auto& s = body.lp_sum();
      if (s.p != 1.0 && !std::isinf(s.p)) return std::nullopt;
      std::vector<BodyExpr> parts;
      for (const auto& c : s.children) {
        auto pc = as_polytope(c);
        if (!pc) return std::nullopt;
        parts.push_back(*pc);
      }
      return detail::polytope_lp_sum(parts, s.p == 1.0);
    }
  }
  return std::nullopt;
}

}  // namespace bm
