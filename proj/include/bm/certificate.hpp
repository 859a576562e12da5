#pragma once

// Optimality certificates for positions relative to the Euclidean ball:
// positive weights on inner and outer contact points whose rank-one sums
// agree (plus vanishing weighted sums for non-symmetric bodies).

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <vector>

#include "bm/body.hpp"
#include "bm/geometry.hpp"
#include "bm/lp.hpp"

namespace bm {

struct ContactSet {
  double r = 0.0;
  double R = 0.0;
  Mat inner;
  Mat outer;
};

struct ContactCertificate {
  double r = 0.0;
  double R = 0.0;
  Mat inner;  // n x N
  Mat outer;  // n x M
  Vec lambda;
  Vec mu;
  bool balanced = false;
  double residual = 0.0;
  /// Smallest weight found by the LP (0 for certificates built by hand).
  double epsilon = 0.0;

  double value() const { return R / r; }
};

struct CertificateOptions {
  double contact_tol = 1e-7;
  double cluster_radius = 1e-6;
  double weight_threshold = 1e-10;
  double residual_tol = 1e-8;
  SamplingOptions sampling;
};

/// Inner and outer contact points of K with the spheres of radii r and R.
inline ContactSet find_contacts(const BodyExpr& K, const CertificateOptions& opt = {}) {
  const auto ext = radial_extremes(K, opt.contact_tol, opt.sampling);
  const double radius = opt.cluster_radius * std::max(1.0, ext.R);
  return {ext.r, ext.R, detail::cluster_points(ext.inner, radius), detail::cluster_points(ext.outer, radius)};
}

/// Max-abs entry of sum lambda y y^T - sum mu z z^T, together with the
/// weighted point sums when balanced.
inline double decomposition_residual(const Mat& inner, const Vec& lambda, const Mat& outer, const Vec& mu, bool balanced) {
  const Mat diff = inner * lambda.asDiagonal() * inner.transpose() - outer * mu.asDiagonal() * outer.transpose();
  double res = diff.cwiseAbs().maxCoeff();
  if (balanced) {
    res = std::max(res, (inner * lambda).cwiseAbs().maxCoeff());
    res = std::max(res, (outer * mu).cwiseAbs().maxCoeff());
  }
  return res;
}

namespace detail {

/// Rows of the decomposition system over the columns (lambda, mu[, eps]).
inline lp::Problem decomposition_problem(const Mat& inner, const Mat& outer, bool balanced, bool with_eps) {
  const int n = static_cast<int>(inner.rows());
  const int N = static_cast<int>(inner.cols());
  const int M = static_cast<int>(outer.cols());
  const int vars = N + M + (with_eps ? 1 : 0);
  lp::Problem prob(vars);
  for (int a = 0; a < n; ++a) {
    for (int b = a; b < n; ++b) {
      Vec row = Vec::Zero(vars);
      for (int i = 0; i < N; ++i) row[i] = inner(a, i) * inner(b, i);
      for (int j = 0; j < M; ++j) row[N + j] = -outer(a, j) * outer(b, j);
      prob.add_row(std::move(row), lp::Relation::Equal, 0.0);
    }
  }
  Vec ones = Vec::Zero(vars);
  ones.head(N).setOnes();
  prob.add_row(std::move(ones), lp::Relation::Equal, 1.0);
  if (balanced) {
    for (int a = 0; a < n; ++a) {
      Vec row = Vec::Zero(vars);
      row.head(N) = inner.row(a).transpose();
      prob.add_row(std::move(row), lp::Relation::Equal, 0.0);
      Vec row2 = Vec::Zero(vars);
      row2.segment(N, M) = outer.row(a).transpose();
      prob.add_row(std::move(row2), lp::Relation::Equal, 0.0);
    }
  }
  return prob;
}

inline Mat select_columns(const Mat& m, const std::vector<int>& cols) {
  Mat out(m.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = m.col(cols[k]);
  return out;
}

}  // namespace detail

/// Searches for weights with sum lambda y y^T = sum mu z z^T and sum lambda = 1
/// (and balancing sums when requested). Contacts that cannot carry positive
/// weight in any solution are dropped first; the weights on the remaining
/// contacts then maximize the smallest weight. Returns nullopt when no
/// decomposition with weights above the threshold exists.
inline std::optional<ContactCertificate> check_decomposition(const Mat& inner, const Mat& outer, bool balanced,
                                                             const CertificateOptions& opt = {}) {
  if (inner.cols() == 0 || outer.cols() == 0) fail(ErrorCode::EmptyContactSet, "contact lists must be nonempty");
  if (inner.rows() != outer.rows()) fail(ErrorCode::DimensionMismatch, "inner and outer contacts differ in dimension");
  const int N = static_cast<int>(inner.cols());
  const int M = static_cast<int>(outer.cols());

  // Maximal support: the set of weights that are positive in some feasible
  // solution. Each solve marks every weight it makes positive.
  lp::Problem base = detail::decomposition_problem(inner, outer, balanced, false);
  std::vector<bool> support(static_cast<std::size_t>(N + M), false);
  std::vector<bool> tried(static_cast<std::size_t>(N + M), false);
  for (int k = 0; k < N + M; ++k) {
    if (support[static_cast<std::size_t>(k)] || tried[static_cast<std::size_t>(k)]) continue;
    lp::Problem prob = base;
    prob.objective.setZero();
    prob.objective[k] = -1.0;
    // Bound the objective; the trace identity bounds mu only implicitly.
    Vec cap = Vec::Zero(N + M);
    cap[k] = 1.0;
    prob.add_row(std::move(cap), lp::Relation::LessEqual, 1e6);
    const auto res = lp::solve(prob);
    tried[static_cast<std::size_t>(k)] = true;
    if (res.status == lp::Status::Infeasible) return std::nullopt;
    if (res.status != lp::Status::Optimal) fail(ErrorCode::Internal, "decomposition LP did not converge");
    for (int j = 0; j < N + M; ++j)
      if (res.x[j] > opt.weight_threshold) support[static_cast<std::size_t>(j)] = true;
  }
  std::vector<int> in_idx, out_idx;
  for (int i = 0; i < N; ++i)
    if (support[static_cast<std::size_t>(i)]) in_idx.push_back(i);
  for (int j = 0; j < M; ++j)
    if (support[static_cast<std::size_t>(N + j)]) out_idx.push_back(j);
  if (in_idx.empty() || out_idx.empty()) return std::nullopt;

  const Mat y = detail::select_columns(inner, in_idx);
  const Mat z = detail::select_columns(outer, out_idx);
  const int n1 = static_cast<int>(y.cols());
  const int m1 = static_cast<int>(z.cols());
  lp::Problem prob = detail::decomposition_problem(y, z, balanced, true);
  const int eps = n1 + m1;
  prob.objective[eps] = -1.0;
  for (int k = 0; k < n1 + m1; ++k) {
    Vec row = Vec::Zero(eps + 1);
    row[k] = 1.0;
    row[eps] = -1.0;
    prob.add_row(std::move(row), lp::Relation::GreaterEqual, 0.0);
  }
  const auto res = lp::solve(prob);
  if (res.status != lp::Status::Optimal) return std::nullopt;
  if (res.x[eps] <= opt.weight_threshold) return std::nullopt;

  ContactCertificate cert;
  cert.inner = y;
  cert.outer = z;
  cert.lambda = res.x.head(n1);
  cert.mu = res.x.segment(n1, m1);
  cert.balanced = balanced;
  cert.epsilon = res.x[eps];
  cert.residual = decomposition_residual(cert.inner, cert.lambda, cert.outer, cert.mu, balanced);
  if (cert.residual > opt.residual_tol) return std::nullopt;
  return cert;
}

struct CertifiedDistance {
  double value = 0.0;
  ContactCertificate certificate;
};

/// d_BM(K, B^n) = R / r certified in the given position. Throws
/// NotOptimalPosition when no decomposition exists for this position.
inline CertifiedDistance certify_euclidean_distance(const BodyExpr& K, const CertificateOptions& opt = {}) {
  const ContactSet c = find_contacts(K, opt);
  const bool balanced = !K.symmetric();
  auto cert = check_decomposition(c.inner, c.outer, balanced, opt);
  if (!cert) fail(ErrorCode::NotOptimalPosition, "no contact-point decomposition exists in this position");
  cert->r = c.r;
  cert->R = c.R;
  return {c.R / c.r, *cert};
}

struct CertificateCheck {
  bool ok = false;
  double residual = 0.0;
  /// Largest deviation of contact norms from r and R (relative).
  double sphere_error = 0.0;
  /// Largest deviation of contact gauges from 1 (when a body is given).
  double boundary_error = 0.0;
  std::string reason;
};

/// Re-checks the arithmetic of a certificate without solving any LP.
inline CertificateCheck verify_certificate(const ContactCertificate& cert, const BodyExpr* body = nullptr,
                                           double tol = 1e-8) {
  CertificateCheck out;
  if (cert.inner.cols() == 0 || cert.outer.cols() == 0) {
    out.reason = "empty contact list";
    return out;
  }
  if (cert.lambda.size() != cert.inner.cols() || cert.mu.size() != cert.outer.cols()) {
    out.reason = "weight count differs from contact count";
    return out;
  }
  if (cert.lambda.minCoeff() <= 0.0 || cert.mu.minCoeff() <= 0.0) {
    out.reason = "weights must be positive";
    return out;
  }
  out.residual = decomposition_residual(cert.inner, cert.lambda, cert.outer, cert.mu, cert.balanced);
  out.residual = std::max(out.residual, std::abs(cert.lambda.sum() - 1.0));
  const Vec in_norms = cert.inner.colwise().norm();
  const Vec out_norms = cert.outer.colwise().norm();
  out.sphere_error = std::max((in_norms.array() / cert.r - 1.0).abs().maxCoeff(), (out_norms.array() / cert.R - 1.0).abs().maxCoeff());
  if (body) {
    for (int i = 0; i < cert.inner.cols(); ++i) out.boundary_error = std::max(out.boundary_error, std::abs(gauge(*body, cert.inner.col(i)) - 1.0));
    for (int j = 0; j < cert.outer.cols(); ++j) out.boundary_error = std::max(out.boundary_error, std::abs(gauge(*body, cert.outer.col(j)) - 1.0));
    // The spheres must sandwich the body: r B inside K inside R B.
    const auto ext = radial_extremes(*body, 1e-7);
    if (ext.r < cert.r * (1.0 - tol) || ext.R > cert.R * (1.0 + tol)) {
      out.reason = "spheres do not sandwich the body";
      return out;
    }
  }
  if (out.residual > tol) out.reason = "decomposition residual too large";
  else if (out.sphere_error > tol) out.reason = "contact points off the spheres";
  else if (out.boundary_error > tol) out.reason = "contact points off the boundary";
  out.ok = out.reason.empty();
  return out;
}

namespace detail {

/// Adds -y for every contact y with half the weight on each copy, so that
/// the weighted sums vanish without changing the rank-one sums.
inline void symmetrize(Mat& pts, Vec& w) {
  const int m = static_cast<int>(pts.cols());
  Mat out(pts.rows(), 2 * m);
  Vec ow(2 * m);
  out.leftCols(m) = pts;
  out.rightCols(m) = -pts;
  ow.head(m) = w / 2.0;
  ow.tail(m) = w / 2.0;
  // Merge coincident points (a contact and the negation of another).
  std::vector<int> keep;
  std::vector<double> weight;
  for (int j = 0; j < 2 * m; ++j) {
    bool merged = false;
    for (std::size_t k = 0; k < keep.size() && !merged; ++k) {
      if ((out.col(j) - out.col(keep[k])).norm() <= 1e-12 * std::max(1.0, out.col(j).norm())) {
        weight[k] += ow[j];
        merged = true;
      }
    }
    if (!merged) {
      keep.push_back(j);
      weight.push_back(ow[j]);
    }
  }
  pts = select_columns(out, keep);
  w = Eigen::Map<Vec>(weight.data(), static_cast<Eigen::Index>(weight.size()));
}

}  // namespace detail

/// Certificate for C1 (+)_p C2 in the position B_2 inside the sum inside
/// ||(d1, d2)||_r B_2, assembled from certificates of the summands (each with
/// r = 1, R = d_i). p must lie in (2, inf].
inline ContactCertificate lp_sum_certificate(const ContactCertificate& c1, const ContactCertificate& c2, double p) {
  if (!(p > 2.0)) fail(ErrorCode::InvalidP, "contact construction needs p > 2");
  if (std::abs(c1.r - 1.0) > 1e-9 || std::abs(c2.r - 1.0) > 1e-9)
    fail(ErrorCode::HypothesisViolated, "summands must be positioned with inradius 1");
  const double d1 = c1.R / c1.r;
  const double d2 = c2.R / c2.r;
  const bool inf = std::isinf(p);
  const double e2 = inf ? 0.0 : 2.0 / (p - 2.0);        // 2/(p-2)
  const double e4 = 2.0 * e2;                            // 4/(p-2)
  const double e2p = inf ? 2.0 : 2.0 * p / (p - 2.0);    // 2p/(p-2)
  const double r = e2p;                                  // r = 2p/(p-2)
  const double dr = std::pow(std::pow(d1, r) + std::pow(d2, r), 1.0 / r);
  const double sum_pow = std::pow(d1, e2p) + std::pow(d2, e2p);

  Mat y = c1.inner, z = c1.outer, u = c2.inner, v = c2.outer;
  Vec alpha = c1.lambda, beta = c1.mu, gamma = c2.lambda, delta = c2.mu;
  detail::symmetrize(y, alpha);
  detail::symmetrize(z, beta);
  detail::symmetrize(u, gamma);
  detail::symmetrize(v, delta);
  const double s1 = 1.0 / (std::pow(d2, e4) * beta.sum());
  alpha *= s1;
  beta *= s1;
  const double s2 = 1.0 / (std::pow(d1, e4) * delta.sum());
  gamma *= s2;
  delta *= s2;

  const int n1 = static_cast<int>(y.rows());
  const int n2 = static_cast<int>(u.rows());
  const int N1 = static_cast<int>(y.cols()), N2 = static_cast<int>(u.cols());
  const int M1 = static_cast<int>(z.cols()), M2 = static_cast<int>(v.cols());
  ContactCertificate out;
  out.r = 1.0;
  out.R = dr;
  out.inner = Mat::Zero(n1 + n2, N1 + N2);
  out.inner.topLeftCorner(n1, N1) = y;
  out.inner.bottomRightCorner(n2, N2) = u;
  out.lambda.resize(N1 + N2);
  out.lambda << alpha, gamma;
  const double scale = dr / std::sqrt(sum_pow);
  const double a1 = std::pow(d1, e2), a2 = std::pow(d2, e2);
  out.outer.resize(n1 + n2, M1 * M2);
  out.mu.resize(M1 * M2);
  for (int i = 0; i < M1; ++i) {
    for (int j = 0; j < M2; ++j) {
      const int k = i * M2 + j;
      out.outer.col(k) << scale * a1 * z.col(i), scale * a2 * v.col(j);
      out.mu[k] = sum_pow / (dr * dr) * beta[i] * delta[j];
    }
  }
  const double norm = out.lambda.sum();
  out.lambda /= norm;
  out.mu /= norm;
  out.balanced = false;
  out.residual = decomposition_residual(out.inner, out.lambda, out.outer, out.mu, false);
  return out;
}

}  // namespace bm
