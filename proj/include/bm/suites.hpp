#pragma once

// Randomized desk-scale checks of the cone and l1-sum theorems. Each case
// compares two engine estimates and, where the proof gives an explicit
// position, verifies that position as an inclusion chain.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "bm/body.hpp"
#include "bm/constructions.hpp"
#include "bm/distance.hpp"
#include "bm/parallel.hpp"
#include "bm/random.hpp"

namespace bm {

struct SuiteConfig {
  int cases = 10;
  std::uint64_t seed = 1;
  double tol = 0.03;
  int restarts = 200;
  int m = 1;
  /// Equilateral suite: family parameter N and family size.
  int N = 2;
  int count = 2;
  /// Witness chains are checked at rho = rhs + chain_margin.
  double chain_margin = 1e-9;
  unsigned threads = 0;
};

struct CaseResult {
  std::uint64_t seed = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
  bool pass = false;
  /// Set when the suite has an explicit upper-bound chain.
  std::optional<bool> witness_ok;
};

struct ReportSummary {
  int total = 0;
  int passed = 0;
  int failed = 0;
  double max_residual = 0.0;
  int witness_failures = 0;
  std::string note;
};

struct Report {
  std::string suite;
  std::vector<CaseResult> cases;
  ReportSummary summary;
};

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"thm-l1-sum",    "thm-simplex",     "thm-3d-cones",      "thm-sym-cones",
                                              "cor-embedding", "cor-equilateral", "question-l1-search"};
  return names;
}

namespace detail {

inline DistanceConfig engine_config(const SuiteConfig& cfg, std::uint64_t seed, bool symmetric) {
  DistanceConfig dc;
  dc.restarts = cfg.restarts;
  dc.seed = seed;
  dc.symmetric = symmetric;
  dc.threads = 1;
  return dc;
}

/// M (+) I_m for a planar witness M.
inline Mat block_lift(const Mat& M, int m) {
  const int n = static_cast<int>(M.rows());
  Mat out = Mat::Identity(n + m, n + m);
  out.topLeftCorner(n, n) = M;
  return out;
}

inline Vec random_apex(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> side(-0.5, 0.5), height(0.5, 1.5);
  Vec a(3);
  a << side(rng), side(rng), height(rng);
  return a;
}

/// Both sides agree within tol, or the left side is above the right one and
/// the proof's upper-bound chain holds (the engine missed a position).
inline bool equality_case_passes(double lhs, double rhs, double tol, std::optional<bool> witness) {
  if (std::abs(lhs - rhs) <= tol) return true;
  return lhs > rhs && witness.value_or(false);
}

inline CaseResult equality_case(std::uint64_t seed, double lhs, double rhs, double tol, std::optional<bool> witness) {
  CaseResult c;
  c.seed = seed;
  c.lhs = lhs;
  c.rhs = rhs;
  c.residual = std::abs(lhs - rhs);
  c.witness_ok = witness;
  c.pass = equality_case_passes(lhs, rhs, tol, witness);
  return c;
}

}  // namespace detail

// Single cases, also usable with hand-picked bodies.

/// d(X (+)_1 l_1^m, l_1^{n+m}) against d(X, l_1^n) for a planar symmetric X.
inline CaseResult l1_sum_case(const BodyExpr& X, int m, std::uint64_t seed, const SuiteConfig& cfg) {
  const int n = X.dim();
  const auto rhs = estimate_distance(X, cross_polytope(n), detail::engine_config(cfg, seed, true));
  std::vector<Vec> apexes;
  for (int k = 0; k < m; ++k) apexes.push_back(Vec::Unit(n + m, n + k));
  const BodyExpr C = double_cone(X, apexes);
  const auto lhs = estimate_distance(C, cross_polytope(n + m), detail::engine_config(cfg, seed, true));
  const LinearMap lift(detail::block_lift(rhs.witness.matrix(), m));
  const bool chain = verify_chain(C, cross_polytope(n + m), lift, rhs.upper + cfg.chain_margin, 1e-9);
  return detail::equality_case(seed, lhs.upper, rhs.upper, cfg.tol, chain);
}

/// d(conv(B u {a}), simplex^3) against d(B, simplex^2) for a planar B.
inline CaseResult simplex_cone_case(const BodyExpr& B, const Vec& apex, std::uint64_t seed, const SuiteConfig& cfg) {
  const BodyExpr tri = simplex_regular_centered(2);
  const BodyExpr tet = simplex_regular_centered(3);
  const auto rhs = estimate_distance(B, tri, detail::engine_config(cfg, seed, false));
  const BodyExpr C = cone(B, {apex});
  const auto lhs = estimate_distance(C, tet, detail::engine_config(cfg, seed, false));

  // B + u inside S = M(tri + v) inside rho (B + u); cone both over the apex
  // moved by u and send the tetrahedron onto conv(S u {apex + u}).
  Vec u3 = Vec::Zero(3);
  u3.head(2) = rhs.shift;
  const Mat S = rhs.witness.matrix() * (tri.polytope().vertices.colwise() + rhs.witness.pre());
  Mat sigma = Mat::Zero(3, 4);
  sigma.topLeftCorner(2, 3) = S;
  sigma.col(3) = apex + u3;
  Mat q = Mat::Ones(4, 4);
  q.topRows(3) = tet.polytope().vertices;
  const Mat affine = sigma * q.inverse();
  const Mat M3 = affine.leftCols(3);
  bool chain = false;
  try {
    const LinearMap T(M3, M3.inverse() * affine.col(3));
    const BodyExpr shifted = BodyExpr::polytope(C.polytope().vertices.colwise() + u3);
    chain = verify_chain(shifted, tet, T, rhs.upper + cfg.chain_margin, 1e-9);
  } catch (const Error&) {
    chain = false;
  }
  return detail::equality_case(seed, lhs.upper, rhs.upper, cfg.tol, chain);
}

/// d(conv(B1 u {a1}), conv(B2 u {a2})) against d(B1, B2) for planar
/// symmetric bases.
inline CaseResult cone_pair_case(const BodyExpr& B1, const BodyExpr& B2, const Vec& a1, const Vec& a2, std::uint64_t seed,
                                 const SuiteConfig& cfg) {
  const auto rhs = estimate_distance(B1, B2, detail::engine_config(cfg, seed, true));
  const BodyExpr C1 = cone(B1, {a1});
  const BodyExpr C2 = cone(B2, {a2});
  const auto lhs = estimate_distance(C1, C2, detail::engine_config(cfg, seed, false));
  // Shared apex: T maps the base plane by M and a2 onto a1.
  const Mat& M = rhs.witness.matrix();
  Mat T = Mat::Zero(3, 3);
  T.topLeftCorner(2, 2) = M;
  Vec base = Vec::Zero(3);
  base.head(2) = M * a2.head(2);
  T.col(2) = (a1 - base) / a2[2];
  bool chain = false;
  try {
    chain = verify_chain(C1, C2, LinearMap(T), rhs.upper + cfg.chain_margin, 1e-9);
  } catch (const Error&) {
    chain = false;
  }
  return detail::equality_case(seed, lhs.upper, rhs.upper, cfg.tol, chain);
}

/// d(X1 (+)_1 l_1^m, X2 (+)_1 l_1^m) against d(X1, X2).
inline CaseResult sym_cone_case(const BodyExpr& X1, const BodyExpr& X2, int m, std::uint64_t seed, const SuiteConfig& cfg) {
  const auto rhs = estimate_distance(X1, X2, detail::engine_config(cfg, seed, true));
  std::vector<Vec> apexes;
  for (int k = 0; k < m; ++k) apexes.push_back(Vec::Unit(2 + m, 2 + k));
  const BodyExpr C1 = double_cone(X1, apexes);
  const BodyExpr C2 = double_cone(X2, apexes);
  const auto lhs = estimate_distance(C1, C2, detail::engine_config(cfg, seed, true));
  const LinearMap lift(detail::block_lift(rhs.witness.matrix(), m));
  const bool chain = verify_chain(C1, C2, lift, rhs.upper + cfg.chain_margin, 1e-9);
  return detail::equality_case(seed, lhs.upper, rhs.upper, cfg.tol, chain);
}

namespace detail {

inline void summarize(Report& report, double tol) {
  auto& s = report.summary;
  s.total = static_cast<int>(report.cases.size());
  for (const auto& c : report.cases) {
    c.pass ? ++s.passed : ++s.failed;
    s.max_residual = std::max(s.max_residual, c.residual);
    if (c.witness_ok && !*c.witness_ok) ++s.witness_failures;
  }
  if (s.note.empty()) s.note = "tol " + std::to_string(tol);
}

inline Report equilateral_report(const SuiteConfig& cfg) {
  Report report;
  report.suite = "cor-equilateral";
  const auto bodies = equilateral_family(cfg.N, cfg.count);
  const int k = static_cast<int>(bodies.size());
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) pairs.emplace_back(i, j);
  std::vector<double> dist(pairs.size());
  parallel_for(
      pairs.size(),
      [&](std::size_t p) {
        const auto [i, j] = pairs[p];
        dist[p] = estimate_distance(bodies[static_cast<std::size_t>(i)], bodies[static_cast<std::size_t>(j)],
                                    engine_config(cfg, cfg.seed + p, true))
                      .upper;
      },
      cfg.threads);
  const double target = equilateral_target(cfg.N);
  double lo = kInf, hi = 0.0;
  for (double d : dist) lo = std::min(lo, d), hi = std::max(hi, d);
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    CaseResult c;
    c.seed = cfg.seed + p;
    c.lhs = dist[p];
    c.rhs = target;
    c.residual = std::max(dist[p] - lo, hi - dist[p]);
    c.pass = c.residual <= cfg.tol;
    report.cases.push_back(c);
  }
  report.summary.note = "experimental; pairwise spread " + std::to_string(pairs.empty() ? 0.0 : hi - lo) +
                        ", target 1/cos^2(pi/4N) = " + std::to_string(target);
  summarize(report, cfg.tol);
  return report;
}

}  // namespace detail

/// Runs a named suite. Case i uses seed cfg.seed + i; results are ordered by
/// seed regardless of scheduling.
inline Report theorem_suite(const std::string& name, const SuiteConfig& cfg) {
  const auto& names = suite_names();
  if (std::find(names.begin(), names.end(), name) == names.end()) fail(ErrorCode::UnknownSuite, "unknown suite '" + name + "'");
  if (cfg.cases < 0 || cfg.restarts < 1 || cfg.m < 1) fail(ErrorCode::InvalidBody, "cases, restarts and m must be positive");
  if (name == "cor-equilateral") return detail::equilateral_report(cfg);

  Report report;
  report.suite = name;
  report.cases.resize(static_cast<std::size_t>(cfg.cases));
  std::vector<std::string> notes(report.cases.size());
  parallel_for(
      report.cases.size(),
      [&](std::size_t i) {
        const std::uint64_t seed = cfg.seed + i;
        std::mt19937_64 rng(seed);
        CaseResult& out = report.cases[i];
        if (name == "thm-l1-sum") {
          out = l1_sum_case(random_symmetric_polygon(rng), cfg.m, seed, cfg);
        } else if (name == "thm-simplex") {
          // The theorem needs d(B, simplex) <= 2; redraw B until the engine agrees.
          for (;;) {
            const BodyExpr B = random_planar_polygon(rng);
            const auto d = estimate_distance(B, simplex_regular_centered(2), detail::engine_config(cfg, seed, false));
            if (d.upper > 2.0 + 1e-6) continue;
            out = simplex_cone_case(B, detail::random_apex(rng), seed, cfg);
            break;
          }
        } else if (name == "thm-3d-cones") {
          const BodyExpr B1 = random_symmetric_polygon(rng);
          const BodyExpr B2 = random_symmetric_polygon(rng);
          const Vec a1 = detail::random_apex(rng);
          out = cone_pair_case(B1, B2, a1, detail::random_apex(rng), seed, cfg);
        } else if (name == "cor-embedding") {
          const Vec e3 = Vec::Unit(3, 2);
          const BodyExpr B1 = random_symmetric_polygon(rng);
          out = cone_pair_case(B1, random_symmetric_polygon(rng), e3, e3, seed, cfg);
        } else if (name == "thm-sym-cones") {
          // Hypothesis: one of the bases is at least as far from l_1^2 as
          // the bases are from each other.
          for (;;) {
            const BodyExpr X1 = random_symmetric_polygon(rng);
            const BodyExpr X2 = random_symmetric_polygon(rng);
            const auto dc = detail::engine_config(cfg, seed, true);
            const double d12 = estimate_distance(X1, X2, dc).upper;
            const double d1 = estimate_distance(X1, cross_polytope(2), dc).upper;
            const double d2 = estimate_distance(X2, cross_polytope(2), dc).upper;
            if (std::max(d1, d2) < d12) continue;
            out = sym_cone_case(X1, X2, cfg.m, seed, cfg);
            break;
          }
        } else {
          // Open question: is d(X1, X2) <= max(d(X1, l_1^2), d(X2, l_1^2))?
          const BodyExpr X1 = random_symmetric_polygon(rng);
          const BodyExpr X2 = random_symmetric_polygon(rng);
          const auto dc = detail::engine_config(cfg, seed, true);
          out.seed = seed;
          out.lhs = estimate_distance(X1, X2, dc).upper;
          out.rhs = std::max(estimate_distance(X1, cross_polytope(2), dc).upper,
                             estimate_distance(X2, cross_polytope(2), dc).upper);
          out.residual = out.lhs - out.rhs;
          out.pass = out.residual <= cfg.tol;
        }
      },
      cfg.threads);

  if (name == "question-l1-search") {
    double best = -kInf;
    std::uint64_t best_seed = 0;
    int violations = 0;
    for (const auto& c : report.cases) {
      if (c.residual > best) best = c.residual, best_seed = c.seed;
      if (!c.pass) ++violations;
    }
    report.summary.note = "search only; best margin d12 - max(d1, d2) = " + std::to_string(best) + " at seed " +
                          std::to_string(best_seed) + "; candidates beyond tol: " + std::to_string(violations);
  }
  detail::summarize(report, cfg.tol);
  return report;
}

}  // namespace bm
