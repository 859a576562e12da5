#pragma once

// Dense two-phase simplex method: Bland's entering rule, Harris ratio test,
// and periodic refactorization from the original rows.
//
// Problems handled here are small (tens of variables, tens of rows), so a
// full tableau is used. Variables are nonnegative unless declared free.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "bm/errors.hpp"

namespace bm::lp {

enum class Relation { LessEqual, Equal, GreaterEqual };

/// Numerical: the final basis violates the original rows beyond tolerance.
enum class Status { Optimal, Infeasible, Unbounded, IterationLimit, Numerical };

struct Row {
  Eigen::VectorXd coeffs;
  Relation relation = Relation::Equal;
  double rhs = 0.0;
};

struct Problem {
  explicit Problem(int num_vars)
      : objective(Eigen::VectorXd::Zero(num_vars)), free(static_cast<std::size_t>(num_vars), false) {}

  int num_vars() const { return static_cast<int>(objective.size()); }

  void add_row(Eigen::VectorXd coeffs, Relation rel, double rhs) {
    if (coeffs.size() != objective.size())
      fail(ErrorCode::DimensionMismatch, "LP row width differs from variable count");
    rows.push_back(Row{std::move(coeffs), rel, rhs});
  }

  /// Minimized.
  Eigen::VectorXd objective;
  std::vector<bool> free;
  std::vector<Row> rows;
};

struct Options {
  double pivot_tol = 1e-11;
  double cost_tol = 1e-9;
  double feasibility_tol = 1e-9;
  /// Relative tolerance of the final check against the original rows.
  double check_tol = 1e-7;
  int max_iterations = 50000;
};

struct Result {
  Status status = Status::Infeasible;
  double value = std::numeric_limits<double>::quiet_NaN();
  Eigen::VectorXd x;
  /// Phase-one optimum: sum of artificial variables (0 when feasible).
  double infeasibility = 0.0;
  int iterations = 0;
};

namespace detail {

class Tableau {
 public:
  Tableau(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<std::size_t>((rows + 1) * (cols + 1)), 0.0) {}

  double& at(int r, int c) { return data_[static_cast<std::size_t>(r * (cols_ + 1) + c)]; }
  double at(int r, int c) const { return data_[static_cast<std::size_t>(r * (cols_ + 1) + c)]; }
  // Column `cols_` holds the right-hand side; row `rows_` holds reduced costs.
  double& rhs(int r) { return at(r, cols_); }
  double& cost(int c) { return at(rows_, c); }

  void pivot(int pr, int pc) {
    const double p = at(pr, pc);
    for (int c = 0; c <= cols_; ++c) at(pr, c) /= p;
    for (int r = 0; r <= rows_; ++r) {
      if (r == pr) continue;
      const double f = at(r, pc);
      if (f == 0.0) continue;
      for (int c = 0; c <= cols_; ++c) at(r, c) -= f * at(pr, c);
      at(r, pc) = 0.0;
    }
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

 private:
  int rows_;
  int cols_;
  std::vector<double> data_;
};

// Original rows [A | b] and the cost vector of the current phase. Rebuilds
// B^-1 [A | b] and the reduced costs for the current basis, which discards the
// round-off accumulated by successive pivots. Returns false for a singular basis.
struct Original {
  Eigen::MatrixXd Ab;
  Eigen::VectorXd cost;
};

inline bool refactor(Tableau& t, const std::vector<int>& basis, const Original& o) {
  const int m = t.rows();
  const int cols = t.cols();
  Eigen::MatrixXd B(m, m);
  for (int r = 0; r < m; ++r) B.col(r) = o.Ab.col(basis[static_cast<std::size_t>(r)]);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(B);
  if (!lu.isInvertible()) return false;
  const Eigen::MatrixXd T = lu.solve(o.Ab);
  if (!T.allFinite()) return false;
  Eigen::VectorXd cb(m);
  for (int r = 0; r < m; ++r) cb[r] = o.cost[basis[static_cast<std::size_t>(r)]];
  const Eigen::RowVectorXd red = -cb.transpose() * T;
  for (int r = 0; r < m; ++r)
    for (int c = 0; c <= cols; ++c) t.at(r, c) = T(r, c);
  for (int c = 0; c < cols; ++c) t.cost(c) = o.cost[c] + red[c];
  t.cost(cols) = red[cols];
  for (int r = 0; r < m; ++r) t.cost(basis[static_cast<std::size_t>(r)]) = 0.0;
  return true;
}

// Runs simplex iterations on columns [0, active_cols). A column whose only
// positive entries are round-off is skipped for the current step. Optimal and
// Unbounded verdicts are only accepted on a freshly refactored tableau.
inline constexpr double kHarrisTol = 1e-10;
inline constexpr int kRefactorEvery = 64;
inline constexpr double kPrimalTol = 1e-12;

/// With confirm_optimal false an Optimal verdict is returned without the
/// refactorization and dual cleanup.
inline Status iterate(Tableau& t, std::vector<int>& basis, int active_cols, const Options& opt, const Original& o,
                      int& iterations, bool confirm_optimal = true) {
  const int m = t.rows();
  std::vector<char> skipped(static_cast<std::size_t>(active_cols), 0);
  bool fresh = false;
  int since_refactor = 0;
  // A failed refactorization keeps the pivoted tableau; treat it as fresh.
  auto refresh = [&] {
    refactor(t, basis, o);
    fresh = true;
    since_refactor = 0;
    for (int r = 0; r < m; ++r)
      if (t.rhs(r) < 0.0 && t.rhs(r) > -1e-11) t.rhs(r) = 0.0;
  };
  while (true) {
    if (iterations >= opt.max_iterations) return Status::IterationLimit;
    int enter = -1;
    for (int c = 0; c < active_cols; ++c) {
      if (!skipped[static_cast<std::size_t>(c)] && t.cost(c) < -opt.cost_tol) {
        enter = c;
        break;
      }
    }
    if (enter < 0) {
      if (!fresh) {
        if (!confirm_optimal) return Status::Optimal;
        refresh();
        std::fill(skipped.begin(), skipped.end(), 0);
        continue;
      }
      // Dual feasible; a basic value driven negative by round-off is removed
      // with a dual simplex pivot before the basis is accepted.
      int row = -1;
      for (int r = 0; r < m; ++r)
        if (t.rhs(r) < -kPrimalTol && (row < 0 || t.rhs(r) < t.rhs(row))) row = r;
      if (row < 0) return Status::Optimal;
      int dual_enter = -1;
      double best = std::numeric_limits<double>::infinity();
      for (int c = 0; c < active_cols; ++c) {
        const double a = t.at(row, c);
        if (a >= -opt.pivot_tol) continue;
        const double ratio = std::max(t.cost(c), 0.0) / -a;
        if (ratio < best) {
          best = ratio;
          dual_enter = c;
        }
      }
      if (dual_enter < 0) return Status::Infeasible;
      t.pivot(row, dual_enter);
      basis[static_cast<std::size_t>(row)] = dual_enter;
      ++iterations;
      fresh = false;
      if (++since_refactor >= kRefactorEvery) refresh();
      continue;
    }
    double col_max = 0.0;
    for (int r = 0; r < m; ++r) col_max = std::max(col_max, std::abs(t.at(r, enter)));
    const double min_pivot = std::max(opt.pivot_tol, 1e-9 * col_max);
    // Harris ratio test: bound the step with rhs relaxed by a small tolerance,
    // then take the largest pivot among rows within that bound.
    bool any_positive = false;
    double bound = std::numeric_limits<double>::infinity();
    for (int r = 0; r < m; ++r) {
      const double a = t.at(r, enter);
      if (a > 0.0) any_positive = true;
      if (a <= min_pivot) continue;
      bound = std::min(bound, (std::max(t.rhs(r), 0.0) + kHarrisTol) / a);
    }
    int leave = -1;
    double best_pivot = 0.0;
    for (int r = 0; r < m; ++r) {
      const double a = t.at(r, enter);
      if (a <= min_pivot) continue;
      if (std::max(t.rhs(r), 0.0) / a > bound) continue;
      if (a > best_pivot || (a == best_pivot && basis[static_cast<std::size_t>(r)] < basis[static_cast<std::size_t>(leave)])) {
        best_pivot = a;
        leave = r;
      }
    }
    if (leave < 0) {
      if (!any_positive) {
        if (fresh) return Status::Unbounded;
        refresh();
        std::fill(skipped.begin(), skipped.end(), 0);
        continue;
      }
      skipped[static_cast<std::size_t>(enter)] = 1;
      continue;
    }
    t.pivot(leave, enter);
    basis[static_cast<std::size_t>(leave)] = enter;
    for (int r = 0; r < m; ++r)
      if (t.rhs(r) < 0.0 && t.rhs(r) > -1e-11) t.rhs(r) = 0.0;
    std::fill(skipped.begin(), skipped.end(), 0);
    ++iterations;
    fresh = false;
    if (++since_refactor >= kRefactorEvery) refresh();
  }
}

}  // namespace detail

inline Result solve(const Problem& problem, const Options& opt = {}) {
  const int n = problem.num_vars();
  // Column layout: split free vars into (+,-); then slack/surplus; then artificials.
  std::vector<int> plus_col(static_cast<std::size_t>(n)), minus_col(static_cast<std::size_t>(n), -1);
  int col = 0;
  for (int j = 0; j < n; ++j) {
    plus_col[static_cast<std::size_t>(j)] = col++;
    if (problem.free[static_cast<std::size_t>(j)]) minus_col[static_cast<std::size_t>(j)] = col++;
  }
  const int structural = col;
  const int m = static_cast<int>(problem.rows.size());

  struct Normalized {
    Eigen::VectorXd coeffs;
    Relation rel;
    double rhs;
  };
  std::vector<Normalized> rows;
  rows.reserve(static_cast<std::size_t>(m));
  int slack_count = 0;
  for (const auto& row : problem.rows) {
    Normalized nr{row.coeffs, row.relation, row.rhs};
    // Equilibrate: unit largest coefficient per row.
    const double big = nr.coeffs.cwiseAbs().maxCoeff();
    if (big > 0.0) {
      nr.coeffs /= big;
      nr.rhs /= big;
    }
    if (nr.rhs < 0) {
      nr.coeffs = -nr.coeffs;
      nr.rhs = -nr.rhs;
      if (nr.rel == Relation::LessEqual) nr.rel = Relation::GreaterEqual;
      else if (nr.rel == Relation::GreaterEqual) nr.rel = Relation::LessEqual;
    }
    if (nr.rel != Relation::Equal) ++slack_count;
    rows.push_back(std::move(nr));
  }
  int artificial_count = 0;
  for (const auto& r : rows)
    if (r.rel != Relation::LessEqual) ++artificial_count;

  const int slack_begin = structural;
  const int art_begin = slack_begin + slack_count;
  const int total = art_begin + artificial_count;

  detail::Tableau t(m, total);
  std::vector<int> basis(static_cast<std::size_t>(m), -1);
  int next_slack = slack_begin;
  int next_art = art_begin;
  for (int r = 0; r < m; ++r) {
    const auto& row = rows[static_cast<std::size_t>(r)];
    for (int j = 0; j < n; ++j) {
      t.at(r, plus_col[static_cast<std::size_t>(j)]) = row.coeffs[j];
      if (minus_col[static_cast<std::size_t>(j)] >= 0) t.at(r, minus_col[static_cast<std::size_t>(j)]) = -row.coeffs[j];
    }
    t.rhs(r) = row.rhs;
    if (row.rel == Relation::LessEqual) {
      t.at(r, next_slack) = 1.0;
      basis[static_cast<std::size_t>(r)] = next_slack++;
    } else {
      if (row.rel == Relation::GreaterEqual) t.at(r, next_slack++) = -1.0;
      t.at(r, next_art) = 1.0;
      basis[static_cast<std::size_t>(r)] = next_art++;
    }
  }

  detail::Original orig{Eigen::MatrixXd(m, total + 1), Eigen::VectorXd::Zero(total)};
  for (int r = 0; r < m; ++r)
    for (int c = 0; c <= total; ++c) orig.Ab(r, c) = t.at(r, c);

  Result result;
  int iterations = 0;

  // Phase one: minimize the sum of artificials.
  if (artificial_count > 0) {
    for (int c = 0; c <= total; ++c) t.cost(c) = 0.0;
    for (int c = art_begin; c < total; ++c) t.cost(c) = 1.0;
    for (int r = 0; r < m; ++r) {
      if (basis[static_cast<std::size_t>(r)] >= art_begin) {
        for (int c = 0; c <= total; ++c) t.cost(c) -= t.at(r, c);
      }
    }
    orig.cost.segment(art_begin, artificial_count).setOnes();
    // Phase two refactors before its own verdict, so a fresh tableau is only
    // needed here when infeasibility is about to be reported.
    Status s = detail::iterate(t, basis, total, opt, orig, iterations, false);
    if (s == Status::Optimal && -t.cost(total) > opt.feasibility_tol) s = detail::iterate(t, basis, total, opt, orig, iterations);
    if (s == Status::IterationLimit) {
      result.status = s;
      result.iterations = iterations;
      return result;
    }
    result.infeasibility = -t.cost(total);
    if (result.infeasibility > opt.feasibility_tol) {
      result.status = Status::Infeasible;
      result.iterations = iterations;
      return result;
    }
    // Drive remaining artificials out of the basis.
    for (int r = 0; r < m; ++r) {
      if (basis[static_cast<std::size_t>(r)] < art_begin) continue;
      int pc = -1;
      double best = 1e-9;
      for (int c = 0; c < art_begin; ++c) {
        if (std::abs(t.at(r, c)) > best) {
          best = std::abs(t.at(r, c));
          pc = c;
        }
      }
      if (pc >= 0) {
        t.pivot(r, pc);
        basis[static_cast<std::size_t>(r)] = pc;
      }
      // Otherwise the row is redundant; its artificial stays basic at zero and
      // is never allowed to re-enter since phase two ignores artificial columns.
    }
  }

  // Phase two.
  for (int c = 0; c <= total; ++c) t.cost(c) = 0.0;
  for (int j = 0; j < n; ++j) {
    t.cost(plus_col[static_cast<std::size_t>(j)]) = problem.objective[j];
    if (minus_col[static_cast<std::size_t>(j)] >= 0) t.cost(minus_col[static_cast<std::size_t>(j)]) = -problem.objective[j];
  }
  for (int r = 0; r < m; ++r) {
    const int b = basis[static_cast<std::size_t>(r)];
    const double cb = t.cost(b);
    if (cb == 0.0) continue;
    for (int c = 0; c <= total; ++c) t.cost(c) -= cb * t.at(r, c);
  }
  orig.cost.setZero();
  for (int j = 0; j < n; ++j) {
    orig.cost[plus_col[static_cast<std::size_t>(j)]] = problem.objective[j];
    if (minus_col[static_cast<std::size_t>(j)] >= 0) orig.cost[minus_col[static_cast<std::size_t>(j)]] = -problem.objective[j];
  }
  const Status s = detail::iterate(t, basis, art_begin, opt, orig, iterations);
  result.iterations = iterations;
  if (s != Status::Optimal) {
    result.status = s;
    return result;
  }

  Eigen::VectorXd xs = Eigen::VectorXd::Zero(total);
  for (int r = 0; r < m; ++r) xs[basis[static_cast<std::size_t>(r)]] = t.rhs(r);
  result.x.resize(n);
  for (int j = 0; j < n; ++j) {
    double v = xs[plus_col[static_cast<std::size_t>(j)]];
    if (minus_col[static_cast<std::size_t>(j)] >= 0) v -= xs[minus_col[static_cast<std::size_t>(j)]];
    result.x[j] = v;
  }
  result.value = problem.objective.dot(result.x);
  result.status = Status::Optimal;
  // Check the answer against the rows as given.
  const double x_scale = std::max(1.0, result.x.cwiseAbs().maxCoeff());
  for (const auto& row : problem.rows) {
    const double lhs = row.coeffs.dot(result.x);
    const double slack = opt.check_tol * (1.0 + std::abs(row.rhs) + row.coeffs.cwiseAbs().maxCoeff() * x_scale);
    const bool ok = row.relation == Relation::LessEqual      ? lhs <= row.rhs + slack
                    : row.relation == Relation::GreaterEqual ? lhs >= row.rhs - slack
                                                             : std::abs(lhs - row.rhs) <= slack;
    if (!ok) result.status = Status::Numerical;
  }
  for (int j = 0; j < n; ++j)
    if (!problem.free[static_cast<std::size_t>(j)] && result.x[j] < -opt.check_tol * x_scale) result.status = Status::Numerical;
  return result;
}

}  // namespace bm::lp
