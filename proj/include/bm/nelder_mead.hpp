#pragma once

// Nelder-Mead simplex descent with dimension-adaptive coefficients
// (Gao and Han, 2012) and restarts from the incumbent after convergence.

#include <Eigen/Dense>

#include <algorithm>
#include <functional>
#include <numeric>
#include <vector>

namespace bm {

struct NelderMeadOptions {
  int max_iters = 2000;
  /// Converged when the spread of simplex values falls below this.
  double ftol = 1e-9;
  /// Converged when the simplex diameter falls below this.
  double xtol = 1e-10;
  /// Initial simplex edge per coordinate (scalar or per-coordinate).
  Eigen::VectorXd step;
  /// Fresh simplices built around the incumbent after convergence.
  int max_rebuilds = 4;
};

struct NelderMeadResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
};

inline NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x0,
                                    const NelderMeadOptions& opt) {
  using Eigen::VectorXd;
  const int n = static_cast<int>(x0.size());
  const double dn = n;
  const double alpha = 1.0;
  const double beta = 1.0 + 2.0 / dn;
  const double gamma = 0.75 - 1.0 / (2.0 * dn);
  const double delta = 1.0 - 1.0 / dn;

  NelderMeadResult res;
  res.x = x0;
  res.value = f(x0);
  res.evaluations = 1;
  VectorXd step = opt.step.size() == n ? opt.step : VectorXd::Constant(n, 0.1);

  std::vector<VectorXd> pts(static_cast<std::size_t>(n + 1));
  std::vector<double> vals(static_cast<std::size_t>(n + 1));
  std::vector<int> order(static_cast<std::size_t>(n + 1));
  auto eval = [&](const VectorXd& x) {
    ++res.evaluations;
    return f(x);
  };

  for (int rebuild = 0; rebuild <= opt.max_rebuilds && res.iterations < opt.max_iters; ++rebuild) {
    pts[0] = res.x;
    vals[0] = res.value;
    for (int k = 0; k < n; ++k) {
      pts[static_cast<std::size_t>(k + 1)] = res.x;
      pts[static_cast<std::size_t>(k + 1)][k] += step[k];
      vals[static_cast<std::size_t>(k + 1)] = eval(pts[static_cast<std::size_t>(k + 1)]);
    }
    const double start_value = res.value;
    while (res.iterations < opt.max_iters) {
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return vals[static_cast<std::size_t>(a)] < vals[static_cast<std::size_t>(b)]; });
      const auto best = static_cast<std::size_t>(order.front());
      const auto worst = static_cast<std::size_t>(order.back());
      const auto second = static_cast<std::size_t>(order[static_cast<std::size_t>(n - 1)]);
      double diam = 0.0;
      for (const auto& p : pts) diam = std::max(diam, (p - pts[best]).cwiseAbs().maxCoeff());
      if (vals[worst] - vals[best] <= opt.ftol * std::max(1.0, std::abs(vals[best])) && diam <= std::max(opt.xtol, 1e-3 * step.maxCoeff())) break;
      if (diam <= opt.xtol) break;
      ++res.iterations;

      VectorXd centroid = VectorXd::Zero(n);
      for (int k = 0; k <= n; ++k)
        if (static_cast<std::size_t>(k) != worst) centroid += pts[static_cast<std::size_t>(k)];
      centroid /= dn;

      const VectorXd xr = centroid + alpha * (centroid - pts[worst]);
      const double fr = eval(xr);
      if (fr < vals[best]) {
        const VectorXd xe = centroid + beta * (xr - centroid);
        const double fe = eval(xe);
        if (fe < fr) {
          pts[worst] = xe;
          vals[worst] = fe;
        } else {
          pts[worst] = xr;
          vals[worst] = fr;
        }
        continue;
      }
      if (fr < vals[second]) {
        pts[worst] = xr;
        vals[worst] = fr;
        continue;
      }
      bool shrink = false;
      if (fr < vals[worst]) {
        const VectorXd xc = centroid + gamma * (xr - centroid);
        const double fc = eval(xc);
        if (fc <= fr) {
          pts[worst] = xc;
          vals[worst] = fc;
        } else {
          shrink = true;
        }
      } else {
        const VectorXd xc = centroid - gamma * (centroid - pts[worst]);
        const double fc = eval(xc);
        if (fc < vals[worst]) {
          pts[worst] = xc;
          vals[worst] = fc;
        } else {
          shrink = true;
        }
      }
      if (shrink) {
        for (int k = 0; k <= n; ++k) {
          if (static_cast<std::size_t>(k) == best) continue;
          pts[static_cast<std::size_t>(k)] = pts[best] + delta * (pts[static_cast<std::size_t>(k)] - pts[best]);
          vals[static_cast<std::size_t>(k)] = eval(pts[static_cast<std::size_t>(k)]);
        }
      }
    }
    const auto it = std::min_element(vals.begin(), vals.end());
    const auto idx = static_cast<std::size_t>(it - vals.begin());
    if (vals[idx] < res.value) {
      res.value = vals[idx];
      res.x = pts[idx];
    }
    if (start_value - res.value <= opt.ftol * std::max(1.0, std::abs(res.value)) && rebuild > 0) break;
    step *= 0.5;
  }
  return res;
}

}  // namespace bm
