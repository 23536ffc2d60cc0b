// Derivative-free minimization (Nelder-Mead with dimension-adaptive
// coefficients).
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

namespace redset {

struct NelderMeadOptions {
  int max_iter = 2000;
  double initial_step = 0.2;
  double f_tol = 1e-13;  // stop when the simplex's value spread falls below this
  double x_tol = 1e-10;  // ... and its diameter below this
  int rebuilds = 3;      // fresh simplices around the incumbent after convergence
};

struct NelderMeadResult {
  Eigen::VectorXd x;
  double value = std::numeric_limits<double>::infinity();
  int iterations = 0;
  int evaluations = 0;
};

/// Minimizes f starting from x0. Non-finite values are treated as +infinity.
/// After the simplex collapses it is rebuilt around the best vertex (up to
/// `rebuilds` times) while the iteration budget lasts; the returned value
/// never exceeds f(x0).
inline NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                                    const Eigen::VectorXd& x0, const NelderMeadOptions& opt = {}) {
  const Eigen::Index n = x0.size();
  const double dn = static_cast<double>(n);
  const double alpha = 1.0;
  const double beta = 1.0 + 2.0 / dn;
  const double gamma = std::max(0.75 - 1.0 / (2.0 * dn), 0.5);
  const double delta = std::max(1.0 - 1.0 / dn, 0.5);

  NelderMeadResult res;
  auto eval = [&](const Eigen::VectorXd& x) {
    ++res.evaluations;
    const double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  std::vector<Eigen::VectorXd> pts;
  std::vector<double> vals;
  std::vector<std::size_t> order(static_cast<std::size_t>(n + 1));

  auto build = [&](const Eigen::VectorXd& center, double center_value, double step) {
    pts.assign(1, center);
    vals.assign(1, center_value);
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::VectorXd p = center;
      p(i) += (center(i) != 0.0 ? step * std::max(1.0, std::abs(center(i))) : step);
      vals.push_back(eval(p));
      pts.push_back(std::move(p));
    }
  };

  build(x0, eval(x0), opt.initial_step);
  int rebuilds_left = opt.rebuilds;
  double step = opt.initial_step;

  while (res.iterations < opt.max_iter) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[order.size() - 2];

    double diam = 0.0;
    for (const auto& p : pts) diam = std::max(diam, (p - pts[best]).cwiseAbs().maxCoeff());
    const bool flat = std::isfinite(vals[worst]) && vals[worst] - vals[best] <= opt.f_tol;
    if ((flat && diam <= opt.x_tol) || diam <= 1e-15) {
      if (rebuilds_left-- <= 0) break;
      step *= 0.1;
      const Eigen::VectorXd c = pts[best];
      build(c, vals[best], step);
      continue;
    }
    ++res.iterations;

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (std::size_t k = 0; k < pts.size(); ++k) {
      if (k != worst) centroid += pts[k];
    }
    centroid /= dn;

    const Eigen::VectorXd xr = centroid + alpha * (centroid - pts[worst]);
    const double fr = eval(xr);
    if (fr < vals[best]) {
      const Eigen::VectorXd xe = centroid + beta * (xr - centroid);
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
    const bool outside = fr < vals[worst];
    const Eigen::VectorXd xc =
        outside ? Eigen::VectorXd(centroid + gamma * (xr - centroid)) : Eigen::VectorXd(centroid - gamma * (centroid - pts[worst]));
    const double fc = eval(xc);
    if (fc < (outside ? fr : vals[worst])) {
      pts[worst] = xc;
      vals[worst] = fc;
      continue;
    }
    for (std::size_t k = 0; k < pts.size(); ++k) {
      if (k == best) continue;
      pts[k] = pts[best] + delta * (pts[k] - pts[best]);
      vals[k] = eval(pts[k]);
    }
  }

  const auto it = std::min_element(vals.begin(), vals.end());
  const auto idx = static_cast<std::size_t>(it - vals.begin());
  res.x = pts[idx];
  res.value = vals[idx];
  return res;
}

}  // namespace redset
