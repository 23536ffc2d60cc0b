// Numerical search for low-degree polynomial relations p(y, x) = 0 between
// sampled values y = f(x). A small singular value of the column-normalized
// monomial matrix indicates an approximate relation. This is evidence only;
// it never decides algebraicity.
#pragma once

#include "redset/xy_exact.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace redset {

inline constexpr double kRelationThreshold = 1e-8;

struct Sample {
  double x = 0.0;
  double y = 0.0;
};

struct RelationSearchResult {
  int degree = 0;
  double sigma_min = 0.0;
  RVector best_coeffs;  // in the column-normalized monomial basis
  double residual_max = 0.0;
  bool relation_found = false;
  bool evidence_only = true;
};

/// Exponent pairs (a, b) of y^a x^b with a + b <= degree, ordered by total
/// degree so that lower-degree sets are prefixes of higher ones.
inline std::vector<std::pair<int, int>> monomials(int degree) {
  std::vector<std::pair<int, int>> out;
  for (int t = 0; t <= degree; ++t) {
    for (int a = 0; a <= t; ++a) out.emplace_back(a, t - a);
  }
  return out;
}

inline RelationSearchResult relation_search(const std::vector<Sample>& samples, int degree,
                                            const std::vector<Sample>& holdout) {
  if (degree < 1) throw std::invalid_argument("relation_search: degree must be >= 1");
  const auto mono = monomials(degree);
  const auto cols = static_cast<Eigen::Index>(mono.size());
  const auto rows = static_cast<Eigen::Index>(samples.size());
  if (rows < 2 * cols) {
    throw std::invalid_argument("relation_search: need at least " + std::to_string(2 * cols) + " samples for degree " +
                                std::to_string(degree));
  }
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (std::size_t j = i + 1; j < samples.size(); ++j) {
      if (samples[i].x == samples[j].x) throw std::invalid_argument("relation_search: x values must be distinct");
    }
  }

  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& s = samples[static_cast<std::size_t>(i)];
    for (Eigen::Index k = 0; k < cols; ++k) {
      const auto [a, b] = mono[static_cast<std::size_t>(k)];
      m(i, k) = std::pow(s.y, a) * std::pow(s.x, b);
    }
  }
  const RVector norms = m.colwise().norm().transpose();
  for (Eigen::Index k = 0; k < cols; ++k) {
    if (norms(k) > 0.0) m.col(k) /= norms(k);
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinV);
  RelationSearchResult res;
  res.degree = degree;
  res.sigma_min = svd.singularValues()(cols - 1);
  res.best_coeffs = svd.matrixV().col(cols - 1);

  for (const auto& s : holdout) {
    double v = 0.0;
    for (Eigen::Index k = 0; k < cols; ++k) {
      const auto [a, b] = mono[static_cast<std::size_t>(k)];
      if (norms(k) > 0.0) v += res.best_coeffs(k) * std::pow(s.y, a) * std::pow(s.x, b) / norms(k);
    }
    res.residual_max = std::max(res.residual_max, std::abs(v));
  }
  res.relation_found = res.sigma_min < kRelationThreshold && res.residual_max < kRelationThreshold;
  return res;
}

enum class ProbeTarget { eps_paper, eps_calibrated, control_x2, control_sqrt, control_exp };

inline const char* to_string(ProbeTarget t) {
  switch (t) {
    case ProbeTarget::eps_paper: return "eps_paper";
    case ProbeTarget::eps_calibrated: return "eps_calibrated";
    case ProbeTarget::control_x2: return "control_x2";
    case ProbeTarget::control_sqrt: return "control_sqrt";
    case ProbeTarget::control_exp: return "control_exp";
  }
  return "?";
}

inline ProbeTarget probe_target_from_string(const std::string& s) {
  for (auto t : {ProbeTarget::eps_paper, ProbeTarget::eps_calibrated, ProbeTarget::control_x2,
                 ProbeTarget::control_sqrt, ProbeTarget::control_exp}) {
    if (s == to_string(t)) return t;
  }
  throw std::invalid_argument("unknown probe target '" + s + "'");
}

/// Sampling interval: gamma in [0.1, 0.9] for the XY energies, [0, 1] for controls.
inline std::pair<double, double> probe_interval(ProbeTarget t) {
  if (t == ProbeTarget::eps_paper || t == ProbeTarget::eps_calibrated) return {0.1, 0.9};
  return {0.0, 1.0};
}

inline double probe_function(ProbeTarget t, double x, double scale) {
  switch (t) {
    case ProbeTarget::eps_paper: return xy_energy_density_paper(x);
    case ProbeTarget::eps_calibrated: return scale * xy_energy_density_paper(x);
    case ProbeTarget::control_x2: return x * x;
    case ProbeTarget::control_sqrt: return std::sqrt(1.0 + x);
    case ProbeTarget::control_exp: return std::exp(x);
  }
  return 0.0;
}

/// Chebyshev nodes cos(pi (k + u) / n) mapped to [lo, hi], ascending. Seed 0
/// gives the classical nodes (u = 1/2); other seeds draw the phase u in (0, 1).
inline std::vector<double> chebyshev_nodes(int n, double lo, double hi, std::uint64_t seed) {
  double u = 0.5;
  if (seed != 0) {
    std::mt19937_64 rng(seed);
    u = std::uniform_real_distribution<double>(0.05, 0.95)(rng);
  }
  std::vector<double> x(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    x[static_cast<std::size_t>(k)] = 0.5 * (lo + hi) + 0.5 * (hi - lo) * std::cos(std::numbers::pi * (k + u) / n);
  }
  std::sort(x.begin(), x.end());
  return x;
}

struct ProbeRow {
  ProbeTarget target;
  RelationSearchResult result;
};

/// One relation search per degree 1..max_degree on the same samples: even
/// indexed nodes are fitted, odd indexed nodes form the holdout.
inline std::vector<ProbeRow> probe_sweep(ProbeTarget target, int max_degree, int n_samples, std::uint64_t seed,
                                         double scale = 1.0) {
  const auto [lo, hi] = probe_interval(target);
  const auto nodes = chebyshev_nodes(n_samples, lo, hi, seed);
  std::vector<Sample> fit, holdout;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    Sample s{nodes[k], probe_function(target, nodes[k], scale)};
    (k % 2 == 0 ? fit : holdout).push_back(s);
  }
  std::vector<ProbeRow> rows;
  for (int deg = 1; deg <= max_degree; ++deg) rows.push_back({target, relation_search(fit, deg, holdout)});
  return rows;
}

}  // namespace redset
