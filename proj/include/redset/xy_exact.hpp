// Closed-form ground-state energy density of the anisotropic XY chain via the
// complete elliptic integral of the second kind, plus the checks around it:
// the hypergeometric ODE residual and an empirical scale calibration against
// exact diagonalization.
#pragma once

#include "redset/lanczos.hpp"
#include "redset/parallel.hpp"
#include "redset/pauli.hpp"

#include <algorithm>
#include <cstdint>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace redset {

/// E(z) = int_0^{pi/2} sqrt(1 - z^2 sin^2 k) dk for modulus z in [0, 1], by
/// the arithmetic-geometric mean.
inline double elliptic_E_agm(double z) {
  if (!(z >= 0.0 && z <= 1.0)) throw std::domain_error("elliptic_E_agm: z must lie in [0, 1]");
  if (z == 1.0) return 1.0;
  double a = 1.0;
  double b = std::sqrt((1.0 - z) * (1.0 + z));
  double c = z;
  double weight = 0.5;
  double sum = weight * c * c;
  for (int n = 0; n < 64 && std::abs(c) > 1e-17 * a; ++n) {
    const double an = 0.5 * (a + b);
    c = 0.5 * (a - b);
    b = std::sqrt(a * b);
    a = an;
    weight *= 2.0;
    sum += weight * c * c;
  }
  const double k = std::numbers::pi / (2.0 * a);
  return k * (1.0 - sum);
}

/// -E(sqrt(1 - gamma^2)) / (4 pi). Even in gamma; the endpoints |gamma| = 1
/// are included by continuity.
inline double xy_energy_density_paper(double gamma) {
  if (!(std::abs(gamma) <= 1.0)) throw std::domain_error("xy_energy_density_paper: |gamma| must be <= 1");
  const double g = std::abs(gamma);
  const double z = std::sqrt((1.0 - g) * (1.0 + g));
  return -elliptic_E_agm(z) / (4.0 * std::numbers::pi);
}

/// h(gamma) = (1 - gamma) XX + (1 + gamma) YY.
inline PauliTwoBodyHamiltonian xy_hamiltonian(double gamma) {
  PauliTwoBodyHamiltonian h;
  h.set(Pauli::X, Pauli::X, 1.0 - gamma);
  h.set(Pauli::Y, Pauli::Y, 1.0 + gamma);
  return h;
}

struct XYPoint {
  double gamma = 0.0;
  double z_squared = 1.0;
  double eps_paper = 0.0;
  double eps_calibrated = 0.0;
};

inline XYPoint xy_point(double gamma, double scale) {
  XYPoint p;
  p.gamma = gamma;
  p.z_squared = (1.0 - std::abs(gamma)) * (1.0 + std::abs(gamma));
  p.eps_paper = xy_energy_density_paper(gamma);
  p.eps_calibrated = scale * p.eps_paper;
  return p;
}

struct HypergeometricParams {
  double a = -0.5;
  double b = 0.5;
  double c = 1.0;
};

/// |m(1-m) E'' + (c - (a+b+1) m) E' - a b E| with E regarded as a function of
/// the parameter m = z^2, derivatives by central differences of width `step`.
inline double hypergeom_ode_residual(double m, double step, HypergeometricParams p = {}) {
  if (!(step > 0.0)) throw std::invalid_argument("hypergeom_ode_residual: step must be positive");
  if (m < 10.0 * step || m > 1.0 - 10.0 * step) {
    throw std::domain_error("hypergeom_ode_residual: m too close to the endpoints");
  }
  auto e = [](double mm) { return elliptic_E_agm(std::sqrt(mm)); };
  const double e0 = e(m);
  const double ep = e(m + step);
  const double em = e(m - step);
  const double d1 = (ep - em) / (2.0 * step);
  const double d2 = (ep - 2.0 * e0 + em) / (step * step);
  return std::abs(m * (1.0 - m) * d2 + (p.c - (p.a + p.b + 1.0) * m) * d1 - p.a * p.b * e0);
}

struct CalibrationEntry {
  double gamma = 0.0;
  std::vector<double> energy_per_bond;  // one per N in CalibrationResult::n_used
  double extrapolated = 0.0;            // Richardson in 1/N^2 on the two largest N
  double uncertainty = 0.0;             // |extrapolated - largest-N value|
  double eps_paper = 0.0;
  double scale = 0.0;                   // extrapolated / eps_paper for this gamma alone
  double residual = 0.0;                // |extrapolated - s * eps_paper|
};

struct CalibrationResult {
  double s = 0.0;
  std::vector<int> n_used;
  std::vector<CalibrationEntry> entries;
  double max_residual = 0.0;
  bool reliable = true;  // every residual <= 1e-2 |s eps_paper|
};

inline const std::vector<double>& default_calibration_gammas() {
  static const std::vector<double> g{0.0, 0.2, 0.4, 0.5, 0.6, 0.8, 0.9};
  return g;
}

/// Weighted least-squares fit of s in ED(gamma) ~ s * eps_paper(gamma). ED is
/// the ground energy per bond of the periodic chain (even N), whose leading
/// finite-size correction is O(1/N^2), extrapolated from the two largest N.
/// Each gamma is weighted by the inverse square of its extrapolation
/// uncertainty, so gapped points, which converge exponentially in N, fix s.
inline CalibrationResult calibrate_scale(const std::vector<double>& gammas, const std::vector<int>& n_list,
                                         std::uint64_t seed = 1) {
  if (gammas.empty()) throw std::invalid_argument("calibrate_scale: no gamma values");
  if (n_list.size() < 2) throw std::invalid_argument("calibrate_scale: need at least two chain lengths");
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] < 4 || n_list[i] > 16) throw std::invalid_argument("calibrate_scale: N must lie in [4, 16]");
    if (n_list[i] % 2 != 0) throw std::invalid_argument("calibrate_scale: N must be even");
    if (i > 0 && n_list[i] <= n_list[i - 1]) throw std::invalid_argument("calibrate_scale: N list must increase");
  }
  for (double g : gammas) {
    if (!(std::abs(g) <= 1.0)) throw std::invalid_argument("calibrate_scale: |gamma| must be <= 1");
  }
  CalibrationResult out;
  out.n_used = n_list;
  out.entries.resize(gammas.size());
  const std::size_t cells = gammas.size() * n_list.size();
  std::vector<double> energies(cells);
  parallel_for(cells, [&](std::size_t idx) {
    const double g = gammas[idx / n_list.size()];
    const int n = n_list[idx % n_list.size()];
    const auto ring = ChainOperator::ring(pauli_to_matrix(xy_hamiltonian(g)), n);
    const auto res = lanczos_ground(ring.as_map(), ring.dim(), seed);
    energies[idx] = res.lambda_min / n;
  });

  double num = 0.0, den = 0.0;
  for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
    auto& e = out.entries[gi];
    e.gamma = gammas[gi];
    e.energy_per_bond.assign(energies.begin() + static_cast<std::ptrdiff_t>(gi * n_list.size()),
                             energies.begin() + static_cast<std::ptrdiff_t>((gi + 1) * n_list.size()));
    const std::size_t k = n_list.size();
    const double a1 = static_cast<double>(n_list[k - 2]) * n_list[k - 2];
    const double a2 = static_cast<double>(n_list[k - 1]) * n_list[k - 1];
    const double e1 = e.energy_per_bond[k - 2], e2 = e.energy_per_bond[k - 1];
    e.extrapolated = (a2 * e2 - a1 * e1) / (a2 - a1);
    e.uncertainty = std::abs(e.extrapolated - e2);
    e.eps_paper = xy_energy_density_paper(e.gamma);
    e.scale = e.extrapolated / e.eps_paper;
    const double sigma = std::max(e.uncertainty, 1e-12 * std::abs(e.extrapolated));
    const double w = 1.0 / (sigma * sigma);
    num += w * e.extrapolated * e.eps_paper;
    den += w * e.eps_paper * e.eps_paper;
  }
  out.s = num / den;
  for (auto& e : out.entries) {
    e.residual = std::abs(e.extrapolated - out.s * e.eps_paper);
    out.max_residual = std::max(out.max_residual, e.residual);
    if (e.residual > 1e-2 * std::abs(out.s * e.eps_paper)) out.reliable = false;
  }
  return out;
}

}  // namespace redset
