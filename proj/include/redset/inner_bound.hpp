// Inner hierarchy: energies of two-site states generated by uniform MPS of
// bond dimension D. Every such state extends to a translation-invariant
// infinite chain, so each value is an upper bound on the energy density.
#pragma once

#include "redset/hermitian.hpp"
#include "redset/mps.hpp"
#include "redset/nelder_mead.hpp"
#include "redset/parallel.hpp"
#include "redset/pauli.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace redset {

/// tr(rho_2(A) h), computed without materializing a DensityMatrix.
inline double mps_energy(const UniformMPS& a, const FixedPointPair& fp, const CMatrix& h) {
  const int d = a.d;
  const int dd = d * d;
  std::vector<CMatrix> left(static_cast<std::size_t>(dd)), right(static_cast<std::size_t>(dd));
  for (int s = 0; s < d; ++s) {
    for (int t = 0; t < d; ++t) {
      const CMatrix p = a.tensors[s] * a.tensors[t];
      left[s * d + t] = fp.l * p;
      right[s * d + t] = fp.r * p.adjoint();
    }
  }
  cplx energy{0.0, 0.0};
  double norm = 0.0;
  for (int i = 0; i < dd; ++i) {
    for (int j = 0; j < dd; ++j) {
      const cplx rho_ij = (left[i] * right[j]).trace();
      energy += rho_ij * h(j, i);
      if (i == j) norm += rho_ij.real();
    }
  }
  if (!(norm > 1e-14)) throw DegenerateTransferError("two-site state has vanishing norm");
  return energy.real() / norm;
}

struct MpsOptions {
  int restarts = 16;
  std::uint64_t seed = 1;
  NelderMeadOptions search{2000, 0.2, 1e-13, 1e-10, 3};
  FixedPointOptions search_fixed_point{1e-11, 5000, false};
  FixedPointOptions final_fixed_point{};  // strict, with degeneracy check
  int degenerate_retries = 5;
  double perturbation = 1e-6;
};

struct MpsBound {
  double value = std::numeric_limits<double>::infinity();
  UniformMPS tensors;
  int restart = -1;  // index of the winning restart
};

namespace detail {

/// Energy of `a` under strict fixed-point settings. Degenerate tensors are
/// perturbed by small Gaussian noise and retried; nullopt if all fail.
inline std::optional<std::pair<double, UniformMPS>> validated_energy(UniformMPS a, const CMatrix& h,
                                                                     const MpsOptions& opt,
                                                                     std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, opt.perturbation);
  for (int attempt = 0; attempt <= opt.degenerate_retries; ++attempt) {
    try {
      const auto fp = transfer_fixed_points(a, opt.final_fixed_point);
      return std::make_pair(mps_energy(a, fp, h), a);
    } catch (const DegenerateTransferError&) {
      RVector p = a.parameters();
      for (Eigen::Index k = 0; k < p.size(); ++k) p(k) += noise(rng);
      a = UniformMPS::from_parameters(a.d, a.bond_dim, p);
    } catch (const std::invalid_argument&) {
      return std::nullopt;
    }
  }
  return std::nullopt;
}

inline MpsBound optimize_bond_dimension(const CMatrix& h, int d, int D, const std::optional<UniformMPS>& seed_state,
                                        const MpsOptions& opt) {
  const int restarts = std::max(1, opt.restarts);
  std::vector<MpsBound> results(static_cast<std::size_t>(restarts));

  parallel_for(static_cast<std::size_t>(restarts), [&](std::size_t k) {
    const std::uint64_t rs = derive_seed(opt.seed, static_cast<std::uint64_t>(D) * 1000003ULL + k);
    UniformMPS start = (k == 0 && seed_state) ? seed_state->embedded(D) : UniformMPS::random(d, D, rs);

    std::optional<FixedPointPair> warm;
    auto objective = [&](const RVector& p) {
      const auto a = UniformMPS::from_parameters(d, D, p);
      try {
        auto fp = transfer_fixed_points(a, opt.search_fixed_point, warm ? &*warm : nullptr);
        const double e = mps_energy(a, fp, h);
        warm = std::move(fp);
        return e;
      } catch (const std::exception&) {
        return std::numeric_limits<double>::infinity();
      }
    };
    const auto nm = nelder_mead(objective, start.parameters(), opt.search);
    auto checked = validated_energy(UniformMPS::from_parameters(d, D, nm.x), h, opt, rs ^ 0x5bd1e995ULL);
    MpsBound& out = results[k];
    out.restart = static_cast<int>(k);
    if (checked) {
      out.value = checked->first;
      out.tensors = std::move(checked->second);
    }
  });

  MpsBound best;
  // The unoptimized embedding of the previous level keeps the hierarchy monotone.
  if (seed_state) {
    if (auto checked = validated_energy(seed_state->embedded(D), h, opt, opt.seed)) {
      best.value = checked->first;
      best.tensors = std::move(checked->second);
      best.restart = 0;
    }
  }
  for (auto& r : results) {
    if (r.value < best.value) best = std::move(r);
  }
  if (!std::isfinite(best.value)) {
    throw std::runtime_error("MPS optimization: all restarts rejected at D=" + std::to_string(D));
  }
  return best;
}

}  // namespace detail

/// Upper bounds for D = 1..max_bond_dim. Restart 0 at each D > 1 starts from
/// the best tensor of D-1 padded with zeros, so the sequence is non-increasing.
inline std::vector<MpsBound> mps_upper_bound_sequence(const PauliTwoBodyHamiltonian& h, int max_bond_dim,
                                                      const MpsOptions& opt = {}) {
  if (max_bond_dim < 1 || max_bond_dim > 8) throw std::invalid_argument("bond dimension must be in [1, 8]");
  const CMatrix hm = pauli_to_matrix(h).matrix();
  std::vector<MpsBound> out;
  std::optional<UniformMPS> prev;
  for (int D = 1; D <= max_bond_dim; ++D) {
    out.push_back(detail::optimize_bond_dimension(hm, 2, D, prev, opt));
    prev = out.back().tensors;
  }
  return out;
}

inline MpsBound energy_upper_bound_mps(const PauliTwoBodyHamiltonian& h, int bond_dim, const MpsOptions& opt = {}) {
  return mps_upper_bound_sequence(h, bond_dim, opt).back();
}

/// Best translation-invariant product state sigma (x) sigma (x) ... with
/// sigma pure.
inline double product_state_bound(const PauliTwoBodyHamiltonian& h, int restarts = 16, std::uint64_t seed = 1) {
  const CMatrix hm = pauli_to_matrix(h).matrix();
  std::vector<double> best(static_cast<std::size_t>(std::max(1, restarts)),
                           std::numeric_limits<double>::infinity());
  parallel_for(best.size(), [&](std::size_t k) {
    std::mt19937_64 rng(derive_seed(seed, k));
    std::normal_distribution<double> g(0.0, 1.0);
    RVector x0(4);
    for (Eigen::Index i = 0; i < 4; ++i) x0(i) = g(rng);
    auto objective = [&](const RVector& p) {
      const Eigen::Vector2cd psi(cplx(p(0), p(1)), cplx(p(2), p(3)));
      const double n2 = psi.squaredNorm();
      if (!(n2 > 1e-12)) return std::numeric_limits<double>::infinity();
      Eigen::Vector4cd pp;
      pp << psi(0) * psi(0), psi(0) * psi(1), psi(1) * psi(0), psi(1) * psi(1);
      return (pp.adjoint() * hm * pp)(0, 0).real() / (n2 * n2);
    };
    best[k] = nelder_mead(objective, x0, {2000, 0.3, 1e-15, 1e-12, 3}).value;
  });
  return *std::min_element(best.begin(), best.end());
}

}  // namespace redset
