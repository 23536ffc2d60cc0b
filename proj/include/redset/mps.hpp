// Uniform (translation-invariant) matrix product states and their two-site
// reduced states.
#pragma once

#include "redset/hermitian.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

namespace redset {

/// d bond matrices A_s of size D x D.
struct UniformMPS {
  int d = 2;
  int bond_dim = 1;
  std::vector<CMatrix> tensors;

  UniformMPS() = default;
  UniformMPS(int d_, int D, std::vector<CMatrix> a) : d(d_), bond_dim(D), tensors(std::move(a)) {
    if (d < 2 || D < 1) throw std::invalid_argument("UniformMPS: bad dimensions");
    if (static_cast<int>(tensors.size()) != d) throw std::invalid_argument("UniformMPS: need d tensors");
    for (const auto& t : tensors) {
      if (t.rows() != D || t.cols() != D) throw std::invalid_argument("UniformMPS: tensor shape mismatch");
    }
  }

  /// Number of real parameters, 2 d D^2.
  static int parameter_count(int d, int D) { return 2 * d * D * D; }

  static UniformMPS from_parameters(int d, int D, const RVector& p) {
    if (p.size() != parameter_count(d, D)) throw std::invalid_argument("UniformMPS: parameter length");
    std::vector<CMatrix> a(static_cast<std::size_t>(d), CMatrix(D, D));
    Eigen::Index k = 0;
    for (int s = 0; s < d; ++s) {
      for (int i = 0; i < D; ++i) {
        for (int j = 0; j < D; ++j, k += 2) a[static_cast<std::size_t>(s)](i, j) = cplx(p(k), p(k + 1));
      }
    }
    return {d, D, std::move(a)};
  }

  RVector parameters() const {
    RVector p(parameter_count(d, bond_dim));
    Eigen::Index k = 0;
    for (const auto& t : tensors) {
      for (int i = 0; i < bond_dim; ++i) {
        for (int j = 0; j < bond_dim; ++j, k += 2) {
          p(k) = t(i, j).real();
          p(k + 1) = t(i, j).imag();
        }
      }
    }
    return p;
  }

  /// Pads every tensor with zeros to bond dimension D >= bond_dim. The
  /// generated state is unchanged.
  UniformMPS embedded(int D) const {
    if (D < bond_dim) throw std::invalid_argument("UniformMPS::embedded: smaller bond dimension");
    std::vector<CMatrix> a;
    for (const auto& t : tensors) {
      CMatrix big = CMatrix::Zero(D, D);
      big.topLeftCorner(bond_dim, bond_dim) = t;
      a.push_back(std::move(big));
    }
    return {d, D, std::move(a)};
  }

  /// Entries drawn i.i.d. from N(0, 1/D) (real and imaginary parts).
  static UniformMPS random(int d, int D, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0 / std::sqrt(static_cast<double>(D)));
    RVector p(parameter_count(d, D));
    for (Eigen::Index k = 0; k < p.size(); ++k) p(k) = g(rng);
    return from_parameters(d, D, p);
  }
};

/// X -> sum_s A_s X A_s^dagger.
inline CMatrix transfer(const UniformMPS& a, const CMatrix& x) {
  CMatrix out = CMatrix::Zero(a.bond_dim, a.bond_dim);
  for (const auto& t : a.tensors) out.noalias() += t * x * t.adjoint();
  return out;
}

/// X -> sum_s A_s^dagger X A_s.
inline CMatrix transfer_adjoint(const UniformMPS& a, const CMatrix& x) {
  CMatrix out = CMatrix::Zero(a.bond_dim, a.bond_dim);
  for (const auto& t : a.tensors) out.noalias() += t.adjoint() * x * t;
  return out;
}

/// Leading right/left fixed points of the transfer map, with trace(l r) = 1.
struct FixedPointPair {
  CMatrix l;
  CMatrix r;
  double lambda = 1.0;  // spectral radius of the transfer map
  double residual = 0.0;
};

class DegenerateTransferError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline CMatrix psd_part(const CMatrix& x) {
  const CMatrix h = (x + x.adjoint()) * 0.5;
  if (h.rows() == 1) return CMatrix::Constant(1, 1, std::max(h(0, 0).real(), 0.0));
  const auto eig = hermitian_eig(h);
  CMatrix out = eig.vectors * eig.values.cwiseMax(0.0).asDiagonal() * eig.vectors.adjoint();
  return (out + out.adjoint()) * 0.5;
}

struct PowerResult {
  CMatrix x;
  double lambda = 0.0;
  double residual = 0.0;
  bool converged = false;
};

/// Lazy power iteration X <- (X + M(X)/lambda)/2 on trace-one Hermitian
/// matrices. The averaging maps peripheral eigenvalues other than lambda
/// strictly inside the unit disc, so periodic transfer maps still converge.
/// M is completely positive, so iterates stay PSD up to rounding; the
/// returned fixed point is PSD-projected.
template <class Map>
PowerResult lazy_power_iteration(const Map& map, CMatrix x, double tol, int max_iter) {
  PowerResult res;
  x /= x.trace().real();
  for (int it = 0; it < max_iter; ++it) {
    const CMatrix mx = map(x);
    const double lam = mx.trace().real();
    if (!(lam > 0.0) || !std::isfinite(lam)) return res;
    const CMatrix img = mx / lam;
    res.residual = (img - x).norm();
    if (res.residual < tol) {
      x = psd_part(x);
      res.x = x / x.trace().real();
      res.lambda = lam;
      res.converged = true;
      return res;
    }
    x = (x + img) * 0.5;
    x = (x + x.adjoint()).eval() * 0.5;
    const double tr = x.trace().real();
    if (!(tr > 0.0)) return res;
    x /= tr;
  }
  return res;
}

}  // namespace detail

struct FixedPointOptions {
  double tol = 1e-12;
  int max_iter = 20'000;
  bool check_degeneracy = true;
};

/// Power iteration for the leading fixed points. With the degeneracy check,
/// each side is also iterated from a second, generic starting point; if the
/// two runs reach different fixed points the leading eigenvalue is
/// degenerate and the tensor is rejected. `warm` seeds the first run.
inline FixedPointPair transfer_fixed_points(const UniformMPS& a, const FixedPointOptions& opt = {},
                                            const FixedPointPair* warm = nullptr) {
  const int D = a.bond_dim;
  bool nonzero = false;
  for (const auto& t : a.tensors) nonzero = nonzero || t.norm() > 0.0;
  if (!nonzero) throw std::invalid_argument("transfer_fixed_points: all tensors are zero");

  auto right = [&](const CMatrix& x) { return transfer(a, x); };
  auto left = [&](const CMatrix& x) { return transfer_adjoint(a, x); };
  const CMatrix id = CMatrix::Identity(D, D);
  const bool use_warm = warm && warm->r.rows() == D && warm->l.rows() == D;
  // Warm starts are mixed with the identity so they stay positive definite.
  const CMatrix r0 = use_warm ? CMatrix(warm->r / warm->r.trace().real() + 1e-3 * id) : id;
  const CMatrix l0 = use_warm ? CMatrix(warm->l / warm->l.trace().real() + 1e-3 * id) : id;

  auto r1 = detail::lazy_power_iteration(right, r0, opt.tol, opt.max_iter);
  auto l1 = detail::lazy_power_iteration(left, l0, opt.tol, opt.max_iter);
  if (!r1.converged || !l1.converged) {
    throw DegenerateTransferError("transfer fixed-point iteration did not converge");
  }
  if (opt.check_degeneracy && D > 1) {
    CMatrix alt(D, D);
    for (int i = 0; i < D; ++i) {
      for (int j = 0; j < D; ++j) alt(i, j) = cplx(1.0 / (1.0 + i + j), 0.3 * (i - j) / D);
    }
    alt = alt * alt.adjoint() + 0.1 * id;
    auto r2 = detail::lazy_power_iteration(right, alt, opt.tol, opt.max_iter);
    auto l2 = detail::lazy_power_iteration(left, alt, opt.tol, opt.max_iter);
    const double gate = std::max(1e-8, 1e3 * opt.tol);
    if (!r2.converged || !l2.converged || (r1.x - r2.x).norm() > gate || (l1.x - l2.x).norm() > gate) {
      throw DegenerateTransferError("degenerate leading transfer eigenvalue");
    }
  }

  FixedPointPair fp;
  fp.lambda = 0.5 * (r1.lambda + l1.lambda);
  fp.r = r1.x;
  const double overlap = (l1.x * r1.x).trace().real();
  if (!(overlap > 1e-14)) throw DegenerateTransferError("fixed points have vanishing overlap");
  fp.l = l1.x / overlap;
  fp.residual = std::max(r1.residual, l1.residual);
  return fp;
}

/// Two-site reduced state rho[(s,t),(s',t')] = tr(l A_s A_t r (A_s' A_t')^dagger),
/// normalized to unit trace.
inline DensityMatrix two_site_reduced_state(const UniformMPS& a, const FixedPointPair& fp) {
  const int d = a.d;
  const int dd = d * d;
  std::vector<CMatrix> prod(static_cast<std::size_t>(dd));
  for (int s = 0; s < d; ++s) {
    for (int t = 0; t < d; ++t) prod[static_cast<std::size_t>(s * d + t)] = a.tensors[s] * a.tensors[t];
  }
  std::vector<CMatrix> left(static_cast<std::size_t>(dd)), right(static_cast<std::size_t>(dd));
  for (int k = 0; k < dd; ++k) {
    left[k] = fp.l * prod[k];
    right[k] = fp.r * prod[k].adjoint();
  }
  CMatrix rho(dd, dd);
  for (int i = 0; i < dd; ++i) {
    for (int j = 0; j < dd; ++j) rho(i, j) = (left[i] * right[j]).trace();
  }
  const double tr = rho.trace().real();
  if (!(tr > 1e-14)) throw DegenerateTransferError("two-site state has vanishing norm");
  rho /= tr;
  rho = (rho + rho.adjoint()).eval() * 0.5;
  return DensityMatrix(make_trusted(d, 2, std::move(rho)));
}

inline DensityMatrix two_site_reduced_state(const UniformMPS& a) {
  return two_site_reduced_state(a, transfer_fixed_points(a));
}

}  // namespace redset
