// Projections used by the alternating-projection feasibility solver.
#pragma once

#include "redset/hermitian.hpp"

#include <algorithm>
#include <functional>
#include <vector>

namespace redset {

/// Euclidean projection of `v` onto the probability simplex {x >= 0, sum x = total}.
inline RVector project_simplex(const RVector& v, double total = 1.0) {
  std::vector<double> s(v.data(), v.data() + v.size());
  std::sort(s.begin(), s.end(), std::greater<>());
  double cumsum = 0.0;
  double tau = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    cumsum += s[k];
    const double t = (cumsum - total) / static_cast<double>(k + 1);
    if (s[k] - t > 0.0) tau = t;
  }
  return (v.array() - tau).cwiseMax(0.0).matrix();
}

/// Projection onto unit-trace PSD matrices (the spectraplex), Frobenius geometry.
inline CMatrix project_spectraplex(const CMatrix& a) {
  const CMatrix herm = (a + a.adjoint()) * 0.5;
  const auto eig = hermitian_eig(herm);
  const RVector lam = project_simplex(eig.values);
  CMatrix out = eig.vectors * lam.asDiagonal() * eig.vectors.adjoint();
  return (out + out.adjoint()) * 0.5;
}

inline double hs_inner(const CMatrix& a, const CMatrix& b) {
  return (a.conjugate().cwiseProduct(b)).sum().real();
}

/// Orthonormal (Hilbert-Schmidt) basis of n x n Hermitian matrices: diagonal
/// units, then symmetric and antisymmetric off-diagonal pairs.
inline std::vector<CMatrix> hermitian_basis(Eigen::Index n) {
  std::vector<CMatrix> out;
  out.reserve(static_cast<std::size_t>(n * n));
  const double r = 1.0 / std::sqrt(2.0);
  for (Eigen::Index k = 0; k < n; ++k) {
    CMatrix e = CMatrix::Zero(n, n);
    e(k, k) = 1.0;
    out.push_back(std::move(e));
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index l = k + 1; l < n; ++l) {
      CMatrix s = CMatrix::Zero(n, n);
      s(k, l) = s(l, k) = r;
      out.push_back(std::move(s));
      CMatrix a = CMatrix::Zero(n, n);
      a(k, l) = cplx(0.0, -r);
      a(l, k) = cplx(0.0, r);
      out.push_back(std::move(a));
    }
  }
  return out;
}

}  // namespace redset
