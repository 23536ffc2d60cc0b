// Dense Hermitian operators on chains of d-level sites.
//
// Conventions: sites are 1-based, site 1 is the leftmost tensor factor and
// composite indices are row-major (site 1 is the most significant digit).
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace redset {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kDensityTol = 1e-10;

namespace detail {

inline Eigen::Index int_pow(int base, int exp) {
  Eigen::Index r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

inline double max_abs(const CMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace detail

class HermitianOp {
 public:
  HermitianOp() = default;

  /// Takes ownership of `entries`, rejecting anti-Hermitian parts larger than
  /// kHermitianTol (relative to the largest entry) and symmetrizing the rest.
  HermitianOp(int local_dim, int sites, CMatrix entries)
      : local_dim_(local_dim), sites_(sites), m_(std::move(entries)) {
    if (local_dim < 2) throw std::invalid_argument("local_dim must be >= 2");
    if (sites < 1) throw std::invalid_argument("sites must be >= 1");
    const Eigen::Index n = detail::int_pow(local_dim, sites);
    if (m_.rows() != n || m_.cols() != n) {
      throw std::invalid_argument("matrix dimension " + std::to_string(m_.rows()) + "x" +
                                  std::to_string(m_.cols()) + " does not match local_dim^sites = " +
                                  std::to_string(n));
    }
    const double scale = std::max(1.0, detail::max_abs(m_));
    const CMatrix adj = m_.adjoint();
    if (detail::max_abs(m_ - adj) > kHermitianTol * scale) {
      throw std::invalid_argument("matrix is not Hermitian within tolerance");
    }
    m_ = (m_ + adj) * 0.5;
  }

  static HermitianOp identity(int local_dim, int sites) {
    const auto n = detail::int_pow(local_dim, sites);
    return HermitianOp(local_dim, sites, CMatrix::Identity(n, n));
  }

  static HermitianOp zero(int local_dim, int sites) {
    const auto n = detail::int_pow(local_dim, sites);
    return HermitianOp(local_dim, sites, CMatrix::Zero(n, n));
  }

  /// Diagonal operator with the given real entries.
  static HermitianOp diagonal(int local_dim, int sites, const std::vector<double>& diag) {
    const auto n = detail::int_pow(local_dim, sites);
    if (static_cast<Eigen::Index>(diag.size()) != n) {
      throw std::invalid_argument("diagonal length does not match dimension");
    }
    CMatrix m = CMatrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) m(i, i) = diag[static_cast<std::size_t>(i)];
    return HermitianOp(local_dim, sites, std::move(m));
  }

  /// |v><v| for a (not necessarily normalized) vector.
  static HermitianOp projector(int local_dim, int sites, const CVector& v) {
    return HermitianOp(local_dim, sites, v * v.adjoint());
  }

  int local_dim() const { return local_dim_; }
  int sites() const { return sites_; }
  Eigen::Index dim() const { return m_.rows(); }
  const CMatrix& matrix() const { return m_; }

  double trace() const { return m_.trace().real(); }
  double frobenius_norm() const { return m_.norm(); }

  /// Hilbert-Schmidt inner product tr(A B), real for Hermitian arguments.
  double inner(const HermitianOp& other) const {
    check_same_shape(other);
    return (m_.conjugate().cwiseProduct(other.m_)).sum().real();
  }

  HermitianOp operator+(const HermitianOp& o) const {
    check_same_shape(o);
    return {local_dim_, sites_, m_ + o.m_, Trusted{}};
  }
  HermitianOp operator-(const HermitianOp& o) const {
    check_same_shape(o);
    return {local_dim_, sites_, m_ - o.m_, Trusted{}};
  }
  HermitianOp operator*(double c) const { return {local_dim_, sites_, m_ * c, Trusted{}}; }
  friend HermitianOp operator*(double c, const HermitianOp& a) { return a * c; }

  bool same_shape(const HermitianOp& o) const {
    return local_dim_ == o.local_dim_ && sites_ == o.sites_;
  }

 private:
  struct Trusted {};
  HermitianOp(int d, int sites, CMatrix m, Trusted) : local_dim_(d), sites_(sites), m_(std::move(m)) {}

  void check_same_shape(const HermitianOp& o) const {
    if (!same_shape(o)) throw std::invalid_argument("operator shapes differ");
  }

  int local_dim_ = 2;
  int sites_ = 1;
  CMatrix m_;

  friend HermitianOp make_trusted(int, int, CMatrix);
};

/// Wraps an already-Hermitian matrix without re-validating; library-internal.
inline HermitianOp make_trusted(int d, int sites, CMatrix m) {
  return HermitianOp(d, sites, std::move(m), HermitianOp::Trusted{});
}

struct EigenDecomposition {
  RVector values;   // ascending
  CMatrix vectors;  // orthonormal columns
};

/// Dense Hermitian eigendecomposition.
inline EigenDecomposition hermitian_eig(const CMatrix& a) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(a);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("Hermitian eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

inline EigenDecomposition hermitian_eig(const HermitianOp& a) { return hermitian_eig(a.matrix()); }

inline RVector hermitian_eigenvalues(const CMatrix& a) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(a, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("Hermitian eigensolver did not converge");
  }
  return solver.eigenvalues();
}

inline double min_eigenvalue(const HermitianOp& a) { return hermitian_eigenvalues(a.matrix())(0); }

inline double operator_norm(const HermitianOp& a) {
  const RVector ev = hermitian_eigenvalues(a.matrix());
  return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

/// Nearest PSD operator in Frobenius norm: clip negative eigenvalues.
inline HermitianOp psd_project(const HermitianOp& a) {
  const auto eig = hermitian_eig(a);
  const RVector clipped = eig.values.cwiseMax(0.0);
  CMatrix out = eig.vectors * clipped.asDiagonal() * eig.vectors.adjoint();
  out = (out + out.adjoint()).eval() * 0.5;
  return make_trusted(a.local_dim(), a.sites(), std::move(out));
}

inline HermitianOp kron(const HermitianOp& a, const HermitianOp& b) {
  if (a.local_dim() != b.local_dim()) throw std::invalid_argument("kron: local_dim mismatch");
  const auto& ma = a.matrix();
  const auto& mb = b.matrix();
  const Eigen::Index nb = mb.rows();
  CMatrix out(ma.rows() * nb, ma.cols() * nb);
  for (Eigen::Index i = 0; i < ma.rows(); ++i) {
    for (Eigen::Index j = 0; j < ma.cols(); ++j) {
      out.block(i * nb, j * nb, nb, nb) = ma(i, j) * mb;
    }
  }
  return make_trusted(a.local_dim(), a.sites() + b.sites(), std::move(out));
}

namespace detail {

/// Digits of a composite index, site 1 first.
inline void digits(Eigen::Index idx, int d, int sites, std::vector<int>& out) {
  out.resize(static_cast<std::size_t>(sites));
  for (int s = sites - 1; s >= 0; --s) {
    out[static_cast<std::size_t>(s)] = static_cast<int>(idx % d);
    idx /= d;
  }
}

/// Stride of 1-based site `s` in a chain of `sites` sites.
inline Eigen::Index stride(int d, int sites, int s) { return int_pow(d, sites - s); }

}  // namespace detail

/// Reduced operator on the sites listed in `keep` (1-based, strictly
/// increasing). The output's tensor factors follow the order of `keep`.
inline HermitianOp partial_trace(const HermitianOp& rho, const std::vector<int>& keep) {
  const int m = rho.sites();
  const int d = rho.local_dim();
  if (keep.empty()) throw std::invalid_argument("partial_trace: empty keep set");
  for (std::size_t i = 0; i < keep.size(); ++i) {
    if (keep[i] < 1 || keep[i] > m) throw std::invalid_argument("partial_trace: site out of range");
    if (i > 0 && keep[i] <= keep[i - 1]) {
      throw std::invalid_argument("partial_trace: keep must be strictly increasing");
    }
  }
  std::vector<int> traced;
  for (int s = 1; s <= m; ++s) {
    if (!std::binary_search(keep.begin(), keep.end(), s)) traced.push_back(s);
  }
  const int nk = static_cast<int>(keep.size());
  const int nt = static_cast<int>(traced.size());
  const Eigen::Index dk = detail::int_pow(d, nk);
  const Eigen::Index dt = detail::int_pow(d, nt);

  // Offsets of every kept / traced multi-index inside the full index.
  std::vector<Eigen::Index> off_k(static_cast<std::size_t>(dk)), off_t(static_cast<std::size_t>(dt));
  std::vector<int> dig;
  for (Eigen::Index a = 0; a < dk; ++a) {
    detail::digits(a, d, nk, dig);
    Eigen::Index o = 0;
    for (int i = 0; i < nk; ++i) o += dig[i] * detail::stride(d, m, keep[i]);
    off_k[static_cast<std::size_t>(a)] = o;
  }
  for (Eigen::Index t = 0; t < dt; ++t) {
    detail::digits(t, d, nt, dig);
    Eigen::Index o = 0;
    for (int i = 0; i < nt; ++i) o += dig[i] * detail::stride(d, m, traced[i]);
    off_t[static_cast<std::size_t>(t)] = o;
  }

  const auto& a = rho.matrix();
  CMatrix out = CMatrix::Zero(dk, dk);
  for (Eigen::Index r = 0; r < dk; ++r) {
    for (Eigen::Index c = 0; c < dk; ++c) {
      cplx acc{0.0, 0.0};
      const auto orow = off_k[static_cast<std::size_t>(r)];
      const auto ocol = off_k[static_cast<std::size_t>(c)];
      for (Eigen::Index t = 0; t < dt; ++t) {
        const auto ot = off_t[static_cast<std::size_t>(t)];
        acc += a(orow + ot, ocol + ot);
      }
      out(r, c) = acc;
    }
  }
  return make_trusted(d, nk, std::move(out));
}

/// Places a two-site operator on sites (p, q) of an n-site chain, p != q.
/// The first tensor factor of `h` acts on site p.
inline HermitianOp embed_two_site(const HermitianOp& h, int p, int q, int n) {
  if (h.sites() != 2) throw std::invalid_argument("embed: operator must act on 2 sites");
  if (p < 1 || p > n || q < 1 || q > n || p == q) {
    throw std::invalid_argument("embed: site pair out of range");
  }
  const int d = h.local_dim();
  const Eigen::Index dim = detail::int_pow(d, n);
  const Eigen::Index sp = detail::stride(d, n, p);
  const Eigen::Index sq = detail::stride(d, n, q);
  const auto& hm = h.matrix();
  CMatrix out = CMatrix::Zero(dim, dim);
  std::vector<int> dig;
  for (Eigen::Index col = 0; col < dim; ++col) {
    detail::digits(col, d, n, dig);
    const int a = dig[static_cast<std::size_t>(p - 1)];
    const int b = dig[static_cast<std::size_t>(q - 1)];
    const Eigen::Index base = col - a * sp - b * sq;
    const Eigen::Index hc = a * d + b;
    for (int a2 = 0; a2 < d; ++a2) {
      for (int b2 = 0; b2 < d; ++b2) {
        const cplx v = hm(a2 * d + b2, hc);
        if (v != cplx{0.0, 0.0}) out(base + a2 * sp + b2 * sq, col) += v;
      }
    }
  }
  return make_trusted(d, n, std::move(out));
}

/// 1^(i-1) (x) h (x) 1^(n-i-1), for 1 <= i <= n-1.
inline HermitianOp embed_bond(const HermitianOp& h, int i, int n) {
  if (i < 1 || i > n - 1) throw std::invalid_argument("embed_bond: bond index out of range");
  return embed_two_site(h, i, i + 1, n);
}

/// The closing bond of a ring: h acting on sites (n, 1).
inline HermitianOp embed_bond_cyclic(const HermitianOp& h, int n) {
  if (n < 2) throw std::invalid_argument("embed_bond_cyclic: need n >= 2");
  return embed_two_site(h, n, 1, n);
}

/// Unit-trace PSD operator.
class DensityMatrix {
 public:
  explicit DensityMatrix(HermitianOp op) : op_(std::move(op)) {
    if (std::abs(op_.trace() - 1.0) > kDensityTol) {
      throw std::invalid_argument("density matrix trace differs from 1 by " +
                                  std::to_string(op_.trace() - 1.0));
    }
    const double lmin = min_eigenvalue(op_);
    if (lmin < -kDensityTol) {
      throw std::invalid_argument("density matrix has negative eigenvalue " + std::to_string(lmin));
    }
  }

  static DensityMatrix maximally_mixed(int local_dim, int sites) {
    auto id = HermitianOp::identity(local_dim, sites);
    return DensityMatrix(id * (1.0 / static_cast<double>(id.dim())));
  }

  /// Normalized pure state |v><v| / <v|v>.
  static DensityMatrix pure(int local_dim, int sites, const CVector& v) {
    const double n2 = v.squaredNorm();
    if (n2 <= 0.0) throw std::invalid_argument("pure state from zero vector");
    return DensityMatrix(HermitianOp::projector(local_dim, sites, v) * (1.0 / n2));
  }

  const HermitianOp& op() const { return op_; }
  int local_dim() const { return op_.local_dim(); }
  int sites() const { return op_.sites(); }
  Eigen::Index dim() const { return op_.dim(); }
  const CMatrix& matrix() const { return op_.matrix(); }

 private:
  HermitianOp op_;
};

/// Computational basis vector |b_1 ... b_n>.
inline CVector basis_state(int d, const std::vector<int>& bits) {
  const auto n = detail::int_pow(d, static_cast<int>(bits.size()));
  Eigen::Index idx = 0;
  for (int b : bits) idx = idx * d + b;
  CVector v = CVector::Zero(n);
  v(idx) = 1.0;
  return v;
}

}  // namespace redset
