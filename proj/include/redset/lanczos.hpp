// Matrix-free Lanczos for the lowest eigenvalue of a Hermitian operator, and
// the nearest-neighbour chain Hamiltonians it is applied to.
#pragma once

#include "redset/hermitian.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

namespace redset {

/// y = A x for a Hermitian A; y is sized by the caller and overwritten.
using LinearMap = std::function<void(const CVector& x, CVector& y)>;

struct LanczosOptions {
  int max_iter = 2000;       // total matrix applications
  int krylov_size = 120;     // basis length before an explicit restart
  double tol = 1e-11;        // relative residual target
};

struct LanczosResult {
  double lambda_min = 0.0;
  double residual = 0.0;  // ||A v - lambda v|| of the returned Ritz vector
  int iterations = 0;
  bool converged = false;
  CVector vector;
};

namespace detail {

inline CVector random_unit_vector(Eigen::Index dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  CVector v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v(i) = cplx(u(rng), u(rng));
  v.normalize();
  return v;
}

}  // namespace detail

/// Lowest eigenvalue by Lanczos with full reorthogonalization and explicit
/// restarts from the current Ritz vector. A Krylov breakdown means an
/// invariant subspace was found and is treated as convergence. The reported
/// residual is recomputed explicitly, so |lambda_min - lambda_true| <= residual
/// for the eigenvalue closest to the returned Ritz value.
inline LanczosResult lanczos_ground(const LinearMap& apply, Eigen::Index dim, std::uint64_t seed,
                                    const LanczosOptions& opt = {}) {
  if (dim < 2) throw std::invalid_argument("lanczos_ground: dim must be >= 2");
  const int m_cap = static_cast<int>(std::min<Eigen::Index>(dim, std::max(opt.krylov_size, 2)));

  CVector start = detail::random_unit_vector(dim, seed);
  LanczosResult res;
  CVector w(dim);
  int used = 0;

  while (true) {
    std::vector<CVector> basis;
    basis.reserve(static_cast<std::size_t>(m_cap));
    std::vector<double> alpha, beta;
    basis.push_back(start);
    bool breakdown = false;
    Eigen::VectorXd ritz_coeffs;
    double theta = 0.0;
    double est = std::numeric_limits<double>::infinity();

    for (int k = 0; k < m_cap && used < opt.max_iter; ++k) {
      apply(basis.back(), w);
      ++used;
      const double a = basis.back().dot(w).real();
      alpha.push_back(a);
      // Full reorthogonalization, two passes.
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto& q : basis) w -= q * q.dot(w);
      }
      const double b = w.norm();

      const auto kk = static_cast<Eigen::Index>(alpha.size());
      Eigen::MatrixXd t = Eigen::MatrixXd::Zero(kk, kk);
      for (Eigen::Index i = 0; i < kk; ++i) {
        t(i, i) = alpha[static_cast<std::size_t>(i)];
        if (i + 1 < kk) t(i, i + 1) = t(i + 1, i) = beta[static_cast<std::size_t>(i)];
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
      theta = es.eigenvalues()(0);
      ritz_coeffs = es.eigenvectors().col(0);
      est = b * std::abs(ritz_coeffs(kk - 1));

      const double scale = std::max(1.0, std::abs(theta));
      if (b < 1e-13 * scale) {
        breakdown = true;
        break;
      }
      if (est < opt.tol * scale) break;
      if (k + 1 < m_cap) {
        beta.push_back(b);
        basis.push_back(w / b);
      }
    }

    CVector ritz = CVector::Zero(dim);
    for (Eigen::Index i = 0; i < ritz_coeffs.size(); ++i) ritz += ritz_coeffs(i) * basis[static_cast<std::size_t>(i)];
    ritz.normalize();

    apply(ritz, w);
    ++used;
    const double rq = ritz.dot(w).real();
    const double resid = (w - rq * ritz).norm();
    res.lambda_min = rq;
    res.residual = resid;
    res.iterations = used;
    res.vector = ritz;
    const double scale = std::max(1.0, std::abs(rq));
    res.converged = breakdown || resid < std::max(opt.tol, 1e-9) * scale;
    if (res.converged || used >= opt.max_iter) return res;
    start = ritz;
  }
}

/// Sum of two-site terms on a chain of `sites` d-level sites, applied without
/// storing the full matrix.
class ChainOperator {
 public:
  ChainOperator(int local_dim, int sites) : d_(local_dim), n_(sites), dim_(detail::int_pow(local_dim, sites)) {
    if (local_dim < 2 || sites < 2) throw std::invalid_argument("ChainOperator: bad shape");
  }

  /// Adds `h` (a d^2 x d^2 matrix) acting on sites (p, q), 1-based.
  void add_term(const HermitianOp& h, int p, int q) {
    if (h.sites() != 2 || h.local_dim() != d_) throw std::invalid_argument("ChainOperator: bad term");
    if (p < 1 || p > n_ || q < 1 || q > n_ || p == q) {
      throw std::invalid_argument("ChainOperator: site pair out of range");
    }
    Term t{detail::stride(d_, n_, p), detail::stride(d_, n_, q), {}};
    const auto& m = h.matrix();
    const int dd = d_ * d_;
    t.cols.resize(static_cast<std::size_t>(dd));
    for (int c = 0; c < dd; ++c) {
      for (int r = 0; r < dd; ++r) {
        if (m(r, c) != cplx{0.0, 0.0}) t.cols[static_cast<std::size_t>(c)].push_back({r / d_, r % d_, m(r, c)});
      }
    }
    terms_.push_back(std::move(t));
  }

  static ChainOperator open_chain(const HermitianOp& h, int sites) {
    ChainOperator op(h.local_dim(), sites);
    for (int i = 1; i < sites; ++i) op.add_term(h, i, i + 1);
    return op;
  }

  static ChainOperator ring(const HermitianOp& h, int sites) {
    ChainOperator op = open_chain(h, sites);
    op.add_term(h, sites, 1);
    return op;
  }

  Eigen::Index dim() const { return dim_; }

  void apply(const CVector& x, CVector& y) const {
    y.setZero(dim_);
    for (const auto& t : terms_) {
      for (Eigen::Index idx = 0; idx < dim_; ++idx) {
        const cplx xv = x(idx);
        if (xv == cplx{0.0, 0.0}) continue;
        const int a = static_cast<int>((idx / t.sp) % d_);
        const int b = static_cast<int>((idx / t.sq) % d_);
        const Eigen::Index base = idx - a * t.sp - b * t.sq;
        for (const auto& e : t.cols[static_cast<std::size_t>(a * d_ + b)]) {
          y(base + e.a * t.sp + e.b * t.sq) += e.value * xv;
        }
      }
    }
  }

  LinearMap as_map() const {
    return [this](const CVector& x, CVector& y) { apply(x, y); };
  }

  /// Dense matrix; intended for small chains and tests.
  CMatrix dense() const {
    CMatrix out(dim_, dim_);
    CVector e = CVector::Zero(dim_), col(dim_);
    for (Eigen::Index j = 0; j < dim_; ++j) {
      e(j) = 1.0;
      apply(e, col);
      out.col(j) = col;
      e(j) = 0.0;
    }
    return out;
  }

 private:
  struct Entry {
    int a, b;
    cplx value;
  };
  struct Term {
    Eigen::Index sp, sq;
    std::vector<std::vector<Entry>> cols;  // nonzeros of each column of h
  };

  int d_;
  int n_;
  Eigen::Index dim_;
  std::vector<Term> terms_;
};

}  // namespace redset
