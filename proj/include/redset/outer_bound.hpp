// Outer hierarchy: two-site states admitting an (N+1)-site extension whose
// successive two-site marginals all coincide, and certified lower bounds on
// the ground-state energy per bond.
#pragma once

#include "redset/convex.hpp"
#include "redset/hermitian.hpp"
#include "redset/lanczos.hpp"
#include "redset/pauli.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace redset {

namespace detail {

/// Reduced matrix on sites (i, i+1) of an n-site operator.
inline CMatrix bond_marginal(const CMatrix& x, int d, int n, int i) {
  const Eigen::Index left = int_pow(d, i - 1);
  const Eigen::Index b = static_cast<Eigen::Index>(d) * d;
  const Eigen::Index right = int_pow(d, n - i - 1);
  CMatrix out = CMatrix::Zero(b, b);
  for (Eigen::Index l = 0; l < left; ++l) {
    for (Eigen::Index r = 0; r < right; ++r) {
      for (Eigen::Index c = 0; c < b; ++c) {
        const Eigen::Index col = (l * b + c) * right + r;
        for (Eigen::Index a = 0; a < b; ++a) out(a, c) += x((l * b + a) * right + r, col);
      }
    }
  }
  return out;
}

/// x += 1 (x) y (x) 1 with y on sites (i, i+1).
inline void add_bond_embedding(CMatrix& x, const CMatrix& y, int d, int n, int i) {
  const Eigen::Index left = int_pow(d, i - 1);
  const Eigen::Index b = static_cast<Eigen::Index>(d) * d;
  const Eigen::Index right = int_pow(d, n - i - 1);
  for (Eigen::Index l = 0; l < left; ++l) {
    for (Eigen::Index r = 0; r < right; ++r) {
      for (Eigen::Index c = 0; c < b; ++c) {
        const Eigen::Index col = (l * b + c) * right + r;
        for (Eigen::Index a = 0; a < b; ++a) x((l * b + a) * right + r, col) += y(a, c);
      }
    }
  }
}

}  // namespace detail

/// Sum over ordered pairs (i, j) of the Frobenius distance between the
/// successive two-site marginals i and j. Zero iff all of them coincide.
inline double marginal_mismatch(const HermitianOp& rho_full) {
  const int m = rho_full.sites();
  if (m < 3) throw std::invalid_argument("marginal_mismatch: need at least 3 sites");
  const int d = rho_full.local_dim();
  std::vector<CMatrix> marg;
  for (int i = 1; i < m; ++i) marg.push_back(detail::bond_marginal(rho_full.matrix(), d, m, i));
  double total = 0.0;
  for (std::size_t i = 0; i < marg.size(); ++i) {
    for (std::size_t j = 0; j < marg.size(); ++j) {
      if (i != j) total += (marg[i] - marg[j]).norm();
    }
  }
  return total;
}

inline double marginal_mismatch(const DensityMatrix& rho_full) { return marginal_mismatch(rho_full.op()); }

enum class ConstraintMode { pinned, free };

/// Affine subspace of Hermitian operators X on N+1 sites with
///   pinned: every successive two-site marginal of X equal to rho;
///   free:   trace(X) = 1 and all successive two-site marginals equal.
/// The constraint map is expressed in an orthonormal Hermitian basis of the
/// two-site space; the projector uses the pseudoinverse of its Gram matrix,
/// which depends only on (d, N, mode) and is shared between instances.
class MarginalConstraintSystem {
 public:
  static MarginalConstraintSystem pinned(const DensityMatrix& rho, int n) {
    if (rho.sites() != 2) throw std::invalid_argument("pinned constraint needs a two-site state");
    MarginalConstraintSystem s(rho.local_dim(), n, ConstraintMode::pinned);
    const RVector coords = s.coordinates(rho.matrix());
    for (int i = 0; i < n; ++i) s.rhs_.segment(i * s.block_, s.block_) = coords;
    return s;
  }

  static MarginalConstraintSystem free(int d, int n) {
    MarginalConstraintSystem s(d, n, ConstraintMode::free);
    s.rhs_(s.rhs_.size() - 1) = 1.0;
    return s;
  }

  int n() const { return n_; }
  int sites() const { return n_ + 1; }
  int local_dim() const { return d_; }
  ConstraintMode mode() const { return mode_; }
  Eigen::Index dim() const { return detail::int_pow(d_, n_ + 1); }

  /// The constraint map A(X).
  RVector apply(const CMatrix& x) const {
    RVector out(rows());
    if (mode_ == ConstraintMode::pinned) {
      for (int i = 1; i <= n_; ++i) {
        out.segment((i - 1) * block_, block_) = coordinates(detail::bond_marginal(x, d_, sites(), i));
      }
    } else {
      std::vector<RVector> c;
      for (int i = 1; i <= n_; ++i) c.push_back(coordinates(detail::bond_marginal(x, d_, sites(), i)));
      for (int i = 0; i + 1 < n_; ++i) out.segment(i * block_, block_) = c[i] - c[i + 1];
      out(rows() - 1) = x.trace().real();
    }
    return out;
  }

  /// The adjoint map A*(y) in Hilbert-Schmidt geometry.
  CMatrix adjoint(const RVector& y) const {
    const Eigen::Index n = dim();
    CMatrix x = CMatrix::Zero(n, n);
    if (mode_ == ConstraintMode::pinned) {
      for (int i = 1; i <= n_; ++i) {
        detail::add_bond_embedding(x, from_coordinates(y.segment((i - 1) * block_, block_)), d_, sites(), i);
      }
    } else {
      for (int i = 0; i + 1 < n_; ++i) {
        const CMatrix yi = from_coordinates(y.segment(i * block_, block_));
        detail::add_bond_embedding(x, yi, d_, sites(), i + 1);
        detail::add_bond_embedding(x, -yi, d_, sites(), i + 2);
      }
      x.diagonal().array() += y(rows() - 1);
    }
    return x;
  }

  const RVector& rhs() const { return rhs_; }

  /// Orthogonal projection onto {X : A(X) = b}.
  CMatrix project(const CMatrix& x) const {
    const RVector r = apply(x) - rhs_;
    return x - adjoint(gram_->pinv * r);
  }

  /// Orthogonal projection onto the linear part {X : A(X) = 0}.
  CMatrix project_linear(const CMatrix& x) const { return x - adjoint(gram_->pinv * apply(x)); }

  /// ||A(X) - b||, in basis coordinates.
  double residual(const CMatrix& x) const { return (apply(x) - rhs_).norm(); }

  /// Gauss-Newton on X = V V^dagger, started from the dominant eigenspace of
  /// the PSD matrix `y`. Extensions of finitely correlated states are low
  /// rank and often unique, where alternating projections crawl; this
  /// converges quadratically there. Returns X only if ||A(X) - b|| <= tol.
  std::optional<CMatrix> low_rank_solve(const CMatrix& y, double tol, int max_steps = 30) const {
    const auto eig = hermitian_eig((y + y.adjoint()) * 0.5);
    const Eigen::Index n = y.rows();
    const double top = eig.values.maxCoeff();
    if (!(top > 0.0)) return std::nullopt;
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (eig.values(i) > 1e-9 * top) keep.push_back(i);
    }
    const auto r = static_cast<Eigen::Index>(keep.size());
    CMatrix v(n, r);
    for (Eigen::Index j = 0; j < r; ++j) {
      v.col(j) = eig.vectors.col(keep[static_cast<std::size_t>(j)]) * std::sqrt(eig.values(keep[static_cast<std::size_t>(j)]));
    }
    RVector res = apply(v * v.adjoint()) - rhs_;
    Eigen::MatrixXd jac(rows(), 2 * n * r);
    for (int step = 0; step < max_steps && res.norm() > tol * 1e-3; ++step) {
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < r; ++j) {
          for (int part = 0; part < 2; ++part) {
            CMatrix dx = CMatrix::Zero(n, n);
            const cplx unit = part == 0 ? cplx(1.0, 0.0) : cplx(0.0, 1.0);
            dx.row(i) = unit * v.col(j).adjoint();
            dx += dx.adjoint().eval();
            jac.col((i * r + j) * 2 + part) = apply(dx);
          }
        }
      }
      Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(jac);
      cod.setThreshold(1e-12);
      const RVector delta = cod.solve(res);
      CMatrix v_next = v;
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < r; ++j) {
          v_next(i, j) -= cplx(delta((i * r + j) * 2), delta((i * r + j) * 2 + 1));
        }
      }
      RVector res_next = apply(v_next * v_next.adjoint()) - rhs_;
      if (!(res_next.norm() < 0.5 * res.norm())) break;
      v = std::move(v_next);
      res = std::move(res_next);
    }
    if (!(res.norm() <= tol)) return std::nullopt;
    return CMatrix(v * v.adjoint());
  }

 private:
  struct Gram {
    Eigen::MatrixXd pinv;
  };

  MarginalConstraintSystem(int d, int n, ConstraintMode mode)
      : d_(d), n_(n), mode_(mode), block_(static_cast<Eigen::Index>(d) * d * d * d) {
    if (d < 2) throw std::invalid_argument("local_dim must be >= 2");
    if (n < 2) throw std::invalid_argument("constraint system needs N >= 2");
    if (n + 1 > 8 && d == 2) throw std::invalid_argument("constraint system limited to 8 sites");
    basis_ = hermitian_basis(static_cast<Eigen::Index>(d) * d);
    rhs_ = RVector::Zero(rows());
    gram_ = cached_gram();
  }

  Eigen::Index rows() const {
    return mode_ == ConstraintMode::pinned ? n_ * block_ : (n_ - 1) * block_ + 1;
  }

  RVector coordinates(const CMatrix& y) const {
    RVector c(block_);
    for (Eigen::Index k = 0; k < block_; ++k) c(k) = hs_inner(basis_[static_cast<std::size_t>(k)], y);
    return c;
  }

  CMatrix from_coordinates(const RVector& c) const {
    CMatrix y = CMatrix::Zero(d_ * d_, d_ * d_);
    for (Eigen::Index k = 0; k < block_; ++k) y += c(k) * basis_[static_cast<std::size_t>(k)];
    return y;
  }

  std::shared_ptr<const Gram> cached_gram() const {
    using Key = std::tuple<int, int, int>;
    static std::mutex mu;
    static std::map<Key, std::shared_ptr<const Gram>> cache;
    const Key key{d_, n_, static_cast<int>(mode_)};
    {
      std::lock_guard<std::mutex> lock(mu);
      if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    const Eigen::Index m = rows();
    Eigen::MatrixXd g(m, m);
    RVector e = RVector::Zero(m);
    for (Eigen::Index j = 0; j < m; ++j) {
      e(j) = 1.0;
      g.col(j) = apply(adjoint(e));
      e(j) = 0.0;
    }
    g = (g + g.transpose()).eval() * 0.5;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
    const RVector& lam = es.eigenvalues();
    const double cut = 1e-10 * std::max(1.0, lam.cwiseAbs().maxCoeff());
    RVector inv = RVector::Zero(m);
    for (Eigen::Index k = 0; k < m; ++k) {
      if (lam(k) > cut) inv(k) = 1.0 / lam(k);
    }
    auto gram = std::make_shared<Gram>();
    gram->pinv = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
    std::lock_guard<std::mutex> lock(mu);
    return cache.emplace(key, std::move(gram)).first->second;
  }

  int d_;
  int n_;
  ConstraintMode mode_;
  Eigen::Index block_;
  std::vector<CMatrix> basis_;
  RVector rhs_;
  std::shared_ptr<const Gram> gram_;
};

enum class MembershipStatus { Member, NonMember, Undecided };

inline const char* to_string(MembershipStatus s) {
  switch (s) {
    case MembershipStatus::Member: return "Member";
    case MembershipStatus::NonMember: return "NonMember";
    case MembershipStatus::Undecided: return "Undecided";
  }
  return "?";
}

struct FeasibilityOptions {
  double tol_feas = 1e-8;
  double tol_reject = 1e-3;
  int max_iter = 50'000;
  int window = 250;              // stagnation is judged between windows
  double stall_ratio = 1e-4;     // relative distance change counting as stalled
  int psd_check_every = 10;
  int refine_start = 50;         // refinement attempts at refine_start * 2^k iterations; 0 disables
};

struct FeasibilityOutcome {
  MembershipStatus status = MembershipStatus::Undecided;
  CMatrix point;          // last iterate of the constraint-set projection
  double distance = 0.0;  // Frobenius distance between the two iterates
  int iterations = 0;
};

/// Dykstra's alternating projections between the spectraplex and a convex set
/// C (given by its projector). Member is reported only for an iterate of C
/// whose smallest eigenvalue is >= -tol_feas; NonMember when the inter-set
/// distance has stopped shrinking above tol_reject over two windows.
/// `refine(y)` may turn a spectraplex iterate into a point of both sets; it is
/// tried at geometrically spaced iterations and its result is reported as
/// Member as is, so it must only return verified points.
template <class ProjectC, class Refine>
FeasibilityOutcome dykstra_feasibility(CMatrix start, const ProjectC& project_c, const FeasibilityOptions& opt,
                                       const Refine& refine) {
  const Eigen::Index n = start.rows();
  CMatrix x = project_c(start);
  CMatrix p = CMatrix::Zero(n, n);
  CMatrix q = CMatrix::Zero(n, n);
  FeasibilityOutcome out;

  auto psd_ok = [&](const CMatrix& m) {
    return hermitian_eigenvalues((m + m.adjoint()) * 0.5)(0) >= -opt.tol_feas;
  };
  if (psd_ok(x)) {
    out.status = MembershipStatus::Member;
    out.point = std::move(x);
    return out;
  }

  std::vector<double> window_min;
  double current_min = std::numeric_limits<double>::infinity();
  int next_refine = opt.refine_start;
  for (int it = 1; it <= opt.max_iter; ++it) {
    const CMatrix y = project_spectraplex(x + p);
    p = x + p - y;
    if (next_refine > 0 && it == next_refine) {
      next_refine *= 2;
      if (std::optional<CMatrix> r = refine(y)) {
        out.status = MembershipStatus::Member;
        out.point = std::move(*r);
        out.distance = 0.0;
        out.iterations = it;
        return out;
      }
    }
    CMatrix x_next = project_c(y + q);
    q = y + q - x_next;
    x = std::move(x_next);
    const double dist = (x - y).norm();
    out.distance = dist;
    out.iterations = it;
    current_min = std::min(current_min, dist);

    if (dist <= opt.tol_feas || (it % opt.psd_check_every == 0 && psd_ok(x))) {
      if (psd_ok(x)) {
        out.status = MembershipStatus::Member;
        out.point = std::move(x);
        return out;
      }
    }
    if (it % opt.window == 0) {
      window_min.push_back(current_min);
      current_min = std::numeric_limits<double>::infinity();
      const std::size_t k = window_min.size();
      if (k >= 3) {
        const double a = window_min[k - 3], b = window_min[k - 2], c = window_min[k - 1];
        const bool stalled = (a - b) <= opt.stall_ratio * b && (b - c) <= opt.stall_ratio * c;
        if (stalled && c > opt.tol_reject) {
          out.status = MembershipStatus::NonMember;
          out.distance = c;
          out.point = std::move(x);
          return out;
        }
      }
    }
  }
  out.status = MembershipStatus::Undecided;
  out.point = std::move(x);
  return out;
}

template <class ProjectC>
FeasibilityOutcome dykstra_feasibility(CMatrix start, const ProjectC& project_c, const FeasibilityOptions& opt) {
  return dykstra_feasibility(std::move(start), project_c, opt,
                             [](const CMatrix&) { return std::optional<CMatrix>{}; });
}

struct MembershipVerdict {
  MembershipStatus status = MembershipStatus::Undecided;
  std::optional<DensityMatrix> witness;
  double distance_estimate = 0.0;
  int iterations = 0;
};

/// Decides numerically whether `rho` admits an (N+1)-site extension with all
/// successive two-site marginals equal to rho, i.e. membership in the outer
/// relaxation at level N. Never reports Member without a verified witness.
inline MembershipVerdict membership(const DensityMatrix& rho, int n, const FeasibilityOptions& opt = {}) {
  if (rho.sites() != 2) throw std::invalid_argument("membership: rho must be a two-site state");
  if (n < 2) throw std::invalid_argument("membership: N must be >= 2");
  MembershipVerdict v;
  const double one_site_gap =
      (partial_trace(rho.op(), {1}).matrix() - partial_trace(rho.op(), {2}).matrix()).norm();
  if (one_site_gap > opt.tol_feas) {
    v.status = MembershipStatus::NonMember;
    v.distance_estimate = one_site_gap;
    return v;
  }

  const auto system = MarginalConstraintSystem::pinned(rho, n);
  const Eigen::Index dim = system.dim();
  const CMatrix start = CMatrix::Identity(dim, dim) / static_cast<double>(dim);
  auto outcome = dykstra_feasibility(
      start, [&](const CMatrix& x) { return system.project(x); }, opt,
      [&](const CMatrix& y) { return system.low_rank_solve(y, 0.1 * opt.tol_feas); });
  v.distance_estimate = outcome.distance;
  v.iterations = outcome.iterations;
  v.status = outcome.status;

  if (outcome.status == MembershipStatus::Member) {
    // Independent re-check of the witness before reporting it.
    const int d = rho.local_dim();
    CMatrix w = (outcome.point + outcome.point.adjoint()) * 0.5;
    HermitianOp wop = make_trusted(d, n + 1, std::move(w));
    bool ok = std::abs(wop.trace() - 1.0) <= opt.tol_feas && min_eigenvalue(wop) >= -opt.tol_feas;
    for (int i = 1; ok && i <= n; ++i) {
      ok = (detail::bond_marginal(wop.matrix(), d, n + 1, i) - rho.matrix()).norm() <= opt.tol_feas;
    }
    if (!ok) {
      v.status = MembershipStatus::Undecided;
      return v;
    }
    // A PSD-within-tol_feas witness may carry eigenvalues down to -tol_feas,
    // which the density-matrix type (tolerance 1e-10) would reject.
    if (min_eigenvalue(wop) < -kDensityTol) wop = psd_project(wop) * (1.0 / psd_project(wop).trace());
    v.witness.emplace(std::move(wop));
  }
  return v;
}

enum class LowerBoundMethod { open_chain, ring, marginal_relaxation };

inline const char* to_string(LowerBoundMethod m) {
  switch (m) {
    case LowerBoundMethod::open_chain: return "open_chain";
    case LowerBoundMethod::ring: return "ring";
    case LowerBoundMethod::marginal_relaxation: return "marginal_relaxation";
  }
  return "?";
}

/// A lower bound on the energy per bond: value - slack <= epsilon.
struct LowerBoundCertificate {
  double value = 0.0;
  LowerBoundMethod method = LowerBoundMethod::open_chain;
  int n = 0;
  double slack = 0.0;
};

inline constexpr int kMaxChainSites = 16;

struct ChainBoundOptions {
  std::uint64_t seed = 1;
  LanczosOptions lanczos{};
};

/// epsilon >= lambda_min(sum_{i<N} h_{i,i+1}) / (N - 1).
inline LowerBoundCertificate open_chain_lower_bound(const PauliTwoBodyHamiltonian& h, int n,
                                                    const ChainBoundOptions& opt = {}) {
  if (n < 3 || n > kMaxChainSites) throw std::invalid_argument("open_chain_lower_bound: N out of range");
  const auto chain = ChainOperator::open_chain(pauli_to_matrix(h), n);
  const auto res = lanczos_ground(chain.as_map(), chain.dim(), opt.seed, opt.lanczos);
  const double bonds = n - 1;
  return {res.lambda_min / bonds, LowerBoundMethod::open_chain, n, res.residual / bonds};
}

/// epsilon >= (lambda_min(H_ring,N) - ||h||) / (N - 1): removing the closing
/// bond of the ring lowers the energy by at most ||h||.
inline LowerBoundCertificate ring_lower_bound(const PauliTwoBodyHamiltonian& h, int n,
                                              const ChainBoundOptions& opt = {}) {
  if (n < 3 || n > kMaxChainSites) throw std::invalid_argument("ring_lower_bound: N out of range");
  const auto hm = pauli_to_matrix(h);
  const auto ring = ChainOperator::ring(hm, n);
  const auto res = lanczos_ground(ring.as_map(), ring.dim(), opt.seed, opt.lanczos);
  const double bonds = n - 1;
  return {(res.lambda_min - operator_norm(hm)) / bonds, LowerBoundMethod::ring, n, res.residual / bonds};
}

struct RelaxationOptions {
  double tol = 1e-6;  // slack per unit of ||h||
  int steps = 20;     // bisection depth
  FeasibilityOptions feasibility{1e-8, 1e-6, 4000, 100, 1e-4, 10};
};

namespace detail {

/// Feasibility of {trace-one PSD} against {equal marginals on N+1 sites,
/// tr(h_12 X) <= e}, started from the maximally mixed state.
inline MembershipStatus relaxation_level_status(const MarginalConstraintSystem& system, const CMatrix& h12,
                                                const CMatrix& normal, double normal_sq, double e,
                                                const FeasibilityOptions& opt) {
  const Eigen::Index dim = system.dim();
  auto project_c = [&](const CMatrix& x) -> CMatrix {
    CMatrix xa = system.project(x);
    const double excess = hs_inner(h12, xa) - e;
    if (excess <= 0.0) return xa;
    return xa - (excess / normal_sq) * normal;
  };
  return dykstra_feasibility(CMatrix::Identity(dim, dim) / static_cast<double>(dim), project_c, opt).status;
}

}  // namespace detail

/// Lower bound from the relaxation min { tr(h rho_12) : rho_12 extends to
/// N+1 sites with equal successive marginals }. Bisects on the energy level e.
/// A level is rejected when the feasibility test at any K <= N reports
/// NonMember: the (K+1)-site marginal of a feasible (N+1)-site point is
/// feasible at K. Only rejected levels raise the bound, so an undecided test
/// never overstates it, and because every test starts cold the decisions are
/// fixed per (K, e), which makes the result non-decreasing in N.
inline LowerBoundCertificate marginal_relaxation_bound(const PauliTwoBodyHamiltonian& h, int n,
                                                       const RelaxationOptions& opt = {}) {
  if (n < 2 || n > 6) throw std::invalid_argument("marginal_relaxation_bound: N must be in [2, 6]");
  const auto hm = pauli_to_matrix(h);
  const double hnorm = operator_norm(hm);

  struct Level {
    MarginalConstraintSystem system;
    CMatrix h12;
    CMatrix normal;
    double normal_sq;
  };
  std::vector<Level> levels;
  for (int k = 2; k <= n; ++k) {
    auto system = MarginalConstraintSystem::free(2, k);
    CMatrix h12 = embed_bond(hm, 1, k + 1).matrix();
    CMatrix normal = system.project_linear(h12);
    const double nsq = hs_inner(normal, normal);
    levels.push_back({std::move(system), std::move(h12), std::move(normal), nsq});
  }

  double lo = -hnorm;
  double hi = hnorm;
  if (levels.front().normal_sq < 1e-14) {
    // Energy is constant on the affine set: tr(h rho) = tr(h) / 4.
    lo = hm.trace() / 4.0;
  } else {
    for (int step = 0; step < opt.steps; ++step) {
      const double e = 0.5 * (lo + hi);
      bool rejected = false;
      for (const auto& lv : levels) {
        if (lv.normal_sq < 1e-14) continue;
        if (detail::relaxation_level_status(lv.system, lv.h12, lv.normal, lv.normal_sq, e, opt.feasibility) ==
            MembershipStatus::NonMember) {
          rejected = true;
          break;
        }
      }
      (rejected ? lo : hi) = e;
    }
  }
  return {lo, LowerBoundMethod::marginal_relaxation, n, opt.tol * hnorm};
}

}  // namespace redset
