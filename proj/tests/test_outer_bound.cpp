#include "redset/inner_bound.hpp"
#include "redset/mps.hpp"
#include "redset/outer_bound.hpp"
#include "redset/xy_exact.hpp"

#include <gtest/gtest.h>

#include <random>

namespace {

using namespace redset;

DensityMatrix singlet() {
  CVector v = CVector::Zero(4);
  v(1) = 1.0;
  v(2) = -1.0;
  return DensityMatrix::pure(2, 2, v);
}

DensityMatrix werner(double w) {
  const auto s = singlet().op();
  const auto mixed = DensityMatrix::maximally_mixed(2, 2).op();
  return DensityMatrix(s * w + mixed * (1.0 - w));
}

HermitianOp product_power(const HermitianOp& sigma, int n) {
  HermitianOp out = sigma;
  for (int i = 1; i < n; ++i) out = kron(out, sigma);
  return out;
}

void expect_witness_valid(const MembershipVerdict& v, const DensityMatrix& rho, int n) {
  ASSERT_TRUE(v.witness.has_value());
  const auto& w = *v.witness;
  EXPECT_EQ(w.sites(), n + 1);
  EXPECT_GE(min_eigenvalue(w.op()), -1e-10);
  for (int i = 1; i <= n; ++i) {
    EXPECT_LT((partial_trace(w.op(), {i, i + 1}).matrix() - rho.matrix()).norm(), 1e-7) << "bond " << i;
  }
}

TEST(MarginalMismatch, Examples) {
  EXPECT_NEAR(marginal_mismatch(HermitianOp::identity(2, 3) * 0.125), 0.0, 1e-15);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  CMatrix a(2, 2);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) a(i, j) = cplx(g(rng), g(rng));
  }
  CMatrix sigma = a * a.adjoint();
  sigma /= sigma.trace().real();
  EXPECT_NEAR(marginal_mismatch(product_power(HermitianOp(2, 1, sigma), 4)), 0.0, 1e-14);
  // |001>: marginals |00><00| and |01><01| differ by sqrt(2), counted both ways.
  const auto p = DensityMatrix::pure(2, 3, basis_state(2, {0, 0, 1}));
  EXPECT_NEAR(marginal_mismatch(p), 2.0 * std::sqrt(2.0), 1e-14);
  EXPECT_THROW(marginal_mismatch(HermitianOp::identity(2, 2)), std::invalid_argument);
}

TEST(ConstraintSystem, ProjectorIdempotentAndFixesFeasiblePoints) {
  const HermitianOp sigma = HermitianOp::diagonal(2, 1, {0.7, 0.3});
  const DensityMatrix rho(kron(sigma, sigma));
  for (int n : {2, 3}) {
    const auto sys = MarginalConstraintSystem::pinned(rho, n);
    const CMatrix feasible = product_power(sigma, n + 1).matrix();
    EXPECT_LT(sys.residual(feasible), 1e-13);
    EXPECT_LT((sys.project(feasible) - feasible).norm(), 1e-12);

    std::mt19937_64 rng(n);
    std::normal_distribution<double> g;
    const Eigen::Index dim = sys.dim();
    CMatrix x(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
      for (Eigen::Index j = 0; j < dim; ++j) x(i, j) = cplx(g(rng), g(rng));
    }
    x = (x + x.adjoint()).eval();
    const CMatrix px = sys.project(x);
    EXPECT_LT(sys.residual(px), 1e-10);
    EXPECT_LT((sys.project(px) - px).norm(), 1e-10);
    // Orthogonality: x - P(x) is normal to the subspace direction feasible - P(x).
    EXPECT_NEAR(hs_inner(x - px, feasible - px), 0.0, 1e-9);
  }
}

TEST(ConstraintSystem, FreeModeContainsProductStates) {
  const auto sys = MarginalConstraintSystem::free(2, 3);
  const HermitianOp sigma = HermitianOp::diagonal(2, 1, {0.4, 0.6});
  EXPECT_LT(sys.residual(product_power(sigma, 4).matrix()), 1e-13);
  EXPECT_GT(sys.residual(DensityMatrix::pure(2, 4, basis_state(2, {0, 0, 0, 1})).matrix()), 0.5);
}

TEST(Membership, MaximallyMixedIsMember) {
  const auto rho = DensityMatrix::maximally_mixed(2, 2);
  for (int n = 2; n <= 5; ++n) {
    const auto v = membership(rho, n);
    EXPECT_EQ(v.status, MembershipStatus::Member) << "N=" << n;
    expect_witness_valid(v, rho, n);
  }
}

TEST(Membership, UnequalOneSiteMarginalsRejectedByPrecheck) {
  const auto rho = DensityMatrix::pure(2, 2, basis_state(2, {0, 1}));
  const auto v = membership(rho, 2);
  EXPECT_EQ(v.status, MembershipStatus::NonMember);
  EXPECT_EQ(v.iterations, 0);
  EXPECT_NEAR(v.distance_estimate, std::sqrt(2.0), 1e-14);
}

TEST(Membership, SingletIsNotThreeSiteExtendable) {
  const auto v = membership(singlet(), 2);
  EXPECT_EQ(v.status, MembershipStatus::NonMember);
  EXPECT_GT(v.distance_estimate, 1e-2);
  EXPECT_FALSE(v.witness.has_value());
}

TEST(Membership, MpsGeneratedStatesAreMembers) {
  for (std::uint64_t k = 1; k <= 4; ++k) {
    const int D = 1 + static_cast<int>(k % 3);
    const auto rho = two_site_reduced_state(UniformMPS::random(2, D, k));
    for (int n = 2; n <= 3; ++n) {
      const auto v = membership(rho, n);
      EXPECT_EQ(v.status, MembershipStatus::Member) << "seed " << k << " N=" << n;
      if (v.status == MembershipStatus::Member) expect_witness_valid(v, rho, n);
    }
  }
}

TEST(Membership, WernerFamilyNested) {
  for (int wi = 0; wi <= 5; ++wi) {
    const double w = 0.2 * wi;
    const auto rho = werner(w);
    std::vector<MembershipStatus> st;
    for (int n = 2; n <= 4; ++n) st.push_back(membership(rho, n).status);
    for (std::size_t i = 0; i + 1 < st.size(); ++i) {
      if (st[i] == MembershipStatus::NonMember) EXPECT_NE(st[i + 1], MembershipStatus::Member) << "w=" << w;
      if (st[i + 1] == MembershipStatus::Member) EXPECT_NE(st[i], MembershipStatus::NonMember) << "w=" << w;
    }
    if (wi == 0) EXPECT_EQ(st.back(), MembershipStatus::Member);
    if (wi == 5) EXPECT_EQ(st.front(), MembershipStatus::NonMember);
  }
}

TEST(Membership, RejectsBadArguments) {
  EXPECT_THROW(membership(DensityMatrix::maximally_mixed(2, 3), 2), std::invalid_argument);
  EXPECT_THROW(membership(DensityMatrix::maximally_mixed(2, 2), 1), std::invalid_argument);
}

TEST(Relaxation, ZZTwoLevels) {
  const auto b = marginal_relaxation_bound(zz_model(), 2);
  EXPECT_EQ(b.method, LowerBoundMethod::marginal_relaxation);
  EXPECT_NEAR(b.value, -1.0, 1e-5);
}

TEST(Relaxation, BelowExactAndMonotone) {
  // Free-fermion value 16 eps_paper(gamma) is the exact energy per bond.
  const auto h = xy_hamiltonian(0.5);
  const double exact = 16.0 * xy_energy_density_paper(0.5);
  const auto b2 = marginal_relaxation_bound(h, 2);
  const auto b3 = marginal_relaxation_bound(h, 3);
  EXPECT_LE(b2.value - b2.slack, exact);
  EXPECT_LE(b3.value - b3.slack, exact);
  EXPECT_GE(b3.value, b2.value);
  EXPECT_GT(b3.value, exact - 0.2);
}

TEST(Relaxation, ConstantEnergyModel) {
  PauliTwoBodyHamiltonian h;
  h.set(Pauli::I, Pauli::I, 0.75);
  EXPECT_NEAR(marginal_relaxation_bound(h, 2).value, 0.75, 1e-12);
  EXPECT_THROW(marginal_relaxation_bound(h, 7), std::invalid_argument);
}

}  // namespace
