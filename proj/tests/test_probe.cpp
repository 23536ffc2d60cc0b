#include "redset/probe.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace {

using namespace redset;

TEST(Monomials, OrderedByTotalDegree) {
  const auto m = monomials(2);
  ASSERT_EQ(m.size(), 6u);
  EXPECT_EQ(m[0], std::make_pair(0, 0));
  EXPECT_EQ(m[2], std::make_pair(1, 0));
  EXPECT_EQ(m[5], std::make_pair(2, 0));
  const auto m3 = monomials(3);
  EXPECT_TRUE(std::equal(m.begin(), m.end(), m3.begin()));
}

TEST(RelationSearch, SquareControl) {
  const auto rows = probe_sweep(ProbeTarget::control_x2, 2, 200, 0);
  EXPECT_FALSE(rows[0].result.relation_found);
  EXPECT_GT(rows[0].result.sigma_min, 1e-3);
  EXPECT_TRUE(rows[1].result.relation_found);
  EXPECT_LT(rows[1].result.sigma_min, 1e-10);
  EXPECT_LT(rows[1].result.residual_max, 1e-10);
  EXPECT_GT(rows[0].result.sigma_min / rows[1].result.sigma_min, 1e6);
  // The relation is y - x^2: only the y and x^2 coefficients survive.
  const auto& c = rows[1].result.best_coeffs;
  const auto mono = monomials(2);
  for (std::size_t k = 0; k < mono.size(); ++k) {
    if (mono[k] != std::make_pair(1, 0) && mono[k] != std::make_pair(0, 2)) EXPECT_LT(std::abs(c(k)), 1e-8);
  }
}

TEST(RelationSearch, SqrtControl) {
  const auto rows = probe_sweep(ProbeTarget::control_sqrt, 2, 200, 0);
  EXPECT_FALSE(rows[0].result.relation_found);
  EXPECT_GT(rows[0].result.sigma_min, 1e-3);
  EXPECT_TRUE(rows[1].result.relation_found);
  EXPECT_LT(rows[1].result.sigma_min, 1e-9);
}

TEST(RelationSearch, ExponentialHasNoLowDegreeRelation) {
  const auto rows = probe_sweep(ProbeTarget::control_exp, 2, 200, 0);
  for (const auto& r : rows) EXPECT_FALSE(r.result.relation_found);
}

TEST(RelationSearch, SigmaNestedInDegree) {
  for (auto t : {ProbeTarget::eps_paper, ProbeTarget::control_exp, ProbeTarget::control_sqrt}) {
    const auto rows = probe_sweep(t, 6, 200, 0);
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
      EXPECT_LE(rows[i + 1].result.sigma_min, rows[i].result.sigma_min + 1e-14) << to_string(t) << " D=" << i + 1;
    }
    for (const auto& r : rows) EXPECT_TRUE(r.result.evidence_only);
  }
}

TEST(RelationSearch, SeedStabilityOnXYTarget) {
  const auto a = probe_sweep(ProbeTarget::eps_paper, 3, 200, 0);
  const auto b = probe_sweep(ProbeTarget::eps_paper, 3, 200, 12345);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double ratio = a[i].result.sigma_min / b[i].result.sigma_min;
    EXPECT_LT(ratio, 10.0);
    EXPECT_GT(ratio, 0.1);
  }
}

TEST(RelationSearch, ScaledTargetHasSameSigmaAtDegreeOne) {
  // Column normalization removes the scale from the y column.
  const auto a = probe_sweep(ProbeTarget::eps_paper, 1, 200, 0);
  const auto b = probe_sweep(ProbeTarget::eps_calibrated, 1, 200, 0, 16.0);
  EXPECT_NEAR(a[0].result.sigma_min, b[0].result.sigma_min, 1e-12);
}

TEST(RelationSearch, InputValidation) {
  std::vector<Sample> few{{0.1, 1.0}, {0.2, 2.0}};
  EXPECT_THROW(relation_search(few, 1, {}), std::invalid_argument);
  std::vector<Sample> dup(10, Sample{0.5, 1.0});
  EXPECT_THROW(relation_search(dup, 1, {}), std::invalid_argument);
  EXPECT_THROW(relation_search(dup, 0, {}), std::invalid_argument);
  EXPECT_THROW(probe_target_from_string("gamma"), std::invalid_argument);
}

TEST(ChebyshevNodes, SortedInsideInterval) {
  const auto x = chebyshev_nodes(50, 0.1, 0.9, 7);
  ASSERT_EQ(x.size(), 50u);
  for (std::size_t i = 0; i < x.size(); ++i) {
    EXPECT_GT(x[i], 0.1);
    EXPECT_LT(x[i], 0.9);
    if (i) EXPECT_LT(x[i - 1], x[i]);
  }
  EXPECT_EQ(chebyshev_nodes(20, 0, 1, 0), chebyshev_nodes(20, 0, 1, 0));
}

}  // namespace
