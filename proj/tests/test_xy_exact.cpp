#include "redset/xy_exact.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

namespace {

using namespace redset;

double elliptic_E_quadrature(double z) {
  auto f = [z](double k) { return std::sqrt(1.0 - z * z * std::sin(k) * std::sin(k)); };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, std::numbers::pi / 2, 15, 1e-15);
}

// Free-fermion ground energy per bond of (1-g) XX + (1+g) YY.
double xy_energy_free_fermion(double g) {
  auto f = [g](double k) {
    return std::sqrt((1 - g) * (1 - g) + (1 + g) * (1 + g) + 2 * (1 - g) * (1 + g) * std::cos(k));
  };
  return -boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, std::numbers::pi, 15, 1e-15) /
         std::numbers::pi;
}

TEST(EllipticE, MatchesQuadrature) {
  for (double z : {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99, 0.999}) {
    EXPECT_NEAR(elliptic_E_agm(z), elliptic_E_quadrature(z), 1e-11) << "z=" << z;
  }
}

TEST(EllipticE, Endpoints) {
  EXPECT_NEAR(elliptic_E_agm(0.0), std::numbers::pi / 2, 1e-13);
  EXPECT_NEAR(elliptic_E_agm(1.0), 1.0, 1e-13);
  EXPECT_NEAR(elliptic_E_agm(1.0 - 1e-12), 1.0, 1e-9);
}

TEST(EllipticE, RejectsOutsideUnitInterval) {
  EXPECT_THROW(elliptic_E_agm(-0.1), std::domain_error);
  EXPECT_THROW(elliptic_E_agm(1.0001), std::domain_error);
  EXPECT_THROW(elliptic_E_agm(std::nan("")), std::domain_error);
}

TEST(XYEnergy, EvenInGammaAndEndpoints) {
  for (double g : {0.1, 0.5, 0.9}) EXPECT_EQ(xy_energy_density_paper(g), xy_energy_density_paper(-g));
  EXPECT_NEAR(xy_energy_density_paper(0.0), -1.0 / (4 * std::numbers::pi), 1e-15);
  EXPECT_NEAR(xy_energy_density_paper(1.0), -1.0 / 8.0, 1e-15);
  EXPECT_THROW(xy_energy_density_paper(1.5), std::domain_error);
}

TEST(XYEnergy, StrictlyDecreasingInGamma) {
  for (int i = 0; i < 100; ++i) EXPECT_GT(xy_energy_density_paper(0.01 * i), xy_energy_density_paper(0.01 * (i + 1)));
}

TEST(XYEnergy, FreeFermionEnergyIsSixteenTimesFormula) {
  for (double g = 0.0; g <= 1.0 + 1e-12; g += 0.1) {
    EXPECT_NEAR(xy_energy_free_fermion(g), 16.0 * xy_energy_density_paper(g), 1e-12) << "gamma=" << g;
  }
}

TEST(XYEnergy, PointCarriesScale) {
  const auto p = xy_point(0.6, 16.0);
  EXPECT_NEAR(p.z_squared, 0.64, 1e-15);
  EXPECT_DOUBLE_EQ(p.eps_calibrated, 16.0 * p.eps_paper);
}

TEST(HypergeometricOde, ResidualSmallOnGrid) {
  for (int i = 1; i <= 18; ++i) {
    const double m = 0.05 * i;
    EXPECT_LT(hypergeom_ode_residual(m, 1e-4), 1e-5) << "m=" << m;
  }
}

TEST(HypergeometricOde, WrongConstantsControl) {
  for (int i = 1; i <= 18; ++i) {
    const double m = 0.05 * i;
    EXPECT_GT(hypergeom_ode_residual(m, 1e-4, {0.5, 0.5, 1.0}), 1e-2) << "m=" << m;
  }
}

TEST(HypergeometricOde, SecondOrderInStep) {
  // Truncation dominates at coarse steps: halving the step quarters it.
  const double r1 = hypergeom_ode_residual(0.5, 2e-2);
  const double r2 = hypergeom_ode_residual(0.5, 1e-2);
  EXPECT_GT(r1 / r2, 3.5);
  EXPECT_LT(r1 / r2, 4.5);
}

TEST(HypergeometricOde, RejectsEndpoints) {
  EXPECT_THROW(hypergeom_ode_residual(1e-5, 1e-4), std::domain_error);
  EXPECT_THROW(hypergeom_ode_residual(0.5, 0.0), std::invalid_argument);
}

TEST(Calibration, GappedPointsFixScaleNearSixteen) {
  const auto cal = calibrate_scale({0.8, 0.9}, {10, 12});
  ASSERT_EQ(cal.entries.size(), 2u);
  EXPECT_NEAR(cal.s, 16.0, 1e-3);
  EXPECT_TRUE(cal.reliable);
  for (const auto& e : cal.entries) {
    EXPECT_EQ(e.energy_per_bond.size(), 2u);
    EXPECT_NEAR(e.scale, 16.0, 1e-2);
  }
}

TEST(Calibration, RejectsBadChainLengths) {
  EXPECT_THROW(calibrate_scale({0.5}, {8}), std::invalid_argument);
  EXPECT_THROW(calibrate_scale({0.5}, {8, 9}), std::invalid_argument);
  EXPECT_THROW(calibrate_scale({0.5}, {10, 8}), std::invalid_argument);
  EXPECT_THROW(calibrate_scale({0.5}, {16, 18}), std::invalid_argument);
  EXPECT_THROW(calibrate_scale({1.5}, {8, 10}), std::invalid_argument);
}

}  // namespace
