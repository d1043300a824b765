#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "fracsol/verification.hpp"

using namespace fracsol;
constexpr double pi = std::numbers::pi;

TEST(IdentitySuite, BenjaminOnoAnalytic) {
  // Exact line soliton: K = 4 pi, int Q^2 = 8 pi, int Q^3 = 24 pi.
  Grid1D g = make_grid(1 << 15, 1600.0);
  SolitaryWave w = petviashvili(ModelSpec::fkdv(1.0), 1.0, g);
  auto rs = identity_suite(w, 1.0, 1.0, 1e-4);
  ASSERT_EQ(rs.size(), 5u);
  EXPECT_EQ(rs[3].name, "kinetic_mass_ratio");
  EXPECT_NEAR(rs[3].lhs, 4.0 * pi, 1e-3);
  EXPECT_NEAR(rs[3].rhs, 4.0 * pi, 1e-3);
  EXPECT_TRUE(all_pass(rs));
}

TEST(IdentitySuite, FractionalProfilePasses) {
  Grid1D g = make_grid(1 << 19, 25600.0);
  SolitaryWave w = petviashvili(ModelSpec::fkdv(0.75), 1.0, g);
  for (const auto& r : identity_suite(w, 0.75, 1.0)) EXPECT_TRUE(r.pass) << r.name << " " << r.relative_residual;
}

TEST(IdentitySuite, PerturbedProfileFails) {
  Grid1D g = make_grid(4096, 200.0);
  SolitaryWave w = petviashvili(ModelSpec::fkdv(0.75), 1.0, g);
  SolitaryWave p = w;
  p.profile = w.profile + RealField::from_function(g, [](double x) { return 0.01 * std::exp(-x * x); });
  auto rs = identity_suite(p, 0.75, 1.0);
  EXPECT_FALSE(all_pass(rs));
}

TEST(IdentitySuite, RejectsUnconverged) {
  Grid1D g = make_grid(1024, 50.0);
  SolitaryWave w = petviashvili(ModelSpec::fkdv(0.8), 1.0, g);
  w.residual_sup = 1e-3;
  EXPECT_THROW(identity_suite(w, 0.8, 1.0), InvalidArgument);
}

TEST(IdentityReport, Definition) {
  IdentityReport r = make_report("x", 1.0, 1.0 + 1e-7, 1e-6);
  EXPECT_NEAR(r.relative_residual, 1e-7 / (1.0 + 1e-7), 1e-15);
  EXPECT_TRUE(r.pass);
  EXPECT_FALSE(make_report("y", 0.0, 1.0, 0.5).pass);
  EXPECT_EQ(make_report("z", 0.0, 0.0, 1e-6).relative_residual, 0.0);
}

TEST(Pohozaev, AlphaZeroExact) {
  Grid1D g = make_grid(512, 20.0);
  RealField phi = RealField::from_function(g, [](double x) { return std::exp(-x * x); });
  IdentityReport r = pohozaev_functional_check(phi, 0.0, 1e-12);
  EXPECT_TRUE(r.pass) << r.relative_residual;
  EXPECT_NEAR(r.rhs, -0.5 * std::sqrt(pi / 2.0), 1e-12);
}

TEST(Pohozaev, AlphaTwoFiniteDifferenceOracle) {
  Grid1D g = make_grid(1024, 20.0);
  RealField phi = RealField::from_function(g, [](double x) { return std::exp(-x * x); });
  // D^2 = -d^2/dx^2; sixth-order central differences.
  const double h = g.dx();
  const std::size_t n = g.n();
  auto at = [&](long k) { return phi[static_cast<std::size_t>((k + static_cast<long>(n)) % static_cast<long>(n))]; };
  double lhs = 0.0, rhs = 0.0;
  for (long k = 0; k < static_cast<long>(n); ++k) {
    const double d1 = (-at(k - 3) + 9 * at(k - 2) - 45 * at(k - 1) + 45 * at(k + 1) - 9 * at(k + 2) + at(k + 3)) / (60 * h);
    const double d2 = (2 * at(k - 3) - 27 * at(k - 2) + 270 * at(k - 1) - 490 * at(k) + 270 * at(k + 1) - 27 * at(k + 2) + 2 * at(k + 3)) / (180 * h * h);
    lhs += -d2 * g.x(static_cast<std::size_t>(k)) * d1;
    rhs += d1 * d1;
  }
  lhs *= h;
  rhs *= 0.5 * h;
  IdentityReport r = pohozaev_functional_check(phi, 2.0);
  EXPECT_NEAR(r.lhs, lhs, 1e-8);
  EXPECT_NEAR(r.rhs, rhs, 1e-8);
}

TEST(Pohozaev, FractionalGaussian) {
  Grid1D g = make_grid(4096, 40.0);
  RealField phi = RealField::from_function(g, [](double x) { return std::exp(-x * x); });
  for (double a : {0.3, 0.6, 1.0, 1.5}) {
    IdentityReport r = pohozaev_functional_check(phi, a);
    EXPECT_TRUE(r.pass) << a << " " << r.relative_residual;
    // Line value: ((a-1)/2) int_0^inf xi^a e^{-xi^2/2} dxi.
    const double exact = 0.5 * (a - 1.0) * std::pow(2.0, 0.5 * (a - 1.0)) * std::tgamma(0.5 * (a + 1.0));
    EXPECT_NEAR(r.rhs, exact, 1e-8);
    EXPECT_NEAR(r.lhs, exact, 1e-8);
  }
}

TEST(Pohozaev, RejectsBoundarySupport) {
  Grid1D g = make_grid(256, 5.0);
  RealField phi = RealField::from_function(g, [](double x) { return std::exp(-x * x / 8); });
  EXPECT_THROW(pohozaev_functional_check(phi, 0.6), InvalidArgument);
}

TEST(Cutoff, Shape) {
  EXPECT_EQ(cutoff_bump(0.0), 1.0);
  EXPECT_EQ(cutoff_bump(1.0), 1.0);
  EXPECT_EQ(cutoff_bump(-2.0), 0.0);
  EXPECT_EQ(cutoff_bump(3.0), 0.0);
  EXPECT_NEAR(cutoff_bump(1.5), 0.5, 1e-15);
  for (double x = 1.0; x < 2.0; x += 0.01) EXPECT_GE(cutoff_bump(x), cutoff_bump(x + 0.01));
}

TEST(LogLogFit, ExactPowerLaw) {
  std::vector<double> r{4, 8, 16, 32}, y;
  for (double v : r) y.push_back(3.0 * std::pow(v, -0.7));
  LogLogFit f = fit_loglog(r, y);
  EXPECT_FALSE(f.degenerate);
  EXPECT_NEAR(f.slope, -0.7, 1e-12);
  EXPECT_NEAR(std::exp(f.intercept), 3.0, 1e-12);
}

TEST(Commutator, ZeroFieldDegenerate) {
  Grid1D g = make_grid(4096, 400.0);
  CommutatorResult c = commutator_decay(0.75, RealField::zeros(g), {4, 8, 16, 32});
  for (double v : c.norms) EXPECT_EQ(v, 0.0);
  EXPECT_TRUE(c.degenerate);
}

TEST(Commutator, CutoffFactorHasExactRate) {
  Grid1D g = make_grid(1 << 16, 1600.0);
  RealField v = RealField::from_function(g, [](double x) { return std::exp(-x * x); });
  CommutatorResult c = commutator_decay(0.75, v, {4, 8, 16, 32});
  EXPECT_NEAR(c.cutoff_l4_slope, 0.25 - 0.75, 1e-3);
  EXPECT_DOUBLE_EQ(c.target_slope, -0.5);
  // Complementary cutoff gives the same commutator norm.
  CommutatorResult o = commutator_decay(0.75, v, {4, 8, 16, 32}, CutoffKind::Outer);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(o.norms[i], c.norms[i], 1e-12 * c.norms[i] + 1e-300);
}

TEST(Commutator, Rejections) {
  Grid1D g = make_grid(1024, 100.0);
  RealField v = RealField::from_function(g, [](double x) { return std::exp(-x * x); });
  EXPECT_THROW(commutator_decay(0.75, v, {4, 8, 16}), InvalidArgument);
  EXPECT_THROW(commutator_decay(0.75, v, {4, 8, 16, 32}), InvalidArgument);  // 2 * 32 > L/2
  EXPECT_THROW(commutator_decay(0.75, v, {4, 8, 8, 12}), InvalidArgument);
}

TEST(VTheta, MassLaw) {
  Grid1D g = make_grid(4096, 200.0);
  // Zero mean, so the |xi|^alpha cusp at the origin does not spoil the kinetic term.
  RealField v = RealField::from_function(g, [](double x) { return (1 - x * x / 25.0) * std::exp(-x * x / 50.0) * (1 + 0.2 * std::sin(x / 3)); });
  const double alpha = 0.75;
  RealField v3 = v_theta(v, 3.0, alpha);
  EXPECT_NEAR(mass(v3) / mass(v), 3.0, 1e-10);
  const auto p = DispersionSymbol::pure_power(alpha);
  EXPECT_NEAR(energy_fkdv(v3, p).components[0].second / energy_fkdv(v, p).components[0].second,
              std::pow(3.0, (3 * alpha - 1) / (2 * alpha - 1)), 1e-8 * std::pow(3.0, (3 * alpha - 1) / (2 * alpha - 1)));
}

TEST(IqScaling, ThetaOneIsExact) {
  Grid1D g = make_grid(2048, 100.0);
  IqScalingResult r = iq_scaling_check(0.75, 10.0, {1.0}, g);
  EXPECT_EQ(r.I_theta_q[0], r.I_q);
  EXPECT_EQ(r.reports[0].relative_residual, 0.0);
}

TEST(GnScan, GroundStateIsMinimal) {
  Grid1D g = make_grid(1 << 15, 3200.0);
  SolitaryWave Q = petviashvili(ModelSpec::fkdv(0.75), 1.0, g);
  GnScanResult self = gn_scan(Q, 0.75, {Q.profile});
  EXPECT_EQ(self.min_ratio, 1.0);
  std::vector<RealField> battery = gn_battery(g, 7);
  EXPECT_EQ(battery.size(), 24u);
  GnScanResult r = gn_scan(Q, 0.75, battery);
  EXPECT_TRUE(r.pass);
  EXPECT_GT(r.min_ratio, 1.0);
  // The Gaussian sits strictly above the ground state.
  EXPECT_GT(r.ratios.back(), 1.0);
  EXPECT_THROW(gn_scan(Q, 0.75, {}), InvalidArgument);
}

TEST(GnScan, BatteryIsSeeded) {
  Grid1D g = make_grid(1024, 100.0);
  auto a = gn_battery(g, 11), b = gn_battery(g, 11), c = gn_battery(g, 12);
  EXPECT_EQ((a[3] - b[3]).sup_norm(), 0.0);
  EXPECT_GT((a[3] - c[3]).sup_norm(), 0.0);
}
