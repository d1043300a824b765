#include <cmath>
#include <complex>
#include <numbers>

#include <gtest/gtest.h>

#include "fracsol/functionals.hpp"

using namespace fracsol;
constexpr double pi = std::numbers::pi;

namespace {

RealField bo_profile(const Grid1D& g, double c = 1.0) {
  return RealField::from_function(g, [c](double x) { return 4.0 * c / (1.0 + c * c * x * x); });
}

// Integral of u p(D) u by an explicit O(n^2) transform (no FFT).
double brute_quadratic(const RealField& u, const std::function<double(double)>& p) {
  const Grid1D& g = u.grid();
  const std::size_t n = g.n();
  auto xi = g.wavenumbers();
  double s = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    std::complex<double> uh = 0.0;
    for (std::size_t l = 0; l < n; ++l) uh += u[l] * std::polar(1.0, -xi[j] * g.x(l));
    s += p(std::abs(xi[j])) * std::norm(uh);
  }
  return s * g.dx() / static_cast<double>(n);
}

}  // namespace

TEST(Mass, Values) {
  Grid1D g = make_grid(64, 3.0);
  EXPECT_EQ(mass(RealField::zeros(g)), 0.0);
  RealField c = RealField::from_function(g, [](double) { return 1.7; });
  EXPECT_NEAR(mass(c), 1.7 * 1.7 * 3.0, 1e-13);
  // int (4/(1+x^2))^2 = 8 pi on the line; the box misses 32/(3 L^3).
  Grid1D h = make_grid(8192, 400.0);
  EXPECT_NEAR(mass(bo_profile(h)), 4.0 * pi, 1e-4);
}

TEST(Energy, BenjaminOnoProfile) {
  // Q_hat = 4 pi e^{-|xi|}: int |D^{1/2} Q|^2 = 4 pi; int Q^3 = 64 * 3 pi / 8 = 24 pi.
  Grid1D g = make_grid(16384, 400.0);
  const FunctionalValue E = energy_fkdv(bo_profile(g), DispersionSymbol::pure_power(1.0));
  EXPECT_EQ(E.name, "energy");
  ASSERT_EQ(E.components.size(), 2u);
  EXPECT_NEAR(E.components[0].second, 2.0 * pi, 1e-3);
  EXPECT_NEAR(E.components[1].second, -4.0 * pi, 1e-3);
  EXPECT_NEAR(E.value, -2.0 * pi, 1e-3);
  EXPECT_DOUBLE_EQ(E.value, E.components[0].second + E.components[1].second);
}

TEST(Energy, ZeroAndSignFlip) {
  Grid1D g = make_grid(128, 10.0);
  const auto p = DispersionSymbol::pure_power(0.75);
  EXPECT_EQ(energy_fkdv(RealField::zeros(g), p).value, 0.0);
  RealField u = RealField::from_function(g, [](double x) { return std::exp(-x * x) * (1.0 + 0.3 * x); });
  const FunctionalValue e = energy_fkdv(u, p), em = energy_fkdv(-u, p);
  EXPECT_NEAR(em.value, e.components[0].second + power_integral(u, 3) / 6.0, 1e-14);
}

TEST(Energy, BruteForceOracle) {
  Grid1D g = make_grid(64, 6.0);
  RealField u = RealField::from_function(g, [](double x) { return std::exp(-x * x / 2) * (1 + 0.5 * std::sin(x)); });
  const double alpha = 0.75;
  const double kin = brute_quadratic(u, [&](double a) { return a == 0.0 ? 0.0 : std::pow(a, alpha); });
  double cub = 0.0;
  for (std::size_t k = 0; k < g.n(); ++k) cub += u[k] * u[k] * u[k];
  cub *= g.dx();
  const double oracle = 0.5 * kin - cub / 6.0;
  EXPECT_NEAR(energy_fkdv(u, DispersionSymbol::pure_power(alpha)).value, oracle, 1e-10 * std::abs(oracle));
  // Weinstein from the same brute-force pieces.
  double m2 = 0.0, abs3 = 0.0;
  for (std::size_t k = 0; k < g.n(); ++k) { m2 += u[k] * u[k]; abs3 += std::pow(std::abs(u[k]), 3); }
  m2 *= g.dx();
  abs3 *= g.dx();
  const double J = std::pow(kin, 1 / (2 * alpha)) * std::pow(m2, (3 * alpha - 1) / (2 * alpha)) / abs3;
  EXPECT_NEAR(weinstein(u, alpha), J, 1e-10 * J);
}

TEST(Energy, GeneralizedPower) {
  Grid1D g = make_grid(128, 10.0);
  RealField u = RealField::from_function(g, [](double x) { return std::exp(-x * x); });
  const FunctionalValue e = energy_fkdv(u, DispersionSymbol::pure_power(1.5), 2);
  EXPECT_NEAR(e.components[1].second, -power_integral(u, 4) / 12.0, 1e-15);
}

TEST(BbmQuadratic, Values) {
  Grid1D g = make_grid(64, pi);
  EXPECT_EQ(bbm_quadratic(RealField::zeros(g), 0.5), 0.0);
  RealField s = RealField::from_function(g, [](double x) { return std::sin(x); });
  EXPECT_NEAR(bbm_quadratic(s, 1.0), pi, 1e-13);
  RealField u = RealField::from_function(g, [](double x) { return std::exp(std::cos(x)); });
  EXPECT_GE(bbm_quadratic(u, 0.6), mass(u));
  EXPECT_THROW(bbm_quadratic(u, 1.5), InvalidArgument);
}

TEST(BbmHamiltonian, Values) {
  Grid1D g = make_grid(16, 1.0);
  EXPECT_EQ(bbm_hamiltonian(RealField::zeros(g)), 0.0);
  RealField one = RealField::from_function(g, [](double) { return 1.0; });
  EXPECT_NEAR(bbm_hamiltonian(one), 4.0 / 3.0, 1e-15);
  Grid1D h = make_grid(128, 8.0);
  RealField u = RealField::from_function(h, [](double x) { return std::exp(-x * x) - 0.2; });
  EXPECT_NEAR(bbm_hamiltonian(u) - mass(u), power_integral(u, 3) / 6.0, 1e-14);
}

TEST(Weinstein, BenjaminOnoValue) {
  // J = (24 pi)^{-1} (4 pi)^{1/2} (8 pi) = (2/3) sqrt(pi).
  Grid1D g = make_grid(16384, 400.0);
  EXPECT_NEAR(weinstein(bo_profile(g), 1.0), 2.0 / 3.0 * std::sqrt(pi), 1e-3);
}

TEST(Weinstein, AmplitudeInvarianceAtAlphaOne) {
  Grid1D g = make_grid(256, 20.0);
  RealField u = RealField::from_function(g, [](double x) { return std::exp(-x * x) * (2 + std::cos(x)); });
  EXPECT_NEAR(weinstein(2.0 * u, 1.0), weinstein(u, 1.0), 1e-12 * weinstein(u, 1.0));
}

TEST(Weinstein, ZeroFieldIsAnError) {
  Grid1D g = make_grid(32, 2.0);
  EXPECT_THROW(weinstein(RealField::zeros(g), 0.75), NumericalError);
}

TEST(GnCheck, RatioIsReciprocalWeinstein) {
  Grid1D g = make_grid(256, 20.0);
  RealField u = RealField::from_function(g, [](double x) { return std::exp(-x * x / 3) * (1 - 0.4 * x); });
  const GnCheck c = gn_check(u, 0.75, 1.0);
  EXPECT_NEAR(c.ratio, 1.0 / weinstein(u, 0.75), 1e-12 * c.ratio);
  EXPECT_THROW(gn_check(u, 0.3, 1.0), InvalidArgument);
}

TEST(Functionals, TranslationInvariance) {
  Grid1D g = make_grid(512, 30.0);
  RealField u = RealField::from_function(g, [](double x) { return 3.0 / (1 + x * x) * std::exp(-x * x / 100); });
  RealField v = shift_field(u, 4.321);
  const auto p = DispersionSymbol::pure_power(0.8);
  EXPECT_NEAR(mass(v), mass(u), 1e-12 * mass(u));
  EXPECT_NEAR(energy_fkdv(v, p).value, energy_fkdv(u, p).value, 1e-12 * std::abs(energy_fkdv(u, p).value));
  EXPECT_NEAR(bbm_quadratic(v, 0.8), bbm_quadratic(u, 0.8), 1e-12 * bbm_quadratic(u, 0.8));
  EXPECT_NEAR(bbm_hamiltonian(v), bbm_hamiltonian(u), 1e-12 * bbm_hamiltonian(u));
  EXPECT_NEAR(weinstein(v, 0.8), weinstein(u, 0.8), 1e-12 * weinstein(u, 0.8));
}

TEST(FunctionalValue, Json) {
  const FunctionalValue f = make_functional("energy", {{"kinetic", 1.5}, {"potential", -0.5}});
  nlohmann::json j = f;
  EXPECT_EQ(j["name"], "energy");
  EXPECT_DOUBLE_EQ(j["value"].get<double>(), 1.0);
  EXPECT_EQ(j["components"][0][0], "kinetic");
}
