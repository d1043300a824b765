#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "fracsol/error.hpp"
#include "fracsol/field.hpp"
#include "fracsol/functionals.hpp"
#include "fracsol/ground_state.hpp"
#include "fracsol/spectral.hpp"

namespace fracsol {

struct IdentityReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double relative_residual = 0.0;
  bool pass = false;
  double tolerance = 1e-6;
};

inline IdentityReport make_report(std::string name, double lhs, double rhs, double tol) {
  IdentityReport r{std::move(name), lhs, rhs, 0.0, false, tol};
  r.relative_residual = std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1e-300});
  r.pass = r.relative_residual < tol;
  return r;
}

inline void to_json(nlohmann::json& j, const IdentityReport& r) {
  j = {{"name", r.name}, {"lhs", r.lhs}, {"rhs", r.rhs}, {"relative_residual", r.relative_residual},
       {"pass", r.pass}, {"tolerance", r.tolerance}};
}

inline bool all_pass(const std::vector<IdentityReport>& rs) {
  return std::all_of(rs.begin(), rs.end(), [](const IdentityReport& r) { return r.pass; });
}

/// Integral relations satisfied by solutions of D^a Q + c Q - Q^2/2 = 0.
///
/// K = int |D^{a/2} Q|^2, M = int Q^2, B = int Q^3.
inline std::vector<IdentityReport> identity_suite(const SolitaryWave& Q, double alpha, double c, double tol = 1e-6) {
  require(Q.residual_sup < 1e-6, "identity_suite needs a converged profile (residual_sup < 1e-6)");
  require(Q.model.symbol.is_pure_power() && std::abs(Q.model.symbol.alpha() - alpha) < 1e-14,
          "identity_suite needs pure-power dispersion with matching alpha");
  require(Q.model.p == 1 && !(Q.model.family == Family::FBBM && Q.model.bbm_form == BbmForm::Derived),
          "identity_suite applies to the quadratic profile equation");
  require(alpha > 1.0 / 3.0, "identity_suite requires alpha > 1/3");
  const double K = fractional_seminorm_squared(Q.profile, 0.5 * alpha);
  const double M = l2_squared(Q.profile);
  const double B = power_integral(Q.profile, 3);
  return {
      make_report("energy_identity", K + c * M, 0.5 * B, tol),
      make_report("pohozaev_identity", B / 6.0, 0.5 * (1.0 - alpha) * K + 0.5 * c * M, tol),
      make_report("nonexistence_relation", (3.0 * alpha - 1.0) * K, c * M, tol),
      make_report("kinetic_mass_ratio", K, c * M / (3.0 * alpha - 1.0), tol),
      make_report("cubic_mass_ratio", B, 6.0 * alpha * c * M / (3.0 * alpha - 1.0), tol),
  };
}

namespace detail {

// Both sides of the Pohozaev identity with phi zero-padded to a box P times larger.
inline std::pair<double, double> pohozaev_sides(const RealField& phi, double alpha, std::size_t P) {
  const Grid1D& g0 = phi.grid();
  Grid1D g(g0.n() * P, g0.half_length() * static_cast<double>(P));
  std::vector<double> v(g.n(), 0.0);
  const std::size_t off = (P - 1) * g0.n() / 2;
  for (std::size_t k = 0; k < g0.n(); ++k) v[off + k] = phi[k];
  RealField u(g, std::move(v));
  RealField Du = d_alpha(u, alpha);
  RealField du = derivative(u);
  double lhs = 0.0;
  for (std::size_t k = 0; k < g.n(); ++k) lhs += Du[k] * g.x(k) * du[k];
  lhs *= g.dx();
  return {lhs, 0.5 * (alpha - 1.0) * fractional_seminorm_squared(u, 0.5 * alpha)};
}

}  // namespace detail

/// int (D^a phi) x phi' dx against ((a-1)/2) int |D^{a/2} phi|^2.
///
/// The periodic box perturbs both sides by O(L^{-1-a}) through the cusp of
/// |xi|^a at the origin. Both sides are evaluated with phi zero-padded by
/// factors 8 and 16 and extrapolated in that rate. The residual is relative to
/// int |D^{a/2} phi|^2, since the identity is 0 = 0 at a = 1.
inline IdentityReport pohozaev_functional_check(const RealField& phi, double alpha, double tol = 1e-6) {
  require(alpha >= 0.0 && alpha <= 2.0, "pohozaev check requires alpha in [0, 2]");
  const Grid1D& g = phi.grid();
  const double sup = phi.sup_norm();
  require(sup > 0.0, "pohozaev check needs a nonzero field");
  const std::size_t edge = std::max<std::size_t>(1, g.n() / 100);
  double boundary = 0.0;
  for (std::size_t k = 0; k < edge; ++k)
    boundary = std::max({boundary, std::abs(phi[k]), std::abs(phi[g.n() - 1 - k])});
  require(boundary < 1e-10 * sup, "field is not negligible near the box boundary; x-weighting is not periodic-safe");
  const auto [l8, r8] = detail::pohozaev_sides(phi, alpha, 8);
  const auto [l16, r16] = detail::pohozaev_sides(phi, alpha, 16);
  const double f = std::pow(2.0, 1.0 + alpha);
  const double lhs = (f * l16 - l8) / (f - 1.0);
  const double rhs = (f * r16 - r8) / (f - 1.0);
  IdentityReport r = make_report("pohozaev_functional", lhs, rhs, tol);
  const double scale = fractional_seminorm_squared(phi, 0.5 * alpha);
  r.relative_residual = std::abs(lhs - rhs) / std::max({scale, std::abs(lhs), std::abs(rhs), 1e-300});
  r.pass = r.relative_residual < tol;
  return r;
}

/// Smooth cutoff: 1 on [-1, 1], 0 outside [-2, 2], C-infinity in between.
inline double cutoff_bump(double x) {
  auto h = [](double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; };
  const double a = std::abs(x);
  if (a <= 1.0) return 1.0;
  if (a >= 2.0) return 0.0;
  const double u = h(2.0 - a), w = h(a - 1.0);
  return u / (u + w);
}

enum class CutoffKind { Inner, Outer };  // phi and 1 - phi

struct LogLogFit {
  double slope = std::numeric_limits<double>::quiet_NaN();
  double intercept = std::numeric_limits<double>::quiet_NaN();
  bool degenerate = true;
};

/// Ordinary least squares on (log x, log y).
inline LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  LogLogFit f;
  if (x.size() != y.size() || x.size() < 2) return f;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!(x[i] > 0.0) || !(y[i] > 0.0) || !std::isfinite(y[i])) return f;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
  }
  const double den = m * sxx - sx * sx;
  if (den == 0.0) return f;
  f.slope = (m * sxy - sx * sy) / den;
  f.intercept = (sy - f.slope * sx) / m;
  f.degenerate = false;
  return f;
}

struct CommutatorResult {
  double alpha = 0.0;
  std::vector<double> r;
  std::vector<double> norms;
  double slope = std::numeric_limits<double>::quiet_NaN();
  bool degenerate = true;
  double target_slope = 0.0;          // 1/4 - alpha
  std::vector<double> cutoff_l4;      // |D^a phi_r|_4
  double cutoff_l4_slope = std::numeric_limits<double>::quiet_NaN();
};

inline void to_json(nlohmann::json& j, const CommutatorResult& c) {
  j = {{"alpha", c.alpha}, {"r", c.r}, {"norms", c.norms}, {"slope", c.slope}, {"degenerate", c.degenerate},
       {"target_slope", c.target_slope}, {"cutoff_l4", c.cutoff_l4}, {"cutoff_l4_slope", c.cutoff_l4_slope}};
}

/// |D^a(phi_r v) - phi_r D^a v|_2 for each r, with phi_r = phi(./r), and the log-log slope.
inline CommutatorResult commutator_decay(double alpha, const RealField& v, const std::vector<double>& r_list,
                                         CutoffKind kind = CutoffKind::Inner) {
  require(alpha > 0.0 && alpha <= 2.0, "commutator_decay requires alpha in (0, 2]");
  require(r_list.size() >= 4, "commutator_decay needs at least 4 radii");
  const Grid1D& g = v.grid();
  for (std::size_t i = 0; i < r_list.size(); ++i) {
    require(r_list[i] > 0.0, "radii must be positive");
    require(i == 0 || r_list[i] > r_list[i - 1], "radii must be increasing");
    require(2.0 * r_list[i] <= 0.5 * g.half_length(), "cutoff support exceeds L/2 for r = " + std::to_string(r_list[i]));
  }
  CommutatorResult res;
  res.alpha = alpha;
  res.r = r_list;
  res.target_slope = 0.25 - alpha;
  RealField Dv = d_alpha(v, alpha);
  for (double r : r_list) {
    RealField phi = RealField::from_function(g, [&](double x) {
      const double b = cutoff_bump(x / r);
      return kind == CutoffKind::Inner ? b : 1.0 - b;
    });
    std::vector<double> pv(g.n()), pDv(g.n());
    for (std::size_t k = 0; k < g.n(); ++k) {
      pv[k] = phi[k] * v[k];
      pDv[k] = phi[k] * Dv[k];
    }
    RealField comm = d_alpha(RealField(g, std::move(pv)), alpha) - RealField(g, std::move(pDv));
    res.norms.push_back(std::sqrt(l2_squared(comm)));
    RealField Dphi = d_alpha(phi, alpha);
    res.cutoff_l4.push_back(std::pow(power_integral(Dphi, 4, true), 0.25));
  }
  LogLogFit f = fit_loglog(res.r, res.norms);
  res.slope = f.slope;
  res.degenerate = f.degenerate;
  res.cutoff_l4_slope = fit_loglog(res.r, res.cutoff_l4).slope;
  return res;
}

/// v_theta(x) = theta^{a/(2a-1)} v(theta^{1/(2a-1)} x), resampled on the same grid.
inline RealField v_theta(const RealField& v, double theta, double alpha) {
  require(theta > 0.0 && alpha > 0.5, "v_theta requires theta > 0 and alpha > 1/2");
  const double s = std::pow(theta, 1.0 / (2.0 * alpha - 1.0));
  std::vector<double> w = interpolate_scaled(v, s);
  const double amp = std::pow(theta, alpha / (2.0 * alpha - 1.0));
  const Grid1D& g = v.grid();
  // Points mapped outside the box would pick up periodic images; v is taken to vanish there.
  for (std::size_t k = 0; k < w.size(); ++k) w[k] = std::abs(s * g.x(k)) < g.half_length() ? amp * w[k] : 0.0;
  return RealField(g, std::move(w));
}

struct IqScalingResult {
  double q = 0.0;
  double I_q = 0.0;
  std::vector<double> thetas;
  std::vector<double> I_theta_q;
  std::vector<IdentityReport> reports;
};

inline void to_json(nlohmann::json& j, const IqScalingResult& r) {
  j = {{"q", r.q}, {"I_q", r.I_q}, {"thetas", r.thetas}, {"I_theta_q", r.I_theta_q}, {"reports", r.reports}};
}

/// I_{theta q} = theta^{(3a-1)/(2a-1)} I_q, plus the v_theta laws on the computed minimizer.
///
/// The field laws are checked in the stretching direction (v_{1/theta} for theta > 1)
/// so that the resampled field stays resolved on the grid.
inline IqScalingResult iq_scaling_check(double alpha, double q, const std::vector<double>& thetas, const Grid1D& grid,
                                        const MinimizerOptions& opts = {}, double tol = 1e-3, double law_tol = 1e-6) {
  require(alpha > 0.5 && alpha < 1.0, "iq_scaling_check requires alpha in (1/2, 1)");
  require(!thetas.empty(), "theta list is empty");
  const double expo = (3.0 * alpha - 1.0) / (2.0 * alpha - 1.0);
  const DispersionSymbol sym = DispersionSymbol::pure_power(alpha);
  MinimizerResult base = minimize_iq(q, alpha, grid, opts);
  IqScalingResult out;
  out.q = q;
  out.I_q = base.I_q;
  const double m0 = mass(base.profile);
  const double e0 = energy_fkdv(base.profile, sym).value;
  for (double th : thetas) {
    require(th > 0.0, "theta must be positive");
    const std::string tag = "theta=" + std::to_string(th);
    double I = base.I_q;
    if (th != 1.0) {
      MinimizerOptions o = opts;
      if (th < 1.0)
        o.seed = v_theta(base.profile, th, alpha);
      else
        o.seed.reset();
      o.c_guess = opts.c_guess * std::pow(th, alpha / (2.0 * alpha - 1.0));
      I = minimize_iq(th * q, alpha, grid, o).I_q;
    }
    out.thetas.push_back(th);
    out.I_theta_q.push_back(I);
    out.reports.push_back(make_report("iq_ratio " + tag, I / base.I_q, std::pow(th, expo), tol));
    const double t = th > 1.0 ? 1.0 / th : th;
    RealField vt = v_theta(base.profile, t, alpha);
    out.reports.push_back(make_report("mass_law " + tag, mass(vt), t * m0, law_tol));
    out.reports.push_back(make_report("energy_law " + tag, energy_fkdv(vt, sym).value, std::pow(t, expo) * e0, law_tol));
  }
  return out;
}

struct GnScanResult {
  double reference = 0.0;  // J(Q)
  std::vector<double> ratios;
  double min_ratio = 0.0;
  double floor = 1e-8;
  bool pass = false;
};

inline void to_json(nlohmann::json& j, const GnScanResult& r) {
  j = {{"reference", r.reference}, {"ratios", r.ratios}, {"min_ratio", r.min_ratio}, {"floor", r.floor}, {"pass", r.pass}};
}

/// weinstein(f) / weinstein(Q) over a battery; the ground state should be minimal.
inline GnScanResult gn_scan(const SolitaryWave& Q, double alpha, const std::vector<RealField>& battery, double floor = 1e-8) {
  require(!battery.empty(), "gn_scan battery is empty");
  GnScanResult r;
  r.floor = floor;
  r.reference = weinstein(Q.profile, alpha);
  r.min_ratio = std::numeric_limits<double>::infinity();
  for (const RealField& f : battery) {
    const double ratio = weinstein(f, alpha) / r.reference;
    r.ratios.push_back(ratio);
    r.min_ratio = std::min(r.min_ratio, ratio);
  }
  r.pass = r.min_ratio >= 1.0 - floor;
  return r;
}

/// `count` random band-limited fields followed by four Gaussians, all from one seed.
inline std::vector<RealField> gn_battery(const Grid1D& grid, std::uint64_t seed, int count = 20) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<RealField> out;
  const double L = grid.half_length();
  for (int i = 0; i < count; ++i) {
    // Random low modes under a Gaussian envelope of random width and centre.
    const int modes = 8;
    const double width = 1.0 + 4.0 * (unif(rng) + 1.0);
    const double centre = 0.25 * L * unif(rng);
    std::vector<double> a(modes), b(modes);
    for (int m = 0; m < modes; ++m) { a[m] = unif(rng); b[m] = unif(rng); }
    a[0] += 2.0;
    out.push_back(RealField::from_function(grid, [&](double x) {
      const double y = x - centre;
      double s = 0.0;
      for (int m = 0; m < modes; ++m) {
        const double k = static_cast<double>(m) / width;
        s += a[m] * std::cos(k * y) + b[m] * std::sin(k * y);
      }
      return s * std::exp(-y * y / (2.0 * width * width));
    }));
  }
  for (double w : {0.5, 1.0, 2.0, 4.0})
    out.push_back(RealField::from_function(grid, [&](double x) { return std::exp(-x * x / (w * w)); }));
  return out;
}

}  // namespace fracsol
