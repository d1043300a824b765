#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "fracsol/error.hpp"
#include "fracsol/fft.hpp"
#include "fracsol/field.hpp"
#include "fracsol/functionals.hpp"
#include "fracsol/spectral.hpp"
#include "fracsol/symbol.hpp"

namespace fracsol {

enum class Family { FKdV, FBBM, GFKdV };
enum class BbmForm { Paper, Derived };

inline std::string to_string(Family f) {
  switch (f) {
    case Family::FKdV: return "fkdv";
    case Family::FBBM: return "fbbm";
    case Family::GFKdV: return "gfkdv";
  }
  return "unknown";
}

inline std::string to_string(BbmForm f) { return f == BbmForm::Paper ? "paper" : "derived"; }

inline Family parse_family(const std::string& s) {
  if (s == "fkdv") return Family::FKdV;
  if (s == "fbbm") return Family::FBBM;
  if (s == "gfkdv") return Family::GFKdV;
  throw InvalidArgument("unknown family '" + s + "' (expected fkdv, fbbm or gfkdv)");
}

inline BbmForm parse_bbm_form(const std::string& s) {
  if (s == "paper") return BbmForm::Paper;
  if (s == "derived") return BbmForm::Derived;
  throw InvalidArgument("unknown bbm form '" + s + "' (expected paper or derived)");
}

struct ModelSpec {
  Family family = Family::FKdV;
  DispersionSymbol symbol = DispersionSymbol::pure_power(1.0);
  int p = 1;
  BbmForm bbm_form = BbmForm::Paper;

  static ModelSpec fkdv(double alpha) { return {Family::FKdV, DispersionSymbol::pure_power(alpha), 1, BbmForm::Paper}; }
  static ModelSpec fbbm(double alpha, BbmForm form = BbmForm::Paper) {
    return {Family::FBBM, DispersionSymbol::pure_power(alpha), 1, form};
  }
  static ModelSpec gfkdv(double alpha, int p) { return {Family::GFKdV, DispersionSymbol::pure_power(alpha), p, BbmForm::Paper}; }

  void validate() const {
    require(p >= 1, "nonlinearity power p must be a positive integer");
    require(family == Family::GFKdV || p == 1, "fkdv and fbbm use the quadratic nonlinearity (p = 1)");
  }

  /// Non-fatal remarks about the chosen regime.
  std::vector<std::string> warnings() const {
    std::vector<std::string> w;
    if (family == Family::GFKdV) {
      if (!symbol.is_pure_power())
        w.push_back("gfkdv is intended for pure-power dispersion");
      else if (symbol.alpha() <= p / 2.0)
        w.push_back("alpha <= p/2: outside the stable regime of gfkdv");
    }
    return w;
  }
};

/// Profile equation written as (a p(D) + b) Q = Q^{p+1}/(p+1).
struct ProfileOperator {
  double a = 1.0;
  double b = 1.0;
};

inline ProfileOperator profile_operator(const ModelSpec& m, double c) {
  if (m.family == Family::FBBM && m.bbm_form == BbmForm::Derived) {
    require(c > 1.0, "derived fbbm solitary equation requires c > 1");
    return {c, c - 1.0};
  }
  return {1.0, c};
}

/// Q^{p+1}/(p+1); with `dealias` and p = 1 the square is truncated by the two-thirds rule.
inline std::vector<double> profile_nonlinearity(const RealField& Q, int p, bool dealias) {
  const std::size_t n = Q.size();
  std::vector<double> N(n);
  for (std::size_t k = 0; k < n; ++k) N[k] = std::pow(Q[k], p + 1) / static_cast<double>(p + 1);
  if (dealias) {
    Spectrum nh = fft::forward(N);
    const std::size_t cut = n / 3;
    for (std::size_t j = cut + 1; j < nh.size(); ++j) nh[j] = 0.0;
    N = fft::inverse(std::move(nh), n);
  }
  return N;
}

/// (a p(D) + b) Q - Q^{p+1}/(p+1).
inline RealField profile_residual(const ModelSpec& m, double c, const RealField& Q, bool dealias = false) {
  const ProfileOperator op = profile_operator(m, c);
  std::vector<double> mult = m.symbol.sample(Q.grid());
  for (double& v : mult) v = op.a * v + op.b;
  RealField lin = apply_multiplier(Q, std::span<const double>(mult));
  std::vector<double> N = profile_nonlinearity(Q, m.p, dealias);
  std::vector<double> r(Q.size());
  for (std::size_t k = 0; k < r.size(); ++k) r[k] = lin[k] - N[k];
  return RealField(Q.grid(), std::move(r));
}

struct SolitaryWave {
  RealField profile;
  double c = 1.0;
  ModelSpec model;
  double residual_sup = 0.0;
  double residual_l2 = 0.0;
  int iterations = 0;
  bool dealiased = false;
};

inline void assign_residuals(SolitaryWave& w) {
  RealField r = profile_residual(w.model, w.c, w.profile, w.dealiased);
  w.residual_sup = r.sup_norm();
  w.residual_l2 = std::sqrt(l2_squared(r));
}

inline double evenness_defect(const RealField& Q) {
  RealField d = Q - reflect(Q);
  return d.sup_norm();
}

struct PetviashviliOptions {
  double tol = 1e-10;
  int max_iter = 2000;
  std::optional<double> gamma;  // default (p+1)/p
  std::optional<RealField> seed_profile;
  bool dealias = false;
};

/// Deterministic sech-type seed, exact for KdV.
inline RealField default_seed(const ModelSpec& m, double c, const Grid1D& grid) {
  const ProfileOperator op = profile_operator(m, c);
  // Divide through by a: p(D) psi + (b/a) psi = psi^{p+1}/(p+1) with Q = a^{1/p} psi.
  const double ce = op.b / op.a;
  const double order = m.symbol.is_pure_power() ? m.symbol.alpha() : 2.0;
  const double p = m.p;
  const double amp = std::pow(op.a, 1.0 / p) * std::pow((p + 1.0) * (p + 2.0) * ce / 2.0, 1.0 / p);
  const double width = p * std::pow(ce, 1.0 / order) / 2.0;
  return RealField::from_function(grid, [&](double x) {
    const double s = 1.0 / std::cosh(width * x);
    return amp * std::pow(s, 2.0 / p);
  });
}

inline constexpr double kCollapseFloor = 1e-8;

/// Petviashvili iteration for the solitary-wave profile at speed c.
inline SolitaryWave petviashvili(const ModelSpec& model, double c, const Grid1D& grid, const PetviashviliOptions& opts = {}) {
  model.validate();
  require(c > 0.0 && std::isfinite(c), "velocity c must be positive");
  require(opts.tol > 0.0, "tolerance must be positive");
  require(opts.max_iter > 0, "max_iter must be positive");
  if (model.symbol.is_pure_power() && model.family != Family::FBBM)
    require(model.symbol.alpha() > 1.0 / 3.0, "no finite-energy solitary waves for alpha <= 1/3");
  const bool dealias = opts.dealias && model.p == 1;
  const ProfileOperator op = profile_operator(model, c);
  const double gamma = opts.gamma.value_or((model.p + 1.0) / model.p);

  std::vector<double> mult = model.symbol.sample(grid);
  for (double& v : mult) v = op.a * v + op.b;

  RealField Q = opts.seed_profile ? *opts.seed_profile : default_seed(model, c, grid);
  require(Q.grid() == grid, "seed profile lives on a different grid");
  const std::size_t n = grid.n();

  for (int it = 1; it <= opts.max_iter; ++it) {
    std::vector<double> N = profile_nonlinearity(Q, model.p, dealias);
    Spectrum qh = fft::forward(Q.values());
    Spectrum nh = fft::forward(N);
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < qh.size(); ++j) {
      const double w = spectrum_weight(j, n);
      num += w * mult[j] * std::norm(qh[j]);
      den += w * (std::conj(qh[j]) * nh[j]).real();
    }
    if (!(den > 0.0) || !std::isfinite(num)) {
      throw NumericalError("no_solitary_wave", "no solitary wave found: iteration collapsed to zero");
    }
    const double factor = std::pow(num / den, gamma);
    for (std::size_t j = 0; j < nh.size(); ++j) nh[j] *= factor / mult[j];
    std::vector<double> next = fft::inverse(std::move(nh), n);
    double change = 0.0, sup = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (!std::isfinite(next[k])) throw NumericalError("not_converged", "petviashvili iteration produced non-finite values");
      change = std::max(change, std::abs(next[k] - Q[k]));
      sup = std::max(sup, std::abs(next[k]));
    }
    Q = RealField(grid, std::move(next));
    if (sup < kCollapseFloor)
      throw NumericalError("no_solitary_wave", "no solitary wave found: profile collapsed below 1e-8");
    if (change < opts.tol) {
      SolitaryWave w{Q, c, model, 0.0, 0.0, it, dealias};
      assign_residuals(w);
      if (w.residual_sup < 10.0 * opts.tol) return w;
    }
  }
  throw NumericalError("not_converged", "petviashvili did not converge within " + std::to_string(opts.max_iter) + " iterations");
}

struct RescaleResult {
  SolitaryWave wave;
  double resampling_bound = 0.0;
};

/// c Q(c^{1/alpha} x) from a profile computed at c = 1.
///
/// Samples inside the box come from the trigonometric interpolant. Beyond the
/// box the profile is continued by the algebraic tail |x|^{-(1+alpha)} matched
/// to the edge value. `resampling_bound` estimates the error made there.
inline RescaleResult rescale_solitary(const SolitaryWave& Q, double c_new, double alpha) {
  require(Q.model.symbol.is_pure_power(), "rescaling law needs pure-power dispersion");
  require(std::abs(Q.model.symbol.alpha() - alpha) < 1e-14, "alpha does not match the profile's symbol");
  require(c_new > 0.0 && std::isfinite(c_new), "c_new must be positive");
  require(std::abs(Q.c - 1.0) < 1e-14, "rescaling starts from the c = 1 profile");
  require(Q.residual_sup < 1e-6, "input profile is not converged (residual_sup >= 1e-6)");
  require(Q.model.p == 1 && !(Q.model.family == Family::FBBM && Q.model.bbm_form == BbmForm::Derived),
          "rescaling law holds for the quadratic profile equation");
  if (c_new == 1.0) return {Q, 0.0};

  const Grid1D& g = Q.profile.grid();
  const double s = std::pow(c_new, 1.0 / alpha);
  std::vector<double> v = interpolate_scaled(Q.profile, s);
  const double L = g.half_length();
  const double edge = Q.profile[0];
  for (std::size_t k = 0; k < v.size(); ++k) {
    const double y = std::abs(s * g.x(k));
    if (y >= L) v[k] = edge * std::pow(L / y, 1.0 + alpha);
    v[k] *= c_new;
  }
  SolitaryWave out{RealField(g, std::move(v)), c_new, Q.model, 0.0, 0.0, 0, Q.dealiased};
  assign_residuals(out);

  // Two error sources: modes pushed past the Nyquist frequency by compression,
  // and the part of the profile near the box edge that is cut off or invented.
  const Spectrum qh = fft::forward(Q.profile.values());
  double spectral_tail = 0.0;
  if (s > 1.0) {
    const auto first = static_cast<std::size_t>(std::floor(static_cast<double>(g.n()) / (2.0 * s)));
    for (std::size_t j = first; j < qh.size(); ++j) spectral_tail += spectrum_weight(j, g.n()) * std::abs(qh[j]);
    spectral_tail /= static_cast<double>(g.n());
  }
  double box_tail = 0.0;
  for (std::size_t k = 0; k < g.n(); ++k)
    if (std::abs(g.x(k)) >= 0.875 * L) box_tail = std::max(box_tail, std::abs(Q.profile[k]));
  const double pmax = Q.model.symbol(g.nyquist());
  const double bound = c_new * ((c_new + pmax) * spectral_tail + (1.0 + c_new) * box_tail);
  return {out, bound};
}

/// c_star = (2q / |Q|_2^2)^{alpha/(2 alpha - 1)}.
inline double cstar(double q, double Q_l2_sq, double alpha) {
  require(alpha > 0.5, "cstar requires alpha > 1/2");
  require(q > 0.0 && Q_l2_sq > 0.0, "cstar requires q > 0 and a nonzero profile");
  return std::pow(2.0 * q / Q_l2_sq, alpha / (2.0 * alpha - 1.0));
}

/// E(Q_{c_star}) = c_star (1/2 - alpha) 2q / (3 alpha - 1).
inline double ground_state_energy(double q, double c_star, double alpha) {
  return c_star * (0.5 - alpha) * 2.0 * q / (3.0 * alpha - 1.0);
}

struct MinimizerResult {
  RealField profile;
  double q = 0.0;
  double theta = 0.0;
  double I_q = 0.0;
  bool converged = false;
  int iterations = 0;
  double gradient_norm = 0.0;
};

struct MinimizerOptions {
  std::optional<double> step;  // default 0.9 / (c_guess + max p)
  double tol = 1e-10;
  int max_iter = 20000;
  std::optional<RealField> seed;
  double c_guess = 1.0;
  bool allow_unconverged = false;
};

/// Rescale u so that (1/2) int u^2 = q.
inline RealField project_mass(const RealField& u, double q) {
  const double m = mass(u);
  if (!(m > 0.0)) throw NumericalError("degenerate", "cannot project the zero field onto a mass sphere");
  return u.scaled(std::sqrt(q / m));
}

/// Normalized gradient flow for min E(u) subject to M(u) = q.
inline MinimizerResult minimize_iq(double q, double alpha, const Grid1D& grid, const MinimizerOptions& opts = {}) {
  require(alpha > 0.5 && alpha < 1.0, "minimize_iq requires alpha in (1/2, 1)");
  require(q > 0.0 && std::isfinite(q), "mass q must be positive");
  require(opts.tol > 0.0 && opts.max_iter > 0, "invalid minimizer tolerance or iteration cap");
  const DispersionSymbol sym = DispersionSymbol::pure_power(alpha);
  const std::vector<double> pm = power_multiplier(grid, alpha);
  const double pmax = pm.back();
  const double tau = opts.step.value_or(0.9 / (opts.c_guess + pmax));
  require(tau > 0.0, "gradient step must be positive");

  RealField u = opts.seed ? *opts.seed : default_seed(ModelSpec::fkdv(alpha), opts.c_guess, grid);
  require(u.grid() == grid, "seed lives on a different grid");
  u = project_mass(u, q);
  const std::size_t n = grid.n();

  MinimizerResult res{u, q, 0.0, 0.0, false, 0, 0.0};
  double prev_energy = energy_fkdv(u, sym).value;
  int increases = 0;
  for (int it = 1; it <= opts.max_iter; ++it) {
    RealField Du = apply_multiplier(u, std::span<const double>(pm));
    std::vector<double> grad(n);
    double gu = 0.0, uu = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      grad[k] = Du[k] - 0.5 * u[k] * u[k];
      gu += grad[k] * u[k];
      uu += u[k] * u[k];
    }
    // Projected gradient: component orthogonal to u.
    double gn = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double pk = grad[k] - gu / uu * u[k];
      gn += pk * pk;
    }
    gn = std::sqrt(gn * grid.dx());
    res.theta = -gu / uu;
    res.gradient_norm = gn;
    res.iterations = it - 1;
    if (gn < opts.tol) {
      res.converged = true;
      break;
    }
    std::vector<double> next(n);
    for (std::size_t k = 0; k < n; ++k) next[k] = u[k] - tau * grad[k];
    u = project_mass(RealField(grid, std::move(next)), q);
    const double e = energy_fkdv(u, sym).value;
    increases = (e > prev_energy) ? increases + 1 : 0;
    if (increases >= 50) throw NumericalError("diverged", "gradient flow energy increased over 50 consecutive steps");
    prev_energy = e;
    res.iterations = it;
  }
  res.profile = u;
  res.I_q = energy_fkdv(u, sym).value;
  if (!res.converged) {
    if (!opts.allow_unconverged)
      throw NumericalError("not_converged", "gradient flow did not converge within " + std::to_string(opts.max_iter) + " steps");
    // Final multiplier on the returned iterate.
    RealField Du = apply_multiplier(u, std::span<const double>(pm));
    res.theta = (0.5 * power_integral(u, 3) - inner(Du, u)) / l2_squared(u);
  }
  return res;
}

}  // namespace fracsol
