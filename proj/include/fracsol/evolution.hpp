#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "fracsol/error.hpp"
#include "fracsol/fft.hpp"
#include "fracsol/field.hpp"
#include "fracsol/functionals.hpp"
#include "fracsol/ground_state.hpp"
#include "fracsol/spectral.hpp"
#include "fracsol/verification.hpp"

namespace fracsol {

struct OrbitalDistance {
  double distance = 0.0;
  double y_star = 0.0;  // centre of the closest orbit member, u ~ Q(. - y_star)
  double shift = 0.0;   // the same member written as Q(. + shift)
};

inline double wrap_to_box(double y, double L) {
  double r = std::fmod(y + L, 2.0 * L);
  if (r < 0.0) r += 2.0 * L;
  return r - L;
}

/// inf over y of |u - Q(. + y)| in the H^{a/2} norm.
///
/// Coarse stage maximizes the L2 cross-correlation over grid shifts; the energy
/// correlation is then climbed on the grid, refined by a parabola through three
/// points and polished by Newton steps on its trigonometric form. The returned
/// distance is evaluated directly on the shifted profile.
inline OrbitalDistance orbital_distance(const RealField& u, const RealField& Q, double alpha) {
  require(u.grid() == Q.grid(), "orbital_distance needs fields on the same grid");
  const Grid1D& g = u.grid();
  const std::size_t n = g.n();
  const Spectrum uh = fft::forward(u.values());
  const Spectrum qh = fft::forward(Q.values());
  const std::vector<double> pm = power_multiplier(g, alpha);
  auto xi = g.half_wavenumbers();

  // A_j = Q_hat_j conj(u_hat_j): correlation(y) = sum_j w_j Re(A_j e^{i xi_j y}).
  Spectrum A(qh.size()), AH(qh.size());
  for (std::size_t j = 0; j < qh.size(); ++j) {
    A[j] = qh[j] * std::conj(uh[j]);
    AH[j] = (1.0 + pm[j]) * A[j];
  }
  std::vector<double> corr = fft::inverse(A, n);
  std::vector<double> corrH = fft::inverse(AH, n);
  std::size_t m = static_cast<std::size_t>(std::max_element(corr.begin(), corr.end()) - corr.begin());
  // Climb the energy correlation from the L2 optimum.
  for (std::size_t guard = 0; guard < n; ++guard) {
    const std::size_t l = (m + n - 1) % n, r = (m + 1) % n;
    if (corrH[l] > corrH[m] && corrH[l] >= corrH[r]) m = l;
    else if (corrH[r] > corrH[m]) m = r;
    else break;
  }
  const double dx = g.dx();
  const double fl = corrH[(m + n - 1) % n], f0 = corrH[m], fr = corrH[(m + 1) % n];
  const double den = fl - 2.0 * f0 + fr;
  double off = (den < 0.0) ? 0.5 * (fl - fr) / den : 0.0;
  off = std::clamp(off, -0.5, 0.5);
  const double y0 = static_cast<double>(m) * dx;
  double y = y0 + off * dx;

  // Newton on the trigonometric energy correlation G(y). A real shift keeps only
  // cos(xi_N y) of the Nyquist mode, so |Q(. + y)| varies with y; that term is included.
  const std::size_t jn = qh.size() - 1;
  const double hn = (1.0 + pm[jn]) * std::norm(qh[jn]);
  const double xn = xi[jn];
  auto derivs = [&](double yy, double& d1, double& d2) {
    d1 = d2 = 0.0;
    for (std::size_t j = 1; j < AH.size(); ++j) {
      const double w = spectrum_weight(j, n);
      const Complex z = AH[j] * std::polar(1.0, std::fmod(xi[j] * yy, 2.0 * std::numbers::pi));
      d1 += -w * xi[j] * z.imag();
      d2 += -w * xi[j] * xi[j] * z.real();
    }
    const double ph = std::fmod(2.0 * xn * yy, 2.0 * std::numbers::pi);
    d1 += 0.5 * hn * xn * std::sin(ph);
    d2 += hn * xn * xn * std::cos(ph);
  };
  for (int it = 0; it < 20; ++it) {
    double d1, d2;
    derivs(y, d1, d2);
    if (!(d2 < 0.0)) break;
    const double step = -d1 / d2;
    const double next = y + step;
    if (std::abs(next - y0) > dx) break;
    y = next;
    if (std::abs(step) < 1e-14 * std::max(1.0, std::abs(y))) break;
  }
  OrbitalDistance out;
  out.shift = wrap_to_box(y, g.half_length());
  out.y_star = wrap_to_box(-y, g.half_length());
  out.distance = energy_norm(u - shift_field(Q, out.shift), alpha);
  return out;
}

struct EvolutionOptions {
  bool dealias = true;
  int record_every = 100;
  std::optional<SolitaryWave> track_orbit;
  double blowup_factor = 1e6;
};

struct EvolutionTrace {
  Family family = Family::FKdV;
  std::vector<double> times;
  std::vector<double> series_a;  // mass (fkdv) or bbm_quadratic (fbbm)
  std::vector<double> series_b;  // energy (fkdv) or bbm_hamiltonian (fbbm)
  std::vector<double> orbital_distance;
  RealField final_state;
  bool blew_up = false;
  long steps = 0;
  double dt = 0.0;
  double cfl = 0.0;
  bool cfl_ok = true;
};

inline double relative_drift(const std::vector<double>& s) {
  if (s.empty()) return 0.0;
  const double ref = std::abs(s.front());
  double d = 0.0;
  for (double v : s) d = std::max(d, std::abs(v - s.front()));
  return ref > 0.0 ? d / ref : d;
}

/// Nonlinear stiffness rate of the explicit part for the given data.
inline double nonlinear_rate(const ModelSpec& model, const RealField& u0, bool dealias) {
  const Grid1D& g = u0.grid();
  const double xi_cut = (dealias && model.p == 1) ? g.nyquist() * 2.0 / 3.0 : g.nyquist();
  const double amp = u0.sup_norm();
  if (model.family == Family::FBBM) {
    const double a = model.symbol.is_pure_power() ? model.symbol.alpha() : 1.0;
    return std::pow(g.nyquist(), std::max(0.0, 1.0 - a)) * (1.0 + amp);
  }
  return xi_cut * std::pow(amp, model.p);
}

/// Default step: 0.1 dx (fkdv) or 0.5 dx (fbbm), reduced so that dt times the
/// nonlinear rate stays below 0.1.
inline double default_dt(const ModelSpec& model, const RealField& u0, bool dealias = true) {
  const double dx = u0.grid().dx();
  const double base = model.family == Family::FBBM ? 0.5 * dx : 0.1 * dx;
  const double rate = nonlinear_rate(model, u0, dealias);
  return rate > 0.0 ? std::min(base, 0.1 / rate) : base;
}

namespace detail {

struct Conserved {
  double a, b;
};

inline Conserved conserved(const ModelSpec& m, const RealField& u) {
  if (m.family == Family::FBBM) {
    const double alpha = m.symbol.is_pure_power() ? m.symbol.alpha() : 1.0;
    return {bbm_quadratic(u, alpha), bbm_hamiltonian(u)};
  }
  return {mass(u), energy_fkdv(u, m.symbol, m.p).value};
}

inline double orbit_alpha(const ModelSpec& m) { return m.symbol.is_pure_power() ? m.symbol.alpha() : 1.0; }

}  // namespace detail

/// Pseudospectral time integration to time T.
///
/// fkdv/gfkdv: u_t = d_x p(D) u - d_x(u^{p+1}/(p+1)) by ETDRK4 with the linear
/// part exact. fbbm: u_t = -(1 + D^a)^{-1} d_x(u + u^2/2) by classical RK4.
/// dt is adjusted down to T / ceil(T / dt) so the run ends exactly at T.
inline EvolutionTrace evolve(const ModelSpec& model, const RealField& u0, double T, double dt, const EvolutionOptions& opts = {}) {
  model.validate();
  require(T > 0.0 && std::isfinite(T), "final time T must be positive");
  require(dt > 0.0 && std::isfinite(dt), "time step dt must be positive");
  require(opts.record_every > 0, "record_every must be positive");
  if (model.family == Family::FBBM)
    require(model.symbol.is_pure_power() && model.symbol.alpha() <= 1.0, "fbbm evolution needs pure-power alpha in (0, 1]");
  if (opts.track_orbit) require(opts.track_orbit->profile.grid() == u0.grid(), "tracked profile lives on a different grid");

  const Grid1D& g = u0.grid();
  const std::size_t n = g.n(), nh = g.spectrum_size();
  const long steps = static_cast<long>(std::ceil(T / dt - 1e-12));
  const double h = T / static_cast<double>(steps);
  const bool dealias = opts.dealias && model.p == 1;
  const std::size_t cut = dealias ? n / 3 : n / 2 - 1;
  auto xi = g.half_wavenumbers();
  const std::vector<double> psym = model.symbol.sample(g);
  const double alpha = detail::orbit_alpha(model);

  EvolutionTrace tr{model.family, {}, {}, {}, {}, u0, false, steps, h, 0.0, true};
  tr.cfl = h * nonlinear_rate(model, u0, dealias);
  tr.cfl_ok = tr.cfl < (model.family == Family::FBBM ? 2.0 : 1.0);

  const double sup0 = std::max(u0.sup_norm(), 1e-300);
  auto record = [&](double t, const RealField& u) {
    auto c = detail::conserved(model, u);
    tr.times.push_back(t);
    tr.series_a.push_back(c.a);
    tr.series_b.push_back(c.b);
    if (opts.track_orbit) tr.orbital_distance.push_back(orbital_distance(u, opts.track_orbit->profile, alpha).distance);
  };

  Spectrum v = fft::forward(u0.values());
  v.back() = 0.0;
  std::vector<double> phys(n);
  Spectrum scratch(nh), nl(nh);
  double sup_now = sup0;

  // fkdv: transform of -d_x(u^{p+1}/(p+1)); fbbm: of -(1 + p(D))^{-1} d_x(u + u^2/2).
  // Only the product is truncated at `cut`.
  auto nonlinear = [&](const Spectrum& s, Spectrum& out) {
    scratch = s;
    fft::inverse(scratch, phys);
    double sup = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double uk = phys[k];
      if (!std::isfinite(uk)) throw NumericalError("nan", "evolution produced non-finite values");
      sup = std::max(sup, std::abs(uk));
      phys[k] = std::pow(uk, model.p + 1) / (model.p + 1.0);
    }
    sup_now = sup;
    fft::forward(phys, out);
    for (std::size_t j = 0; j < nh; ++j) {
      Complex prod = (j > cut) ? Complex(0.0) : out[j];
      if (model.family == Family::FBBM) {
        prod += s[j];
        out[j] = Complex(0.0, -xi[j]) * prod / (1.0 + psym[j]);
      } else {
        out[j] = Complex(0.0, -xi[j]) * prod;
      }
    }
    out.back() = 0.0;
  };
  auto to_field = [&](const Spectrum& s) {
    Spectrum tmp = s;
    return RealField(g, fft::inverse(std::move(tmp), n));
  };

  record(0.0, u0);

  if (model.family == Family::FBBM) {
    Spectrum k1(nh), k2(nh), k3(nh), k4(nh), tmp(nh);
    for (long s = 1; s <= steps; ++s) {
      nonlinear(v, k1);
      if (sup_now > opts.blowup_factor * sup0) { tr.blew_up = true; break; }
      for (std::size_t j = 0; j < nh; ++j) tmp[j] = v[j] + 0.5 * h * k1[j];
      nonlinear(tmp, k2);
      for (std::size_t j = 0; j < nh; ++j) tmp[j] = v[j] + 0.5 * h * k2[j];
      nonlinear(tmp, k3);
      for (std::size_t j = 0; j < nh; ++j) tmp[j] = v[j] + h * k3[j];
      nonlinear(tmp, k4);
      for (std::size_t j = 0; j < nh; ++j) v[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
      if (s % opts.record_every == 0 || s == steps) record(s * h, to_field(v));
    }
  } else {
    // ETDRK4 coefficients by contour averaging over a full circle (L is imaginary).
    const int M = 32;
    std::vector<Complex> E(nh), E2(nh), Qc(nh), f1(nh), f2(nh), f3(nh);
    for (std::size_t j = 0; j < nh; ++j) {
      const Complex L = (j == nh - 1) ? Complex(0.0) : Complex(0.0, xi[j] * psym[j]);
      const Complex Lh = L * h;
      E[j] = std::exp(Lh);
      E2[j] = std::exp(0.5 * Lh);
      Complex q = 0.0, a = 0.0, b = 0.0, c = 0.0;
      for (int k = 0; k < M; ++k) {
        const Complex r = std::polar(1.0, 2.0 * std::numbers::pi * (k + 0.5) / M);
        const Complex z = Lh + r;
        const Complex ez = std::exp(z), z3 = z * z * z;
        q += (std::exp(0.5 * z) - 1.0) / z;
        a += (-4.0 - z + ez * (4.0 - 3.0 * z + z * z)) / z3;
        b += (2.0 + z + ez * (-2.0 + z)) / z3;
        c += (-4.0 - 3.0 * z - z * z + ez * (4.0 - z)) / z3;
      }
      Qc[j] = h * q / static_cast<double>(M);
      f1[j] = h * a / static_cast<double>(M);
      f2[j] = h * b / static_cast<double>(M);
      f3[j] = h * c / static_cast<double>(M);
    }
    Spectrum Nu(nh), Na(nh), Nb(nh), Nc(nh), a(nh), b(nh), c(nh);
    for (long s = 1; s <= steps; ++s) {
      nonlinear(v, Nu);
      if (sup_now > opts.blowup_factor * sup0) { tr.blew_up = true; break; }
      for (std::size_t j = 0; j < nh; ++j) a[j] = E2[j] * v[j] + Qc[j] * Nu[j];
      nonlinear(a, Na);
      for (std::size_t j = 0; j < nh; ++j) b[j] = E2[j] * v[j] + Qc[j] * Na[j];
      nonlinear(b, Nb);
      for (std::size_t j = 0; j < nh; ++j) c[j] = E2[j] * a[j] + Qc[j] * (2.0 * Nb[j] - Nu[j]);
      nonlinear(c, Nc);
      for (std::size_t j = 0; j < nh; ++j)
        v[j] = E[j] * v[j] + Nu[j] * f1[j] + 2.0 * (Na[j] + Nb[j]) * f2[j] + Nc[j] * f3[j];
      if (s % opts.record_every == 0 || s == steps) record(s * h, to_field(v));
    }
  }
  tr.final_state = to_field(v);
  if (tr.blew_up) tr.steps = static_cast<long>(tr.times.size());
  return tr;
}

enum class PerturbationKind { Gaussian, Dilation, Random };

inline std::string to_string(PerturbationKind k) {
  switch (k) {
    case PerturbationKind::Gaussian: return "gaussian";
    case PerturbationKind::Dilation: return "dilation";
    case PerturbationKind::Random: return "random";
  }
  return "unknown";
}

inline PerturbationKind parse_perturbation(const std::string& s) {
  if (s == "gaussian") return PerturbationKind::Gaussian;
  if (s == "dilation") return PerturbationKind::Dilation;
  if (s == "random") return PerturbationKind::Random;
  throw InvalidArgument("unknown perturbation '" + s + "' (expected gaussian, dilation or random)");
}

/// Unit-shape perturbation before normalization.
inline RealField perturbation_shape(PerturbationKind kind, const RealField& Q, std::uint64_t seed) {
  const Grid1D& g = Q.grid();
  switch (kind) {
    case PerturbationKind::Gaussian:
      return RealField::from_function(g, [](double x) { return std::exp(-x * x); });
    case PerturbationKind::Dilation: {
      // d/de [(1+e) Q((1+e) x)] at e = 0.
      RealField dq = derivative(Q);
      std::vector<double> v(g.n());
      for (std::size_t k = 0; k < g.n(); ++k) v[k] = Q[k] + g.x(k) * dq[k];
      return RealField(g, std::move(v));
    }
    case PerturbationKind::Random: {
      std::mt19937_64 rng(seed);
      std::uniform_real_distribution<double> unif(-1.0, 1.0);
      const int modes = 8;
      std::vector<double> a(modes), b(modes);
      for (int m = 0; m < modes; ++m) { a[m] = unif(rng); b[m] = unif(rng); }
      return RealField::from_function(g, [&](double x) {
        double s = 0.0;
        for (int m = 0; m < modes; ++m) s += a[m] * std::cos(0.5 * m * x) + b[m] * std::sin(0.5 * m * x);
        return s * std::exp(-x * x / 16.0);
      });
    }
  }
  throw InvalidArgument("unknown perturbation kind");
}

struct StabilityOptions {
  double K = 5.0;
  double threshold_floor = 1e-5;
  std::uint64_t seed = 0;
  int record_every = 100;
  PetviashviliOptions solver{};
  double drift_tol = 1e-6;
};

struct StabilityReport {
  std::string family;
  double alpha = 0.0, c = 0.0, delta = 0.0;
  std::string perturbation_kind;
  double horizon = 0.0;
  double dt = 0.0;
  double sup_distance = 0.0;
  double distance_at_end = 0.0;
  double conserved_drift = 0.0;
  double threshold = 0.0;
  double K = 5.0;
  double q_energy_norm = 0.0;
  bool blew_up = false;
  std::string verdict;
  std::vector<IdentityReport> gate;
  std::vector<double> times;
  std::vector<double> distances;
};

inline void to_json(nlohmann::json& j, const StabilityReport& r) {
  j = {{"family", r.family}, {"alpha", r.alpha}, {"c", r.c}, {"delta", r.delta},
       {"perturbation_kind", r.perturbation_kind}, {"horizon", r.horizon}, {"dt", r.dt},
       {"sup_distance", r.sup_distance}, {"distance_at_end", r.distance_at_end},
       {"conserved_drift", r.conserved_drift}, {"threshold", r.threshold}, {"K", r.K},
       {"q_energy_norm", r.q_energy_norm}, {"blew_up", r.blew_up}, {"verdict", r.verdict},
       {"gate", r.gate}, {"times", r.times}, {"distances", r.distances}};
}

/// Evolve Q_c + perturbation and classify the orbital distance.
///
/// The gate on Q_c is residual_sup plus the energy identity, which holds to
/// roundoff on any converged grid profile; the remaining identity reports are
/// recorded but depend on the box size.
inline StabilityReport stability_experiment(const ModelSpec& model, double c, double delta, PerturbationKind kind,
                                            double horizon, std::optional<double> dt, const Grid1D& grid,
                                            const StabilityOptions& opts = {}) {
  require(model.symbol.is_pure_power(), "stability experiments use pure-power dispersion");
  require(delta >= 0.0 && std::isfinite(delta), "delta must be nonnegative");
  require(horizon > 0.0, "horizon must be positive");
  const double alpha = model.symbol.alpha();
  PetviashviliOptions popts = opts.solver;
  popts.dealias = true;
  const SolitaryWave Q = petviashvili(model, c, grid, popts);

  StabilityReport rep;
  rep.family = to_string(model.family);
  rep.alpha = alpha;
  rep.c = c;
  rep.delta = delta;
  rep.perturbation_kind = to_string(kind);
  rep.horizon = horizon;
  rep.K = opts.K;
  const bool quadratic_form = model.p == 1 && !(model.family == Family::FBBM && model.bbm_form == BbmForm::Derived);
  if (quadratic_form && alpha > 1.0 / 3.0) {
    rep.gate = identity_suite(Q, alpha, c);
    if (!(rep.gate.front().relative_residual < 1e-8))
      throw NumericalError("gate_failed", "solitary wave failed the energy identity gate");
  }
  if (!(Q.residual_sup < 1e-8)) throw NumericalError("gate_failed", "solitary wave residual above 1e-8");

  rep.q_energy_norm = energy_norm(Q.profile, alpha);
  RealField u0 = Q.profile;
  if (delta > 0.0) {
    RealField shape = perturbation_shape(kind, Q.profile, opts.seed);
    const double en = energy_norm(shape, alpha);
    if (!(en > 0.0)) throw NumericalError("degenerate", "perturbation has zero energy norm");
    u0 = Q.profile + shape.scaled(delta * rep.q_energy_norm / en);
  }
  const double step = dt.value_or(default_dt(model, u0));
  rep.dt = step;
  EvolutionOptions eo;
  eo.record_every = opts.record_every;
  eo.track_orbit = Q;
  EvolutionTrace tr = evolve(model, u0, horizon, step, eo);
  rep.dt = tr.dt;
  rep.blew_up = tr.blew_up;
  rep.times = tr.times;
  rep.distances = tr.orbital_distance;
  rep.sup_distance = *std::max_element(tr.orbital_distance.begin(), tr.orbital_distance.end());
  rep.distance_at_end = tr.orbital_distance.back();
  rep.conserved_drift = std::max(relative_drift(tr.series_a), relative_drift(tr.series_b));
  rep.threshold = std::max(opts.K * delta * rep.q_energy_norm, opts.threshold_floor);

  const std::size_t m = rep.distances.size();
  double early = 0.0, late = 0.0;
  const std::size_t qn = std::max<std::size_t>(1, m / 4);
  for (std::size_t i = 0; i < qn; ++i) { early += rep.distances[i]; late += rep.distances[m - 1 - i]; }
  const bool rising = late > 2.0 * early && rep.distance_at_end > rep.threshold;
  if (tr.blew_up || rising)
    rep.verdict = "growing";
  else if (rep.conserved_drift < opts.drift_tol && rep.sup_distance < rep.threshold)
    rep.verdict = "bounded";
  else
    rep.verdict = "inconclusive";
  return rep;
}

}  // namespace fracsol
