#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

#include "fracsol/error.hpp"
#include "fracsol/fft.hpp"
#include "fracsol/field.hpp"
#include "fracsol/grid.hpp"
#include "fracsol/symbol.hpp"

namespace fracsol {

using fft::Complex;
using fft::Spectrum;

/// Multiplicity of each half-spectrum entry in the full spectrum (1 at 0 and Nyquist).
inline double spectrum_weight(std::size_t j, std::size_t n) { return (j == 0 || j == n / 2) ? 1.0 : 2.0; }

/// Spectral quadrature of sum_j m(xi_j) |u_hat_j|^2, i.e. the integral of u * m(D) u.
inline double spectral_quadratic(const Grid1D& grid, std::span<const Complex> uh, std::span<const double> m) {
  const std::size_t n = grid.n();
  double s = 0.0;
  for (std::size_t j = 0; j < uh.size(); ++j) s += spectrum_weight(j, n) * m[j] * std::norm(uh[j]);
  return s * grid.dx() / static_cast<double>(n);
}

/// Two-thirds rule mask on the half spectrum.
inline std::vector<double> dealias_mask(const Grid1D& grid) {
  std::vector<double> mask(grid.spectrum_size(), 1.0);
  const std::size_t cut = grid.n() / 3;
  for (std::size_t j = cut + 1; j < mask.size(); ++j) mask[j] = 0.0;
  return mask;
}

/// Replace u_hat(xi) by m(xi) u_hat(xi); `m` is sampled on the half spectrum.
inline RealField apply_multiplier(const RealField& u, std::span<const double> m) {
  const Grid1D& g = u.grid();
  require(m.size() == g.spectrum_size(), "multiplier length does not match the half spectrum");
  for (double v : m) {
    if (!std::isfinite(v)) throw InvalidArgument("multiplier is not finite on the grid wavenumbers");
  }
  Spectrum uh = fft::forward(u.values());
  for (std::size_t j = 0; j < uh.size(); ++j) uh[j] *= m[j];
  return RealField(g, fft::inverse(std::move(uh), g.n()));
}

inline RealField apply_multiplier(const RealField& u, const std::function<double(double)>& m) {
  std::vector<double> samples(u.grid().spectrum_size());
  auto xi = u.grid().half_wavenumbers();
  for (std::size_t j = 0; j < samples.size(); ++j) samples[j] = m(xi[j]);
  return apply_multiplier(u, std::span<const double>(samples));
}

inline std::vector<double> power_multiplier(const Grid1D& grid, double s) {
  std::vector<double> m(grid.spectrum_size());
  auto xi = grid.half_wavenumbers();
  for (std::size_t j = 0; j < m.size(); ++j) m[j] = (s == 0.0) ? 1.0 : (xi[j] == 0.0 ? 0.0 : std::pow(xi[j], s));
  return m;
}

/// Fractional derivative D^s, s >= 0.
inline RealField d_alpha(const RealField& u, double s) {
  require(s >= 0.0 && std::isfinite(s), "fractional order s must be nonnegative");
  if (s == 0.0) return u;
  return apply_multiplier(u, std::span<const double>(power_multiplier(u.grid(), s)));
}

/// (c + p(D))^{-1} u.
inline RealField resolvent(const RealField& u, double c, const DispersionSymbol& p) {
  require(c > 0.0 && std::isfinite(c), "resolvent requires c > 0");
  std::vector<double> m = p.sample(u.grid());
  for (double& v : m) v = 1.0 / (c + v);
  return apply_multiplier(u, std::span<const double>(m));
}

inline double integrate(const RealField& u) {
  double s = 0.0;
  for (double v : u.values()) s += v;
  return s * u.grid().dx();
}

inline double inner(const RealField& u, const RealField& v) {
  require(u.grid() == v.grid(), "fields live on different grids");
  double s = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) s += u[k] * v[k];
  return s * u.grid().dx();
}

inline double l2_squared(const RealField& u) { return inner(u, u); }

/// |u|_2^2 evaluated on the transform side (Parseval).
inline double spectral_l2_squared(const RealField& u) {
  Spectrum uh = fft::forward(u.values());
  std::vector<double> one(uh.size(), 1.0);
  return spectral_quadratic(u.grid(), uh, one);
}

/// Integral of |D^s u|^2.
inline double fractional_seminorm_squared(const RealField& u, double s) {
  require(s >= 0.0, "seminorm order must be nonnegative");
  Spectrum uh = fft::forward(u.values());
  return spectral_quadratic(u.grid(), uh, power_multiplier(u.grid(), 2.0 * s));
}

/// Integral of u p(D) u.
inline double symbol_quadratic(const RealField& u, const DispersionSymbol& p) {
  Spectrum uh = fft::forward(u.values());
  return spectral_quadratic(u.grid(), uh, p.sample(u.grid()));
}

/// (|u|_2^2 + |D^{alpha/2} u|_2^2)^{1/2}.
inline double energy_norm(const RealField& u, double alpha) {
  require(alpha > 0.0 && alpha <= 2.0, "energy norm exponent alpha must lie in (0, 2]");
  Spectrum uh = fft::forward(u.values());
  std::vector<double> m = power_multiplier(u.grid(), alpha);
  for (double& v : m) v += 1.0;
  return std::sqrt(spectral_quadratic(u.grid(), uh, m));
}

/// u(. + y) by phase multiplication; periodic.
inline RealField shift_field(const RealField& u, double y) {
  const Grid1D& g = u.grid();
  if (y == 0.0) return u;
  Spectrum uh = fft::forward(u.values());
  auto xi = g.half_wavenumbers();
  for (std::size_t j = 0; j < uh.size(); ++j) {
    // Reduce the phase modulo 2 pi using the exact period of each mode.
    const double period = 2.0 * g.length() / static_cast<double>(j == 0 ? 1 : 2 * j);
    const double yr = (j == 0) ? 0.0 : std::fmod(y, period);
    uh[j] *= std::polar(1.0, xi[j] * yr);
  }
  return RealField(g, fft::inverse(std::move(uh), g.n()));
}

/// First derivative; the Nyquist mode is dropped.
inline RealField derivative(const RealField& u) {
  const Grid1D& g = u.grid();
  Spectrum uh = fft::forward(u.values());
  auto xi = g.half_wavenumbers();
  for (std::size_t j = 0; j < uh.size(); ++j) uh[j] *= Complex(0.0, xi[j]);
  uh.back() = 0.0;
  return RealField(g, fft::inverse(std::move(uh), g.n()));
}

/// u(-x) on the grid: index k maps to (n - k) mod n.
inline RealField reflect(const RealField& u) {
  const std::size_t n = u.size();
  std::vector<double> v(n);
  for (std::size_t k = 0; k < n; ++k) v[k] = u[(n - k) % n];
  return RealField(u.grid(), std::move(v));
}

/// Values of the trigonometric interpolant of u at the points s * x_k.
///
/// Chirp-z evaluation, O(n log n). Points outside [-L, L) see the periodic
/// continuation of u.
inline std::vector<double> interpolate_scaled(const RealField& u, double s) {
  const Grid1D& g = u.grid();
  const std::size_t n = g.n();
  if (s == 1.0) return {u.values().begin(), u.values().end()};
  const Spectrum uh = fft::forward(u.values());
  const auto J = static_cast<std::ptrdiff_t>(n / 2) - 1;
  const double x0 = g.x(0);
  auto xi = g.half_wavenumbers();

  // exp(i pi s q / n) with the phase reduced in extended precision.
  auto chirp = [&](long double q, double sign) {
    const long double two_pi = 2.0L * std::numbers::pi_v<long double>;
    long double ph = std::numbers::pi_v<long double> * static_cast<long double>(s) * q / static_cast<long double>(n);
    ph = std::fmod(ph, two_pi);
    return std::polar(1.0, sign * static_cast<double>(ph));
  };

  std::size_t P = 1;
  while (P < 3 * n) P <<= 1;
  Spectrum B(P, 0.0), K(P, 0.0);
  for (std::ptrdiff_t j = -J; j <= J; ++j) {
    const auto aj = static_cast<std::size_t>(std::abs(j));
    Complex a = (j >= 0) ? uh[aj] : std::conj(uh[aj]);
    const double xij = (j >= 0 ? 1.0 : -1.0) * xi[aj];
    a *= std::polar(1.0, std::fmod(xij * (s - 1.0) * x0, 2.0 * std::numbers::pi));
    B[static_cast<std::size_t>(j + J)] = a * chirp(static_cast<long double>(j) * j, 1.0);
  }
  const std::size_t klen = n + 2 * static_cast<std::size_t>(J);
  for (std::size_t t = 0; t < klen; ++t) {
    const long double d = static_cast<long double>(t) - static_cast<long double>(J);
    K[t] = chirp(d * d, -1.0);
  }
  Spectrum Bf(P), Kf(P);
  fft::complex_forward(B, Bf);
  fft::complex_forward(K, Kf);
  for (std::size_t i = 0; i < P; ++i) Bf[i] *= Kf[i];
  fft::complex_backward(Bf, B);

  std::vector<double> out(n);
  const double inv_n = 1.0 / static_cast<double>(n);
  const double inv_P = 1.0 / static_cast<double>(P);
  const double nyq = uh[n / 2].real();
  for (std::size_t m = 0; m < n; ++m) {
    const Complex conv = B[m + 2 * static_cast<std::size_t>(J)] * inv_P;
    const Complex val = chirp(static_cast<long double>(m) * m, 1.0) * conv;
    const double y = s * g.x(m);
    out[m] = inv_n * (val.real() + nyq * std::cos(g.nyquist() * (y - x0)));
  }
  return out;
}

}  // namespace fracsol
