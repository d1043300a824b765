#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fracsol/error.hpp"
#include "fracsol/fft.hpp"
#include "fracsol/functionals.hpp"
#include "fracsol/grid.hpp"

namespace fracsol {

/// Tensor product of two periodic grids; x is the slow (row) index.
class Grid2D {
 public:
  Grid2D(std::size_t nx, std::size_t ny, double Lx, double Ly) : gx_(nx, Lx), gy_(ny, Ly) {}

  const Grid1D& x_axis() const { return gx_; }
  const Grid1D& y_axis() const { return gy_; }
  std::size_t nx() const { return gx_.n(); }
  std::size_t ny() const { return gy_.n(); }
  std::size_t size() const { return nx() * ny(); }
  std::size_t spectrum_size() const { return nx() * (ny() / 2 + 1); }
  double cell() const { return gx_.dx() * gy_.dx(); }

  friend bool operator==(const Grid2D& a, const Grid2D& b) { return a.gx_ == b.gx_ && a.gy_ == b.gy_; }

 private:
  Grid1D gx_, gy_;
};

class RealField2D {
 public:
  RealField2D(Grid2D grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
    require(values_.size() == grid_.size(), "2D field size does not match grid");
    for (double v : values_)
      if (!std::isfinite(v)) throw NumericalError("non_finite", "non-finite 2D field value");
  }

  static RealField2D from_function(const Grid2D& g, const std::function<double(double, double)>& f) {
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < g.nx(); ++i)
      for (std::size_t j = 0; j < g.ny(); ++j) v[i * g.ny() + j] = f(g.x_axis().x(i), g.y_axis().x(j));
    return RealField2D(g, std::move(v));
  }

  const Grid2D& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * grid_.ny() + j]; }

  RealField2D scaled(double a) const {
    std::vector<double> v(values_);
    for (double& x : v) x *= a;
    return RealField2D(grid_, std::move(v));
  }

 private:
  Grid2D grid_;
  std::vector<double> values_;
};

namespace detail {

// Sum of w |m(xi, eta) u_hat|^2 over the half spectrum, scaled to an integral.
inline double quadratic_2d(const Grid2D& g, const fft::Spectrum& uh, const std::function<double(double, double)>& m2) {
  const std::size_t nyh = g.ny() / 2 + 1;
  auto xi = g.x_axis().wavenumbers();
  auto eta = g.y_axis().half_wavenumbers();
  double s = 0.0;
  for (std::size_t i = 0; i < g.nx(); ++i)
    for (std::size_t j = 0; j < nyh; ++j)
      s += spectrum_weight(j, g.ny()) * m2(xi[i], eta[j]) * std::norm(uh[i * nyh + j]);
  return s * g.cell() / static_cast<double>(g.size());
}

}  // namespace detail

/// Largest |mean over x| among the y-lines.
inline double max_x_mean(const RealField2D& u) {
  const Grid2D& g = u.grid();
  double worst = 0.0;
  for (std::size_t j = 0; j < g.ny(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < g.nx(); ++i) s += u(i, j);
    worst = std::max(worst, std::abs(s / static_cast<double>(g.nx())));
  }
  return worst;
}

/// Subtract the x-mean of every y-line.
inline RealField2D project_zero_x_mean(const RealField2D& u) {
  const Grid2D& g = u.grid();
  std::vector<double> v(u.values().begin(), u.values().end());
  for (std::size_t j = 0; j < g.ny(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < g.nx(); ++i) s += v[i * g.ny() + j];
    s /= static_cast<double>(g.nx());
    for (std::size_t i = 0; i < g.nx(); ++i) v[i * g.ny() + j] -= s;
  }
  return RealField2D(g, std::move(v));
}

inline void require_zero_x_mean(const RealField2D& u) {
  double sup = 0.0;
  for (double v : u.values()) sup = std::max(sup, std::abs(v));
  if (max_x_mean(u) > 1e-10 * std::max(sup, 1e-300))
    throw InvalidArgument("field has nonzero x-means; d_x^{-1} is defined only on zero-x-mean fields");
}

/// d_x^{-1} d_y: multiplier eta / xi with the xi = 0 plane and Nyquist planes zeroed.
inline RealField2D dx_inv_dy(const RealField2D& u) {
  require_zero_x_mean(u);
  const Grid2D& g = u.grid();
  const std::size_t nyh = g.ny() / 2 + 1;
  fft::Spectrum uh = fft::forward_2d(u.values(), g.nx(), g.ny());
  auto xi = g.x_axis().wavenumbers();
  auto eta = g.y_axis().half_wavenumbers();
  for (std::size_t i = 0; i < g.nx(); ++i)
    for (std::size_t j = 0; j < nyh; ++j) {
      const bool drop = i == 0 || i == g.nx() / 2 || j == nyh - 1;
      uh[i * nyh + j] = drop ? 0.0 : uh[i * nyh + j] * (eta[j] / xi[i]);
    }
  return RealField2D(g, fft::inverse_2d(std::move(uh), g.nx(), g.ny()));
}

inline double integral_2d(const RealField2D& u, int power, bool absolute = false) {
  double s = 0.0;
  for (double v : u.values()) s += std::pow(absolute ? std::abs(v) : v, power);
  return s * u.grid().cell();
}

/// (1/2) int |D_x^{a/2} u|^2 - eps (1/2) int |d_x^{-1} u_y|^2 - (1/6) int u^3.
inline FunctionalValue kp_energy(const RealField2D& u, int eps, double alpha) {
  require(eps == 1 || eps == -1, "epsilon must be +1 or -1");
  require(alpha > 0.0 && alpha <= 2.0, "alpha must lie in (0, 2]");
  const RealField2D w = dx_inv_dy(u);
  const fft::Spectrum uh = fft::forward_2d(u.values(), u.grid().nx(), u.grid().ny());
  const double kin = 0.5 * detail::quadratic_2d(u.grid(), uh, [&](double xi, double) {
    return xi == 0.0 ? 0.0 : std::pow(std::abs(xi), alpha);
  });
  const double trans = -0.5 * eps * integral_2d(w, 2);
  const double pot = -integral_2d(u, 3) / 6.0;
  return make_functional("kp_energy", {{"kinetic", kin}, {"transverse", trans}, {"potential", pot}});
}

struct KPIntegrals {
  double a = 0.0, b = 0.0, d = 0.0, e = 0.0;  // int u^2, int u^3, int v^2, int |D_x^{a/2} u|^2
  double alpha = 0.0, c = 0.0;
  int eps = -1;
};

struct KPConsistency {
  KPIntegrals integrals;
  std::vector<std::pair<std::string, double>> residuals;
  double max_residual = 0.0;
  bool trivial_only = false;     // eps = +1: d = e = 0 forces a = b = 0
  bool nonexistence = false;     // a <= 0
};

inline void to_json(nlohmann::json& j, const KPConsistency& k) {
  nlohmann::json res = nlohmann::json::array();
  for (const auto& [n, v] : k.residuals) res.push_back({n, v});
  j = {{"alpha", k.integrals.alpha}, {"c", k.integrals.c}, {"epsilon", k.integrals.eps},
       {"a", k.integrals.a}, {"b", k.integrals.b}, {"d", k.integrals.d}, {"e", k.integrals.e},
       {"residuals", res}, {"max_residual", k.max_residual}, {"trivial_only", k.trivial_only},
       {"nonexistence", k.nonexistence}};
}

/// Residuals of the integral relations for (a, b, d, e).
inline std::vector<std::pair<std::string, double>> kp_relations(const KPIntegrals& I) {
  const double a = I.a, b = I.b, d = I.d, e = I.e, c = I.c, al = I.alpha, eps = I.eps;
  return {
      {"po1", c * a / 2 - b / 3 + eps * d / 2 + (al + 1) * e / 2},
      {"po2", -c * a / 2 + b / 6 - eps * d / 2 - e / 2},
      {"energ", -c * a + b / 2 + eps * d - e},
      {"defoc", 2 * eps * d + al * e / 2},
      {"po3", c * a / 2 - b / 3 + (3 * al + 4) / (2 * al) * d},
      {"po4", -c * a + b / 2 - (al + 4) / al * d},
      {"po5", c * al * a + (4 - 5 * al) / 12 * b},
      {"po6", b / 3 - al * e},
      {"po7", c * a + (4 - 5 * al) / 4 * e},
  };
}

/// Solve the integral relations with e = 1 (eps = -1) and check they close.
inline KPConsistency kp_identity_consistency(double alpha, double c, int eps) {
  require(c > 0.0, "velocity c must be positive");
  require(alpha > 0.0, "alpha must be positive");
  require(eps == 1 || eps == -1, "epsilon must be +1 or -1");
  KPConsistency out;
  KPIntegrals& I = out.integrals;
  I.alpha = alpha;
  I.c = c;
  I.eps = eps;
  if (eps == -1) {
    I.e = 1.0;
    I.d = alpha * I.e / 4.0;
    I.b = 3.0 * alpha * I.e;
    I.a = (5.0 * alpha - 4.0) * I.e / (4.0 * c);
  } else {
    // 2d + (alpha/2) e = 0 with d, e >= 0.
    I.d = I.e = 0.0;
    I.b = 3.0 * alpha * I.e;
    I.a = -(4.0 - 5.0 * alpha) * I.e / (4.0 * c);
    out.trivial_only = true;
  }
  out.residuals = kp_relations(I);
  for (const auto& r : out.residuals) out.max_residual = std::max(out.max_residual, std::abs(r.second));
  out.nonexistence = out.trivial_only || I.a <= 0.0;
  return out;
}

struct BltRatio {
  double ratio = 0.0;
  double l3_cubed = 0.0, l2 = 0.0, hx = 0.0, transverse = 0.0;
  double a1 = 0.0, a2 = 0.0;
};

inline void to_json(nlohmann::json& j, const BltRatio& r) {
  j = {{"ratio", r.ratio}, {"l3_cubed", r.l3_cubed}, {"l2", r.l2}, {"hx", r.hx},
       {"transverse", r.transverse}, {"a1", r.a1}, {"a2", r.a2}};
}

inline double blt_a1(double alpha) { return (5.0 * alpha - 4.0) / (alpha + 2.0); }
inline double blt_a2(double alpha) { return (18.0 - 5.0 * alpha) / (2.0 * (alpha + 2.0)); }

/// |f|_3^3 / (|f|_2^{a1} |f|_{H_x^{a/2}}^{a2} |d_x^{-1} f_y|_2^{1/2}).
inline BltRatio blt_ratio(const RealField2D& f, double alpha) {
  require(alpha > 0.8 && alpha <= 1.0, "blt_ratio requires alpha in (4/5, 1]");
  BltRatio r;
  r.a1 = blt_a1(alpha);
  r.a2 = blt_a2(alpha);
  const RealField2D w = dx_inv_dy(f);
  r.transverse = std::sqrt(integral_2d(w, 2));
  if (!(r.transverse > 1e-14)) throw InvalidArgument("blt_ratio undefined: |d_x^{-1} f_y|_2 vanishes (y-independent field)");
  const fft::Spectrum fh = fft::forward_2d(f.values(), f.grid().nx(), f.grid().ny());
  const double l2sq = integral_2d(f, 2);
  const double kin = detail::quadratic_2d(f.grid(), fh, [&](double xi, double) {
    return xi == 0.0 ? 0.0 : std::pow(std::abs(xi), alpha);
  });
  r.l2 = std::sqrt(l2sq);
  r.hx = std::sqrt(l2sq + kin);
  r.l3_cubed = integral_2d(f, 3, true);
  r.ratio = r.l3_cubed / (std::pow(r.l2, r.a1) * std::pow(r.hx, r.a2) * std::sqrt(r.transverse));
  return r;
}

/// lambda^a f(lambda x, lambda^{(a+2)/2} y) sampled on the grid; the fKP scaling,
/// under which |u_lambda|_2 = lambda^{(3a-4)/4} |u|_2.
inline RealField2D kp_scaled_field(const Grid2D& g, const std::function<double(double, double)>& f, double lambda, double alpha) {
  require(lambda > 0.0, "scaling factor must be positive");
  const double ly = std::pow(lambda, (alpha + 2.0) / 2.0);
  const double amp = std::pow(lambda, alpha);
  return RealField2D::from_function(g, [&](double x, double y) { return amp * f(lambda * x, ly * y); });
}

}  // namespace fracsol
