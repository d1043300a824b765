#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fracsol/error.hpp"
#include "fracsol/field.hpp"
#include "fracsol/spectral.hpp"
#include "fracsol/symbol.hpp"

namespace fracsol {

/// A scalar functional together with its signed integral terms.
struct FunctionalValue {
  std::string name;
  double value = 0.0;
  std::vector<std::pair<std::string, double>> components;
};

inline void to_json(nlohmann::json& j, const FunctionalValue& f) {
  nlohmann::json comps = nlohmann::json::array();
  for (const auto& [label, v] : f.components) comps.push_back({label, v});
  j = {{"name", f.name}, {"value", f.value}, {"components", comps}};
}

inline FunctionalValue make_functional(std::string name, std::vector<std::pair<std::string, double>> comps) {
  FunctionalValue f{std::move(name), 0.0, std::move(comps)};
  for (const auto& c : f.components) f.value += c.second;
  return f;
}

/// Integral of u^k (signed) or |u|^k.
inline double power_integral(const RealField& u, int k, bool absolute = false) {
  double s = 0.0;
  for (double v : u.values()) s += std::pow(absolute ? std::abs(v) : v, k);
  return s * u.grid().dx();
}

/// M(u) = (1/2) int u^2.
inline double mass(const RealField& u) { return 0.5 * l2_squared(u); }

/// (1/2) int |p(D)^{1/2} u|^2 - int u^{p+2} / ((p+1)(p+2)); p = 1 gives the cubic term u^3/6.
inline FunctionalValue energy_fkdv(const RealField& u, const DispersionSymbol& sym, int p = 1) {
  require(p >= 1, "nonlinearity power p must be a positive integer");
  const double kinetic = 0.5 * symbol_quadratic(u, sym);
  const double pot = power_integral(u, p + 2) / static_cast<double>((p + 1) * (p + 2));
  return make_functional("energy", {{"kinetic", kinetic}, {"potential", -pot}});
}

/// (1/2) int (u^2 + |D^{alpha/2} u|^2).
inline double bbm_quadratic(const RealField& u, double alpha) {
  require(alpha > 0.0 && alpha <= 1.0, "bbm_quadratic requires alpha in (0, 1]");
  const double e = energy_norm(u, alpha);
  return 0.5 * e * e;
}

/// int (u^2/2 + u^3/6).
inline double bbm_hamiltonian(const RealField& u) {
  double s = 0.0;
  for (double v : u.values()) s += 0.5 * v * v + v * v * v / 6.0;
  return s * u.grid().dx();
}

inline constexpr double kCubicFloor = 1e-14;

/// Weinstein quotient (int |u|^3)^{-1} K^{1/(2 alpha)} (int u^2)^{(3 alpha - 1)/(2 alpha)},
/// K = int |D^{alpha/2} u|^2.
inline double weinstein(const RealField& u, double alpha) {
  require(alpha > 0.0 && alpha <= 2.0, "weinstein requires alpha in (0, 2]");
  const double cubic = power_integral(u, 3, true);
  if (!(cubic > kCubicFloor)) throw NumericalError("undefined", "weinstein functional undefined: int |u|^3 vanishes");
  const double K = fractional_seminorm_squared(u, 0.5 * alpha);
  const double M2 = l2_squared(u);
  return std::pow(K, 1.0 / (2.0 * alpha)) * std::pow(M2, (3.0 * alpha - 1.0) / (2.0 * alpha)) / cubic;
}

struct GnCheck {
  double lhs = 0.0;       // int |u|^3
  double rhs_unit = 0.0;  // right side with C = 1
  double ratio = 0.0;     // lhs / rhs_unit
  double constant = 0.0;
  bool holds = false;     // lhs <= C rhs_unit
};

inline void to_json(nlohmann::json& j, const GnCheck& g) {
  j = {{"lhs", g.lhs}, {"rhs_unit", g.rhs_unit}, {"ratio", g.ratio}, {"constant", g.constant}, {"holds", g.holds}};
}

inline GnCheck gn_check(const RealField& u, double alpha, double C) {
  require(alpha > 1.0 / 3.0 && alpha <= 1.0, "gn_check requires alpha in (1/3, 1]");
  require(C > 0.0, "gn_check constant must be positive");
  GnCheck g;
  g.constant = C;
  g.lhs = power_integral(u, 3, true);
  const double K = fractional_seminorm_squared(u, 0.5 * alpha);
  const double M2 = l2_squared(u);
  g.rhs_unit = std::pow(K, 1.0 / (2.0 * alpha)) * std::pow(M2, (3.0 * alpha - 1.0) / (2.0 * alpha));
  if (!(g.rhs_unit > 0.0)) throw NumericalError("undefined", "gn_check undefined for the zero field");
  g.ratio = g.lhs / g.rhs_unit;
  g.holds = g.lhs <= C * g.rhs_unit;
  return g;
}

}  // namespace fracsol
