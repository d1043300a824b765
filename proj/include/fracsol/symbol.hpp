#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "fracsol/error.hpp"
#include "fracsol/grid.hpp"

namespace fracsol {

enum class SymbolKind { PurePower, Whitham, WhithamTension };

inline std::string to_string(SymbolKind k) {
  switch (k) {
    case SymbolKind::PurePower: return "pure_power";
    case SymbolKind::Whitham: return "whitham";
    case SymbolKind::WhithamTension: return "whitham_tension";
  }
  return "unknown";
}

/// Even Fourier multiplier p(xi) selecting the dispersion of the model.
class DispersionSymbol {
 public:
  /// |xi|^alpha, alpha in (0, 2].
  static DispersionSymbol pure_power(double alpha) {
    require(alpha > 0.0 && alpha <= 2.0, "pure-power exponent alpha must lie in (0, 2]");
    return DispersionSymbol(SymbolKind::PurePower, alpha, 0.0);
  }

  /// (tanh xi / xi)^{1/2}, continuous at 0 with value 1.
  static DispersionSymbol whitham() { return DispersionSymbol(SymbolKind::Whitham, 0.0, 0.0); }

  /// (1 + beta xi^2)^{1/2} (tanh xi / xi)^{1/2}, beta >= 0.
  static DispersionSymbol whitham_tension(double beta) {
    require(beta >= 0.0 && std::isfinite(beta), "surface tension beta must be nonnegative");
    return DispersionSymbol(SymbolKind::WhithamTension, 0.0, beta);
  }

  SymbolKind kind() const { return kind_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  bool is_pure_power() const { return kind_ == SymbolKind::PurePower; }

  double operator()(double xi) const {
    const double a = std::abs(xi);
    switch (kind_) {
      case SymbolKind::PurePower: return a == 0.0 ? 0.0 : std::pow(a, alpha_);
      case SymbolKind::Whitham: return std::sqrt(tanh_ratio(a));
      case SymbolKind::WhithamTension: return std::sqrt((1.0 + beta_ * a * a) * tanh_ratio(a));
    }
    return 0.0;
  }

  /// Values on the grid's nonnegative half spectrum.
  std::vector<double> sample(const Grid1D& grid) const {
    std::vector<double> m(grid.spectrum_size());
    auto xi = grid.half_wavenumbers();
    for (std::size_t j = 0; j < m.size(); ++j) m[j] = (*this)(xi[j]);
    return m;
  }

 private:
  DispersionSymbol(SymbolKind kind, double alpha, double beta) : kind_(kind), alpha_(alpha), beta_(beta) {}

  // tanh(x)/x with the removable singularity at 0 filled in.
  static double tanh_ratio(double x) {
    if (x < 1e-4) {
      const double x2 = x * x;
      return 1.0 - x2 / 3.0 + 2.0 * x2 * x2 / 15.0;
    }
    return std::tanh(x) / x;
  }

  SymbolKind kind_;
  double alpha_;
  double beta_;
};

}  // namespace fracsol
