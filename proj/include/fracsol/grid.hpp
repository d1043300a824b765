#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "fracsol/error.hpp"

namespace fracsol {

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

/// Uniform periodic sampling of [-L, L) with n points.
///
/// Wavenumbers follow the standard transform ordering
/// xi_j = pi j / L for j = 0..n/2-1, then -n/2..-1. The half spectrum used by
/// real transforms holds the nonnegative values pi j / L, j = 0..n/2.
/// Copies share the underlying arrays.
class Grid1D {
 public:
  Grid1D(std::size_t n, double half_length) {
    require(is_power_of_two(n) && n >= 8,
            "grid size n must be a power of two and at least 8, got " + std::to_string(n));
    require(std::isfinite(half_length) && half_length > 0.0,
            "grid half-length L must be positive");
    auto d = std::make_shared<Data>();
    d->n = n;
    d->half_length = half_length;
    d->dx = 2.0 * half_length / static_cast<double>(n);
    const double k0 = std::numbers::pi / half_length;
    d->wavenumbers.resize(n);
    const auto half = static_cast<std::ptrdiff_t>(n / 2);
    for (std::size_t j = 0; j < n; ++j) {
      auto sj = static_cast<std::ptrdiff_t>(j);
      if (sj >= half) sj -= static_cast<std::ptrdiff_t>(n);
      d->wavenumbers[j] = k0 * static_cast<double>(sj);
    }
    d->half_wavenumbers.resize(n / 2 + 1);
    for (std::size_t j = 0; j <= n / 2; ++j) d->half_wavenumbers[j] = k0 * static_cast<double>(j);
    data_ = std::move(d);
  }

  std::size_t n() const { return data_->n; }
  std::size_t spectrum_size() const { return data_->n / 2 + 1; }
  double half_length() const { return data_->half_length; }
  double length() const { return 2.0 * data_->half_length; }
  double dx() const { return data_->dx; }

  double x(std::size_t k) const { return -data_->half_length + static_cast<double>(k) * data_->dx; }

  std::vector<double> points() const {
    std::vector<double> xs(n());
    for (std::size_t k = 0; k < n(); ++k) xs[k] = x(k);
    return xs;
  }

  std::span<const double> wavenumbers() const { return data_->wavenumbers; }
  std::span<const double> half_wavenumbers() const { return data_->half_wavenumbers; }

  /// Largest resolved wavenumber pi n / (2L).
  double nyquist() const { return data_->half_wavenumbers.back(); }

  friend bool operator==(const Grid1D& a, const Grid1D& b) {
    return a.n() == b.n() && a.half_length() == b.half_length();
  }

 private:
  struct Data {
    std::size_t n = 0;
    double half_length = 0.0;
    double dx = 0.0;
    std::vector<double> wavenumbers;
    std::vector<double> half_wavenumbers;
  };
  std::shared_ptr<const Data> data_;
};

inline Grid1D make_grid(std::size_t n, double half_length) { return Grid1D(n, half_length); }

}  // namespace fracsol
