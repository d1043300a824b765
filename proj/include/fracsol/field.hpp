#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "fracsol/error.hpp"
#include "fracsol/grid.hpp"

namespace fracsol {

/// Real samples on a Grid1D. Entries are always finite.
class RealField {
 public:
  RealField(Grid1D grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
    require(values_.size() == grid_.n(), "field length " + std::to_string(values_.size()) +
                                             " does not match grid size " + std::to_string(grid_.n()));
    for (std::size_t k = 0; k < values_.size(); ++k) {
      if (!std::isfinite(values_[k])) throw NumericalError("non_finite", "non-finite field value at index " + std::to_string(k));
    }
  }

  static RealField zeros(const Grid1D& grid) { return RealField(grid, std::vector<double>(grid.n(), 0.0)); }

  static RealField from_function(const Grid1D& grid, const std::function<double(double)>& f) {
    std::vector<double> v(grid.n());
    for (std::size_t k = 0; k < grid.n(); ++k) v[k] = f(grid.x(k));
    return RealField(grid, std::move(v));
  }

  const Grid1D& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t k) const { return values_[k]; }

  double sup_norm() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
  }
  double max() const { return *std::max_element(values_.begin(), values_.end()); }
  double min() const { return *std::min_element(values_.begin(), values_.end()); }

  RealField operator-() const { return scaled(-1.0); }

  RealField scaled(double a) const {
    std::vector<double> v(values_);
    for (double& x : v) x *= a;
    return RealField(grid_, std::move(v));
  }

  friend RealField operator*(double a, const RealField& u) { return u.scaled(a); }

  friend RealField operator+(const RealField& a, const RealField& b) { return combine(a, b, 1.0); }
  friend RealField operator-(const RealField& a, const RealField& b) { return combine(a, b, -1.0); }

 private:
  static RealField combine(const RealField& a, const RealField& b, double sign) {
    require(a.grid() == b.grid(), "fields live on different grids");
    std::vector<double> v(a.values_);
    for (std::size_t k = 0; k < v.size(); ++k) v[k] += sign * b.values_[k];
    return RealField(a.grid_, std::move(v));
  }

  Grid1D grid_;
  std::vector<double> values_;
};

}  // namespace fracsol
