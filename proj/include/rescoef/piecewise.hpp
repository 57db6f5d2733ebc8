#pragma once

#include <span>
#include <vector>

#include "rescoef/grid.hpp"

namespace rescoef {

/// Inclusive value bounds for a coefficient class, e.g. a diffusivity known
/// a priori to satisfy 0 < lo <= sigma <= hi.
struct Bounds {
  double lo;
  double hi;
};

/// Piecewise-constant scalar function on a uniform 1D or 2D grid. Immutable
/// after construction; all operations on it are pure, so instances may be
/// shared freely across threads.
class PiecewiseFn {
 public:
  PiecewiseFn(Grid1D grid, std::vector<double> values);
  PiecewiseFn(Grid2D grid, std::vector<double> values);

  static PiecewiseFn constant(Grid1D grid, double c);
  static PiecewiseFn constant(Grid2D grid, double c);

  const AnyGrid& grid() const { return grid_; }
  bool is_1d() const { return std::holds_alternative<Grid1D>(grid_); }

  /// The 1D grid; throws GridMismatch when the function lives on a 2D grid.
  const Grid1D& grid1() const;
  const Grid2D& grid2() const;

  std::span<const double> values() const { return values_; }
  double value(int cell) const { return values_[static_cast<size_t>(cell)]; }
  int cell_count() const { return static_cast<int>(values_.size()); }

  /// Same function represented on a grid refined by an integer factor
  /// (1D only); each cell value is repeated `factor` times.
  PiecewiseFn refined(int factor) const;

  bool same_grid(const PiecewiseFn& other) const { return grid_ == other.grid_; }

  bool operator==(const PiecewiseFn&) const = default;

 private:
  AnyGrid grid_;
  std::vector<double> values_;
};

/// Exact L-infinity norm: max over cells of |value|.
double linf_norm(const PiecewiseFn& f);

/// Cellwise reciprocal 1/sigma. Throws NonPositiveCoefficient when any cell
/// value is <= 0.
PiecewiseFn reciprocal(const PiecewiseFn& sigma);

/// Cellwise difference a - b on a common grid.
PiecewiseFn subtract(const PiecewiseFn& a, const PiecewiseFn& b);

/// Cellwise a + scale * b on a common grid.
PiecewiseFn add_scaled(const PiecewiseFn& a, double scale, const PiecewiseFn& b);

/// Verifies all values lie in [bounds.lo, bounds.hi]; throws
/// NonPositiveCoefficient for a positivity violation (bounds.lo > 0) and
/// InvalidInput otherwise.
void check_bounds(const PiecewiseFn& f, const Bounds& bounds, const char* role);

}  // namespace rescoef
