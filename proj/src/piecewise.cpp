#include "rescoef/piecewise.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace rescoef {

namespace {

void require_finite(std::span<const double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) throw InvalidInput("PiecewiseFn: non-finite cell value");
  }
}

}  // namespace

PiecewiseFn::PiecewiseFn(Grid1D grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (static_cast<int>(values_.size()) != grid.cells)
    throw InvalidInput("PiecewiseFn: value count does not match grid");
  require_finite(values_);
}

PiecewiseFn::PiecewiseFn(Grid2D grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (static_cast<int>(values_.size()) != grid.cell_count())
    throw InvalidInput("PiecewiseFn: value count does not match grid");
  require_finite(values_);
}

PiecewiseFn PiecewiseFn::constant(Grid1D grid, double c) {
  return PiecewiseFn(grid, std::vector<double>(static_cast<size_t>(grid.cells), c));
}

PiecewiseFn PiecewiseFn::constant(Grid2D grid, double c) {
  return PiecewiseFn(grid, std::vector<double>(static_cast<size_t>(grid.cell_count()), c));
}

const Grid1D& PiecewiseFn::grid1() const {
  if (!is_1d()) throw GridMismatch("PiecewiseFn: expected a 1D grid");
  return std::get<Grid1D>(grid_);
}

const Grid2D& PiecewiseFn::grid2() const {
  if (is_1d()) throw GridMismatch("PiecewiseFn: expected a 2D grid");
  return std::get<Grid2D>(grid_);
}

PiecewiseFn PiecewiseFn::refined(int factor) const {
  const Grid1D& g = grid1();
  if (factor < 1) throw InvalidInput("refined: factor must be >= 1");
  std::vector<double> out;
  out.reserve(values_.size() * static_cast<size_t>(factor));
  for (double v : values_)
    for (int r = 0; r < factor; ++r) out.push_back(v);
  return PiecewiseFn(Grid1D(g.cells * factor), std::move(out));
}

double linf_norm(const PiecewiseFn& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::fabs(v));
  return m;
}

PiecewiseFn reciprocal(const PiecewiseFn& sigma) {
  std::vector<double> out;
  out.reserve(sigma.values().size());
  for (double v : sigma.values()) {
    if (v <= 0.0)
      throw NonPositiveCoefficient("reciprocal: cell value " + std::to_string(v) +
                                   " is not positive");
    out.push_back(1.0 / v);
  }
  if (sigma.is_1d()) return PiecewiseFn(sigma.grid1(), std::move(out));
  return PiecewiseFn(sigma.grid2(), std::move(out));
}

PiecewiseFn subtract(const PiecewiseFn& a, const PiecewiseFn& b) {
  return add_scaled(a, -1.0, b);
}

PiecewiseFn add_scaled(const PiecewiseFn& a, double scale, const PiecewiseFn& b) {
  if (!a.same_grid(b)) throw GridMismatch("cellwise combination: grids differ");
  std::vector<double> out(a.values().begin(), a.values().end());
  for (size_t i = 0; i < out.size(); ++i) out[i] += scale * b.value(static_cast<int>(i));
  if (a.is_1d()) return PiecewiseFn(a.grid1(), std::move(out));
  return PiecewiseFn(a.grid2(), std::move(out));
}

void check_bounds(const PiecewiseFn& f, const Bounds& bounds, const char* role) {
  for (double v : f.values()) {
    if (v < bounds.lo || v > bounds.hi) {
      std::string msg = std::string(role) + ": value " + std::to_string(v) +
                        " outside [" + std::to_string(bounds.lo) + ", " +
                        std::to_string(bounds.hi) + "]";
      if (bounds.lo > 0.0 && v <= 0.0) throw NonPositiveCoefficient(msg);
      throw InvalidInput(msg);
    }
  }
}

}  // namespace rescoef
