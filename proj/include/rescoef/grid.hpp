#pragma once

#include <variant>

#include "rescoef/errors.hpp"

namespace rescoef {

/// Uniform grid of M cells on the unit interval. Cell k covers
/// [k/M, (k+1)/M).
struct Grid1D {
  int cells = 1;

  explicit Grid1D(int m) : cells(m) {
    if (m < 1) throw InvalidInput("Grid1D: cell count must be >= 1");
  }

  double width() const { return 1.0 / cells; }
  double node(int k) const { return static_cast<double>(k) / cells; }
  double midpoint(int k) const { return (k + 0.5) / cells; }

  bool operator==(const Grid1D&) const = default;
};

/// Uniform grid of cells_x * cells_y rectangles on the unit square. Cell
/// (i, j) covers [i/Mx, (i+1)/Mx) x [j/My, (j+1)/My) and has linear index
/// j * Mx + i.
struct Grid2D {
  int cells_x = 1;
  int cells_y = 1;

  Grid2D(int mx, int my) : cells_x(mx), cells_y(my) {
    if (mx < 1 || my < 1) throw InvalidInput("Grid2D: cell counts must be >= 1");
  }

  int cell_count() const { return cells_x * cells_y; }
  int index(int i, int j) const { return j * cells_x + i; }

  bool operator==(const Grid2D&) const = default;
};

using AnyGrid = std::variant<Grid1D, Grid2D>;

inline int cell_count(const AnyGrid& g) {
  if (std::holds_alternative<Grid1D>(g)) return std::get<Grid1D>(g).cells;
  return std::get<Grid2D>(g).cell_count();
}

}  // namespace rescoef
