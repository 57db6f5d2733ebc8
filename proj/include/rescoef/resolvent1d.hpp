#pragma once

#include <span>
#include <string>
#include <vector>

#include "rescoef/piecewise.hpp"

namespace rescoef {

/// Piecewise-constant source term f on the unit interval.
struct SourceFn {
  Grid1D grid;
  std::vector<double> values;

  SourceFn(Grid1D g, std::vector<double> v);
  static SourceFn constant(Grid1D g, double c);
};

/// Primitive F(x) = int_0^x f evaluated at grid nodes (size cells + 1).
/// F is piecewise linear with F(0) = 0 exactly.
std::vector<double> primitive_nodes(const SourceFn& f);

/// Solution of -(sigma u_x)_x = f on (0,1) with u_x(0) = 0 and u(1) = 0.
/// The derivative is linear inside each cell, so storing its endpoint
/// values per cell represents it exactly; node_values holds u at the
/// cell boundaries with node_values.back() == 0 exactly.
struct Solution1D {
  Grid1D grid;
  std::vector<double> node_values;  // cells + 1
  std::vector<double> deriv_left;   // derivative at the left end of each cell
  std::vector<double> deriv_right;  // derivative at the right end of each cell

  double deriv_mid(int cell) const {
    return 0.5 * (deriv_left[static_cast<size_t>(cell)] + deriv_right[static_cast<size_t>(cell)]);
  }
  /// Exact value at the midpoint of a cell (the solution is quadratic there).
  double value_mid(int cell) const;
};

/// Function that is linear inside every cell but may jump across cell
/// boundaries, stored by its one-sided endpoint values.
struct CellwiseLinear {
  Grid1D grid;
  std::vector<double> left;
  std::vector<double> right;

  /// Exact integral of the absolute value (splits cells at sign changes).
  double l1_norm() const;
  double linf_norm() const;
};

/// Exact closed-form solve: v(x) = int_x^1 (1/sigma) F with F the source
/// primitive, accumulated backwards from v(1) = 0 by per-cell trapezoids
/// (exact since F is linear per cell).
Solution1D apply_resolvent(const PiecewiseFn& sigma, const SourceFn& f);

/// The multiply-the-primitive operator (T_m f)(x) = m(x) F(x), represented
/// exactly as a cellwise-linear function.
CellwiseLinear apply_Tm(const PiecewiseFn& m, const SourceFn& f);

/// Exact W^{-1,1} norm of f: the L1 norm of its primitive.
double wm11_norm(const SourceFn& f);

/// Exact operator norm of T_m from W^{-1,1} to L1; equals the sup norm
/// of the multiplier.
double tm_operator_norm(const PiecewiseFn& m);

/// Exact value of the star-norm distance between two resolvents:
/// the sup norm of 1/sigma - 1/sigma_tilde.
double resolvent_distance_star(const PiecewiseFn& sigma, const PiecewiseFn& sigma_tilde);

struct SpanDistance {
  double distance = 0.0;
  std::vector<double> coeffs;
};

/// Star-norm distance from R_tau to the span of the basis resolvents:
/// the best sup-norm approximation of 1/tau by combinations of 1/sigma_i,
/// delegated to the minimax solver. Zero exactly when 1/tau lies in the
/// span of the reciprocals.
SpanDistance span_distance_star(const PiecewiseFn& tau, std::span<const PiecewiseFn> basis);

/// Source whose primitive is a tent of unit mass centered near x0 with
/// half-width eps; realizes the concentration argument behind the operator
/// norm identity. The apex and feet are snapped to the nearest grid nodes,
/// which keeps the W^{-1,1} norm exactly one; eps must span at least two
/// cells of the grid and the support must stay inside (0, 1).
SourceFn concentration_probe(const Grid1D& grid, double x0, double eps);

/// One probe per cell of `grid`, built on a refinement so each tent sits
/// strictly inside its cell (the argmax-cell probe then attains the exact
/// operator norm). The probes live on Grid1D(grid.cells * refine) with
/// eps = 2 refined cells; refine must be at least 8 for strict interiority.
std::vector<SourceFn> cell_probe_suite(const Grid1D& grid, int refine = 8);

/// max over probes of ||T_m f||_L1 / ||f||_W^{-1,1}; never exceeds
/// tm_operator_norm(m), with equality when some probe concentrates in an
/// extremal cell. Probes may live on refinements of m's grid.
double empirical_star_norm(const PiecewiseFn& m, std::span<const SourceFn> probes);

/// CSV export "x,v,v_x" at all cell boundaries and midpoints (2M + 1 rows,
/// 17-significant-digit floats). At interior boundaries v_x reports the
/// right-cell limit; at x = 1 the left-cell limit.
std::string solution_to_csv(const Solution1D& v);

}  // namespace rescoef
