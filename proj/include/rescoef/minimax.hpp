#pragma once

#include <vector>

namespace rescoef {

/// Discrete L-infinity best-approximation problem: find coefficients a
/// minimizing max_j |(A a - b)_j|. Rows index grid cells, columns index
/// basis functions. A stored row-major.
struct MinimaxProblem {
  int rows = 0;
  int cols = 0;
  std::vector<double> matrix;  // rows * cols, row-major
  std::vector<double> rhs;     // rows

  double at(int r, int c) const { return matrix[static_cast<size_t>(r) * cols + c]; }
};

struct MinimaxSolution {
  std::vector<double> coeffs;
  double deviation = 0.0;
  /// Rows where |A a - b| attains the deviation within 1e-8 * (1 + t).
  std::vector<int> active_rows;
};

struct MinimaxOptions {
  /// Absolute tolerance on simplex reduced costs.
  double reduced_cost_tol = 1e-10;
  /// Hard cap on simplex pivots; Bland's rule makes cycling impossible so
  /// reaching the cap is reported as NumericalBreakdown instead of hidden.
  long max_pivots = 200000;
};

/// Global minimizer of max_j |(A a - b)_j|.
///
/// The problem is the linear program  min t  s.t.  -t <= (A a - b)_j <= t,
/// solved by a self-contained two-phase dense simplex on its dual (the dual
/// basis has cols+1 entries, which keeps the tableau small for tall
/// problems). Bland's anti-cycling rule makes the pivot order deterministic,
/// so ties among optimal coefficient vectors are broken reproducibly. The
/// reported deviation is recomputed as max_j |(A a - b)_j| from the returned
/// coefficients and cross-checked against the LP objective.
MinimaxSolution minimax_solve(const MinimaxProblem& p, const MinimaxOptions& opt = {});

/// Independent oracle: exhaustive search of a over the lattice
/// {-box + k*step} ^ cols. The last axis is scanned by convex bracketing,
/// which returns the same optimum as full enumeration because the objective
/// restricted to one axis is a convex sequence. Throws OracleTooLarge for
/// more than 3 columns.
MinimaxSolution minimax_brute_force(const MinimaxProblem& p, double box, double step);

}  // namespace rescoef
