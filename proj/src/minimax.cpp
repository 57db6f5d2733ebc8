#include "rescoef/minimax.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "rescoef/errors.hpp"

namespace rescoef {

namespace {

void validate(const MinimaxProblem& p) {
  if (p.rows < 1 || p.cols < 1) throw InvalidInput("minimax: need at least one row and column");
  if (static_cast<int>(p.rhs.size()) != p.rows ||
      static_cast<int>(p.matrix.size()) != p.rows * p.cols)
    throw InvalidInput("minimax: inconsistent matrix/rhs sizes");
  for (double v : p.matrix)
    if (!std::isfinite(v)) throw InvalidInput("minimax: non-finite matrix entry");
  for (double v : p.rhs)
    if (!std::isfinite(v)) throw InvalidInput("minimax: non-finite rhs entry");
}

double max_abs_residual(const MinimaxProblem& p, const std::vector<double>& a) {
  double t = 0.0;
  for (int j = 0; j < p.rows; ++j) {
    double r = -p.rhs[static_cast<size_t>(j)];
    for (int i = 0; i < p.cols; ++i) r += p.at(j, i) * a[static_cast<size_t>(i)];
    t = std::max(t, std::fabs(r));
  }
  return t;
}

std::vector<int> find_active_rows(const MinimaxProblem& p, const std::vector<double>& a,
                                  double t) {
  const double tol = 1e-8 * (1.0 + t);
  std::vector<int> active;
  for (int j = 0; j < p.rows; ++j) {
    double r = -p.rhs[static_cast<size_t>(j)];
    for (int i = 0; i < p.cols; ++i) r += p.at(j, i) * a[static_cast<size_t>(i)];
    if (std::fabs(r) >= t - tol) active.push_back(j);
  }
  return active;
}

// Dense two-phase simplex on the dual of  min t, -t <= (Aa - b)_j <= t:
//
//   min  b'p - b'q
//   s.t. A'(p - q) = 0,  sum(p) + sum(q) = 1,  p, q >= 0.
//
// Variables 0..m-1 are p_j (tight rows with residual +t), m..2m-1 are q_j
// (residual -t). The optimal value equals -t*, and the basic variables name
// the tight primal constraints from which (a, t) is recovered.
class DualSimplex {
 public:
  DualSimplex(const MinimaxProblem& p, const MinimaxOptions& opt)
      : p_(p), opt_(opt), m_(p.rows), n_(p.cols), nvars_(2 * p.rows), nrows_(p.cols + 1) {
    // Tableau layout: nvars_ structural columns, nrows_ artificial columns,
    // one rhs column. Row r < n_ encodes A'(p - q) = 0; the last row the
    // normalization sum(p + q) = 1.
    width_ = nvars_ + nrows_ + 1;
    tab_.assign(static_cast<size_t>(nrows_) * width_, 0.0);
    cost_.assign(static_cast<size_t>(width_), 0.0);
    basis_.resize(static_cast<size_t>(nrows_));
    row_alive_.assign(static_cast<size_t>(nrows_), true);

    for (int r = 0; r < n_; ++r) {
      for (int j = 0; j < m_; ++j) {
        at(r, j) = p_.at(j, r);
        at(r, m_ + j) = -p_.at(j, r);
      }
    }
    for (int j = 0; j < nvars_; ++j) at(n_, j) = 1.0;
    for (int r = 0; r < nrows_; ++r) at(r, nvars_ + r) = 1.0;
    rhs(n_) = 1.0;
    for (int r = 0; r < nrows_; ++r) basis_[static_cast<size_t>(r)] = nvars_ + r;
  }

  /// Runs both phases; returns optimal t*.
  double optimize() {
    phase1();
    phase2();
    double obj = 0.0;
    for (int r = 0; r < nrows_; ++r) {
      if (!row_alive_[static_cast<size_t>(r)]) continue;
      obj += structural_cost(basis_[static_cast<size_t>(r)]) * rhs(r);
    }
    return -obj;  // min of b'(p - q) equals -t*
  }

  /// Recovers a primal optimum from the tight constraints named by the
  /// final basis: basic p_j gives (Aa - b)_j = +t, basic q_j gives -t.
  /// Unknowns are (a, t); redundant dual rows drop equations, in which case
  /// non-pivot unknowns are fixed to zero.
  std::vector<double> recover_primal() const {
    const int unknowns = n_ + 1;
    std::vector<std::vector<double>> eq;
    std::vector<double> rhs_eq;
    for (int r = 0; r < nrows_; ++r) {
      if (!row_alive_[static_cast<size_t>(r)]) continue;
      int var = basis_[static_cast<size_t>(r)];
      if (var >= nvars_) continue;  // artificial stuck at zero in a degenerate basis
      int j = var % m_;
      double tsign = (var < m_) ? -1.0 : 1.0;  // p_j: Aa - t = b, q_j: Aa + t = b
      std::vector<double> row(static_cast<size_t>(unknowns));
      for (int i = 0; i < n_; ++i) row[static_cast<size_t>(i)] = p_.at(j, i);
      row[static_cast<size_t>(n_)] = tsign;
      eq.push_back(std::move(row));
      rhs_eq.push_back(p_.rhs[static_cast<size_t>(j)]);
    }
    return solve_least_norm(eq, rhs_eq, unknowns);
  }

 private:
  double& at(int r, int c) { return tab_[static_cast<size_t>(r) * width_ + c]; }
  double at(int r, int c) const { return tab_[static_cast<size_t>(r) * width_ + c]; }
  double& rhs(int r) { return tab_[static_cast<size_t>(r) * width_ + width_ - 1]; }
  double rhs(int r) const { return tab_[static_cast<size_t>(r) * width_ + width_ - 1]; }

  double structural_cost(int var) const {
    if (var >= nvars_) return 0.0;
    return (var < m_) ? p_.rhs[static_cast<size_t>(var)] : -p_.rhs[static_cast<size_t>(var - m_)];
  }

  void pivot(int prow, int pcol) {
    const double piv = at(prow, pcol);
    const double inv = 1.0 / piv;
    for (int c = 0; c < width_; ++c) at(prow, c) *= inv;
    at(prow, pcol) = 1.0;
    for (int r = 0; r < nrows_; ++r) {
      if (r == prow || !row_alive_[static_cast<size_t>(r)]) continue;
      const double factor = at(r, pcol);
      if (factor == 0.0) continue;
      for (int c = 0; c < width_; ++c) at(r, c) -= factor * at(prow, c);
      at(r, pcol) = 0.0;
    }
    const double cf = cost_[static_cast<size_t>(pcol)];
    if (cf != 0.0) {
      for (int c = 0; c < width_; ++c) cost_[static_cast<size_t>(c)] -= cf * at(prow, c);
      cost_[static_cast<size_t>(pcol)] = 0.0;
    }
    basis_[static_cast<size_t>(prow)] = pcol;
    ++pivots_;
    if (pivots_ > opt_.max_pivots)
      throw NumericalBreakdown("minimax simplex exceeded pivot cap of " +
                               std::to_string(opt_.max_pivots));
  }

  /// Bland's rule: entering = lowest-index column with negative reduced
  /// cost; leaving = among minimal ratios, the row whose basic variable has
  /// the lowest index.
  void run_simplex(int allowed_cols) {
    const double tol = opt_.reduced_cost_tol;
    while (true) {
      int enter = -1;
      for (int c = 0; c < allowed_cols; ++c) {
        if (cost_[static_cast<size_t>(c)] < -tol) {
          enter = c;
          break;
        }
      }
      if (enter < 0) return;
      int leave = -1;
      double best_ratio = 0.0;
      for (int r = 0; r < nrows_; ++r) {
        if (!row_alive_[static_cast<size_t>(r)]) continue;
        const double coef = at(r, enter);
        if (coef <= 1e-12) continue;
        const double ratio = rhs(r) / coef;
        if (leave < 0 || ratio < best_ratio - 1e-14 ||
            (std::fabs(ratio - best_ratio) <= 1e-14 &&
             basis_[static_cast<size_t>(r)] < basis_[static_cast<size_t>(leave)])) {
          leave = r;
          best_ratio = ratio;
        }
      }
      if (leave < 0)
        throw NumericalBreakdown("minimax simplex: unbounded direction in bounded dual");
      pivot(leave, enter);
    }
  }

  void phase1() {
    // Artificial basis: cost row = -(column sums over constraint rows).
    std::fill(cost_.begin(), cost_.end(), 0.0);
    for (int c = 0; c < nvars_; ++c) {
      double s = 0.0;
      for (int r = 0; r < nrows_; ++r) s += at(r, c);
      cost_[static_cast<size_t>(c)] = -s;
    }
    double rhs_sum = 0.0;
    for (int r = 0; r < nrows_; ++r) rhs_sum += rhs(r);
    cost_[static_cast<size_t>(width_ - 1)] = -rhs_sum;

    run_simplex(nvars_);

    double infeas = 0.0;
    for (int r = 0; r < nrows_; ++r)
      if (basis_[static_cast<size_t>(r)] >= nvars_) infeas += rhs(r);
    if (infeas > 1e-8)
      throw NumericalBreakdown("minimax simplex: phase 1 failed to reach feasibility");

    // Drive remaining artificials out of the basis; a row with no usable
    // structural column is a redundant constraint and is dropped.
    for (int r = 0; r < nrows_; ++r) {
      if (basis_[static_cast<size_t>(r)] < nvars_) continue;
      int col = -1;
      for (int c = 0; c < nvars_; ++c) {
        if (std::fabs(at(r, c)) > 1e-9) {
          col = c;
          break;
        }
      }
      if (col >= 0)
        pivot(r, col);
      else
        row_alive_[static_cast<size_t>(r)] = false;
    }
  }

  void phase2() {
    std::fill(cost_.begin(), cost_.end(), 0.0);
    for (int c = 0; c < nvars_; ++c) cost_[static_cast<size_t>(c)] = structural_cost(c);
    for (int r = 0; r < nrows_; ++r) {
      if (!row_alive_[static_cast<size_t>(r)]) continue;
      const double cb = structural_cost(basis_[static_cast<size_t>(r)]);
      if (cb == 0.0) continue;
      for (int c = 0; c < width_; ++c) cost_[static_cast<size_t>(c)] -= cb * at(r, c);
    }
    for (int r = 0; r < nrows_; ++r) {
      if (row_alive_[static_cast<size_t>(r)])
        cost_[static_cast<size_t>(basis_[static_cast<size_t>(r)])] = 0.0;
    }
    run_simplex(nvars_);
  }

  /// Gaussian elimination with full column choice by largest pivot;
  /// unknowns never picked as pivots are set to zero, which makes the
  /// recovered coefficients deterministic when the optimum is not unique.
  static std::vector<double> solve_least_norm(std::vector<std::vector<double>>& eq,
                                              std::vector<double>& rhs_eq, int unknowns) {
    const int neq = static_cast<int>(eq.size());
    std::vector<int> pivot_col_of_row(static_cast<size_t>(neq), -1);
    std::vector<bool> col_used(static_cast<size_t>(unknowns), false);
    int rank = 0;
    for (int r = 0; r < neq && rank < unknowns; ++r) {
      int pc = -1;
      double best = 1e-11;
      for (int c = 0; c < unknowns; ++c) {
        if (col_used[static_cast<size_t>(c)]) continue;
        if (std::fabs(eq[static_cast<size_t>(r)][static_cast<size_t>(c)]) > best) {
          best = std::fabs(eq[static_cast<size_t>(r)][static_cast<size_t>(c)]);
          pc = c;
        }
      }
      if (pc < 0) continue;
      // Swap candidate pivot row with the row holding the largest entry in
      // this column among the remaining rows for stability.
      int prow = r;
      for (int rr = r + 1; rr < neq; ++rr) {
        if (std::fabs(eq[static_cast<size_t>(rr)][static_cast<size_t>(pc)]) >
            std::fabs(eq[static_cast<size_t>(prow)][static_cast<size_t>(pc)]))
          prow = rr;
      }
      std::swap(eq[static_cast<size_t>(r)], eq[static_cast<size_t>(prow)]);
      std::swap(rhs_eq[static_cast<size_t>(r)], rhs_eq[static_cast<size_t>(prow)]);
      const double piv = eq[static_cast<size_t>(r)][static_cast<size_t>(pc)];
      if (std::fabs(piv) <= 1e-11) continue;
      for (int rr = 0; rr < neq; ++rr) {
        if (rr == r) continue;
        const double f = eq[static_cast<size_t>(rr)][static_cast<size_t>(pc)] / piv;
        if (f == 0.0) continue;
        for (int c = 0; c < unknowns; ++c)
          eq[static_cast<size_t>(rr)][static_cast<size_t>(c)] -=
              f * eq[static_cast<size_t>(r)][static_cast<size_t>(c)];
        rhs_eq[static_cast<size_t>(rr)] -= f * rhs_eq[static_cast<size_t>(r)];
        eq[static_cast<size_t>(rr)][static_cast<size_t>(pc)] = 0.0;
      }
      pivot_col_of_row[static_cast<size_t>(r)] = pc;
      col_used[static_cast<size_t>(pc)] = true;
      ++rank;
    }
    std::vector<double> x(static_cast<size_t>(unknowns), 0.0);
    for (int r = 0; r < neq; ++r) {
      const int pc = pivot_col_of_row[static_cast<size_t>(r)];
      if (pc < 0) continue;
      x[static_cast<size_t>(pc)] =
          rhs_eq[static_cast<size_t>(r)] / eq[static_cast<size_t>(r)][static_cast<size_t>(pc)];
    }
    return x;
  }

  const MinimaxProblem& p_;
  MinimaxOptions opt_;
  int m_, n_, nvars_, nrows_, width_;
  std::vector<double> tab_;
  std::vector<double> cost_;
  std::vector<int> basis_;
  std::vector<bool> row_alive_;
  long pivots_ = 0;
};

}  // namespace

MinimaxSolution minimax_solve(const MinimaxProblem& p, const MinimaxOptions& opt) {
  validate(p);

  double bmax = 0.0;
  for (double v : p.rhs) bmax = std::max(bmax, std::fabs(v));
  if (bmax == 0.0) {
    MinimaxSolution s;
    s.coeffs.assign(static_cast<size_t>(p.cols), 0.0);
    s.deviation = 0.0;
    for (int j = 0; j < p.rows; ++j) s.active_rows.push_back(j);
    return s;
  }

  DualSimplex simplex(p, opt);
  const double t_dual = simplex.optimize();
  std::vector<double> x = simplex.recover_primal();
  std::vector<double> a(x.begin(), x.begin() + p.cols);

  const double t = max_abs_residual(p, a);
  const double scale = 1.0 + std::fabs(t_dual) + bmax;
  if (std::fabs(t - t_dual) > 1e-7 * scale)
    throw NumericalBreakdown("minimax: primal recovery inconsistent with dual objective (" +
                             std::to_string(t) + " vs " + std::to_string(t_dual) + ")");

  MinimaxSolution s;
  s.coeffs = std::move(a);
  s.deviation = t;
  s.active_rows = find_active_rows(p, s.coeffs, t);
  return s;
}

namespace {

/// Exact minimum of the convex sequence k -> f(x_k) over k in [0, count),
/// by ternary bracketing; returns the index of a minimizer.
template <typename F>
int convex_grid_argmin(int count, F&& value) {
  int lo = 0, hi = count - 1;
  while (hi - lo > 3) {
    const int m1 = lo + (hi - lo) / 3;
    const int m2 = hi - (hi - lo) / 3;
    if (value(m1) <= value(m2))
      hi = m2;
    else
      lo = m1 + 1;
  }
  int best = lo;
  double best_v = value(lo);
  for (int k = lo + 1; k <= hi; ++k) {
    const double v = value(k);
    if (v < best_v) {
      best_v = v;
      best = k;
    }
  }
  return best;
}

}  // namespace

MinimaxSolution minimax_brute_force(const MinimaxProblem& p, double box, double step) {
  validate(p);
  if (p.cols > 3)
    throw OracleTooLarge("brute force oracle limited to 3 columns, got " +
                         std::to_string(p.cols));
  if (!(box > 0.0) || !(step > 0.0)) throw InvalidInput("brute force: box and step must be > 0");

  const int count = static_cast<int>(std::llround(2.0 * box / step)) + 1;
  auto point = [&](int k) { return -box + k * step; };

  const int n = p.cols;
  const int m = p.rows;
  std::vector<double> base(static_cast<size_t>(m));  // b - (partial combination)
  std::vector<double> best_a(static_cast<size_t>(n), 0.0);
  double best_t = std::numeric_limits<double>::infinity();

  // Residual max over rows for last-axis value x given precomputed base.
  auto eval_last = [&](double x) {
    double t = 0.0;
    for (int j = 0; j < m; ++j) {
      const double r = p.at(j, n - 1) * x - base[static_cast<size_t>(j)];
      const double ar = std::fabs(r);
      if (ar > t) t = ar;
    }
    return t;
  };

  auto scan_last = [&](const std::vector<double>& outer) {
    const int k = convex_grid_argmin(count, [&](int kk) { return eval_last(point(kk)); });
    const double t = eval_last(point(k));
    if (t < best_t) {
      best_t = t;
      for (int i = 0; i + 1 < n; ++i) best_a[static_cast<size_t>(i)] = outer[static_cast<size_t>(i)];
      best_a[static_cast<size_t>(n - 1)] = point(k);
    }
  };

  std::vector<double> outer(static_cast<size_t>(std::max(0, n - 1)), 0.0);
  if (n == 1) {
    for (int j = 0; j < m; ++j) base[static_cast<size_t>(j)] = p.rhs[static_cast<size_t>(j)];
    scan_last(outer);
  } else if (n == 2) {
    for (int k0 = 0; k0 < count; ++k0) {
      outer[0] = point(k0);
      for (int j = 0; j < m; ++j)
        base[static_cast<size_t>(j)] = p.rhs[static_cast<size_t>(j)] - p.at(j, 0) * outer[0];
      scan_last(outer);
    }
  } else {
    for (int k0 = 0; k0 < count; ++k0) {
      outer[0] = point(k0);
      for (int k1 = 0; k1 < count; ++k1) {
        outer[1] = point(k1);
        for (int j = 0; j < m; ++j)
          base[static_cast<size_t>(j)] =
              p.rhs[static_cast<size_t>(j)] - p.at(j, 0) * outer[0] - p.at(j, 1) * outer[1];
        scan_last(outer);
      }
    }
  }

  MinimaxSolution s;
  s.coeffs = std::move(best_a);
  s.deviation = best_t;
  s.active_rows = find_active_rows(p, s.coeffs, best_t);
  return s;
}

}  // namespace rescoef
