#include "rescoef/resolvent1d.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "rescoef/errors.hpp"
#include "rescoef/io.hpp"
#include "rescoef/minimax.hpp"

namespace rescoef {

namespace {

/// Exact integral of |L| over a segment of width h where L is linear with
/// endpoint values p and q. When the sign changes inside the segment the
/// two triangles on either side of the root are summed in closed form.
double segment_abs_integral(double p, double q, double h) {
  if (p * q >= 0.0) return 0.5 * h * (std::fabs(p) + std::fabs(q));
  const double ap = std::fabs(p), aq = std::fabs(q);
  return 0.5 * h * (ap * ap + aq * aq) / (ap + aq);
}

void require_same_grid(const Grid1D& a, const Grid1D& b, const char* op) {
  if (!(a == b)) throw GridMismatch(std::string(op) + ": grids differ");
}

void require_valid_diffusivity(const PiecewiseFn& sigma, const char* op) {
  for (double v : sigma.values())
    if (v <= 0.0)
      throw NonPositiveCoefficient(std::string(op) + ": diffusivity value " +
                                   std::to_string(v) + " is not positive");
}

}  // namespace

SourceFn::SourceFn(Grid1D g, std::vector<double> v) : grid(g), values(std::move(v)) {
  if (static_cast<int>(values.size()) != grid.cells)
    throw InvalidInput("SourceFn: value count does not match grid");
  for (double x : values)
    if (!std::isfinite(x)) throw InvalidInput("SourceFn: non-finite value");
}

SourceFn SourceFn::constant(Grid1D g, double c) {
  return SourceFn(g, std::vector<double>(static_cast<size_t>(g.cells), c));
}

std::vector<double> primitive_nodes(const SourceFn& f) {
  const int m = f.grid.cells;
  const double h = f.grid.width();
  std::vector<double> nodes(static_cast<size_t>(m) + 1, 0.0);
  for (int k = 0; k < m; ++k)
    nodes[static_cast<size_t>(k) + 1] = nodes[static_cast<size_t>(k)] + h * f.values[static_cast<size_t>(k)];
  return nodes;
}

double Solution1D::value_mid(int cell) const {
  // v is quadratic inside the cell; integrate the linear derivative from
  // the left node to the midpoint.
  const double h = grid.width();
  const double dl = deriv_left[static_cast<size_t>(cell)];
  const double dm = deriv_mid(cell);
  return node_values[static_cast<size_t>(cell)] + 0.25 * h * (dl + dm);
}

double CellwiseLinear::l1_norm() const {
  const double h = grid.width();
  double s = 0.0;
  for (size_t k = 0; k < left.size(); ++k) s += segment_abs_integral(left[k], right[k], h);
  return s;
}

double CellwiseLinear::linf_norm() const {
  double m = 0.0;
  for (size_t k = 0; k < left.size(); ++k)
    m = std::max(m, std::max(std::fabs(left[k]), std::fabs(right[k])));
  return m;
}

Solution1D apply_resolvent(const PiecewiseFn& sigma, const SourceFn& f) {
  const Grid1D& g = sigma.grid1();
  require_same_grid(g, f.grid, "apply_resolvent");
  require_valid_diffusivity(sigma, "apply_resolvent");

  const int m = g.cells;
  const double h = g.width();
  const std::vector<double> F = primitive_nodes(f);

  Solution1D v{g, std::vector<double>(static_cast<size_t>(m) + 1, 0.0),
               std::vector<double>(static_cast<size_t>(m), 0.0),
               std::vector<double>(static_cast<size_t>(m), 0.0)};
  for (int k = m - 1; k >= 0; --k) {
    const double inv_sigma = 1.0 / sigma.value(k);
    // v_k = v_{k+1} + (h / sigma_k) * (F_k + F_{k+1}) / 2, exact for linear F.
    v.node_values[static_cast<size_t>(k)] =
        v.node_values[static_cast<size_t>(k) + 1] +
        0.5 * h * inv_sigma * (F[static_cast<size_t>(k)] + F[static_cast<size_t>(k) + 1]);
    v.deriv_left[static_cast<size_t>(k)] = -inv_sigma * F[static_cast<size_t>(k)];
    v.deriv_right[static_cast<size_t>(k)] = -inv_sigma * F[static_cast<size_t>(k) + 1];
  }
  return v;
}

CellwiseLinear apply_Tm(const PiecewiseFn& m, const SourceFn& f) {
  const Grid1D& g = m.grid1();
  require_same_grid(g, f.grid, "apply_Tm");
  const std::vector<double> F = primitive_nodes(f);
  CellwiseLinear out{g, std::vector<double>(static_cast<size_t>(g.cells)),
                     std::vector<double>(static_cast<size_t>(g.cells))};
  for (int k = 0; k < g.cells; ++k) {
    out.left[static_cast<size_t>(k)] = m.value(k) * F[static_cast<size_t>(k)];
    out.right[static_cast<size_t>(k)] = m.value(k) * F[static_cast<size_t>(k) + 1];
  }
  return out;
}

double wm11_norm(const SourceFn& f) {
  const std::vector<double> F = primitive_nodes(f);
  const double h = f.grid.width();
  double s = 0.0;
  for (int k = 0; k < f.grid.cells; ++k)
    s += segment_abs_integral(F[static_cast<size_t>(k)], F[static_cast<size_t>(k) + 1], h);
  return s;
}

double tm_operator_norm(const PiecewiseFn& m) {
  (void)m.grid1();
  return linf_norm(m);
}

double resolvent_distance_star(const PiecewiseFn& sigma, const PiecewiseFn& sigma_tilde) {
  if (!sigma.same_grid(sigma_tilde))
    throw GridMismatch("resolvent_distance_star: grids differ");
  require_valid_diffusivity(sigma, "resolvent_distance_star");
  require_valid_diffusivity(sigma_tilde, "resolvent_distance_star");
  return linf_norm(subtract(reciprocal(sigma), reciprocal(sigma_tilde)));
}

SpanDistance span_distance_star(const PiecewiseFn& tau, std::span<const PiecewiseFn> basis) {
  if (basis.empty()) throw EmptyBasis("span_distance_star: basis is empty");
  const Grid1D& g = tau.grid1();
  require_valid_diffusivity(tau, "span_distance_star");
  MinimaxProblem p;
  p.rows = g.cells;
  p.cols = static_cast<int>(basis.size());
  p.matrix.resize(static_cast<size_t>(p.rows) * p.cols);
  for (int i = 0; i < p.cols; ++i) {
    const PiecewiseFn& s = basis[static_cast<size_t>(i)];
    if (!(s.grid1() == g)) throw GridMismatch("span_distance_star: basis grid differs");
    require_valid_diffusivity(s, "span_distance_star");
    for (int r = 0; r < p.rows; ++r)
      p.matrix[static_cast<size_t>(r) * p.cols + i] = 1.0 / s.value(r);
  }
  p.rhs.resize(static_cast<size_t>(p.rows));
  for (int r = 0; r < p.rows; ++r) p.rhs[static_cast<size_t>(r)] = 1.0 / tau.value(r);
  MinimaxSolution sol = minimax_solve(p);
  return SpanDistance{sol.deviation, std::move(sol.coeffs)};
}

SourceFn concentration_probe(const Grid1D& grid, double x0, double eps) {
  const int m = grid.cells;
  const double h = grid.width();
  const int center = static_cast<int>(std::llround(x0 * m));
  const int halfw = static_cast<int>(std::llround(eps * m));
  if (halfw < 2)
    throw ProbeUnresolved("concentration_probe: eps spans fewer than two cells (eps = " +
                          std::to_string(eps) + ", cell width = " + std::to_string(h) + ")");
  if (center - halfw < 1 || center + halfw > m - 1)
    throw ProbeOutOfDomain("concentration_probe: support [x0 - eps, x0 + eps] leaves (0, 1)");

  // F is a tent with feet at nodes center +- halfw and apex height 1/eps,
  // so its L1 norm (the W^{-1,1} norm of f) is exactly one.
  const double eps_snapped = halfw * h;
  const double slope = 1.0 / (eps_snapped * eps_snapped);
  std::vector<double> values(static_cast<size_t>(m), 0.0);
  for (int k = center - halfw; k < center; ++k) values[static_cast<size_t>(k)] = slope;
  for (int k = center; k < center + halfw; ++k) values[static_cast<size_t>(k)] = -slope;
  return SourceFn(grid, std::move(values));
}

std::vector<SourceFn> cell_probe_suite(const Grid1D& grid, int refine) {
  if (refine < 8)
    throw InvalidInput("cell_probe_suite: refine must be >= 8 so tents sit strictly inside cells");
  const Grid1D fine(grid.cells * refine);
  std::vector<SourceFn> probes;
  probes.reserve(static_cast<size_t>(grid.cells));
  for (int k = 0; k < grid.cells; ++k) {
    const double x0 = grid.midpoint(k);
    probes.push_back(concentration_probe(fine, x0, 2.0 * fine.width()));
  }
  return probes;
}

double empirical_star_norm(const PiecewiseFn& m, std::span<const SourceFn> probes) {
  if (probes.empty()) throw DegenerateProbe("empirical_star_norm: empty probe set");
  const Grid1D& g = m.grid1();
  double best = 0.0;
  for (const SourceFn& f : probes) {
    if (f.grid.cells % g.cells != 0)
      throw GridMismatch("empirical_star_norm: probe grid does not refine the multiplier grid");
    const int factor = f.grid.cells / g.cells;
    const PiecewiseFn mf = (factor == 1) ? m : m.refined(factor);
    const double denom = wm11_norm(f);
    if (denom <= 1e-300)
      throw DegenerateProbe("empirical_star_norm: probe with zero W^{-1,1} norm");
    best = std::max(best, apply_Tm(mf, f).l1_norm() / denom);
  }
  return best;
}

std::string solution_to_csv(const Solution1D& v) {
  std::string out = "x,v,v_x\n";
  const Grid1D& g = v.grid;
  for (int k = 0; k < g.cells; ++k) {
    out += format_g17(g.node(k)) + "," + format_g17(v.node_values[static_cast<size_t>(k)]) +
           "," + format_g17(v.deriv_left[static_cast<size_t>(k)]) + "\n";
    out += format_g17(g.midpoint(k)) + "," + format_g17(v.value_mid(k)) + "," +
           format_g17(v.deriv_mid(k)) + "\n";
  }
  out += format_g17(1.0) + "," + format_g17(v.node_values[static_cast<size_t>(g.cells)]) + "," +
         format_g17(v.deriv_right[static_cast<size_t>(g.cells) - 1]) + "\n";
  return out;
}

}  // namespace rescoef
