#include "rescoef/stability.hpp"

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "rescoef/rng.hpp"

namespace rescoef {

namespace {

Vector seeded_vector(int n, std::uint64_t seed) {
  SplitMix64 rng(seed);
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.uniform(-1.0, 1.0);
  return v;
}

/// Power iteration for an operator self-adjoint in the given inner product;
/// returns the magnitude of the dominant eigenvalue. The Rayleigh quotient
/// of successive iterates is the convergence measure.
double power_iteration(int n, const std::function<Vector(const Vector&)>& apply,
                       const std::function<double(const Vector&, const Vector&)>& inner,
                       const PowerIterationOptions& opts, const char* what) {
  Vector x = seeded_vector(n, opts.seed);
  const double x0 = std::sqrt(inner(x, x));
  if (!(x0 > 0.0)) throw NumericalBreakdown(std::string(what) + ": degenerate start vector");
  x /= x0;
  double prev = 0.0;
  for (int it = 0; it < opts.max_iterations; ++it) {
    const Vector y = apply(x);
    const double rq = inner(x, y);
    const double ny = std::sqrt(std::max(0.0, inner(y, y)));
    if (ny < 1e-300) return 0.0;  // the operator annihilates the iterate
    x = y / ny;
    if (it > 0 && std::fabs(rq - prev) <= opts.tolerance * std::max(std::fabs(rq), 1e-30))
      return std::fabs(rq);
    prev = rq;
  }
  throw NoConvergence(std::string(what) + ": power iteration hit the cap of " +
                          std::to_string(opts.max_iterations) + " (last estimate " +
                          std::to_string(prev) + ")",
                      std::fabs(prev));
}

SparseMatrix assemble_stiffness(const PiecewiseFn* sigma, const Mesh& mesh) {
  int cells_x = 1, cells_y = 1;
  if (sigma) {
    if (mesh.dim() == 1) {
      cells_x = sigma->grid1().cells;
    } else {
      cells_x = sigma->grid2().cells_x;
      cells_y = sigma->grid2().cells_y;
    }
  }

  std::vector<Eigen::Triplet<double>> triplets;
  const int n_int = mesh.interior_count();
  if (mesh.dim() == 1) {
    const double h = mesh.h();
    for (int e = 0; e < mesh.element_count(); ++e) {
      const auto& el = mesh.element(e);
      const double coef = (sigma ? sigma->value(mesh.coefficient_cell(e, cells_x, 1)) : 1.0) / h;
      const int idx[2] = {mesh.interior_index(el[0]), mesh.interior_index(el[1])};
      const double local[2][2] = {{coef, -coef}, {-coef, coef}};
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          if (idx[a] >= 0 && idx[b] >= 0) triplets.emplace_back(idx[a], idx[b], local[a][b]);
    }
  } else {
    for (int e = 0; e < mesh.element_count(); ++e) {
      const auto& el = mesh.element(e);
      const double x[3] = {mesh.node_x(el[0]), mesh.node_x(el[1]), mesh.node_x(el[2])};
      const double y[3] = {mesh.node_y(el[0]), mesh.node_y(el[1]), mesh.node_y(el[2])};
      const double det = (x[1] - x[0]) * (y[2] - y[0]) - (x[2] - x[0]) * (y[1] - y[0]);
      const double area = 0.5 * std::fabs(det);
      const double coef =
          sigma ? sigma->value(mesh.coefficient_cell(e, cells_x, cells_y)) : 1.0;
      // P1 gradients via edge vectors: grad lambda_a = (b_a, c_a) / det.
      const double b[3] = {y[1] - y[2], y[2] - y[0], y[0] - y[1]};
      const double c[3] = {x[2] - x[1], x[0] - x[2], x[1] - x[0]};
      const int idx[3] = {mesh.interior_index(el[0]), mesh.interior_index(el[1]),
                          mesh.interior_index(el[2])};
      for (int a = 0; a < 3; ++a) {
        if (idx[a] < 0) continue;
        for (int bb = 0; bb < 3; ++bb) {
          if (idx[bb] < 0) continue;
          const double k = coef * (b[a] * b[bb] + c[a] * c[bb]) / (4.0 * area);
          triplets.emplace_back(idx[a], idx[bb], k);
        }
      }
    }
  }
  SparseMatrix m(n_int, n_int);
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  return m;
}

Vector lumped_mass_vector(const Mesh& mesh) {
  Vector mass = Vector::Zero(mesh.interior_count());
  if (mesh.dim() == 1) {
    const double h = mesh.h();
    for (int e = 0; e < mesh.element_count(); ++e) {
      const auto& el = mesh.element(e);
      for (int a = 0; a < 2; ++a) {
        const int idx = mesh.interior_index(el[a]);
        if (idx >= 0) mass[idx] += 0.5 * h;
      }
    }
  } else {
    for (int e = 0; e < mesh.element_count(); ++e) {
      const auto& el = mesh.element(e);
      const double x[3] = {mesh.node_x(el[0]), mesh.node_x(el[1]), mesh.node_x(el[2])};
      const double y[3] = {mesh.node_y(el[0]), mesh.node_y(el[1]), mesh.node_y(el[2])};
      const double area =
          0.5 * std::fabs((x[1] - x[0]) * (y[2] - y[0]) - (x[2] - x[0]) * (y[1] - y[0]));
      for (int a = 0; a < 3; ++a) {
        const int idx = mesh.interior_index(el[a]);
        if (idx >= 0) mass[idx] += area / 3.0;
      }
    }
  }
  return mass;
}

std::unique_ptr<Eigen::SimplicialLLT<SparseMatrix>> factor(const SparseMatrix& m,
                                                           const char* what) {
  auto llt = std::make_unique<Eigen::SimplicialLLT<SparseMatrix>>();
  llt->compute(m);
  if (llt->info() != Eigen::Success)
    throw NumericalBreakdown(std::string(what) + ": Cholesky factorization failed (matrix not SPD)");
  return llt;
}

}  // namespace

DiscreteOperator::DiscreteOperator(Mesh mesh, SparseMatrix stiffness, SparseMatrix riesz)
    : mesh_(mesh), stiffness_(std::move(stiffness)), riesz_(std::move(riesz)) {
  stiffness_llt_ = factor(stiffness_, "DiscreteOperator stiffness");
  riesz_llt_ = factor(riesz_, "DiscreteOperator riesz");
}

Vector DiscreteOperator::solve_stiffness(const Vector& rhs) const {
  return stiffness_llt_->solve(rhs);
}

Vector DiscreteOperator::solve_riesz(const Vector& rhs) const { return riesz_llt_->solve(rhs); }

DiscreteOperator assemble(const PiecewiseFn& sigma, const Mesh& mesh) {
  for (double v : sigma.values())
    if (v <= 0.0)
      throw NonPositiveCoefficient("assemble: diffusivity value " + std::to_string(v) +
                                   " is not positive");
  if (mesh.dim() == 1) {
    (void)sigma.grid1();
  } else {
    (void)sigma.grid2();
  }
  SparseMatrix stiffness = assemble_stiffness(&sigma, mesh);
  SparseMatrix riesz = assemble_stiffness(nullptr, mesh);
  return DiscreteOperator(mesh, std::move(stiffness), std::move(riesz));
}

double riesz_opnorm(const DiscreteOperator& op_a, const DiscreteOperator& op_b,
                    const PowerIterationOptions& opts) {
  if (!(op_a.mesh() == op_b.mesh()))
    throw GridMismatch("riesz_opnorm: operators live on different meshes");
  const SparseMatrix& k = op_a.riesz();
  auto apply = [&](const Vector& x) {
    const Vector kx = k * x;
    return Vector(op_a.solve_stiffness(kx) - op_b.solve_stiffness(kx));
  };
  auto inner = [&](const Vector& u, const Vector& v) { return u.dot(k * v); };
  return power_iteration(op_a.mesh().interior_count(), apply, inner, opts, "riesz_opnorm");
}

LipschitzBoundReport lipschitz_bound_check(const PiecewiseFn& sigma, const PiecewiseFn& sigma_tilde,
                              const Mesh& mesh, const Bounds& bounds, double upper_slack,
                              const PowerIterationOptions& opts) {
  if (!sigma.same_grid(sigma_tilde)) throw GridMismatch("lipschitz_bound_check: coefficient grids differ");
  LipschitzBoundReport report;
  report.sigma0 = bounds.lo;
  report.sigma1 = bounds.hi;
  report.upper_slack = upper_slack;
  report.d_inf = linf_norm(subtract(sigma, sigma_tilde));
  const DiscreteOperator op_a = assemble(sigma, mesh);
  const DiscreteOperator op_b = assemble(sigma_tilde, mesh);
  report.d_riesz = riesz_opnorm(op_a, op_b, opts);

  if (report.d_inf == 0.0) {
    // Identical coefficients: both sides vanish, vacuous pass.
    report.lower_ratio = 0.0;
    report.upper_ratio = 0.0;
    report.lower_ok = report.d_riesz <= report.lower_tolerance;
    report.upper_ok = true;
  } else {
    const double s0sq = bounds.lo * bounds.lo;
    const double s1sq = bounds.hi * bounds.hi;
    report.lower_ratio = s0sq * report.d_riesz / report.d_inf;
    report.upper_ratio = report.d_inf / (s1sq * report.d_riesz);
    report.lower_ok = s0sq * report.d_riesz <= report.d_inf * (1.0 + report.lower_tolerance);
    report.upper_ok = report.d_inf <= s1sq * report.d_riesz * upper_slack;
  }
  report.pass = report.lower_ok && report.upper_ok;
  return report;
}

double operator_identity_residual(const PiecewiseFn& sigma, const PiecewiseFn& sigma_tilde,
                                  const Mesh& mesh, int num_vectors, std::uint64_t seed) {
  const DiscreteOperator op_a = assemble(sigma, mesh);
  const DiscreteOperator op_b = assemble(sigma_tilde, mesh);
  const int n = mesh.interior_count();
  double worst = 0.0;
  SplitMix64 rng(seed);
  for (int v = 0; v < num_vectors; ++v) {
    Vector x(n);
    for (int i = 0; i < n; ++i) x[i] = rng.uniform(-1.0, 1.0);
    const Vector lhs = op_a.apply_stiffness(x) - op_b.apply_stiffness(x);
    const Vector abx = op_b.apply_stiffness(x);
    const Vector mid = op_b.solve_stiffness(abx) - op_a.solve_stiffness(abx);
    const Vector rhs = op_a.apply_stiffness(mid);
    const double denom = std::max(lhs.norm(), 1e-300);
    worst = std::max(worst, (lhs - rhs).norm() / denom);
    if (lhs.norm() == 0.0 && rhs.norm() == 0.0) worst = std::max(worst, 0.0);
  }
  return worst;
}

Vector cone_probe(const std::array<double, 2>& x0, double eps, const Mesh& mesh,
                     const DiscreteOperator& reference) {
  if (!(reference.mesh() == mesh)) throw GridMismatch("cone_probe: mesh mismatch");
  const double h = mesh.h();
  if (eps < 4.0 * h)
    throw ProbeUnresolved("cone_probe: eps = " + std::to_string(eps) +
                          " below 4h = " + std::to_string(4.0 * h));
  const int dims = mesh.dim();
  for (int d = 0; d < dims; ++d) {
    if (x0[static_cast<size_t>(d)] - eps <= 0.0 || x0[static_cast<size_t>(d)] + eps >= 1.0)
      throw ProbeOutOfDomain("cone_probe: ball of radius " + std::to_string(eps) +
                             " leaves the domain");
  }

  Vector v = Vector::Zero(mesh.interior_count());
  for (int node = 0; node < mesh.node_count(); ++node) {
    const int idx = mesh.interior_index(node);
    if (idx < 0) continue;
    const double dx = mesh.node_x(node) - x0[0];
    const double dy = dims == 2 ? mesh.node_y(node) - x0[1] : 0.0;
    const double r = std::sqrt(dx * dx + dy * dy);
    if (r < eps) v[idx] = eps - r;
  }
  const double q = v.dot(reference.apply_riesz(v));
  if (!(q > 0.0)) throw ProbeUnresolved("cone_probe: probe has empty discrete support");
  v /= std::sqrt(q);
  return v;
}

double probe_energy(const Vector& probe, const DiscreteOperator& op) {
  return probe.dot(op.apply_stiffness(probe));
}

DensityOperator::DensityOperator(const Mesh& mesh)
    : mesh_(mesh), riesz_(assemble_stiffness(nullptr, mesh)), lumped_mass_(lumped_mass_vector(mesh)) {
  for (int i = 0; i < lumped_mass_.size(); ++i)
    if (!(lumped_mass_[i] > 0.0))
      throw NumericalBreakdown("DensityOperator: non-positive lumped mass entry");
  riesz_llt_ = factor(riesz_, "DensityOperator riesz");
}

Vector DensityOperator::solve_riesz(const Vector& rhs) const { return riesz_llt_->solve(rhs); }

Vector density_apply(const DensityOperator& dop, const Vector& rho, const Vector& f) {
  if (rho.size() != f.size() || rho.size() != dop.lumped_mass().size())
    throw InvalidInput("density_apply: shape mismatch");
  const Vector weighted = dop.lumped_mass().cwiseProduct(rho.cwiseProduct(f));
  return dop.solve_riesz(weighted);
}

double multiplier_norm(const Vector& rho) {
  return rho.size() == 0 ? 0.0 : rho.cwiseAbs().maxCoeff();
}

double density_resolvent_norm(const DensityOperator& dop, const Vector& rho,
                              const PowerIterationOptions& opts) {
  const Vector& mass = dop.lumped_mass();
  // R_rho = K^-1 M diag(rho); power iteration on the M-self-adjoint R* R.
  auto apply = [&](const Vector& x) {
    const Vector rx = dop.solve_riesz(mass.cwiseProduct(rho.cwiseProduct(x)));
    return Vector(rho.cwiseProduct(dop.solve_riesz(mass.cwiseProduct(rx))));
  };
  auto inner = [&](const Vector& u, const Vector& v) { return u.dot(mass.cwiseProduct(v)); };
  const double lambda = power_iteration(static_cast<int>(mass.size()), apply, inner, opts,
                                        "density_resolvent_norm");
  return std::sqrt(lambda);
}

double density_laplacian_norm(const DensityOperator& dop, const PowerIterationOptions& opts) {
  const Vector& mass = dop.lumped_mass();
  auto apply = [&](const Vector& x) {
    return Vector((dop.riesz() * x).cwiseQuotient(mass));
  };
  auto inner = [&](const Vector& u, const Vector& v) { return u.dot(mass.cwiseProduct(v)); };
  return power_iteration(static_cast<int>(mass.size()), apply, inner, opts,
                         "density_laplacian_norm");
}

DensitySandwichReport density_sandwich_check(const DensityOperator& dop, const Vector& rho,
                                             const PowerIterationOptions& opts) {
  DensitySandwichReport report;
  const Vector ones = Vector::Ones(dop.lumped_mass().size());
  report.norm_r = density_resolvent_norm(dop, ones, opts);
  report.norm_a = density_laplacian_norm(dop, opts);
  report.norm_r_rho = density_resolvent_norm(dop, rho, opts);
  report.rho_inf = multiplier_norm(rho);
  const double tol = report.tolerance;
  report.lower_ok =
      report.norm_r_rho / report.norm_r <= report.rho_inf * (1.0 + tol) + tol;
  report.upper_ok = report.rho_inf <= report.norm_a * report.norm_r_rho * (1.0 + tol) + tol;
  report.pass = report.lower_ok && report.upper_ok;
  return report;
}

}  // namespace rescoef
