#pragma once

#include <array>
#include <cstdint>
#include <memory>

#include <Eigen/Sparse>

#include "rescoef/mesh.hpp"
#include "rescoef/piecewise.hpp"

namespace rescoef {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Vector = Eigen::VectorXd;

struct PowerIterationOptions {
  double tolerance = 1e-10;  // relative change of successive Rayleigh quotients
  int max_iterations = 10000;
  std::uint64_t seed = 0x5EEDULL;  // start vector generator
};

/// Galerkin operator of -div(sigma grad u) on the interior nodes of a mesh,
/// together with the sigma == 1 stiffness (the discrete Riesz map that
/// defines the H^-1 / H^1_0 norms). Factorizations are built once and
/// reused; the object is immutable afterwards.
class DiscreteOperator {
 public:
  DiscreteOperator(Mesh mesh, SparseMatrix stiffness, SparseMatrix riesz);

  const Mesh& mesh() const { return mesh_; }
  const SparseMatrix& stiffness() const { return stiffness_; }
  const SparseMatrix& riesz() const { return riesz_; }

  Vector apply_stiffness(const Vector& x) const { return stiffness_ * x; }
  Vector apply_riesz(const Vector& x) const { return riesz_ * x; }
  Vector solve_stiffness(const Vector& rhs) const;
  Vector solve_riesz(const Vector& rhs) const;

 private:
  Mesh mesh_;
  SparseMatrix stiffness_;
  SparseMatrix riesz_;
  std::unique_ptr<Eigen::SimplicialLLT<SparseMatrix>> stiffness_llt_;
  std::unique_ptr<Eigen::SimplicialLLT<SparseMatrix>> riesz_llt_;
};

/// Exact elementwise P1 assembly; sigma must be constant on every element,
/// i.e. the mesh must refine sigma's grid (AlignmentError otherwise).
DiscreteOperator assemble(const PiecewiseFn& sigma, const Mesh& mesh);

/// Discrete operator norm of R_sigma - R_sigma_tilde from H^-1 to H^1_0:
/// power iteration on (A_a^-1 - A_b^-1) K, which is self-adjoint in the
/// K-inner product, with Rayleigh-quotient convergence. Each iteration
/// applies the Riesz map once and solves two stiffness systems.
double riesz_opnorm(const DiscreteOperator& op_a, const DiscreteOperator& op_b,
                    const PowerIterationOptions& opts = {});

struct LipschitzBoundReport {
  double d_inf = 0.0;     // sup-norm coefficient distance (exact)
  double d_riesz = 0.0;   // discrete resolvent distance
  double sigma0 = 0.0;
  double sigma1 = 0.0;
  double lower_ratio = 0.0;  // sigma0^2 d_R / d_inf, must be <= 1
  double upper_ratio = 0.0;  // d_inf / (sigma1^2 d_R), must be <= slack
  double upper_slack = 1.1;
  double lower_tolerance = 1e-8;
  bool lower_ok = false;
  bool upper_ok = false;
  bool pass = false;
};

/// Two-sided Lipschitz check sigma0^2 d_R <= d_inf <= sigma1^2 d_R. The
/// lower direction holds discretely by the energy argument and is enforced
/// at tolerance 1e-8; the upper direction needs concentration functions the
/// mesh can resolve, so it carries a mesh-dependent slack (default 1.1).
LipschitzBoundReport lipschitz_bound_check(const PiecewiseFn& sigma, const PiecewiseFn& sigma_tilde,
                              const Mesh& mesh, const Bounds& bounds, double upper_slack = 1.1,
                              const PowerIterationOptions& opts = {});

/// Relative residual of (A_a - A_b) - A_a (A_b^-1 - A_a^-1) A_b applied to
/// seeded random vectors; the identity is exact algebra, so the residual
/// sits at solver tolerance.
double operator_identity_residual(const PiecewiseFn& sigma, const PiecewiseFn& sigma_tilde,
                                  const Mesh& mesh, int num_vectors, std::uint64_t seed);

/// Nodal interpolant of the radial cone of half-width eps at x0, normalized
/// to unit discrete H^1_0 norm. Its energy against A_sigma localizes sigma
/// near x0. Requires eps >= 4h and the ball inside the domain.
Vector cone_probe(const std::array<double, 2>& x0, double eps, const Mesh& mesh,
                     const DiscreteOperator& reference);

/// Energy of a normalized probe in the sigma-weighted form.
double probe_energy(const Vector& probe, const DiscreteOperator& op);

/// Laplacian resolvent with a lumped (diagonal) mass matrix; the lumping is
/// what makes the discrete multiplication-operator norm exactly max |rho|.
class DensityOperator {
 public:
  explicit DensityOperator(const Mesh& mesh);

  const Mesh& mesh() const { return mesh_; }
  const SparseMatrix& riesz() const { return riesz_; }
  const Vector& lumped_mass() const { return lumped_mass_; }
  Vector solve_riesz(const Vector& rhs) const;

 private:
  Mesh mesh_;
  SparseMatrix riesz_;
  Vector lumped_mass_;
  std::unique_ptr<Eigen::SimplicialLLT<SparseMatrix>> riesz_llt_;
};

/// Discrete R_rho f: riesz^-1 (lumped_mass . (rho . f)) on interior nodes;
/// equal by construction to R applied to the multiplied source.
Vector density_apply(const DensityOperator& dop, const Vector& rho, const Vector& f);

/// Exact multiplication-operator norm under lumped mass: max |rho_i|.
double multiplier_norm(const Vector& rho);

/// Lumped-L2 operator norm of R_rho via power iteration on R*R.
double density_resolvent_norm(const DensityOperator& dop, const Vector& rho,
                              const PowerIterationOptions& opts = {});

/// Lumped-L2 operator norm of the discrete Laplacian A = M^-1 K.
double density_laplacian_norm(const DensityOperator& dop,
                              const PowerIterationOptions& opts = {});

struct DensitySandwichReport {
  double norm_r = 0.0;      // ||R||
  double norm_a = 0.0;      // ||A||
  double norm_r_rho = 0.0;  // ||R_rho||
  double rho_inf = 0.0;     // max |rho|
  double tolerance = 1e-8;
  bool lower_ok = false;  // ||R||^-1 ||R_rho|| <= max|rho|
  bool upper_ok = false;  // max|rho| <= ||A|| ||R_rho||
  bool pass = false;
};

/// Checks ||R||^-1 ||R_rho|| <= max|rho| <= ||A|| ||R_rho||; both are exact
/// consequences of R_rho = R M_rho, which holds discretely by construction.
DensitySandwichReport density_sandwich_check(const DensityOperator& dop, const Vector& rho,
                                             const PowerIterationOptions& opts = {});

}  // namespace rescoef
