#include <doctest.h>

#include <cmath>

#include "rescoef/errors.hpp"
#include "rescoef/minimax.hpp"
#include "rescoef/rng.hpp"
#include "rescoef/stability.hpp"

using namespace rescoef;

namespace {

PiecewiseFn random_blocks2d(SplitMix64& rng, int blocks, double lo, double hi) {
  std::vector<double> vals(static_cast<size_t>(blocks) * blocks);
  for (double& v : vals) v = rng.uniform(lo, hi);
  return PiecewiseFn(Grid2D(blocks, blocks), std::move(vals));
}

}  // namespace

TEST_CASE("1D hand-assembled stiffness") {
  const Mesh mesh = Mesh::interval(2);
  const auto op = assemble(PiecewiseFn::constant(Grid1D(1), 1.0), mesh);
  REQUIRE(op.stiffness().rows() == 1);
  CHECK(op.stiffness().coeff(0, 0) == doctest::Approx(4.0).epsilon(1e-15));
}

TEST_CASE("constant coefficients scale the Riesz stiffness") {
  for (int dim : {1, 2}) {
    const Mesh mesh = dim == 1 ? Mesh::interval(8) : Mesh::square(8);
    const auto sigma = dim == 1 ? PiecewiseFn::constant(Grid1D(2), 3.0)
                                : PiecewiseFn::constant(Grid2D(2, 2), 3.0);
    const auto op = assemble(sigma, mesh);
    const SparseMatrix diff = op.stiffness() - SparseMatrix(3.0 * op.riesz());
    CHECK(diff.coeffs().cwiseAbs().maxCoeff() <= 1e-13);

    // Unit coefficient: the stiffness IS the Riesz map.
    const auto unit = dim == 1 ? assemble(PiecewiseFn::constant(Grid1D(1), 1.0), mesh)
                               : assemble(PiecewiseFn::constant(Grid2D(1, 1), 1.0), mesh);
    const SparseMatrix zero = unit.stiffness() - unit.riesz();
    CHECK(zero.coeffs().cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("stiffness matrices are symmetric") {
  SplitMix64 rng(0x90);
  const Mesh mesh = Mesh::square(16);
  const auto sigma = random_blocks2d(rng, 4, 0.5, 2.0);
  const auto op = assemble(sigma, mesh);
  const SparseMatrix diff = op.stiffness() - SparseMatrix(op.stiffness().transpose());
  CHECK(diff.coeffs().cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("misaligned coefficient grids are rejected") {
  const Mesh mesh = Mesh::interval(8);
  CHECK_THROWS_AS(assemble(PiecewiseFn::constant(Grid1D(3), 1.0), mesh), AlignmentError);
  const Mesh mesh2 = Mesh::square(8);
  CHECK_THROWS_AS(assemble(PiecewiseFn::constant(Grid2D(3, 2), 1.0), mesh2), AlignmentError);
  CHECK_THROWS_AS(assemble(PiecewiseFn::constant(Grid1D(2), -1.0), Mesh::interval(4)),
                  NonPositiveCoefficient);
}

TEST_CASE("resolvent distance for constant pairs is exact on any mesh") {
  for (int dim : {1, 2}) {
    for (int res : {8, 16, 32}) {
      const Mesh mesh = dim == 1 ? Mesh::interval(res) : Mesh::square(res);
      auto constant = [&](double c) {
        return dim == 1 ? PiecewiseFn::constant(Grid1D(1), c)
                        : PiecewiseFn::constant(Grid2D(1, 1), c);
      };
      const auto op1 = assemble(constant(1.0), mesh);
      const auto op2 = assemble(constant(2.0), mesh);
      const auto op4 = assemble(constant(4.0), mesh);
      CHECK(std::fabs(riesz_opnorm(op1, op2) - 0.5) <= 1e-8);
      CHECK(std::fabs(riesz_opnorm(op1, op4) - 0.75) <= 1e-8);
      CHECK(riesz_opnorm(op1, op1) <= 1e-12);
    }
  }
}

TEST_CASE("two-sided bound for the constant pair") {
  const Mesh mesh = Mesh::square(8);
  const auto report = lipschitz_bound_check(PiecewiseFn::constant(Grid2D(1, 1), 1.0),
                                     PiecewiseFn::constant(Grid2D(1, 1), 2.0), mesh,
                                     Bounds{1.0, 2.0});
  CHECK(report.d_inf == 1.0);
  CHECK(report.d_riesz == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(report.lower_ok);   // 1 * 0.5 <= 1
  CHECK(report.upper_ok);   // 1 <= 4 * 0.5
  CHECK(report.pass);
}

TEST_CASE("identical coefficients give a vacuous pass") {
  const Mesh mesh = Mesh::interval(16);
  const auto sigma = PiecewiseFn(Grid1D(2), {1.0, 2.0});
  const auto report = lipschitz_bound_check(sigma, sigma, mesh, Bounds{1.0, 2.0});
  CHECK(report.d_inf == 0.0);
  CHECK(report.pass);
}

TEST_CASE("block pairs satisfy the two-sided bound with slack") {
  SplitMix64 rng(0x91);
  const Mesh mesh = Mesh::square(32);
  for (int trial = 0; trial < 3; ++trial) {
    const auto sigma = random_blocks2d(rng, 2, 1.0, 2.0);
    const auto sigma_tilde = random_blocks2d(rng, 2, 1.0, 2.0);
    const auto report = lipschitz_bound_check(sigma, sigma_tilde, mesh, Bounds{1.0, 2.0}, 1.1);
    CHECK(report.lower_ok);
    CHECK(report.upper_ok);
  }
}

TEST_CASE("operator difference factors through the resolvents") {
  SplitMix64 rng(0x92);
  const Mesh mesh = Mesh::square(16);
  for (int trial = 0; trial < 3; ++trial) {
    const auto sigma = random_blocks2d(rng, 2, 1.0, 2.0);
    const auto sigma_tilde = random_blocks2d(rng, 2, 1.0, 2.0);
    CHECK(operator_identity_residual(sigma, sigma_tilde, mesh, 20, rng.next()) <= 1e-10);
  }
  // Constants and identical pairs.
  CHECK(operator_identity_residual(PiecewiseFn::constant(Grid2D(1, 1), 1.0),
                                   PiecewiseFn::constant(Grid2D(1, 1), 2.0), mesh, 5,
                                   0x1) <= 1e-10);
  const auto same = PiecewiseFn::constant(Grid2D(1, 1), 1.5);
  CHECK(operator_identity_residual(same, same, mesh, 5, 0x2) <= 1e-10);
}

TEST_CASE("concentration probes localize the coefficient") {
  const Mesh mesh = Mesh::square(32);
  const double h = mesh.h();

  SUBCASE("constant coefficient is recovered exactly") {
    const auto op = assemble(PiecewiseFn::constant(Grid2D(1, 1), 1.7), mesh);
    const auto probe = cone_probe({0.5, 0.5}, 8 * h, mesh, op);
    const double energy = probe_energy(probe, op);
    CHECK(std::fabs(energy - 1.7) <= 0.02 * 1.7);
    CHECK(std::fabs(energy - 1.7) <= 1e-12);  // support inside one block
  }
  SUBCASE("a probe inside a block recovers the block value") {
    const PiecewiseFn sigma(Grid2D(2, 2), {1.0, 2.0, 0.5, 1.5});
    const auto op = assemble(sigma, mesh);
    const auto probe = cone_probe({0.25, 0.25}, 6 * h, mesh, op);
    CHECK(std::fabs(probe_energy(probe, op) - 1.0) <= 0.02);
    const auto probe2 = cone_probe({0.75, 0.25}, 6 * h, mesh, op);
    CHECK(std::fabs(probe_energy(probe2, op) - 2.0) <= 0.04);
  }
  SUBCASE("unit discrete norm after normalization") {
    const auto op = assemble(PiecewiseFn::constant(Grid2D(1, 1), 1.0), mesh);
    const auto probe = cone_probe({0.4, 0.6}, 5 * h, mesh, op);
    CHECK(std::fabs(probe.dot(op.apply_riesz(probe)) - 1.0) <= 1e-12);
  }
  SUBCASE("probe validation") {
    const auto op = assemble(PiecewiseFn::constant(Grid2D(1, 1), 1.0), mesh);
    CHECK_THROWS_AS(cone_probe({0.5, 0.5}, 3 * h, mesh, op), ProbeUnresolved);
    CHECK_THROWS_AS(cone_probe({0.05, 0.5}, 8 * h, mesh, op), ProbeOutOfDomain);
  }
  SUBCASE("energy deviation decreases as the probe shrinks into a block") {
    const PiecewiseFn sigma(Grid2D(2, 2), {1.0, 2.0, 1.0, 2.0});
    const Mesh fine = Mesh::square(64);
    const auto op = assemble(sigma, fine);
    const double hf = fine.h();
    // Center 0.1 left of the vertical interface at x = 0.5: a radius-0.2
    // ball straddles it, a radius-5h ball (plus its element ring) does not.
    const std::array<double, 2> x0{0.4, 0.5};
    const double big = std::fabs(probe_energy(cone_probe(x0, 0.2, fine, op), op) - 1.0);
    const double small = std::fabs(probe_energy(cone_probe(x0, 5 * hf, fine, op), op) - 1.0);
    CHECK(small <= big);
    CHECK(small <= 1e-12);
  }
}

TEST_CASE("1D probes work the same way") {
  const Mesh mesh = Mesh::interval(64);
  const auto op = assemble(PiecewiseFn(Grid1D(2), {1.0, 3.0}), mesh);
  const auto probe = cone_probe({0.75, 0.0}, 8 * mesh.h(), mesh, op);
  CHECK(std::fabs(probe_energy(probe, op) - 3.0) <= 0.06);
}

TEST_CASE("density resolvent basics") {
  const Mesh mesh = Mesh::square(12);
  const DensityOperator dop(mesh);
  const int n = mesh.interior_count();
  SplitMix64 rng(0x93);
  Vector f(n);
  for (int i = 0; i < n; ++i) f[i] = rng.uniform(-1.0, 1.0);

  const Vector ones = Vector::Ones(n);
  const Vector base = density_apply(dop, ones, f);

  SUBCASE("unit density matches the plain resolvent") {
    const Vector direct = dop.solve_riesz(dop.lumped_mass().cwiseProduct(f));
    CHECK((base - direct).norm() <= 1e-14 * std::max(1.0, direct.norm()));
  }
  SUBCASE("zero and scaled densities") {
    CHECK(density_apply(dop, Vector::Zero(n), f).norm() == 0.0);
    const Vector doubled = density_apply(dop, Vector(2.0 * ones), f);
    CHECK((doubled - 2.0 * base).norm() <= 1e-13 * std::max(1.0, base.norm()));
  }
  SUBCASE("factorization through the multiplication operator") {
    Vector rho(n);
    for (int i = 0; i < n; ++i) rho[i] = rng.uniform(0.5, 2.0);
    const Vector lhs = density_apply(dop, rho, f);
    const Vector rhs = density_apply(dop, ones, rho.cwiseProduct(f));
    CHECK((lhs - rhs).norm() <= 1e-12 * std::max(1.0, lhs.norm()));
  }
}

TEST_CASE("multiplication operator norm is the max nodal value") {
  Vector rho(3);
  rho << 1.0, -3.0, 2.0;
  CHECK(multiplier_norm(rho) == 3.0);
  CHECK(multiplier_norm(Vector::Zero(3)) == 0.0);
  CHECK(multiplier_norm(Vector::Constant(5, -2.5)) == 2.5);
}

TEST_CASE("density norm sandwich") {
  const Mesh mesh = Mesh::square(12);
  const DensityOperator dop(mesh);
  const int n = mesh.interior_count();

  SUBCASE("unit density has equality structure") {
    const auto report = density_sandwich_check(dop, Vector::Ones(n));
    CHECK(report.norm_r_rho == doctest::Approx(report.norm_r).epsilon(1e-9));
    CHECK(report.lower_ok);
    CHECK(report.upper_ok);
  }
  SUBCASE("constant densities scale the resolvent norm") {
    const auto report = density_sandwich_check(dop, Vector::Constant(n, 1.7));
    CHECK(report.norm_r_rho == doctest::Approx(1.7 * report.norm_r).epsilon(1e-9));
    CHECK(report.pass);
  }
  SUBCASE("random densities pass") {
    SplitMix64 rng(0x94);
    Vector rho(n);
    for (int i = 0; i < n; ++i) rho[i] = rng.uniform(0.5, 2.0);
    CHECK(density_sandwich_check(dop, rho).pass);
  }
}

TEST_CASE("density span surrogate brackets the operator distance") {
  // dist(R_rho~, span R_rho_i) in the lumped-L2 norm, evaluated at the
  // sup-norm-optimal coefficients, sits between ||A||^-1 and ||R|| times
  // the exact sup-norm span distance.
  const Mesh mesh = Mesh::square(10);
  const DensityOperator dop(mesh);
  const int n = mesh.interior_count();
  SplitMix64 rng(0x95);
  const int basis_size = 2;
  std::vector<Vector> basis;
  for (int b = 0; b < basis_size; ++b) {
    Vector rho(n);
    for (int i = 0; i < n; ++i) rho[i] = rng.uniform(0.5, 2.0);
    basis.push_back(rho);
  }
  Vector target(n);
  for (int i = 0; i < n; ++i) target[i] = rng.uniform(0.5, 2.0);

  MinimaxProblem p;
  p.rows = n;
  p.cols = basis_size;
  p.matrix.resize(static_cast<size_t>(n) * basis_size);
  for (int c = 0; c < basis_size; ++c)
    for (int r = 0; r < n; ++r)
      p.matrix[static_cast<size_t>(r) * basis_size + c] = basis[static_cast<size_t>(c)][r];
  p.rhs.assign(target.data(), target.data() + n);
  const auto sol = minimax_solve(p);

  Vector g = target;
  for (int c = 0; c < basis_size; ++c) g -= sol.coeffs[static_cast<size_t>(c)] * basis[static_cast<size_t>(c)];
  const double dist_eval = density_resolvent_norm(dop, g);
  const double norm_r = density_resolvent_norm(dop, Vector::Ones(n));
  const double norm_a = density_laplacian_norm(dop);
  CHECK(dist_eval <= norm_r * sol.deviation * (1.0 + 1e-8));
  CHECK(dist_eval >= sol.deviation / norm_a * (1.0 - 1e-8));
}

TEST_CASE("mesh rejects operators from different meshes") {
  const auto op1 = assemble(PiecewiseFn::constant(Grid1D(1), 1.0), Mesh::interval(8));
  const auto op2 = assemble(PiecewiseFn::constant(Grid1D(1), 1.0), Mesh::interval(16));
  CHECK_THROWS_AS(riesz_opnorm(op1, op2), GridMismatch);
}

TEST_CASE("the power-iteration cap is reported with the last estimate") {
  const Mesh mesh = Mesh::square(8);
  const auto op1 = assemble(PiecewiseFn::constant(Grid2D(1, 1), 1.0), mesh);
  const auto op2 = assemble(PiecewiseFn(Grid2D(2, 2), {1.0, 1.4, 1.8, 1.2}), mesh);
  PowerIterationOptions opts;
  opts.max_iterations = 1;
  try {
    riesz_opnorm(op1, op2, opts);
    FAIL("expected NoConvergence");
  } catch (const NoConvergence& e) {
    CHECK(e.last_estimate() >= 0.0);
  }
}
