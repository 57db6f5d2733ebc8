#include "rescoef/commands.hpp"

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "rescoef/errors.hpp"
#include "rescoef/io.hpp"
#include "rescoef/minimax.hpp"
#include "rescoef/resolvent1d.hpp"
#include "rescoef/rng.hpp"
#include "rescoef/stability.hpp"

namespace rescoef {

namespace {

void write_json(const std::filesystem::path& dir, const std::string& name,
                const ordered_json& j) {
  std::filesystem::create_directories(dir);
  write_text_atomic(dir / name, dump_json17(j));
}

void write_text(const std::filesystem::path& dir, const std::string& name,
                const std::string& text) {
  std::filesystem::create_directories(dir);
  write_text_atomic(dir / name, text);
}

std::string values_hash(std::span<const double> values) {
  return hash_hex(hash_values(values));
}

PiecewiseFn coefficient_from_spec(const CoefficientSpec& spec, const MeshSpec& mesh) {
  if (spec.constant) {
    if (mesh.dimension == 1) return PiecewiseFn::constant(Grid1D(1), *spec.constant);
    return PiecewiseFn::constant(Grid2D(1, 1), *spec.constant);
  }
  if (static_cast<int>(spec.cells.size()) != mesh.dimension)
    throw ConfigError("coefficient cells do not match the mesh dimension");
  if (mesh.dimension == 1) return PiecewiseFn(Grid1D(spec.cells[0]), spec.values);
  return PiecewiseFn(Grid2D(spec.cells[0], spec.cells[1]), spec.values);
}

PiecewiseFn random_blocks(const MeshSpec& mesh, int blocks, const Bounds& bounds,
                          SplitMix64& rng) {
  const int count = mesh.dimension == 1 ? blocks : blocks * blocks;
  std::vector<double> values(static_cast<size_t>(count));
  for (double& v : values) v = rng.uniform(bounds.lo, bounds.hi);
  if (mesh.dimension == 1) return PiecewiseFn(Grid1D(blocks), std::move(values));
  return PiecewiseFn(Grid2D(blocks, blocks), std::move(values));
}

Mesh make_mesh(const MeshSpec& spec) {
  return spec.dimension == 1 ? Mesh::interval(spec.resolution) : Mesh::square(spec.resolution);
}

ordered_json lipschitz_report_json(const LipschitzBoundReport& r, const PiecewiseFn& sigma,
                                  const PiecewiseFn& sigma_tilde) {
  ordered_json j;
  j["sigma_hash"] = values_hash(sigma.values());
  j["sigma_tilde_hash"] = values_hash(sigma_tilde.values());
  j["d_inf"] = r.d_inf;
  j["d_riesz"] = r.d_riesz;
  j["lower_ratio"] = r.lower_ratio;
  j["upper_ratio"] = r.upper_ratio;
  j["lower_ok"] = r.lower_ok;
  j["upper_ok"] = r.upper_ok;
  j["pass"] = r.pass;
  j["tolerances"] =
      ordered_json{{"lower", r.lower_tolerance}, {"upper_slack", r.upper_slack}};
  return j;
}

int run_verify_theorem1(const VerifyJob& job) {
  std::vector<std::pair<PiecewiseFn, PiecewiseFn>> pairs;
  if (job.sigma) {
    pairs.emplace_back(coefficient_from_spec(*job.sigma, job.mesh),
                       coefficient_from_spec(*job.sigma_tilde, job.mesh));
  } else {
    SplitMix64 rng(job.seed);
    for (int i = 0; i < job.pair_count; ++i) {
      PiecewiseFn a = random_blocks(job.mesh, job.blocks, job.bounds, rng);
      PiecewiseFn b = random_blocks(job.mesh, job.blocks, job.bounds, rng);
      pairs.emplace_back(std::move(a), std::move(b));
    }
  }

  const Mesh mesh = make_mesh(job.mesh);
  ordered_json out;
  out["check"] = "theorem1";
  out["seed"] = job.seed;
  ordered_json entries = ordered_json::array();
  bool pass = true;
  for (const auto& [sigma, sigma_tilde] : pairs) {
    const LipschitzBoundReport r =
        lipschitz_bound_check(sigma, sigma_tilde, mesh, job.bounds, job.upper_slack);
    pass = pass && r.pass;
    entries.push_back(lipschitz_report_json(r, sigma, sigma_tilde));
  }
  out["pairs"] = entries;

  if (!job.refinement_resolutions.empty()) {
    std::string csv = "h,d_R_h,deficit\n";
    for (const auto& [sigma, sigma_tilde] : pairs) {
      for (int res : job.refinement_resolutions) {
        const Mesh refined = job.mesh.dimension == 1 ? Mesh::interval(res) : Mesh::square(res);
        const LipschitzBoundReport r =
            lipschitz_bound_check(sigma, sigma_tilde, refined, job.bounds, job.upper_slack);
        csv += format_g17(1.0 / res) + "," + format_g17(r.d_riesz) + "," +
               format_g17(r.upper_ratio) + "\n";
      }
    }
    write_text(job.out_dir, "refinement.csv", csv);
  }

  out["pass"] = pass;
  write_json(job.out_dir, "verify_theorem1.json", out);
  return pass ? 0 : 1;
}

int run_verify_norm_identity(const VerifyJob& job) {
  const Grid1D grid(job.grid_cells);
  std::vector<PiecewiseFn> multipliers;
  if (!job.multiplier_values.empty()) {
    multipliers.emplace_back(grid, job.multiplier_values);
  } else {
    SplitMix64 rng(job.seed);
    for (int i = 0; i < job.multiplier_count; ++i) {
      std::vector<double> vals(static_cast<size_t>(grid.cells));
      for (double& v : vals) v = rng.uniform(job.bounds.lo, job.bounds.hi);
      multipliers.emplace_back(grid, std::move(vals));
    }
  }

  const std::vector<SourceFn> probes = cell_probe_suite(grid, job.probe_refine);
  ordered_json out;
  out["check"] = "norm-identity";
  out["seed"] = job.seed;
  out["threshold"] = job.threshold;
  ordered_json entries = ordered_json::array();
  bool pass = true;
  for (const PiecewiseFn& m : multipliers) {
    const double exact = tm_operator_norm(m);
    const double empirical = empirical_star_norm(m, probes);
    const double ratio = exact > 0.0 ? empirical / exact : 1.0;
    const bool ok = ratio >= job.threshold && ratio <= 1.0 + 1e-12;
    pass = pass && ok;
    entries.push_back(ordered_json{{"multiplier_hash", values_hash(m.values())},
                                   {"exact", exact},
                                   {"empirical", empirical},
                                   {"ratio", ratio},
                                   {"pass", ok}});
  }
  out["multipliers"] = entries;
  out["pass"] = pass;
  write_json(job.out_dir, "verify_norm-identity.json", out);
  return pass ? 0 : 1;
}

int run_verify_surrogate(const VerifyJob& job) {
  const Grid1D grid(job.grid_cells);
  SplitMix64 rng(job.seed);
  ordered_json out;
  out["check"] = "surrogate";
  out["seed"] = job.seed;
  out["slack"] = job.slack;
  ordered_json entries = ordered_json::array();
  bool pass = true;
  const double s0sq = job.bounds.lo * job.bounds.lo;
  const double s1sq = job.bounds.hi * job.bounds.hi;
  for (int i = 0; i < job.pair_count; ++i) {
    std::vector<double> a(static_cast<size_t>(grid.cells)), b(static_cast<size_t>(grid.cells));
    for (double& v : a) v = rng.uniform(job.bounds.lo, job.bounds.hi);
    for (double& v : b) v = rng.uniform(job.bounds.lo, job.bounds.hi);
    const PiecewiseFn sigma(grid, std::move(a));
    const PiecewiseFn sigma_tilde(grid, std::move(b));
    const double d_inf = linf_norm(subtract(sigma, sigma_tilde));
    const double dist = resolvent_distance_star(sigma, sigma_tilde);
    const bool ok = dist >= d_inf / s1sq - job.slack && dist <= d_inf / s0sq + job.slack;
    pass = pass && ok;
    entries.push_back(ordered_json{{"sigma_hash", values_hash(sigma.values())},
                                   {"sigma_tilde_hash", values_hash(sigma_tilde.values())},
                                   {"d_inf", d_inf},
                                   {"distance_star", dist},
                                   {"lower_bound", d_inf / s1sq},
                                   {"upper_bound", d_inf / s0sq},
                                   {"pass", ok}});
  }
  out["pairs"] = entries;
  out["pass"] = pass;
  write_json(job.out_dir, "verify_surrogate.json", out);
  return pass ? 0 : 1;
}

int run_verify_operator_identity(const VerifyJob& job) {
  std::vector<std::pair<PiecewiseFn, PiecewiseFn>> pairs;
  if (job.sigma) {
    pairs.emplace_back(coefficient_from_spec(*job.sigma, job.mesh),
                       coefficient_from_spec(*job.sigma_tilde, job.mesh));
  } else {
    SplitMix64 rng(job.seed);
    for (int i = 0; i < job.pair_count; ++i) {
      PiecewiseFn a = random_blocks(job.mesh, job.blocks, job.bounds, rng);
      PiecewiseFn b = random_blocks(job.mesh, job.blocks, job.bounds, rng);
      pairs.emplace_back(std::move(a), std::move(b));
    }
  }
  const Mesh mesh = make_mesh(job.mesh);
  ordered_json out;
  out["check"] = "operator-identity";
  out["seed"] = job.seed;
  out["tolerance"] = job.tolerance;
  ordered_json entries = ordered_json::array();
  bool pass = true;
  SplitMix64 vec_seed(job.seed ^ 0x9E3779B97F4A7C15ULL);
  for (const auto& [sigma, sigma_tilde] : pairs) {
    const double residual =
        operator_identity_residual(sigma, sigma_tilde, mesh, job.vectors, vec_seed.next());
    const bool ok = residual <= job.tolerance;
    pass = pass && ok;
    entries.push_back(ordered_json{{"sigma_hash", values_hash(sigma.values())},
                                   {"sigma_tilde_hash", values_hash(sigma_tilde.values())},
                                   {"residual", residual},
                                   {"pass", ok}});
  }
  out["pairs"] = entries;
  out["pass"] = pass;
  write_json(job.out_dir, "verify_operator-identity.json", out);
  return pass ? 0 : 1;
}

int run_verify_density(const VerifyJob& job) {
  const Mesh mesh = make_mesh(job.mesh);
  const DensityOperator dop(mesh);
  const int n = mesh.interior_count();
  SplitMix64 rng(job.seed);
  ordered_json out;
  out["check"] = "density";
  out["seed"] = job.seed;
  out["tolerance"] = job.tolerance;
  ordered_json entries = ordered_json::array();
  bool pass = true;
  for (int i = 0; i < job.density_count; ++i) {
    Vector rho(n);
    for (int k = 0; k < n; ++k) rho[k] = rng.uniform(job.bounds.lo, job.bounds.hi);

    // Factorization identity R_rho = R M_rho on random sources.
    double worst = 0.0;
    const Vector ones = Vector::Ones(n);
    for (int v = 0; v < job.vectors; ++v) {
      Vector f(n);
      for (int k = 0; k < n; ++k) f[k] = rng.uniform(-1.0, 1.0);
      const Vector lhs = density_apply(dop, rho, f);
      const Vector rhs = density_apply(dop, ones, rho.cwiseProduct(f));
      worst = std::max(worst, (lhs - rhs).norm() / std::max(lhs.norm(), 1e-300));
    }
    const bool factor_ok = worst <= 1e-12;

    const DensitySandwichReport sandwich = density_sandwich_check(dop, rho);
    const bool ok = factor_ok && sandwich.pass;
    pass = pass && ok;
    std::vector<double> rho_values(rho.data(), rho.data() + rho.size());
    entries.push_back(ordered_json{{"rho_hash", values_hash(rho_values)},
                                   {"factorization_residual", worst},
                                   {"multiplier_norm", sandwich.rho_inf},
                                   {"norm_r", sandwich.norm_r},
                                   {"norm_a", sandwich.norm_a},
                                   {"norm_r_rho", sandwich.norm_r_rho},
                                   {"sandwich_lower_ok", sandwich.lower_ok},
                                   {"sandwich_upper_ok", sandwich.upper_ok},
                                   {"pass", ok}});
  }
  out["densities"] = entries;
  out["pass"] = pass;
  write_json(job.out_dir, "verify_density.json", out);
  return pass ? 0 : 1;
}

}  // namespace

int run_greedy(const GreedyJob& job) {
  const GreedyResult result = greedy_run(job.family, job.greedy);
  write_text(job.out_dir, "greedy_result.json", greedy_result_to_json(result));
  write_text(job.out_dir, "decay.csv", decay_to_csv(result));
  return 0;
}

int run_online(const OnlineJob& job) {
  const GreedyResult basis = greedy_result_from_json(read_text_file(job.basis_path));
  if (basis.basis.empty()) throw EmptyBasis("online: basis file holds no snapshots");
  const Grid1D grid = basis.basis.front().grid1();

  auto expand = [&](const std::vector<double>& vals, bool is_constant, const char* what) {
    if (is_constant) return std::vector<double>(static_cast<size_t>(grid.cells), vals[0]);
    if (static_cast<int>(vals.size()) != grid.cells)
      throw ConfigError(std::string(what) + ": expected " + std::to_string(grid.cells) +
                        " values, got " + std::to_string(vals.size()));
    return vals;
  };
  const PiecewiseFn tau(grid, expand(job.target_values, job.target_is_constant, "target"));
  const SourceFn f(grid, expand(job.source_values, job.source_is_constant, "source"));

  const OnlineResult online = online_approximate(basis, tau, f);
  const Solution1D direct = apply_resolvent(tau, f);

  // Derivative error against the closed-form identity: the error derivative
  // must equal (sum_i a_i / sigma_i - 1/tau) * F cellwise.
  const std::vector<double> F = primitive_nodes(f);
  double max_err = 0.0, identity_residual = 0.0;
  for (int k = 0; k < grid.cells; ++k) {
    double coef = -1.0 / tau.value(k);
    for (size_t i = 0; i < basis.basis.size(); ++i)
      coef += online.coeffs[i] / basis.basis[i].value(k);
    const double measured_left =
        online.approx.deriv_left[static_cast<size_t>(k)] - direct.deriv_left[static_cast<size_t>(k)];
    const double measured_right = online.approx.deriv_right[static_cast<size_t>(k)] -
                                  direct.deriv_right[static_cast<size_t>(k)];
    const double predicted_left = -coef * F[static_cast<size_t>(k)];
    const double predicted_right = -coef * F[static_cast<size_t>(k) + 1];
    identity_residual = std::max(identity_residual, std::fabs(measured_left - predicted_left));
    identity_residual = std::max(identity_residual, std::fabs(measured_right - predicted_right));
    max_err = std::max(max_err, std::max(std::fabs(measured_left), std::fabs(measured_right)));
  }
  double max_f = 0.0;
  for (double v : F) max_f = std::max(max_f, std::fabs(v));
  const bool identity_ok = identity_residual <= 1e-10;
  const bool bound_ok = max_err <= online.surrogate_err * max_f + 1e-12;
  const bool pass = identity_ok && bound_ok;

  ordered_json report;
  report["basis_file"] = job.basis_path.string();
  report["target_hash"] = values_hash(tau.values());
  report["source_hash"] = values_hash(std::span<const double>(f.values));
  report["coefficients"] = online.coeffs;
  report["surrogate_error"] = online.surrogate_err;
  report["max_derivative_error"] = max_err;
  report["derivative_identity_residual"] = identity_residual;
  report["identity_ok"] = identity_ok;
  report["error_bound_ok"] = bound_ok;
  report["pass"] = pass;
  write_json(job.out_dir, "online_report.json", report);
  write_text(job.out_dir, "online_approx.csv", solution_to_csv(online.approx));
  write_text(job.out_dir, "online_direct.csv", solution_to_csv(direct));
  return pass ? 0 : 1;
}

int run_minimax(const MinimaxJob& job) {
  MinimaxProblem p;
  p.rows = static_cast<int>(job.matrix.size());
  p.cols = static_cast<int>(job.matrix.front().size());
  p.matrix.reserve(static_cast<size_t>(p.rows) * p.cols);
  for (const auto& row : job.matrix)
    p.matrix.insert(p.matrix.end(), row.begin(), row.end());
  p.rhs = job.rhs;

  const MinimaxSolution s = minimax_solve(p);
  ordered_json out;
  out["t"] = s.deviation;
  out["a"] = s.coeffs;
  out["active_rows"] = s.active_rows;
  write_json(job.out_dir, "minimax_result.json", out);
  return 0;
}

int run_verify(const VerifyJob& job) {
  if (job.check == "theorem1") return run_verify_theorem1(job);
  if (job.check == "norm-identity") return run_verify_norm_identity(job);
  if (job.check == "surrogate") return run_verify_surrogate(job);
  if (job.check == "operator-identity") return run_verify_operator_identity(job);
  if (job.check == "density") return run_verify_density(job);
  throw ConfigError("unknown verify check '" + job.check + "'");
}

}  // namespace rescoef
