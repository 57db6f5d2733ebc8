// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Tolerances are fixed here, not configurable.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <future>
#include <string>
#include <vector>

#include "rescoef/commands.hpp"
#include "rescoef/errors.hpp"
#include "rescoef/greedy.hpp"
#include "rescoef/io.hpp"
#include "rescoef/minimax.hpp"
#include "rescoef/resolvent1d.hpp"
#include "rescoef/rng.hpp"
#include "rescoef/stability.hpp"

namespace fs = std::filesystem;
using namespace rescoef;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(const std::chrono::steady_clock::time_point& start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

PiecewiseFn random_piecewise(SplitMix64& rng, const Grid1D& grid, double lo, double hi) {
  std::vector<double> vals(static_cast<size_t>(grid.cells));
  for (double& v : vals) v = rng.uniform(lo, hi);
  return PiecewiseFn(grid, std::move(vals));
}

// --- 1. Probe suite recovers the multiply-the-primitive operator norm ----

Outcome check_probe_norm_recovery() {
  const auto start = std::chrono::steady_clock::now();
  const Grid1D grid(64);
  const auto probes = cell_probe_suite(grid, 8);
  SplitMix64 rng(0x1001);
  double worst_ratio = 1.0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto m = random_piecewise(rng, grid, 0.5, 2.0);
    const double exact = tm_operator_norm(m);
    const double empirical = empirical_star_norm(m, probes);
    const double ratio = empirical / exact;
    if (ratio < worst_ratio) worst_ratio = ratio;
    if (ratio < 0.99 || ratio > 1.0 + 1e-12)
      return {false, "ratio " + format_g17(ratio) + " outside [0.99, 1]"};
  }
  const double elapsed = seconds_since(start);
  if (elapsed >= 5.0) return {false, "runtime " + format_g17(elapsed) + "s >= 5s"};
  return {true, "50 multipliers, worst empirical/exact ratio " + format_g17(worst_ratio) +
                    ", " + format_g17(elapsed) + "s"};
}

// --- 2. Reciprocal-distance sandwich ---------------------------------------

Outcome check_reciprocal_sandwich() {
  const Grid1D grid(64);
  const Bounds bounds{0.5, 2.0};
  SplitMix64 rng(0x1002);
  for (int trial = 0; trial < 100; ++trial) {
    const auto sigma = random_piecewise(rng, grid, bounds.lo, bounds.hi);
    const auto sigma_tilde = random_piecewise(rng, grid, bounds.lo, bounds.hi);
    const double d_inf = linf_norm(subtract(sigma, sigma_tilde));
    const double dist = resolvent_distance_star(sigma, sigma_tilde);
    if (dist < d_inf / (bounds.hi * bounds.hi) - 1e-12 ||
        dist > d_inf / (bounds.lo * bounds.lo) + 1e-12)
      return {false, "pair " + std::to_string(trial) + " breaks the sandwich"};
  }
  return {true, "100 coefficient pairs within slack 1e-12"};
}

// --- 3. Minimax solver vs exhaustive oracle --------------------------------

Outcome check_minimax_oracle() {
  const double box = 4.0;
  const double step = 1e-3;

  // The analytic instance first.
  {
    MinimaxProblem p;
    p.rows = 2;
    p.cols = 1;
    p.matrix = {1.0, 2.0};
    p.rhs = {1.0, 1.0};
    const auto s = minimax_solve(p);
    if (std::fabs(s.deviation - 1.0 / 3.0) > 1e-9 || std::fabs(s.coeffs[0] - 2.0 / 3.0) > 1e-9)
      return {false, "analytic instance t=1/3, a=2/3 not reproduced"};
  }

  // 200 seeded problems; column counts cycle over {1, 2, 3} with the
  // expensive 3-column exhaustive runs rationed. Optima must lie inside the
  // search box for the lattice comparison to be meaningful, so out-of-box
  // instances (near-dependent random columns) are redrawn.
  std::vector<MinimaxProblem> problems;
  SplitMix64 rng(0x1003);
  while (problems.size() < 200) {
    const size_t i = problems.size();
    int cols = (i % 16 == 15) ? 3 : static_cast<int>(1 + i % 2);
    const int max_rows = cols == 3 ? 8 : 32;
    MinimaxProblem p;
    p.rows = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(max_rows)));
    p.cols = cols;
    p.matrix.resize(static_cast<size_t>(p.rows) * cols);
    p.rhs.resize(static_cast<size_t>(p.rows));
    for (double& v : p.matrix) v = rng.uniform(-2.0, 2.0);
    for (double& v : p.rhs) v = rng.uniform(-2.0, 2.0);
    const auto probe = minimax_solve(p);
    double amax = 0.0;
    for (double a : probe.coeffs) amax = std::max(amax, std::fabs(a));
    if (amax > 3.0) continue;
    problems.push_back(std::move(p));
  }

  std::atomic<int> failures{0};
  std::atomic<size_t> cursor{0};
  auto worker = [&]() {
    while (true) {
      const size_t i = cursor.fetch_add(1);
      if (i >= problems.size()) return;
      const MinimaxProblem& p = problems[i];
      const double t_solve = minimax_solve(p).deviation;
      const double t_brute = minimax_brute_force(p, box, step).deviation;
      double row_sum = 0.0;
      for (int j = 0; j < p.rows; ++j) {
        double s = 0.0;
        for (int c = 0; c < p.cols; ++c) s += std::fabs(p.at(j, c));
        row_sum = std::max(row_sum, s);
      }
      if (std::fabs(t_solve - t_brute) > step * (1.0 + row_sum)) ++failures;
    }
  };
  auto f1 = std::async(std::launch::async, worker);
  auto f2 = std::async(std::launch::async, worker);
  f1.get();
  f2.get();
  if (failures > 0)
    return {false, std::to_string(failures.load()) + " of 200 problems disagree with the oracle"};
  return {true, "200 problems within step*(1 + max row sum), analytic instance exact"};
}

// --- 4. Greedy exact recovery ------------------------------------------------

ParametricFamily affine_reciprocal_family(int d, int training, int cells, std::uint64_t seed,
                                          CoefficientKind kind) {
  // Disjoint indicator modes over the left half of the interval, so that
  // {base, modes} spans a (d+1)-dimensional space.
  const Grid1D g(cells);
  std::vector<PiecewiseFn> modes;
  for (int j = 0; j < d; ++j) {
    std::vector<double> vals(static_cast<size_t>(cells), 0.0);
    for (int k = j * cells / (2 * d); k < (j + 1) * cells / (2 * d); ++k)
      vals[static_cast<size_t>(k)] = 1.0;
    modes.emplace_back(g, std::move(vals));
  }
  AffineGenerator gen{PiecewiseFn::constant(g, 1.0), std::move(modes),
                      std::vector<Bounds>(static_cast<size_t>(d), Bounds{0.0, 1.0})};
  SplitMix64 rng(seed);
  std::vector<std::vector<double>> points;
  for (int i = 0; i < training; ++i) {
    std::vector<double> mu(static_cast<size_t>(d));
    for (double& c : mu) c = rng.uniform(0.0, 1.0);
    points.push_back(std::move(mu));
  }
  const GeneratorSpace space =
      kind == CoefficientKind::diffusivity ? GeneratorSpace::reciprocal : GeneratorSpace::direct;
  return ParametricFamily(kind, space, std::move(gen), std::move(points), std::nullopt);
}

Outcome check_greedy_exact_recovery() {
  std::string detail;
  for (int d : {1, 2, 3, 5}) {
    const auto start = std::chrono::steady_clock::now();
    const auto fam = affine_reciprocal_family(d, 200, 128, 0x2000 + static_cast<std::uint64_t>(d),
                                              CoefficientKind::diffusivity);
    GreedyConfig cfg;
    cfg.gamma = 1.0;
    cfg.tolerance = 1e-10;
    const auto result = greedy_run(fam, cfg);
    const double elapsed = seconds_since(start);
    if (static_cast<int>(result.snapshot_indices.size()) > d + 1)
      return {false, "d=" + std::to_string(d) + " used " +
                         std::to_string(result.snapshot_indices.size()) + " snapshots"};
    if (result.decay.back() > 1e-10)
      return {false, "d=" + std::to_string(d) + " final decay " + format_g17(result.decay.back())};
    for (size_t k = 0; k + 1 < result.decay.size(); ++k) {
      if (result.decay[k + 1] > result.decay[k] + 1e-12 * (1.0 + result.decay[k]))
        return {false, "d=" + std::to_string(d) + " decay not monotone at step " +
                           std::to_string(k + 1)};
    }
    if (elapsed >= 30.0)
      return {false, "d=" + std::to_string(d) + " runtime " + format_g17(elapsed) + "s >= 30s"};
    detail += (detail.empty() ? "" : ", ") + std::to_string(result.snapshot_indices.size()) +
              " snapshots for d=" + std::to_string(d);
  }
  return {true, detail};
}

// --- 5. Hand-derived greedy trace ---------------------------------------------

Outcome check_greedy_trace() {
  const Grid1D g(2);
  AffineGenerator gen{PiecewiseFn::constant(g, 1.0),
                      {PiecewiseFn(g, {1.0, 0.0})},
                      {Bounds{0.0, 1.0}}};
  ParametricFamily fam(CoefficientKind::diffusivity, GeneratorSpace::reciprocal, std::move(gen),
                       {{0.0}, {0.5}, {1.0}}, std::nullopt);
  GreedyConfig cfg;
  cfg.gamma = 1.0;
  cfg.tolerance = 0.0;
  const auto result = greedy_run(fam, cfg);
  const bool snapshots_ok = result.snapshot_params.size() == 2 &&
                            result.snapshot_params[0] == std::vector<double>{1.0} &&
                            result.snapshot_params[1] == std::vector<double>{0.0};
  const bool decay_ok = result.decay.size() == 3 && std::fabs(result.decay[0] - 2.0) <= 1e-12 &&
                        std::fabs(result.decay[1] - 1.0 / 3.0) <= 1e-12 &&
                        std::fabs(result.decay[2]) <= 1e-12;
  if (!snapshots_ok || !decay_ok) return {false, "snapshot order or decay values differ"};
  return {true, "snapshots [mu=1, mu=0], decay [2, 1/3, 0]"};
}

// --- 6. Constant-pair resolvent distance on refined meshes --------------------

Outcome check_constant_pair_opnorm() {
  for (int dim : {1, 2}) {
    for (int res : {8, 16, 32}) {
      const Mesh mesh = dim == 1 ? Mesh::interval(res) : Mesh::square(res);
      auto constant = [&](double c) {
        return dim == 1 ? PiecewiseFn::constant(Grid1D(1), c)
                        : PiecewiseFn::constant(Grid2D(1, 1), c);
      };
      const auto op1 = assemble(constant(1.0), mesh);
      const auto op2 = assemble(constant(2.0), mesh);
      const double norm = riesz_opnorm(op1, op2);
      if (std::fabs(norm - 0.5) > 1e-8)
        return {false, std::to_string(dim) + "D h=1/" + std::to_string(res) + " gave " +
                           format_g17(norm)};
    }
  }
  return {true, "|R_1 - R_2| = 0.5 within 1e-8 on all six meshes"};
}

// --- 7. Block-coefficient two-sided bound with refinement ----------------------

Outcome check_block_pairs() {
  const auto start = std::chrono::steady_clock::now();
  const Bounds bounds{1.0, 2.0};
  SplitMix64 rng(0x3000);
  std::string detail;
  for (int pair = 0; pair < 5; ++pair) {
    std::vector<double> a(4), b(4);
    for (double& v : a) v = rng.uniform(bounds.lo, bounds.hi);
    for (double& v : b) v = rng.uniform(bounds.lo, bounds.hi);
    const PiecewiseFn sigma(Grid2D(2, 2), a);
    const PiecewiseFn sigma_tilde(Grid2D(2, 2), b);

    double previous_deficit = 0.0;
    for (int res : {16, 32, 64}) {
      const Mesh mesh = Mesh::square(res);
      const auto report = lipschitz_bound_check(sigma, sigma_tilde, mesh, bounds, 1.1);
      if (res == 64) {
        if (!report.lower_ok)
          return {false, "pair " + std::to_string(pair) + ": lower bound fails at h=1/64"};
        if (!report.upper_ok)
          return {false, "pair " + std::to_string(pair) + ": upper bound fails at h=1/64"};
      }
      // upper_ratio = d_inf / (sigma1^2 d_R^h): the deficit of the upper
      // direction, which must not grow under refinement.
      if (res > 16 && report.upper_ratio > previous_deficit + 1e-9)
        return {false, "pair " + std::to_string(pair) + ": deficit grew from h=1/" +
                           std::to_string(res / 2) + " to h=1/" + std::to_string(res)};
      previous_deficit = report.upper_ratio;
      if (res == 64 && pair == 0) detail = "deficit at h=1/64: " + format_g17(report.upper_ratio);
    }
  }
  const double elapsed = seconds_since(start);
  if (elapsed >= 60.0) return {false, "runtime " + format_g17(elapsed) + "s >= 60s"};
  return {true, "5 block pairs, " + detail + ", " + format_g17(elapsed) + "s"};
}

// --- 8. Operator difference identity -------------------------------------------

Outcome check_operator_identity() {
  const Mesh mesh = Mesh::square(32);
  SplitMix64 rng(0x4000);
  double worst = 0.0;
  for (int pair = 0; pair < 10; ++pair) {
    std::vector<double> a(4), b(4);
    for (double& v : a) v = rng.uniform(1.0, 2.0);
    for (double& v : b) v = rng.uniform(1.0, 2.0);
    const double residual =
        operator_identity_residual(PiecewiseFn(Grid2D(2, 2), a), PiecewiseFn(Grid2D(2, 2), b),
                                   mesh, 20, rng.next());
    worst = std::max(worst, residual);
    if (residual > 1e-10)
      return {false, "pair " + std::to_string(pair) + " residual " + format_g17(residual)};
  }
  return {true, "10 pairs, worst relative residual " + format_g17(worst)};
}

// --- 9. Density identities -------------------------------------------------------

Outcome check_density_identities() {
  const Mesh mesh = Mesh::square(16);
  const DensityOperator dop(mesh);
  const int n = mesh.interior_count();
  SplitMix64 rng(0x5000);

  const Vector ones = Vector::Ones(n);
  for (int trial = 0; trial < 20; ++trial) {
    Vector rho(n), f(n);
    for (int i = 0; i < n; ++i) rho[i] = rng.uniform(0.5, 2.0);
    for (int i = 0; i < n; ++i) f[i] = rng.uniform(-1.0, 1.0);
    const Vector lhs = density_apply(dop, rho, f);
    const Vector rhs = density_apply(dop, ones, rho.cwiseProduct(f));
    if ((lhs - rhs).norm() > 1e-12 * std::max(1.0, lhs.norm()))
      return {false, "R_rho != R M_rho at trial " + std::to_string(trial)};

    double max_abs = 0.0;
    for (int i = 0; i < n; ++i) max_abs = std::max(max_abs, std::fabs(rho[i]));
    if (multiplier_norm(rho) != max_abs) return {false, "multiplier norm not exact"};

    if (!density_sandwich_check(dop, rho).pass)
      return {false, "sandwich fails at trial " + std::to_string(trial)};
  }

  // Affine density family recovery.
  const int d = 3;
  const auto fam =
      affine_reciprocal_family(d, 100, 64, 0x5001, CoefficientKind::density);
  GreedyConfig cfg;
  cfg.tolerance = 1e-10;
  const auto result = greedy_run(fam, cfg);
  if (static_cast<int>(result.snapshot_indices.size()) > d + 1 || result.decay.back() > 1e-10)
    return {false, "density greedy recovery failed"};
  return {true, "20 densities pass, density greedy used " +
                    std::to_string(result.snapshot_indices.size()) + " snapshots"};
}

// --- 10. Online phase error identity ----------------------------------------------

Outcome check_online_identity() {
  const Grid1D grid(64);
  SplitMix64 rng(0x6000);
  GreedyResult basis;
  basis.kind = CoefficientKind::diffusivity;
  for (int i = 0; i < 3; ++i) {
    basis.basis.push_back(random_piecewise(rng, grid, 0.5, 2.0));
    basis.snapshot_indices.push_back(i);
    basis.snapshot_params.push_back({static_cast<double>(i)});
  }
  for (int trial = 0; trial < 20; ++trial) {
    const auto tau = random_piecewise(rng, grid, 0.5, 2.0);
    std::vector<double> fv(static_cast<size_t>(grid.cells));
    for (double& v : fv) v = rng.uniform(-2.0, 2.0);
    const SourceFn f(grid, fv);

    const auto online = online_approximate(basis, tau, f);
    const auto direct = apply_resolvent(tau, f);
    const auto F = primitive_nodes(f);
    double max_f = 0.0;
    for (double v : F) max_f = std::max(max_f, std::fabs(v));

    double max_err = 0.0;
    for (int k = 0; k < grid.cells; ++k) {
      double coef = -1.0 / tau.value(k);
      for (size_t i = 0; i < basis.basis.size(); ++i)
        coef += online.coeffs[i] / basis.basis[i].value(k);
      const double got_l = online.approx.deriv_left[static_cast<size_t>(k)] -
                           direct.deriv_left[static_cast<size_t>(k)];
      const double got_r = online.approx.deriv_right[static_cast<size_t>(k)] -
                           direct.deriv_right[static_cast<size_t>(k)];
      const double want_l = -coef * F[static_cast<size_t>(k)];
      const double want_r = -coef * F[static_cast<size_t>(k) + 1];
      if (std::fabs(got_l - want_l) > 1e-10 || std::fabs(got_r - want_r) > 1e-10)
        return {false, "derivative identity breaks at trial " + std::to_string(trial)};
      max_err = std::max(max_err, std::max(std::fabs(got_l), std::fabs(got_r)));
    }
    if (max_err > online.surrogate_err * max_f + 1e-12)
      return {false, "error bound surrogate_err * max|F| violated at trial " +
                         std::to_string(trial)};
  }
  return {true, "20 (tau, f) draws satisfy the identity and the error bound"};
}

// --- 11. CLI determinism ------------------------------------------------------------

Outcome check_cli_determinism() {
  const char* cli = std::getenv("RESCOEF_CLI");
  if (cli == nullptr) return {false, "RESCOEF_CLI not set"};

  const fs::path work = fs::temp_directory_path() / "rescoef_acceptance_cli";
  fs::remove_all(work);
  fs::create_directories(work);

  const std::string config = R"({
  "seed": 11,
  "output": {"dir": "unused"},
  "grid": {"cells": 32},
  "family": {
    "kind": "diffusivity",
    "generator": {
      "type": "affine-reciprocal",
      "base": {"constant": 1.0},
      "modes": [
        {"indicator": {"from": 0.0, "to": 0.5}, "scale": 1.0},
        {"indicator": {"from": 0.5, "to": 1.0}, "scale": 0.5}
      ]
    },
    "parameters": {"random": {"count": 40, "lo": [0.0, 0.0], "hi": [1.0, 1.0]}}
  },
  "greedy": {"gamma": 1.0, "max_snapshots": 10, "tolerance": 1e-10}
})";
  write_text_atomic(work / "greedy.json", config);

  auto run = [&](const std::string& args) {
    const std::string cmd = std::string(cli) + " " + args + " >/dev/null 2>&1";
    return std::system(cmd.c_str());
  };
  const std::string cfg_path = (work / "greedy.json").string();
  if (run("greedy --config " + cfg_path + " --out " + (work / "run1").string()) != 0)
    return {false, "greedy run 1 failed"};
  if (run("greedy --config " + cfg_path + " --out " + (work / "run2").string()) != 0)
    return {false, "greedy run 2 failed"};

  const std::string verify_cfg = std::string(R"({
  "seed": 3,
  "output": {"dir": "unused"},
  "grid": {"cells": 24},
  "bounds": {"lo": 0.5, "hi": 2.0},
  "pairs": {"count": 10}
})");
  write_text_atomic(work / "surrogate.json", verify_cfg);
  const std::string vcfg = (work / "surrogate.json").string();
  if (run("verify surrogate --config " + vcfg + " --out " + (work / "run1").string()) != 0)
    return {false, "verify run 1 failed"};
  if (run("verify surrogate --config " + vcfg + " --out " + (work / "run2").string()) != 0)
    return {false, "verify run 2 failed"};

  int compared = 0;
  for (const auto& entry : fs::directory_iterator(work / "run1")) {
    const fs::path other = work / "run2" / entry.path().filename();
    if (!fs::exists(other)) return {false, "missing " + other.string()};
    if (read_text_file(entry.path()) != read_text_file(other))
      return {false, entry.path().filename().string() + " differs between runs"};
    ++compared;
  }
  if (compared == 0) return {false, "no result files produced"};
  return {true, std::to_string(compared) + " result files byte-identical across reruns"};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"probe suite recovers the operator norm", check_probe_norm_recovery},
      {"reciprocal distance sandwich", check_reciprocal_sandwich},
      {"minimax solver matches the exhaustive oracle", check_minimax_oracle},
      {"greedy exact recovery on affine families", check_greedy_exact_recovery},
      {"hand-derived greedy trace", check_greedy_trace},
      {"constant-pair resolvent distance on meshes", check_constant_pair_opnorm},
      {"block-pair two-sided Lipschitz bound", check_block_pairs},
      {"operator difference factorization identity", check_operator_identity},
      {"density resolvent identities", check_density_identities},
      {"online derivative error identity", check_online_identity},
      {"CLI determinism", check_cli_determinism},
  };

  int failures = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    Outcome outcome;
    try {
      outcome = criteria[i].run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] %2zu. %s — %s\n", outcome.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].name, outcome.detail.c_str());
    std::fflush(stdout);
    if (!outcome.pass) ++failures;
  }
  if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
