#pragma once

#include <string>
#include <vector>

#include "rescoef/family.hpp"
#include "rescoef/resolvent1d.hpp"

namespace rescoef {

struct GreedyConfig {
  /// Weakness constant in (0, 1]. On a finite training set the exact argmax
  /// is computable, so selection always uses it and gamma is recorded; see
  /// weak_scan for the heuristic early-exit mode.
  double gamma = 1.0;
  int max_snapshots = 1000000;
  double tolerance = 0.0;
  /// Heuristic benchmarking mode: stop each scan at the first candidate
  /// whose distance reaches gamma times the previous iteration's maximum.
  /// Selection quality then genuinely depends on gamma; the decay entries
  /// are still exact maxima over the full training set.
  bool weak_scan = false;
};

enum class StopReason { tolerance, max_iterations, exhausted };

const char* to_string(StopReason r);

struct GreedyResult {
  CoefficientKind kind = CoefficientKind::diffusivity;
  std::vector<int> snapshot_indices;
  std::vector<std::vector<double>> snapshot_params;
  /// Snapshot coefficient functions (sigma for diffusivity families, rho
  /// for density families), in selection order.
  std::vector<PiecewiseFn> basis;
  /// decay[k] = max over the training set of the surrogate distance to the
  /// span of the first k snapshots; decay[0] is the max snapshot norm.
  std::vector<double> decay;
  StopReason stop = StopReason::exhausted;
  double gamma = 1.0;
};

/// First snapshot: the training point of maximal surrogate norm (sup norm
/// of the multiplier 1/sigma for diffusivities, of rho for densities).
/// Ties break to the lowest training index.
int select_first(const ParametricFamily& family);

/// Source-independent weak greedy over the training set: at each step the
/// candidate distances to the current span are the exact minimax values,
/// the argmax (lowest index on ties) joins the snapshot set, and the max
/// distance is recorded. Stops on tolerance, snapshot budget, or training
/// set exhaustion. Already-selected points are skipped (their distance is
/// zero).
GreedyResult greedy_run(const ParametricFamily& family, const GreedyConfig& config);

struct OnlineResult {
  Solution1D approx;
  double surrogate_err = 0.0;
  std::vector<double> coeffs;
};

/// Online phase: approximates R_tau f by the combination of snapshot
/// resolvents whose reciprocal combination best approximates 1/tau in sup
/// norm. No new solve for tau is performed.
OnlineResult online_approximate(const GreedyResult& basis, const PiecewiseFn& tau,
                                const SourceFn& f);

/// JSON serialization of a greedy result (snapshot parameters, basis value
/// tables, decay curve) and the decay curve as CSV "n,max_surrogate_distance".
std::string greedy_result_to_json(const GreedyResult& result);
GreedyResult greedy_result_from_json(const std::string& text);
std::string decay_to_csv(const GreedyResult& result);

}  // namespace rescoef
