#include "rescoef/greedy.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "rescoef/errors.hpp"
#include "rescoef/io.hpp"
#include "rescoef/jsonio.hpp"
#include "rescoef/minimax.hpp"

namespace rescoef {

namespace {

/// Sup-norm distance of target to the span of basis vectors, all given as
/// raw cell-value tables.
double span_distance(const std::vector<std::vector<double>>& basis,
                     const std::vector<double>& target, std::vector<double>* coeffs) {
  MinimaxProblem p;
  p.rows = static_cast<int>(target.size());
  p.cols = static_cast<int>(basis.size());
  p.matrix.resize(static_cast<size_t>(p.rows) * p.cols);
  for (int c = 0; c < p.cols; ++c)
    for (int r = 0; r < p.rows; ++r)
      p.matrix[static_cast<size_t>(r) * p.cols + c] = basis[static_cast<size_t>(c)][static_cast<size_t>(r)];
  p.rhs = target;
  MinimaxSolution s = minimax_solve(p);
  if (coeffs) *coeffs = std::move(s.coeffs);
  return s.deviation;
}

std::vector<double> to_vector(const PiecewiseFn& f) {
  return std::vector<double>(f.values().begin(), f.values().end());
}

}  // namespace

const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::tolerance: return "tolerance";
    case StopReason::max_iterations: return "max-iterations";
    case StopReason::exhausted: return "exhausted";
  }
  return "unknown";
}

int select_first(const ParametricFamily& family) {
  if (family.size() == 0) throw EmptyFamily("select_first: empty family");
  int best = 0;
  double best_norm = -1.0;
  for (int i = 0; i < family.size(); ++i) {
    const double norm = linf_norm(family.surrogate_vector(i));
    if (norm > best_norm) {
      best_norm = norm;
      best = i;
    }
  }
  return best;
}

GreedyResult greedy_run(const ParametricFamily& family, const GreedyConfig& config) {
  if (family.size() == 0) throw EmptyFamily("greedy_run: empty family");
  if (!(config.gamma > 0.0 && config.gamma <= 1.0))
    throw InvalidInput("greedy_run: gamma must lie in (0, 1]");
  if (config.max_snapshots < 1) throw InvalidInput("greedy_run: max_snapshots must be >= 1");
  if (config.tolerance < 0.0) throw InvalidInput("greedy_run: tolerance must be >= 0");

  const int n = family.size();
  std::vector<std::vector<double>> surrogates;
  surrogates.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) surrogates.push_back(to_vector(family.surrogate_vector(i)));

  GreedyResult result;
  result.kind = family.kind();
  result.gamma = config.gamma;

  std::vector<bool> selected(static_cast<size_t>(n), false);
  std::vector<std::vector<double>> basis_vectors;

  // Step 0: norms. decay[0] is the max norm; the argmax is the first pick.
  int pick = 0;
  double max_norm = -1.0;
  for (int i = 0; i < n; ++i) {
    double norm = 0.0;
    for (double v : surrogates[static_cast<size_t>(i)]) norm = std::max(norm, std::fabs(v));
    if (norm > max_norm) {
      max_norm = norm;
      pick = i;
    }
  }
  result.decay.push_back(max_norm);
  if (max_norm <= config.tolerance) {
    result.stop = StopReason::tolerance;
    return result;
  }

  double previous_max = max_norm;
  while (true) {
    selected[static_cast<size_t>(pick)] = true;
    result.snapshot_indices.push_back(pick);
    result.snapshot_params.push_back(family.points()[static_cast<size_t>(pick)]);
    result.basis.push_back(family.coefficient(pick));
    basis_vectors.push_back(surrogates[static_cast<size_t>(pick)]);

    // Distances of every candidate to the current span. The scan is pure
    // per candidate; evaluation order does not affect the argmax.
    int next = -1;
    double max_dist = -1.0;
    bool scanned_all = true;
    for (int i = 0; i < n; ++i) {
      if (selected[static_cast<size_t>(i)]) continue;
      const double dist = span_distance(basis_vectors, surrogates[static_cast<size_t>(i)], nullptr);
      if (dist > max_dist) {
        max_dist = dist;
        next = i;
      }
      if (config.weak_scan && dist >= config.gamma * previous_max) {
        scanned_all = false;
        break;
      }
    }

    if (next < 0) {
      // Every training point selected: the span reproduces the whole set.
      result.decay.push_back(0.0);
      result.stop = StopReason::exhausted;
      return result;
    }

    if (scanned_all) {
      result.decay.push_back(max_dist);
    } else {
      // Weak mode stopped the scan early; record the exact maximum anyway
      // so the decay curve stays meaningful.
      double exact_max = 0.0;
      for (int i = 0; i < n; ++i) {
        if (selected[static_cast<size_t>(i)]) continue;
        exact_max = std::max(exact_max,
                             span_distance(basis_vectors, surrogates[static_cast<size_t>(i)], nullptr));
      }
      result.decay.push_back(exact_max);
      max_dist = result.decay.back();
    }

    if (result.decay.back() <= config.tolerance) {
      result.stop = StopReason::tolerance;
      return result;
    }
    if (static_cast<int>(result.snapshot_indices.size()) >= config.max_snapshots) {
      result.stop = StopReason::max_iterations;
      return result;
    }
    previous_max = max_dist;
    pick = next;
  }
}

OnlineResult online_approximate(const GreedyResult& basis, const PiecewiseFn& tau,
                                const SourceFn& f) {
  if (basis.kind != CoefficientKind::diffusivity)
    throw InvalidInput("online_approximate: requires a diffusivity basis");
  if (basis.basis.empty()) throw EmptyBasis("online_approximate: no snapshots");
  const Grid1D& g = tau.grid1();
  if (!(f.grid == g)) throw GridMismatch("online_approximate: source grid differs");
  for (const PiecewiseFn& s : basis.basis)
    if (!(s.grid1() == g)) throw GridMismatch("online_approximate: basis grid differs");

  SpanDistance sd = span_distance_star(tau, basis.basis);

  const int m = g.cells;
  Solution1D combo{g, std::vector<double>(static_cast<size_t>(m) + 1, 0.0),
                   std::vector<double>(static_cast<size_t>(m), 0.0),
                   std::vector<double>(static_cast<size_t>(m), 0.0)};
  for (size_t i = 0; i < basis.basis.size(); ++i) {
    const double a = sd.coeffs[i];
    if (a == 0.0) continue;
    const Solution1D v = apply_resolvent(basis.basis[i], f);
    for (size_t k = 0; k < combo.node_values.size(); ++k)
      combo.node_values[k] += a * v.node_values[k];
    for (size_t k = 0; k < combo.deriv_left.size(); ++k) {
      combo.deriv_left[k] += a * v.deriv_left[k];
      combo.deriv_right[k] += a * v.deriv_right[k];
    }
  }
  return OnlineResult{std::move(combo), sd.distance, std::move(sd.coeffs)};
}

std::string greedy_result_to_json(const GreedyResult& result) {
  ordered_json j;
  j["kind"] = result.kind == CoefficientKind::diffusivity ? "diffusivity" : "density";
  j["gamma"] = result.gamma;
  j["stop_reason"] = to_string(result.stop);
  j["snapshot_indices"] = result.snapshot_indices;
  ordered_json params = ordered_json::array();
  for (const auto& p : result.snapshot_params) params.push_back(p);
  j["snapshot_parameters"] = params;
  ordered_json basis = ordered_json::array();
  for (const PiecewiseFn& fn : result.basis) {
    ordered_json entry;
    if (fn.is_1d()) {
      entry["grid"] = {{"cells", fn.grid1().cells}};
    } else {
      entry["grid"] = {{"cells_x", fn.grid2().cells_x}, {"cells_y", fn.grid2().cells_y}};
    }
    entry["values"] = std::vector<double>(fn.values().begin(), fn.values().end());
    basis.push_back(entry);
  }
  j["basis"] = basis;
  j["decay"] = result.decay;
  return dump_json17(j);
}

GreedyResult greedy_result_from_json(const std::string& text) {
  ordered_json j = ordered_json::parse(text);
  GreedyResult r;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "diffusivity")
    r.kind = CoefficientKind::diffusivity;
  else if (kind == "density")
    r.kind = CoefficientKind::density;
  else
    throw IoError("greedy result: unknown kind '" + kind + "'");
  r.gamma = j.at("gamma").get<double>();
  const std::string stop = j.at("stop_reason").get<std::string>();
  if (stop == "tolerance")
    r.stop = StopReason::tolerance;
  else if (stop == "max-iterations")
    r.stop = StopReason::max_iterations;
  else if (stop == "exhausted")
    r.stop = StopReason::exhausted;
  else
    throw IoError("greedy result: unknown stop reason '" + stop + "'");
  r.snapshot_indices = j.at("snapshot_indices").get<std::vector<int>>();
  for (const auto& p : j.at("snapshot_parameters"))
    r.snapshot_params.push_back(p.get<std::vector<double>>());
  for (const auto& entry : j.at("basis")) {
    auto values = entry.at("values").get<std::vector<double>>();
    const auto& grid = entry.at("grid");
    if (grid.contains("cells"))
      r.basis.emplace_back(Grid1D(grid.at("cells").get<int>()), std::move(values));
    else
      r.basis.emplace_back(Grid2D(grid.at("cells_x").get<int>(), grid.at("cells_y").get<int>()),
                           std::move(values));
  }
  r.decay = j.at("decay").get<std::vector<double>>();
  return r;
}

std::string decay_to_csv(const GreedyResult& result) {
  std::string out = "n,max_surrogate_distance\n";
  for (size_t k = 0; k < result.decay.size(); ++k)
    out += std::to_string(k) + "," + format_g17(result.decay[k]) + "\n";
  return out;
}

}  // namespace rescoef
