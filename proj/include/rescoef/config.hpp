#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rescoef/family.hpp"
#include "rescoef/greedy.hpp"
#include "rescoef/jsonio.hpp"
#include "rescoef/mesh.hpp"
#include "rescoef/piecewise.hpp"

namespace rescoef {

/// Flags shared by every subcommand; --out and --seed override the
/// corresponding config entries.
struct CliOverrides {
  std::optional<std::filesystem::path> out_dir;
  std::optional<std::uint64_t> seed;
};

/// Every parsed config carries the resolved seed and output directory plus
/// a canonical JSON form with defaults materialized; parse(serialize(parse))
/// is the identity on that form.
struct ConfigBase {
  std::uint64_t seed = 0;
  std::filesystem::path out_dir = "results";
  ordered_json canonical;
};

struct GreedyJob : ConfigBase {
  ParametricFamily family;
  GreedyConfig greedy;

  GreedyJob(ConfigBase base, ParametricFamily fam, GreedyConfig cfg)
      : ConfigBase(std::move(base)), family(std::move(fam)), greedy(cfg) {}
};

struct OnlineJob : ConfigBase {
  std::filesystem::path basis_path;
  std::vector<double> target_values;
  std::vector<double> source_values;
  // Single constants broadcast to the basis grid; explicit value lists must
  // match its cell count.
  bool target_is_constant = false;
  bool source_is_constant = false;
};

struct MinimaxJob : ConfigBase {
  std::vector<std::vector<double>> matrix;
  std::vector<double> rhs;
};

struct MeshSpec {
  int dimension = 2;
  int resolution = 16;
};

/// A coefficient either given explicitly or drawn per-pair from the seeded
/// generator (uniform block values within bounds).
struct CoefficientSpec {
  std::optional<double> constant;
  std::vector<int> cells;  // grid shape for explicit values
  std::vector<double> values;
};

struct VerifyJob : ConfigBase {
  std::string check;
  // theorem1 / operator-identity / density
  MeshSpec mesh;
  Bounds bounds{1.0, 2.0};
  int pair_count = 0;
  int blocks = 2;
  std::optional<CoefficientSpec> sigma;
  std::optional<CoefficientSpec> sigma_tilde;
  double upper_slack = 1.1;
  std::vector<int> refinement_resolutions;
  int vectors = 20;
  double tolerance = 1e-10;
  // norm-identity / surrogate (1D)
  int grid_cells = 64;
  int multiplier_count = 0;
  std::vector<double> multiplier_values;
  int probe_refine = 8;
  double threshold = 0.99;
  double slack = 1e-12;
  int density_count = 0;
};

GreedyJob parse_greedy_config(const std::string& text, CoefficientKind expected_kind,
                              const CliOverrides& overrides);
OnlineJob parse_online_config(const std::string& text, const CliOverrides& overrides);
MinimaxJob parse_minimax_config(const std::string& text,
                                const std::filesystem::path& config_dir,
                                const CliOverrides& overrides);
VerifyJob parse_verify_config(const std::string& text, const std::string& check,
                              const CliOverrides& overrides);

/// Canonical serialization of a parsed config (17-digit floats, defaults
/// materialized).
std::string serialize_config(const ConfigBase& config);

}  // namespace rescoef
