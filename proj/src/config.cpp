#include "rescoef/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include "rescoef/errors.hpp"
#include "rescoef/io.hpp"
#include "rescoef/rng.hpp"

namespace rescoef {

namespace {

ordered_json parse_json(const std::string& text) {
  try {
    return ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
}

std::string join_path(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

/// Unknown keys are rejected with the offending key path.
void check_keys(const ordered_json& obj, const std::string& path,
                const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw ConfigError(path + ": expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key()))
      throw ConfigError("unknown config key '" + join_path(path, it.key()) + "'");
  }
}

const ordered_json& require(const ordered_json& obj, const std::string& path,
                            const std::string& key) {
  if (!obj.contains(key)) throw ConfigError("missing config key '" + join_path(path, key) + "'");
  return obj.at(key);
}

double get_number(const ordered_json& obj, const std::string& path, const std::string& key,
                  double lo, double hi, std::optional<double> fallback = std::nullopt) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    throw ConfigError("missing config key '" + join_path(path, key) + "'");
  }
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ConfigError("'" + join_path(path, key) + "' must be a number");
  const double x = v.get<double>();
  if (!(x >= lo && x <= hi))
    throw ConfigError("'" + join_path(path, key) + "' = " + format_g17(x) + " outside [" +
                      format_g17(lo) + ", " + format_g17(hi) + "]");
  return x;
}

int get_int(const ordered_json& obj, const std::string& path, const std::string& key, long lo,
            long hi, std::optional<long> fallback = std::nullopt) {
  if (!obj.contains(key)) {
    if (fallback) return static_cast<int>(*fallback);
    throw ConfigError("missing config key '" + join_path(path, key) + "'");
  }
  const auto& v = obj.at(key);
  if (!v.is_number_integer() && !v.is_number_unsigned())
    throw ConfigError("'" + join_path(path, key) + "' must be an integer");
  const long x = v.get<long>();
  if (x < lo || x > hi)
    throw ConfigError("'" + join_path(path, key) + "' = " + std::to_string(x) + " outside [" +
                      std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return static_cast<int>(x);
}

bool get_bool(const ordered_json& obj, const std::string& path, const std::string& key,
              bool fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_boolean()) throw ConfigError("'" + join_path(path, key) + "' must be a boolean");
  return v.get<bool>();
}

std::string get_string(const ordered_json& obj, const std::string& path, const std::string& key) {
  const auto& v = require(obj, path, key);
  if (!v.is_string()) throw ConfigError("'" + join_path(path, key) + "' must be a string");
  return v.get<std::string>();
}

std::vector<double> get_double_array(const ordered_json& v, const std::string& path) {
  if (!v.is_array()) throw ConfigError("'" + path + "' must be an array of numbers");
  std::vector<double> out;
  for (const auto& item : v) {
    if (!item.is_number()) throw ConfigError("'" + path + "' must contain only numbers");
    const double x = item.get<double>();
    if (!std::isfinite(x)) throw ConfigError("'" + path + "' contains a non-finite number");
    out.push_back(x);
  }
  return out;
}

ConfigBase parse_base(const ordered_json& j, const CliOverrides& overrides) {
  ConfigBase base;
  if (overrides.seed) {
    base.seed = *overrides.seed;
  } else if (j.contains("seed")) {
    const auto& v = j.at("seed");
    if (!v.is_number_integer() && !v.is_number_unsigned())
      throw ConfigError("'seed' must be an integer");
    base.seed = v.get<std::uint64_t>();
  }
  if (overrides.out_dir) {
    base.out_dir = *overrides.out_dir;
  } else if (j.contains("output")) {
    check_keys(j.at("output"), "output", {"dir"});
    base.out_dir = get_string(j.at("output"), "output", "dir");
  }
  return base;
}

void canonical_base(ConfigBase& base) {
  base.canonical["seed"] = base.seed;
  base.canonical["output"] = ordered_json{{"dir", base.out_dir.string()}};
}

/// Cell values on a 1D grid: {"constant": c} or {"values": [...]}.
std::vector<double> parse_cell_values(const ordered_json& spec, const std::string& path,
                                      int cells) {
  check_keys(spec, path, {"constant", "values"});
  if (spec.contains("constant") == spec.contains("values"))
    throw ConfigError("'" + path + "' needs exactly one of 'constant' or 'values'");
  if (spec.contains("constant")) {
    const double c = get_number(spec, path, "constant", -1e300, 1e300);
    return std::vector<double>(static_cast<size_t>(cells), c);
  }
  std::vector<double> vals = get_double_array(spec.at("values"), join_path(path, "values"));
  if (static_cast<int>(vals.size()) != cells)
    throw ConfigError("'" + join_path(path, "values") + "' must have " + std::to_string(cells) +
                      " entries, got " + std::to_string(vals.size()));
  return vals;
}

ordered_json cell_values_canonical(const std::vector<double>& values) {
  return ordered_json{{"values", values}};
}

/// A mode: explicit values, or an indicator of [from, to) scaled by
/// `scale` (a cell belongs to the indicator when its midpoint does).
std::vector<double> parse_mode(const ordered_json& spec, const std::string& path,
                               const Grid1D& grid) {
  if (spec.contains("indicator")) {
    check_keys(spec, path, {"indicator", "scale"});
    const auto& ind = spec.at("indicator");
    check_keys(ind, join_path(path, "indicator"), {"from", "to"});
    const double from = get_number(ind, join_path(path, "indicator"), "from", 0.0, 1.0);
    const double to = get_number(ind, join_path(path, "indicator"), "to", 0.0, 1.0);
    if (!(from < to)) throw ConfigError("'" + path + "': indicator needs from < to");
    const double scale = get_number(spec, path, "scale", -1e300, 1e300, 1.0);
    std::vector<double> vals(static_cast<size_t>(grid.cells), 0.0);
    for (int k = 0; k < grid.cells; ++k) {
      const double mid = grid.midpoint(k);
      if (mid >= from && mid < to) vals[static_cast<size_t>(k)] = scale;
    }
    return vals;
  }
  check_keys(spec, path, {"values"});
  std::vector<double> vals = get_double_array(require(spec, path, "values"),
                                              join_path(path, "values"));
  if (static_cast<int>(vals.size()) != grid.cells)
    throw ConfigError("'" + join_path(path, "values") + "' must have " +
                      std::to_string(grid.cells) + " entries");
  return vals;
}

std::vector<std::vector<double>> tensor_points(const std::vector<double>& lo,
                                               const std::vector<double>& hi,
                                               const std::vector<int>& count) {
  std::vector<std::vector<double>> points;
  const int d = static_cast<int>(lo.size());
  std::vector<int> idx(static_cast<size_t>(d), 0);
  while (true) {
    std::vector<double> p(static_cast<size_t>(d));
    for (int j = 0; j < d; ++j) {
      const int c = count[static_cast<size_t>(j)];
      p[static_cast<size_t>(j)] =
          c == 1 ? lo[static_cast<size_t>(j)]
                 : lo[static_cast<size_t>(j)] + (hi[static_cast<size_t>(j)] -
                                                 lo[static_cast<size_t>(j)]) *
                                                    idx[static_cast<size_t>(j)] / (c - 1);
    }
    points.push_back(std::move(p));
    int axis = d - 1;
    while (axis >= 0) {
      if (++idx[static_cast<size_t>(axis)] < count[static_cast<size_t>(axis)]) break;
      idx[static_cast<size_t>(axis)] = 0;
      --axis;
    }
    if (axis < 0) break;
  }
  return points;
}

std::vector<std::vector<double>> random_points(int count, const std::vector<double>& lo,
                                               const std::vector<double>& hi,
                                               std::uint64_t seed) {
  SplitMix64 rng(seed);
  const int d = static_cast<int>(lo.size());
  std::set<std::vector<double>> seen;
  std::vector<std::vector<double>> points;
  while (static_cast<int>(points.size()) < count) {
    std::vector<double> p(static_cast<size_t>(d));
    for (int j = 0; j < d; ++j)
      p[static_cast<size_t>(j)] = rng.uniform(lo[static_cast<size_t>(j)], hi[static_cast<size_t>(j)]);
    if (seen.insert(p).second) points.push_back(std::move(p));
  }
  return points;
}

struct ParsedParameters {
  std::vector<std::vector<double>> points;
  ordered_json canonical;
  std::vector<Bounds> box;  // declared domain for affine generators
};

ParsedParameters parse_parameters(const ordered_json& spec, const std::string& path,
                                  std::uint64_t seed) {
  check_keys(spec, path, {"points", "grid", "random"});
  const int given = (spec.contains("points") ? 1 : 0) + (spec.contains("grid") ? 1 : 0) +
                    (spec.contains("random") ? 1 : 0);
  if (given != 1)
    throw ConfigError("'" + path + "' needs exactly one of 'points', 'grid', 'random'");

  ParsedParameters out;
  if (spec.contains("points")) {
    const auto& arr = spec.at("points");
    if (!arr.is_array() || arr.empty())
      throw ConfigError("'" + join_path(path, "points") + "' must be a nonempty array");
    for (const auto& item : arr)
      out.points.push_back(get_double_array(item, join_path(path, "points")));
  } else if (spec.contains("grid")) {
    const auto& g = spec.at("grid");
    check_keys(g, join_path(path, "grid"), {"lo", "hi", "count"});
    const auto lo = get_double_array(require(g, path, "lo"), join_path(path, "grid.lo"));
    const auto hi = get_double_array(require(g, path, "hi"), join_path(path, "grid.hi"));
    const auto& cj = require(g, path, "count");
    if (!cj.is_array()) throw ConfigError("'" + join_path(path, "grid.count") + "' must be an array");
    std::vector<int> count;
    for (const auto& item : cj) {
      if (!item.is_number_integer() && !item.is_number_unsigned())
        throw ConfigError("'" + join_path(path, "grid.count") + "' must contain integers");
      const long c = item.get<long>();
      if (c < 1 || c > 100000)
        throw ConfigError("'" + join_path(path, "grid.count") + "' entries must be in [1, 100000]");
      count.push_back(static_cast<int>(c));
    }
    if (lo.size() != hi.size() || lo.size() != count.size() || lo.empty())
      throw ConfigError("'" + join_path(path, "grid") + "': lo, hi, count need equal nonzero sizes");
    for (size_t j = 0; j < lo.size(); ++j)
      if (!(lo[j] <= hi[j]))
        throw ConfigError("'" + join_path(path, "grid") + "': lo must not exceed hi");
    out.points = tensor_points(lo, hi, count);
  } else {
    const auto& r = spec.at("random");
    check_keys(r, join_path(path, "random"), {"count", "lo", "hi"});
    const int count = get_int(r, join_path(path, "random"), "count", 1, 1000000);
    const auto lo = get_double_array(require(r, path, "lo"), join_path(path, "random.lo"));
    const auto hi = get_double_array(require(r, path, "hi"), join_path(path, "random.hi"));
    if (lo.size() != hi.size() || lo.empty())
      throw ConfigError("'" + join_path(path, "random") + "': lo and hi need equal nonzero sizes");
    out.points = random_points(count, lo, hi, seed);
  }

  // Declared affine domain: the bounding box of the training set.
  const size_t d = out.points.front().size();
  out.box.assign(d, Bounds{0.0, 0.0});
  for (size_t j = 0; j < d; ++j) {
    double lo = out.points.front()[j], hi = lo;
    for (const auto& p : out.points) {
      if (p.size() != d) throw ConfigError("'" + path + "': ragged parameter points");
      lo = std::min(lo, p[j]);
      hi = std::max(hi, p[j]);
    }
    out.box[j] = Bounds{lo, hi};
  }

  ordered_json pts = ordered_json::array();
  for (const auto& p : out.points) pts.push_back(p);
  out.canonical = ordered_json{{"points", pts}};
  return out;
}

struct ParsedFamily {
  ParametricFamily family;
  ordered_json canonical;
};

ParsedFamily parse_family(const ordered_json& spec, const std::string& path,
                          CoefficientKind expected_kind, int default_cells,
                          std::uint64_t seed) {
  check_keys(spec, path, {"kind", "generator", "bounds", "parameters"});
  const std::string kind_str = get_string(spec, path, "kind");
  CoefficientKind kind;
  if (kind_str == "diffusivity")
    kind = CoefficientKind::diffusivity;
  else if (kind_str == "density")
    kind = CoefficientKind::density;
  else
    throw ConfigError("'" + join_path(path, "kind") + "' must be 'diffusivity' or 'density'");
  if (kind != expected_kind)
    throw ConfigError("'" + join_path(path, "kind") + "' = '" + kind_str +
                      "' does not match the subcommand");

  std::optional<Bounds> bounds;
  if (spec.contains("bounds")) {
    const auto& b = spec.at("bounds");
    check_keys(b, join_path(path, "bounds"), {"lo", "hi"});
    bounds = Bounds{get_number(b, join_path(path, "bounds"), "lo", -1e300, 1e300),
                    get_number(b, join_path(path, "bounds"), "hi", -1e300, 1e300)};
    if (!(bounds->lo <= bounds->hi))
      throw ConfigError("'" + join_path(path, "bounds") + "': lo must not exceed hi");
  }

  const auto& gen = require(spec, path, "generator");
  const std::string gen_path = join_path(path, "generator");
  const std::string type = get_string(gen, gen_path, "type");

  ordered_json canonical;
  canonical["kind"] = kind_str;

  if (type == "file") {
    // The CSV rows define the training set; a parameters section would be
    // ignored, so it is rejected.
    if (spec.contains("parameters"))
      throw ConfigError("'" + join_path(path, "parameters") +
                        "' is not allowed for file generators (the CSV defines the points)");
    check_keys(gen, gen_path, {"type", "file"});
    const std::string file = get_string(gen, gen_path, "file");
    if (!std::filesystem::exists(file))
      throw ConfigError("'" + join_path(gen_path, "file") + "': no such file: " + file);
    ParametricFamily fam =
        load_family_csv(file, kind, Grid1D(default_cells), bounds);
    canonical["generator"] = ordered_json{{"type", "file"}, {"file", file}};
    if (bounds)
      canonical["bounds"] = ordered_json{{"lo", bounds->lo}, {"hi", bounds->hi}};
    return ParsedFamily{std::move(fam), std::move(canonical)};
  }

  ParsedParameters params =
      parse_parameters(require(spec, path, "parameters"), join_path(path, "parameters"), seed);

  GeneratorSpace space;
  if (type == "affine")
    space = GeneratorSpace::direct;
  else if (type == "affine-reciprocal")
    space = GeneratorSpace::reciprocal;
  else
    throw ConfigError("'" + join_path(gen_path, "type") +
                      "' must be 'affine', 'affine-reciprocal' or 'file'");
  check_keys(gen, gen_path, {"type", "base", "modes"});

  const Grid1D grid(default_cells);
  std::vector<double> base_vals =
      parse_cell_values(require(gen, gen_path, "base"), join_path(gen_path, "base"), grid.cells);
  const auto& modes_spec = require(gen, gen_path, "modes");
  if (!modes_spec.is_array() || modes_spec.empty())
    throw ConfigError("'" + join_path(gen_path, "modes") + "' must be a nonempty array");
  AffineGenerator generator{PiecewiseFn(grid, base_vals), {}, params.box};
  ordered_json modes_canonical = ordered_json::array();
  int mode_index = 0;
  for (const auto& mode : modes_spec) {
    std::vector<double> vals =
        parse_mode(mode, join_path(gen_path, "modes[" + std::to_string(mode_index) + "]"), grid);
    modes_canonical.push_back(cell_values_canonical(vals));
    generator.modes.emplace_back(grid, std::move(vals));
    ++mode_index;
  }
  if (generator.modes.size() != params.points.front().size())
    throw ConfigError("'" + gen_path + "': mode count must equal the parameter dimension");

  canonical["generator"] =
      ordered_json{{"type", type},
                   {"base", cell_values_canonical(base_vals)},
                   {"modes", modes_canonical}};
  if (bounds) canonical["bounds"] = ordered_json{{"lo", bounds->lo}, {"hi", bounds->hi}};
  canonical["parameters"] = params.canonical;

  ParametricFamily fam(kind, space, std::move(generator), std::move(params.points), bounds);
  return ParsedFamily{std::move(fam), std::move(canonical)};
}

CoefficientSpec parse_coefficient(const ordered_json& spec, const std::string& path) {
  check_keys(spec, path, {"constant", "cells", "values"});
  CoefficientSpec out;
  if (spec.contains("constant")) {
    out.constant = get_number(spec, path, "constant", -1e300, 1e300);
    return out;
  }
  const auto& cj = require(spec, path, "cells");
  if (!cj.is_array()) throw ConfigError("'" + join_path(path, "cells") + "' must be an array");
  long total = 1;
  for (const auto& item : cj) {
    if (!item.is_number_integer() && !item.is_number_unsigned())
      throw ConfigError("'" + join_path(path, "cells") + "' must contain integers");
    const long c = item.get<long>();
    if (c < 1 || c > 4096) throw ConfigError("'" + join_path(path, "cells") + "' out of range");
    out.cells.push_back(static_cast<int>(c));
    total *= c;
  }
  if (out.cells.empty() || out.cells.size() > 2)
    throw ConfigError("'" + join_path(path, "cells") + "' must have 1 or 2 entries");
  out.values = get_double_array(require(spec, path, "values"), join_path(path, "values"));
  if (static_cast<long>(out.values.size()) != total)
    throw ConfigError("'" + join_path(path, "values") + "' must have " + std::to_string(total) +
                      " entries");
  return out;
}

ordered_json coefficient_canonical(const CoefficientSpec& spec) {
  if (spec.constant) return ordered_json{{"constant", *spec.constant}};
  return ordered_json{{"cells", spec.cells}, {"values", spec.values}};
}

}  // namespace

GreedyJob parse_greedy_config(const std::string& text, CoefficientKind expected_kind,
                              const CliOverrides& overrides) {
  const ordered_json j = parse_json(text);
  check_keys(j, "", {"seed", "output", "grid", "family", "greedy"});
  ConfigBase base = parse_base(j, overrides);

  const auto& grid_spec = require(j, "", "grid");
  check_keys(grid_spec, "grid", {"cells"});
  const int cells = get_int(grid_spec, "grid", "cells", 1, 1000000);

  ParsedFamily pf =
      parse_family(require(j, "", "family"), "family", expected_kind, cells, base.seed);

  GreedyConfig greedy;
  if (j.contains("greedy")) {
    const auto& g = j.at("greedy");
    check_keys(g, "greedy", {"gamma", "max_snapshots", "tolerance", "weak_scan"});
    greedy.gamma = get_number(g, "greedy", "gamma", 1e-12, 1.0, 1.0);
    greedy.max_snapshots = get_int(g, "greedy", "max_snapshots", 1, 1000000, 1000000);
    greedy.tolerance = get_number(g, "greedy", "tolerance", 0.0, 1e300, 0.0);
    greedy.weak_scan = get_bool(g, "greedy", "weak_scan", false);
  }

  canonical_base(base);
  base.canonical["grid"] = ordered_json{{"cells", cells}};
  base.canonical["family"] = pf.canonical;
  base.canonical["greedy"] = ordered_json{{"gamma", greedy.gamma},
                                          {"max_snapshots", greedy.max_snapshots},
                                          {"tolerance", greedy.tolerance},
                                          {"weak_scan", greedy.weak_scan}};
  return GreedyJob(std::move(base), std::move(pf.family), greedy);
}

OnlineJob parse_online_config(const std::string& text, const CliOverrides& overrides) {
  const ordered_json j = parse_json(text);
  check_keys(j, "", {"seed", "output", "basis", "target", "source"});
  OnlineJob job;
  static_cast<ConfigBase&>(job) = parse_base(j, overrides);
  job.basis_path = get_string(j, "", "basis");
  if (!std::filesystem::exists(job.basis_path))
    throw ConfigError("'basis': no such file: " + job.basis_path.string());

  // Cell counts are validated against the basis grid by the command.
  const auto& target = require(j, "", "target");
  check_keys(target, "target", {"constant", "values"});
  const auto& source = require(j, "", "source");
  check_keys(source, "source", {"constant", "values"});
  auto read_values = [&](const ordered_json& spec, const std::string& path) {
    if (spec.contains("constant") == spec.contains("values"))
      throw ConfigError("'" + path + "' needs exactly one of 'constant' or 'values'");
    if (spec.contains("constant"))
      return std::vector<double>{get_number(spec, path, "constant", -1e300, 1e300)};
    return get_double_array(spec.at("values"), path + ".values");
  };
  job.target_values = read_values(target, "target");
  job.source_values = read_values(source, "source");
  job.target_is_constant = target.contains("constant");
  job.source_is_constant = source.contains("constant");

  canonical_base(job);
  job.canonical["basis"] = job.basis_path.string();
  job.canonical["target"] = job.target_is_constant
                                ? ordered_json{{"constant", job.target_values[0]}}
                                : ordered_json{{"values", job.target_values}};
  job.canonical["source"] = job.source_is_constant
                                ? ordered_json{{"constant", job.source_values[0]}}
                                : ordered_json{{"values", job.source_values}};
  return job;
}

MinimaxJob parse_minimax_config(const std::string& text,
                                const std::filesystem::path& config_dir,
                                const CliOverrides& overrides) {
  const ordered_json j = parse_json(text);
  check_keys(j, "", {"seed", "output", "matrix", "rhs"});
  MinimaxJob job;
  static_cast<ConfigBase&>(job) = parse_base(j, overrides);

  auto resolve = [&](const std::string& file) {
    std::filesystem::path p(file);
    if (p.is_relative()) p = config_dir / p;
    if (!std::filesystem::exists(p)) throw ConfigError("no such file: " + p.string());
    return p;
  };

  const auto& mspec = require(j, "", "matrix");
  check_keys(mspec, "matrix", {"file", "dense"});
  if (mspec.contains("file") == mspec.contains("dense"))
    throw ConfigError("'matrix' needs exactly one of 'file' or 'dense'");
  if (mspec.contains("dense")) {
    for (const auto& row : mspec.at("dense"))
      job.matrix.push_back(get_double_array(row, "matrix.dense"));
  } else {
    const CsvTable csv = parse_csv(read_text_file(resolve(get_string(mspec, "matrix", "file"))));
    if (!csv.header.empty() && csv.header[0] == "row") {
      // Triplet form row,col,value.
      if (csv.header != std::vector<std::string>{"row", "col", "value"})
        throw ConfigError("matrix CSV: triplet header must be row,col,value");
      int rows = 0, cols = 0;
      std::vector<std::tuple<int, int, double>> entries;
      for (const auto& r : csv.rows) {
        if (r.size() != 3) throw ConfigError("matrix CSV: triplet rows need 3 fields");
        const int rr = static_cast<int>(parse_double(r[0]));
        const int cc = static_cast<int>(parse_double(r[1]));
        entries.emplace_back(rr, cc, parse_double(r[2]));
        rows = std::max(rows, rr + 1);
        cols = std::max(cols, cc + 1);
      }
      job.matrix.assign(static_cast<size_t>(rows),
                        std::vector<double>(static_cast<size_t>(cols), 0.0));
      for (const auto& [rr, cc, v] : entries)
        job.matrix[static_cast<size_t>(rr)][static_cast<size_t>(cc)] = v;
    } else {
      // Dense form with a header naming the columns.
      for (const auto& r : csv.rows) {
        std::vector<double> row;
        for (const auto& field : r) row.push_back(parse_double(field));
        job.matrix.push_back(std::move(row));
      }
    }
  }
  if (job.matrix.empty()) throw ConfigError("'matrix' is empty");
  const size_t cols = job.matrix.front().size();
  for (const auto& row : job.matrix)
    if (row.size() != cols) throw ConfigError("'matrix' rows have inconsistent widths");

  const auto& rspec = require(j, "", "rhs");
  check_keys(rspec, "rhs", {"file", "values"});
  if (rspec.contains("file") == rspec.contains("values"))
    throw ConfigError("'rhs' needs exactly one of 'file' or 'values'");
  if (rspec.contains("values")) {
    job.rhs = get_double_array(rspec.at("values"), "rhs.values");
  } else {
    const CsvTable csv = parse_csv(read_text_file(resolve(get_string(rspec, "rhs", "file"))));
    if (csv.header != std::vector<std::string>{"value"})
      throw ConfigError("rhs CSV: header must be 'value'");
    for (const auto& r : csv.rows) {
      if (r.size() != 1) throw ConfigError("rhs CSV: one field per row");
      job.rhs.push_back(parse_double(r[0]));
    }
  }
  if (job.rhs.size() != job.matrix.size())
    throw ConfigError("'rhs' length must equal the matrix row count");

  canonical_base(job);
  ordered_json dense = ordered_json::array();
  for (const auto& row : job.matrix) dense.push_back(row);
  job.canonical["matrix"] = ordered_json{{"dense", dense}};
  job.canonical["rhs"] = ordered_json{{"values", job.rhs}};
  return job;
}

VerifyJob parse_verify_config(const std::string& text, const std::string& check,
                              const CliOverrides& overrides) {
  static const std::set<std::string> known_checks = {"theorem1", "norm-identity", "surrogate",
                                                     "density", "operator-identity"};
  if (!known_checks.count(check)) throw ConfigError("unknown verify check '" + check + "'");

  const ordered_json j = parse_json(text);
  VerifyJob job;
  job.check = check;

  auto parse_mesh = [&](const ordered_json& spec) {
    check_keys(spec, "mesh", {"dimension", "resolution"});
    job.mesh.dimension = get_int(spec, "mesh", "dimension", 1, 2, 2);
    job.mesh.resolution = get_int(spec, "mesh", "resolution", 2, 4096, 16);
  };
  auto parse_bounds = [&](const ordered_json& spec, const std::string& path) {
    check_keys(spec, path, {"lo", "hi"});
    job.bounds = Bounds{get_number(spec, path, "lo", 1e-300, 1e300),
                        get_number(spec, path, "hi", 1e-300, 1e300)};
    if (!(job.bounds.lo < job.bounds.hi))
      throw ConfigError("'" + path + "': lo must be below hi");
  };

  if (check == "theorem1") {
    check_keys(j, "", {"seed", "output", "mesh", "bounds", "pairs", "sigma", "sigma_tilde",
                       "upper_slack", "refinement"});
    static_cast<ConfigBase&>(job) = parse_base(j, overrides);
    parse_mesh(require(j, "", "mesh"));
    parse_bounds(require(j, "", "bounds"), "bounds");
    job.upper_slack = get_number(j, "", "upper_slack", 1.0, 10.0, 1.1);
    if (j.contains("pairs") == (j.contains("sigma") && j.contains("sigma_tilde")))
      throw ConfigError("theorem1 needs either 'pairs' or explicit 'sigma'/'sigma_tilde'");
    if (j.contains("pairs")) {
      const auto& p = j.at("pairs");
      check_keys(p, "pairs", {"count", "blocks"});
      job.pair_count = get_int(p, "pairs", "count", 1, 1000);
      job.blocks = get_int(p, "pairs", "blocks", 1, 64, 2);
    } else {
      job.sigma = parse_coefficient(j.at("sigma"), "sigma");
      job.sigma_tilde = parse_coefficient(j.at("sigma_tilde"), "sigma_tilde");
    }
    if (j.contains("refinement")) {
      const auto& r = j.at("refinement");
      check_keys(r, "refinement", {"resolutions"});
      for (const auto& item : require(r, "refinement", "resolutions")) {
        if (!item.is_number_integer() && !item.is_number_unsigned())
          throw ConfigError("'refinement.resolutions' must contain integers");
        job.refinement_resolutions.push_back(static_cast<int>(item.get<long>()));
      }
    }
  } else if (check == "operator-identity") {
    check_keys(j, "", {"seed", "output", "mesh", "bounds", "pairs", "sigma", "sigma_tilde",
                       "vectors", "tolerance"});
    static_cast<ConfigBase&>(job) = parse_base(j, overrides);
    parse_mesh(require(j, "", "mesh"));
    if (j.contains("bounds")) parse_bounds(j.at("bounds"), "bounds");
    job.vectors = get_int(j, "", "vectors", 1, 10000, 20);
    job.tolerance = get_number(j, "", "tolerance", 0.0, 1.0, 1e-10);
    if (j.contains("pairs") == (j.contains("sigma") && j.contains("sigma_tilde")))
      throw ConfigError("operator-identity needs either 'pairs' or 'sigma'/'sigma_tilde'");
    if (j.contains("pairs")) {
      const auto& p = j.at("pairs");
      check_keys(p, "pairs", {"count", "blocks"});
      job.pair_count = get_int(p, "pairs", "count", 1, 1000);
      job.blocks = get_int(p, "pairs", "blocks", 1, 64, 2);
    } else {
      job.sigma = parse_coefficient(j.at("sigma"), "sigma");
      job.sigma_tilde = parse_coefficient(j.at("sigma_tilde"), "sigma_tilde");
    }
  } else if (check == "norm-identity") {
    check_keys(j, "", {"seed", "output", "grid", "multipliers", "probes", "threshold"});
    static_cast<ConfigBase&>(job) = parse_base(j, overrides);
    const auto& g = require(j, "", "grid");
    check_keys(g, "grid", {"cells"});
    job.grid_cells = get_int(g, "grid", "cells", 1, 100000);
    const auto& m = require(j, "", "multipliers");
    check_keys(m, "multipliers", {"count", "lo", "hi", "values"});
    if (m.contains("values")) {
      job.multiplier_values = get_double_array(m.at("values"), "multipliers.values");
      if (static_cast<int>(job.multiplier_values.size()) != job.grid_cells)
        throw ConfigError("'multipliers.values' must match the grid cell count");
    } else {
      job.multiplier_count = get_int(m, "multipliers", "count", 1, 10000);
      job.bounds = Bounds{get_number(m, "multipliers", "lo", -1e300, 1e300, 0.5),
                          get_number(m, "multipliers", "hi", -1e300, 1e300, 2.0)};
    }
    if (j.contains("probes")) {
      const auto& p = j.at("probes");
      check_keys(p, "probes", {"refine"});
      job.probe_refine = get_int(p, "probes", "refine", 8, 1024, 8);
    }
    job.threshold = get_number(j, "", "threshold", 0.0, 1.0, 0.99);
  } else if (check == "surrogate") {
    check_keys(j, "", {"seed", "output", "grid", "bounds", "pairs", "slack"});
    static_cast<ConfigBase&>(job) = parse_base(j, overrides);
    const auto& g = require(j, "", "grid");
    check_keys(g, "grid", {"cells"});
    job.grid_cells = get_int(g, "grid", "cells", 1, 100000);
    parse_bounds(require(j, "", "bounds"), "bounds");
    const auto& p = require(j, "", "pairs");
    check_keys(p, "pairs", {"count"});
    job.pair_count = get_int(p, "pairs", "count", 1, 100000);
    job.slack = get_number(j, "", "slack", 0.0, 1.0, 1e-12);
  } else {  // density
    check_keys(j, "", {"seed", "output", "mesh", "densities", "vectors", "tolerance"});
    static_cast<ConfigBase&>(job) = parse_base(j, overrides);
    parse_mesh(require(j, "", "mesh"));
    const auto& d = require(j, "", "densities");
    check_keys(d, "densities", {"count", "lo", "hi"});
    job.density_count = get_int(d, "densities", "count", 1, 10000);
    job.bounds = Bounds{get_number(d, "densities", "lo", -1e300, 1e300, 0.5),
                        get_number(d, "densities", "hi", -1e300, 1e300, 2.0)};
    job.vectors = get_int(j, "", "vectors", 1, 10000, 20);
    job.tolerance = get_number(j, "", "tolerance", 0.0, 1.0, 1e-8);
  }

  canonical_base(job);
  job.canonical["check"] = check;
  if (check == "theorem1" || check == "operator-identity" || check == "density") {
    job.canonical["mesh"] = ordered_json{{"dimension", job.mesh.dimension},
                                         {"resolution", job.mesh.resolution}};
  }
  if (check != "norm-identity" && check != "density")
    job.canonical["bounds"] = ordered_json{{"lo", job.bounds.lo}, {"hi", job.bounds.hi}};
  if (check == "theorem1") {
    job.canonical["upper_slack"] = job.upper_slack;
    if (!job.refinement_resolutions.empty())
      job.canonical["refinement"] = ordered_json{{"resolutions", job.refinement_resolutions}};
  }
  if (job.pair_count > 0)
    job.canonical["pairs"] = ordered_json{{"count", job.pair_count}, {"blocks", job.blocks}};
  if (job.sigma) job.canonical["sigma"] = coefficient_canonical(*job.sigma);
  if (job.sigma_tilde) job.canonical["sigma_tilde"] = coefficient_canonical(*job.sigma_tilde);
  if (check == "operator-identity" || check == "density") {
    job.canonical["vectors"] = job.vectors;
    job.canonical["tolerance"] = job.tolerance;
  }
  if (check == "norm-identity" || check == "surrogate")
    job.canonical["grid"] = ordered_json{{"cells", job.grid_cells}};
  if (check == "norm-identity") {
    if (!job.multiplier_values.empty())
      job.canonical["multipliers"] = ordered_json{{"values", job.multiplier_values}};
    else
      job.canonical["multipliers"] = ordered_json{
          {"count", job.multiplier_count}, {"lo", job.bounds.lo}, {"hi", job.bounds.hi}};
    job.canonical["probes"] = ordered_json{{"refine", job.probe_refine}};
    job.canonical["threshold"] = job.threshold;
  }
  if (check == "surrogate") job.canonical["slack"] = job.slack;
  if (check == "density")
    job.canonical["densities"] = ordered_json{
        {"count", job.density_count}, {"lo", job.bounds.lo}, {"hi", job.bounds.hi}};
  return job;
}

std::string serialize_config(const ConfigBase& config) { return dump_json17(config.canonical); }

}  // namespace rescoef
