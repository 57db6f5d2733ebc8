#include "rescoef/family.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <utility>

#include "rescoef/errors.hpp"
#include "rescoef/io.hpp"

namespace rescoef {

namespace {

std::string point_to_string(std::span<const double> mu) {
  std::string s = "(";
  for (size_t i = 0; i < mu.size(); ++i) {
    if (i) s += ", ";
    s += format_g17(mu[i]);
  }
  return s + ")";
}

}  // namespace

ParametricFamily::ParametricFamily(CoefficientKind kind, GeneratorSpace space,
                                   AffineGenerator generator,
                                   std::vector<std::vector<double>> points,
                                   std::optional<Bounds> coefficient_bounds)
    : kind_(kind),
      space_(space),
      dim_(static_cast<int>(generator.modes.size())),
      grid_(generator.base.grid()),
      affine_(std::move(generator)),
      points_(std::move(points)),
      bounds_(coefficient_bounds) {
  for (const PiecewiseFn& mode : affine_->modes)
    if (!(mode.grid() == grid_)) throw GridMismatch("ParametricFamily: mode grid differs from base");
  if (static_cast<int>(affine_->domain.size()) != dim_)
    throw InvalidInput("ParametricFamily: domain box count must match mode count");
  if (kind_ == CoefficientKind::density && space_ == GeneratorSpace::reciprocal)
    throw InvalidInput("ParametricFamily: density families are direct-space");
  validate_points();
}

ParametricFamily::ParametricFamily(CoefficientKind kind, AnyGrid grid,
                                   std::vector<std::vector<double>> points,
                                   std::vector<std::vector<double>> tables,
                                   std::optional<Bounds> coefficient_bounds)
    : kind_(kind),
      space_(GeneratorSpace::direct),
      dim_(points.empty() ? 0 : static_cast<int>(points.front().size())),
      grid_(grid),
      tables_(std::move(tables)),
      points_(std::move(points)),
      bounds_(coefficient_bounds) {
  if (tables_.size() != points_.size())
    throw InvalidInput("ParametricFamily: one value table required per point");
  for (const auto& t : tables_)
    if (static_cast<int>(t.size()) != cell_count(grid_))
      throw InvalidInput("ParametricFamily: table size does not match grid");
  validate_points();
}

void ParametricFamily::validate_points() const {
  if (points_.empty()) throw EmptyFamily("ParametricFamily: no parameter points");
  for (const auto& p : points_) {
    if (static_cast<int>(p.size()) != dim_)
      throw InvalidInput("ParametricFamily: parameter dimension mismatch");
    for (double c : p)
      if (!std::isfinite(c)) throw InvalidInput("ParametricFamily: non-finite parameter");
  }
  std::set<std::vector<double>> seen;
  for (const auto& p : points_) {
    if (!seen.insert(p).second)
      throw InvalidInput("ParametricFamily: duplicate parameter point " + point_to_string(p));
  }
}

PiecewiseFn ParametricFamily::make_fn(std::vector<double> values) const {
  PiecewiseFn fn = std::holds_alternative<Grid1D>(grid_)
                       ? PiecewiseFn(std::get<Grid1D>(grid_), std::move(values))
                       : PiecewiseFn(std::get<Grid2D>(grid_), std::move(values));
  return fn;
}

PiecewiseFn ParametricFamily::sample(std::span<const double> mu) const {
  if (static_cast<int>(mu.size()) != dim_)
    throw UnknownParameter("sample: parameter dimension mismatch at " + point_to_string(mu));
  if (affine_) {
    for (int j = 0; j < dim_; ++j) {
      const Bounds& box = affine_->domain[static_cast<size_t>(j)];
      if (mu[static_cast<size_t>(j)] < box.lo || mu[static_cast<size_t>(j)] > box.hi)
        throw UnknownParameter("sample: parameter " + point_to_string(mu) +
                               " outside the declared domain");
    }
    std::vector<double> values(affine_->base.values().begin(), affine_->base.values().end());
    for (int j = 0; j < dim_; ++j) {
      const double c = mu[static_cast<size_t>(j)];
      const PiecewiseFn& mode = affine_->modes[static_cast<size_t>(j)];
      for (size_t i = 0; i < values.size(); ++i) values[i] += c * mode.value(static_cast<int>(i));
    }
    PiecewiseFn fn = make_fn(std::move(values));
    if (bounds_) {
      if (space_ == GeneratorSpace::reciprocal)
        check_bounds(reciprocal(fn), *bounds_, "family coefficient");
      else
        check_bounds(fn, *bounds_, "family coefficient");
    }
    return fn;
  }
  for (size_t i = 0; i < points_.size(); ++i) {
    if (std::equal(points_[i].begin(), points_[i].end(), mu.begin(), mu.end()))
      return sample(static_cast<int>(i));
  }
  throw UnknownParameter("sample: tabulated family has no entry for " + point_to_string(mu));
}

PiecewiseFn ParametricFamily::sample(int index) const {
  if (index < 0 || index >= size()) throw UnknownParameter("sample: index out of range");
  if (affine_) return sample(std::span<const double>(points_[static_cast<size_t>(index)]));
  PiecewiseFn fn = make_fn(tables_[static_cast<size_t>(index)]);
  if (bounds_) check_bounds(fn, *bounds_, "family coefficient");
  return fn;
}

PiecewiseFn ParametricFamily::coefficient(int index) const {
  PiecewiseFn s = sample(index);
  return space_ == GeneratorSpace::reciprocal ? reciprocal(s) : std::move(s);
}

PiecewiseFn ParametricFamily::surrogate_vector(int index) const {
  PiecewiseFn s = sample(index);
  if (kind_ == CoefficientKind::density) return s;
  return space_ == GeneratorSpace::reciprocal ? std::move(s) : reciprocal(s);
}

ParametricFamily load_family_csv(const std::filesystem::path& path, CoefficientKind kind,
                                 AnyGrid grid, std::optional<Bounds> bounds) {
  const CsvTable csv = parse_csv(read_text_file(path));
  const int cells = cell_count(grid);
  int d = 0;
  while (d < static_cast<int>(csv.header.size()) &&
         csv.header[static_cast<size_t>(d)] == "mu_" + std::to_string(d + 1))
    ++d;
  if (d == 0) throw IoError("family CSV: header must start with mu_1");
  if (static_cast<int>(csv.header.size()) != d + cells)
    throw IoError("family CSV: expected " + std::to_string(d + cells) + " columns, got " +
                  std::to_string(csv.header.size()));
  for (int c = 0; c < cells; ++c) {
    if (csv.header[static_cast<size_t>(d + c)] != "cell_" + std::to_string(c))
      throw IoError("family CSV: bad cell column header at position " + std::to_string(d + c));
  }
  std::vector<std::vector<double>> points, tables;
  for (const auto& row : csv.rows) {
    if (static_cast<int>(row.size()) != d + cells)
      throw IoError("family CSV: row width mismatch");
    std::vector<double> mu, vals;
    for (int j = 0; j < d; ++j) mu.push_back(parse_double(row[static_cast<size_t>(j)]));
    for (int c = 0; c < cells; ++c) vals.push_back(parse_double(row[static_cast<size_t>(d + c)]));
    points.push_back(std::move(mu));
    tables.push_back(std::move(vals));
  }
  return ParametricFamily(kind, grid, std::move(points), std::move(tables), bounds);
}

std::string family_to_csv(const ParametricFamily& family) {
  std::string out;
  const int d = family.dim();
  const int cells = cell_count(family.grid());
  for (int j = 0; j < d; ++j) {
    if (j) out += ",";
    out += "mu_" + std::to_string(j + 1);
  }
  for (int c = 0; c < cells; ++c) out += ",cell_" + std::to_string(c);
  out += "\n";
  for (int i = 0; i < family.size(); ++i) {
    const auto mu = family.point(i);
    const PiecewiseFn fn = family.sample(i);
    for (int j = 0; j < d; ++j) {
      if (j) out += ",";
      out += format_g17(mu[static_cast<size_t>(j)]);
    }
    for (double v : fn.values()) out += "," + format_g17(v);
    out += "\n";
  }
  return out;
}

}  // namespace rescoef
