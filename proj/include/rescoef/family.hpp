#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rescoef/piecewise.hpp"

namespace rescoef {

enum class CoefficientKind { diffusivity, density };

/// Whether the generator's natural output is the coefficient itself or its
/// reciprocal (an affine family of multipliers m = 1/sigma).
enum class GeneratorSpace { direct, reciprocal };

/// Affine-in-mu generator: g(x, mu) = base(x) + sum_j mu_j * mode_j(x),
/// declared over a parameter box.
struct AffineGenerator {
  PiecewiseFn base;
  std::vector<PiecewiseFn> modes;
  std::vector<Bounds> domain;  // one box per parameter component
};

/// Finite training set of parameter points with a rule mapping each point to
/// a coefficient function. Immutable; samples are deterministic in mu.
class ParametricFamily {
 public:
  /// Affine family over an explicit training set.
  ParametricFamily(CoefficientKind kind, GeneratorSpace space, AffineGenerator generator,
                   std::vector<std::vector<double>> points,
                   std::optional<Bounds> coefficient_bounds);

  /// Tabulated family: one stored value table per training point; samples
  /// are defined only at the listed points.
  ParametricFamily(CoefficientKind kind, AnyGrid grid,
                   std::vector<std::vector<double>> points,
                   std::vector<std::vector<double>> tables,
                   std::optional<Bounds> coefficient_bounds);

  CoefficientKind kind() const { return kind_; }
  GeneratorSpace space() const { return space_; }
  int dim() const { return dim_; }
  int size() const { return static_cast<int>(points_.size()); }
  const std::vector<std::vector<double>>& points() const { return points_; }
  std::span<const double> point(int index) const { return points_[static_cast<size_t>(index)]; }
  const AnyGrid& grid() const { return grid_; }
  std::optional<Bounds> coefficient_bounds() const { return bounds_; }

  /// The generated function at mu, in the generator's own space. Throws
  /// UnknownParameter when mu lies outside the declared domain (affine) or
  /// off the training set (tabulated).
  PiecewiseFn sample(std::span<const double> mu) const;
  PiecewiseFn sample(int index) const;

  /// Coefficient function sigma (or rho) at a training point: the sample
  /// itself for direct generators, its reciprocal for reciprocal ones.
  PiecewiseFn coefficient(int index) const;

  /// The vector the greedy surrogate works on: the multiplier 1/sigma for
  /// diffusivity families, the density itself for density families.
  PiecewiseFn surrogate_vector(int index) const;

 private:
  void validate_points() const;
  PiecewiseFn make_fn(std::vector<double> values) const;

  CoefficientKind kind_;
  GeneratorSpace space_;
  int dim_;
  AnyGrid grid_;
  std::optional<AffineGenerator> affine_;
  std::vector<std::vector<double>> tables_;
  std::vector<std::vector<double>> points_;
  std::optional<Bounds> bounds_;
};

/// Tabulated family CSV: header mu_1,...,mu_d,cell_0,...,cell_{M-1} with
/// 17-significant-digit floats (loss-free round trip).
ParametricFamily load_family_csv(const std::filesystem::path& path, CoefficientKind kind,
                                 AnyGrid grid, std::optional<Bounds> bounds);
std::string family_to_csv(const ParametricFamily& family);

}  // namespace rescoef
