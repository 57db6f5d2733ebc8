#pragma once

#include <array>
#include <vector>

#include "rescoef/errors.hpp"

namespace rescoef {

/// Uniform P1 mesh of the unit interval (segments) or the unit square
/// (right triangles from square bisection, diagonal from (i,j) to
/// (i+1,j+1)). Boundary nodes carry homogeneous Dirichlet data and are
/// excluded from the interior index map.
class Mesh {
 public:
  static Mesh interval(int resolution);
  static Mesh square(int resolution);

  int dim() const { return dim_; }
  int resolution() const { return resolution_; }
  double h() const { return 1.0 / resolution_; }

  int node_count() const { return static_cast<int>(interior_index_.size()); }
  int interior_count() const { return interior_count_; }
  /// Interior index of a node, or -1 on the boundary.
  int interior_index(int node) const { return interior_index_[static_cast<size_t>(node)]; }

  int element_count() const { return static_cast<int>(elements_.size()); }
  /// Vertex node ids of an element; entry 2 is -1 for 1D segments.
  const std::array<int, 3>& element(int e) const { return elements_[static_cast<size_t>(e)]; }

  double node_x(int node) const;
  double node_y(int node) const;

  /// The coefficient cell containing element e, for a coefficient grid of
  /// the given cell counts; requires the mesh to refine the grid.
  int coefficient_cell(int e, int cells_x, int cells_y) const;

  bool operator==(const Mesh& other) const {
    return dim_ == other.dim_ && resolution_ == other.resolution_;
  }

 private:
  Mesh(int dim, int resolution);

  int dim_;
  int resolution_;
  int interior_count_ = 0;
  std::vector<int> interior_index_;
  std::vector<std::array<int, 3>> elements_;
};

}  // namespace rescoef
