#include "rescoef/mesh.hpp"

#include <string>

namespace rescoef {

Mesh::Mesh(int dim, int resolution) : dim_(dim), resolution_(resolution) {
  if (resolution < 2) throw InvalidInput("Mesh: resolution must be >= 2");
  if (dim == 1) {
    const int n = resolution;
    interior_index_.assign(static_cast<size_t>(n) + 1, -1);
    for (int i = 1; i < n; ++i) interior_index_[static_cast<size_t>(i)] = interior_count_++;
    elements_.reserve(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k) elements_.push_back({k, k + 1, -1});
  } else {
    const int n = resolution;
    const int stride = n + 1;
    interior_index_.assign(static_cast<size_t>(stride) * stride, -1);
    for (int j = 1; j < n; ++j)
      for (int i = 1; i < n; ++i)
        interior_index_[static_cast<size_t>(j) * stride + i] = interior_count_++;
    elements_.reserve(static_cast<size_t>(2) * n * n);
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        const int a = j * stride + i;
        const int b = j * stride + i + 1;
        const int c = (j + 1) * stride + i + 1;
        const int d = (j + 1) * stride + i;
        elements_.push_back({a, b, c});
        elements_.push_back({a, c, d});
      }
    }
  }
}

Mesh Mesh::interval(int resolution) { return Mesh(1, resolution); }
Mesh Mesh::square(int resolution) { return Mesh(2, resolution); }

double Mesh::node_x(int node) const {
  if (dim_ == 1) return static_cast<double>(node) / resolution_;
  return static_cast<double>(node % (resolution_ + 1)) / resolution_;
}

double Mesh::node_y(int node) const {
  if (dim_ == 1) return 0.0;
  return static_cast<double>(node / (resolution_ + 1)) / resolution_;
}

int Mesh::coefficient_cell(int e, int cells_x, int cells_y) const {
  if (dim_ == 1) {
    if (resolution_ % cells_x != 0)
      throw AlignmentError("mesh resolution " + std::to_string(resolution_) +
                           " does not refine a grid of " + std::to_string(cells_x) + " cells");
    return e / (resolution_ / cells_x);
  }
  if (resolution_ % cells_x != 0 || resolution_ % cells_y != 0)
    throw AlignmentError("mesh resolution " + std::to_string(resolution_) +
                         " does not refine a " + std::to_string(cells_x) + "x" +
                         std::to_string(cells_y) + " grid");
  const int square = e / 2;
  const int i = square % resolution_;
  const int j = square / resolution_;
  const int ci = i / (resolution_ / cells_x);
  const int cj = j / (resolution_ / cells_y);
  return cj * cells_x + ci;
}

}  // namespace rescoef
