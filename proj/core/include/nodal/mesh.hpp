#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

namespace nodal {

/// Simplicial mesh of an interval (dim 1) or an axis-aligned rectangle
/// (dim 2, every grid cell split along its lower-left to upper-right
/// diagonal). Treated as immutable after construction: element volumes,
/// the per-element gradient operators and the interior numbering are
/// precomputed once. Gradients of piecewise-linear functions are constant
/// per element, so the gradient operators are exact.
struct Mesh {
  int dim = 0;
  Eigen::MatrixXd vertices;        ///< vertex_count x dim coordinates
  Eigen::MatrixXi elements;        ///< element_count x (dim+1) vertex ids
  std::vector<bool> boundary;      ///< per-vertex boundary marker
  Eigen::VectorXd element_volume;  ///< per-element measure, all > 0

  /// Per-element (dim x dim+1) map from local vertex values to the
  /// constant gradient of the linear interpolant.
  std::vector<Eigen::MatrixXd> grad_op;

  std::vector<int> interior_index;     ///< vertex id -> interior dof, -1 on boundary
  std::vector<int> interior_vertices;  ///< interior dof -> vertex id

  int vertex_count() const { return static_cast<int>(vertices.rows()); }
  int element_count() const { return static_cast<int>(elements.rows()); }
  int interior_count() const { return static_cast<int>(interior_vertices.size()); }
  double measure() const { return element_volume.sum(); }

  std::string to_json_string() const;
  static Mesh from_json_string(const std::string& text);
};

/// Uniform mesh of (a, b) with n elements (n >= 2, a < b).
Mesh build_interval_mesh(int n, double a, double b);

/// Structured triangulation of (0, width) x (0, height) with nx x ny cells,
/// two triangles per cell (nx, ny >= 2).
Mesh build_rect_mesh(int nx, int ny, double width, double height);

/// Vertex neighbourhood graph: i ~ j iff both belong to a common element.
struct AdjacencyGraph {
  std::vector<std::vector<int>> neighbors;
  bool is_connected() const;
};

AdjacencyGraph vertex_adjacency(const Mesh& mesh);

}  // namespace nodal
