#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

#include "expfem/geometry.hpp"
#include "expfem/types.hpp"

namespace expfem {

/// Conforming simplicial mesh (triangles for dim 2, tetrahedra for dim 3).
///
/// Cells are stored with ascending vertex indices, except that the last two
/// entries are swapped when needed so every cell has positive signed volume.
/// Global edge tangents run from the lower to the higher vertex index; global
/// facet normals follow the right-hand rule on the ascending vertex triple
/// (in 2D, the clockwise rotation of the edge tangent). In 2D the facet
/// arrays alias the edge arrays.
struct SimplicialMesh {
  int dim = 0;
  Eigen::MatrixXd vertices;  // nv x dim
  Eigen::MatrixXi cells;     // nc x (dim+1)
  Eigen::MatrixXi edges;     // ne x 2, ascending pairs
  Eigen::MatrixXi facets;    // 3D: nf x 3 ascending triples; 2D: alias of edges

  Eigen::MatrixXi cell_edges;       // nc x (#local edges)
  Eigen::MatrixXi cell_edge_sign;   // +1 if local ascending pair matches global tangent
  Eigen::MatrixXi cell_facets;      // nc x (dim+1), local facet f opposite vertex slot f
  Eigen::MatrixXi cell_facet_sign;  // +1 if global facet normal is outward for this cell
  Eigen::MatrixXi facet_cells;      // nf x 2, second entry -1 on the boundary

  std::vector<std::uint8_t> vertex_on_boundary;
  std::vector<std::uint8_t> edge_on_boundary;
  std::vector<std::uint8_t> facet_on_boundary;

  int n_vertices() const { return int(vertices.rows()); }
  int n_cells() const { return int(cells.rows()); }
  int n_edges() const { return int(edges.rows()); }
  int n_facets() const { return int(facets.rows()); }

  template <int Dim>
  CellGeometry<Dim> cell_geometry(int c) const {
    Eigen::Matrix<double, Dim, Dim + 1> X;
    for (int v = 0; v <= Dim; ++v)
      X.col(v) = vertices.row(cells(c, v)).transpose().head<Dim>();
    return make_cell_geometry<Dim>(X);
  }
};

/// 2n^2 right triangles on the unit square, h = 1/n.
SimplicialMesh build_unit_square_mesh(int n);

/// 6n^3 tetrahedra on the unit cube via the Kuhn split of each sub-cube.
SimplicialMesh build_unit_cube_mesh(int n);

/// Builds incidence, orientation signs and boundary flags from raw cells.
/// Cells are canonicalized (sorted ascending, then last two swapped if the
/// signed volume is negative); degenerate cells are rejected.
SimplicialMesh finalize_mesh(int dim, Eigen::MatrixXd vertices, Eigen::MatrixXi raw_cells);

}  // namespace expfem
