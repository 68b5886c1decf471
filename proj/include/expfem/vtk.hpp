#pragma once

#include <Eigen/Core>

#include <string>
#include <vector>

#include "expfem/mesh.hpp"

namespace expfem {

/// One per-cell field for export: 1-component scalars or vectors (2D vectors
/// are padded with a zero third component on write).
struct CellField {
  std::string name;
  Eigen::MatrixXd values;  // n_cells x components
};

/// Legacy ASCII unstructured-grid file (VTK_TRIANGLE / VTK_TETRA cells).
void write_vtk_legacy(const std::string& path, const SimplicialMesh& mesh,
                      const std::vector<CellField>& cell_fields, const std::string& title = "expfem");

}  // namespace expfem
