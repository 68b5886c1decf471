#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

#include "expfem/mesh.hpp"

namespace expfem {

/// Global DOF layout for form degree k: vertices (k=0), edges (k=1, 3D),
/// facets (k=2). Boundary DOFs are the ones constrained by the homogeneous
/// trace conditions tr(v) = 0.
struct DofMap {
  int k = 0;
  int dim = 0;
  int n_dofs = 0;
  std::vector<std::uint8_t> on_boundary;
  std::vector<int> free_index;  // -1 for constrained DOFs
  std::vector<int> free_list;   // free slot -> global DOF
  Eigen::MatrixXi cell_dofs;    // nc x nloc
  Eigen::MatrixXi cell_signs;   // nc x nloc, local-to-global orientation

  int n_free() const { return int(free_list.size()); }
  int n_local() const { return int(cell_dofs.cols()); }
};

DofMap build_dofmap(const SimplicialMesh& mesh, int k);

}  // namespace expfem
