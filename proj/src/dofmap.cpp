#include "expfem/dofmap.hpp"

#include <stdexcept>

namespace expfem {

DofMap build_dofmap(const SimplicialMesh& mesh, int k) {
  if (k < 0 || k > 2) throw std::invalid_argument("build_dofmap: k in {0,1,2}");
  if (k == 1 && mesh.dim != 3) throw std::invalid_argument("build_dofmap: k=1 needs dim 3");

  DofMap dm;
  dm.k = k;
  dm.dim = mesh.dim;
  const int nc = mesh.n_cells();

  if (k == 0) {
    dm.n_dofs = mesh.n_vertices();
    dm.on_boundary = mesh.vertex_on_boundary;
    dm.cell_dofs = mesh.cells;
    dm.cell_signs = Eigen::MatrixXi::Ones(nc, mesh.dim + 1);
  } else if (k == 1) {
    dm.n_dofs = mesh.n_edges();
    dm.on_boundary = mesh.edge_on_boundary;
    dm.cell_dofs = mesh.cell_edges;
    dm.cell_signs = mesh.cell_edge_sign;
  } else {
    dm.n_dofs = mesh.n_facets();
    dm.on_boundary = mesh.facet_on_boundary;
    dm.cell_dofs = mesh.cell_facets;
    dm.cell_signs = mesh.cell_facet_sign;
  }

  dm.free_index.assign(dm.n_dofs, -1);
  for (int i = 0; i < dm.n_dofs; ++i) {
    if (!dm.on_boundary[i]) {
      dm.free_index[i] = int(dm.free_list.size());
      dm.free_list.push_back(i);
    }
  }
  return dm;
}

}  // namespace expfem
