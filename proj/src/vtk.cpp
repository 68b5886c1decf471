#include "expfem/vtk.hpp"

#include <fstream>
#include <stdexcept>

namespace expfem {

void write_vtk_legacy(const std::string& path, const SimplicialMesh& mesh,
                      const std::vector<CellField>& cell_fields, const std::string& title) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_vtk_legacy: cannot open " + path);
  out.precision(12);

  const int nv = mesh.n_vertices();
  const int nc = mesh.n_cells();
  const int nvpc = mesh.dim + 1;

  out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << nv << " double\n";
  for (int v = 0; v < nv; ++v) {
    out << mesh.vertices(v, 0) << ' ' << mesh.vertices(v, 1) << ' '
        << (mesh.dim == 3 ? mesh.vertices(v, 2) : 0.0) << '\n';
  }

  out << "CELLS " << nc << ' ' << nc * (nvpc + 1) << '\n';
  for (int c = 0; c < nc; ++c) {
    out << nvpc;
    for (int v = 0; v < nvpc; ++v) out << ' ' << mesh.cells(c, v);
    out << '\n';
  }
  out << "CELL_TYPES " << nc << '\n';
  const int vtk_type = (mesh.dim == 2) ? 5 : 10;  // VTK_TRIANGLE / VTK_TETRA
  for (int c = 0; c < nc; ++c) out << vtk_type << '\n';

  if (cell_fields.empty()) return;
  out << "CELL_DATA " << nc << '\n';
  for (const auto& field : cell_fields) {
    if (field.values.rows() != nc)
      throw std::invalid_argument("write_vtk_legacy: field size mismatch: " + field.name);
    if (field.values.cols() == 1) {
      out << "SCALARS " << field.name << " double 1\nLOOKUP_TABLE default\n";
      for (int c = 0; c < nc; ++c) out << field.values(c, 0) << '\n';
    } else {
      out << "VECTORS " << field.name << " double\n";
      for (int c = 0; c < nc; ++c) {
        out << field.values(c, 0) << ' ' << field.values(c, 1) << ' '
            << (field.values.cols() > 2 ? field.values(c, 2) : 0.0) << '\n';
      }
    }
  }
}

}  // namespace expfem
