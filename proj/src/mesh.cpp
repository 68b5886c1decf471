#include "expfem/mesh.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <stdexcept>

namespace expfem {

namespace {

template <int Dim>
double cell_signed_volume(const Eigen::MatrixXd& V, const Eigen::MatrixXi& cells, int c) {
  Eigen::Matrix<double, Dim, Dim + 1> X;
  for (int v = 0; v <= Dim; ++v) X.col(v) = V.row(cells(c, v)).transpose().head<Dim>();
  return signed_volume<Dim>(X);
}

// Global facet normal for the ascending vertex tuple.
Eigen::Vector3d facet_normal_3d(const Eigen::MatrixXd& V, int a, int b, int c) {
  Eigen::Vector3d xa = V.row(a).transpose(), xb = V.row(b).transpose(), xc = V.row(c).transpose();
  return ((xb - xa).cross(xc - xa)).normalized();
}

Eigen::Vector2d edge_normal_2d(const Eigen::MatrixXd& V, int a, int b) {
  Vec2 t = (V.row(b) - V.row(a)).transpose().normalized();
  return perp(t);
}

}  // namespace

SimplicialMesh finalize_mesh(int dim, Eigen::MatrixXd vertices, Eigen::MatrixXi raw_cells) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("finalize_mesh: dim must be 2 or 3");
  SimplicialMesh m;
  m.dim = dim;
  m.vertices = std::move(vertices);
  m.cells = std::move(raw_cells);
  const int nc = m.n_cells();
  const int nvpc = dim + 1;

  // Ascending order, then restore positive orientation with one swap.
  for (int c = 0; c < nc; ++c) {
    std::array<int, 4> tmp;
    for (int v = 0; v < nvpc; ++v) tmp[v] = m.cells(c, v);
    std::sort(tmp.begin(), tmp.begin() + nvpc);
    for (int v = 0; v < nvpc; ++v) m.cells(c, v) = tmp[v];
    const double vol = (dim == 2) ? cell_signed_volume<2>(m.vertices, m.cells, c)
                                  : cell_signed_volume<3>(m.vertices, m.cells, c);
    if (vol < 0) std::swap(m.cells(c, nvpc - 2), m.cells(c, nvpc - 1));
    const double vol2 = (dim == 2) ? cell_signed_volume<2>(m.vertices, m.cells, c)
                                   : cell_signed_volume<3>(m.vertices, m.cells, c);
    if (!(vol2 > 0)) throw GeometryError("finalize_mesh: degenerate cell");
  }

  // Deterministic global numbering: lexicographic in the sorted vertex tuple.
  std::map<std::array<int, 2>, int> edge_ids;
  std::map<std::array<int, 3>, int> facet_ids;
  const int nle = dim * (dim + 1) / 2;

  auto sorted_pair = [](int a, int b) { return std::array<int, 2>{std::min(a, b), std::max(a, b)}; };

  for (int c = 0; c < nc; ++c) {
    for (int i = 0; i < nvpc; ++i)
      for (int j = i + 1; j < nvpc; ++j) edge_ids.emplace(sorted_pair(m.cells(c, i), m.cells(c, j)), 0);
    if (dim == 3) {
      for (int f = 0; f < 4; ++f) {
        std::array<int, 3> tri;
        int q = 0;
        for (int v = 0; v < 4; ++v)
          if (v != f) tri[q++] = m.cells(c, v);
        std::sort(tri.begin(), tri.end());
        facet_ids.emplace(tri, 0);
      }
    }
  }
  {
    int id = 0;
    for (auto& kv : edge_ids) kv.second = id++;
    id = 0;
    for (auto& kv : facet_ids) kv.second = id++;
  }

  m.edges.resize(int(edge_ids.size()), 2);
  for (const auto& [key, id] : edge_ids) {
    m.edges(id, 0) = key[0];
    m.edges(id, 1) = key[1];
  }
  if (dim == 3) {
    m.facets.resize(int(facet_ids.size()), 3);
    for (const auto& [key, id] : facet_ids) {
      m.facets(id, 0) = key[0];
      m.facets(id, 1) = key[1];
      m.facets(id, 2) = key[2];
    }
  } else {
    m.facets = m.edges;
  }
  const int nf = m.n_facets();

  m.cell_edges.resize(nc, nle);
  m.cell_edge_sign.resize(nc, nle);
  m.cell_facets.resize(nc, nvpc);
  m.cell_facet_sign.resize(nc, nvpc);
  m.facet_cells = Eigen::MatrixXi::Constant(nf, 2, -1);

  for (int c = 0; c < nc; ++c) {
    int q = 0;
    for (int i = 0; i < nvpc; ++i) {
      for (int j = i + 1; j < nvpc; ++j, ++q) {
        const int a = m.cells(c, i), b = m.cells(c, j);
        m.cell_edges(c, q) = edge_ids.at(sorted_pair(a, b));
        m.cell_edge_sign(c, q) = (a < b) ? 1 : -1;
      }
    }

    const auto geom2 = [&] { return m.cell_geometry<2>(c); };
    const auto geom3 = [&] { return m.cell_geometry<3>(c); };
    for (int f = 0; f < nvpc; ++f) {
      int gid;
      double orient;
      if (dim == 3) {
        std::array<int, 3> tri;
        int p = 0;
        for (int v = 0; v < 4; ++v)
          if (v != f) tri[p++] = m.cells(c, v);
        std::sort(tri.begin(), tri.end());
        gid = facet_ids.at(tri);
        orient = facet_normal_3d(m.vertices, tri[0], tri[1], tri[2]).dot(geom3().outward_normal(f));
      } else {
        int a = -1, b = -1;
        for (int v = 0; v < 3; ++v) {
          if (v == f) continue;
          if (a < 0) a = m.cells(c, v); else b = m.cells(c, v);
        }
        auto key = sorted_pair(a, b);
        gid = edge_ids.at(key);
        orient = edge_normal_2d(m.vertices, key[0], key[1]).dot(geom2().outward_normal(f));
      }
      m.cell_facets(c, f) = gid;
      m.cell_facet_sign(c, f) = (orient > 0) ? 1 : -1;
      if (m.facet_cells(gid, 0) < 0)
        m.facet_cells(gid, 0) = c;
      else if (m.facet_cells(gid, 1) < 0)
        m.facet_cells(gid, 1) = c;
      else
        throw GeometryError("finalize_mesh: facet shared by more than two cells");
    }
  }

  m.facet_on_boundary.assign(nf, 0);
  for (int f = 0; f < nf; ++f) m.facet_on_boundary[f] = (m.facet_cells(f, 1) < 0) ? 1 : 0;

  m.vertex_on_boundary.assign(m.n_vertices(), 0);
  m.edge_on_boundary.assign(m.n_edges(), 0);
  if (dim == 2) {
    for (int f = 0; f < nf; ++f) {
      if (!m.facet_on_boundary[f]) continue;
      m.edge_on_boundary[f] = 1;
      m.vertex_on_boundary[m.edges(f, 0)] = 1;
      m.vertex_on_boundary[m.edges(f, 1)] = 1;
    }
  } else {
    for (int f = 0; f < nf; ++f) {
      if (!m.facet_on_boundary[f]) continue;
      for (int v = 0; v < 3; ++v) m.vertex_on_boundary[m.facets(f, v)] = 1;
      for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
          m.edge_on_boundary[edge_ids.at(sorted_pair(m.facets(f, i), m.facets(f, j)))] = 1;
    }
  }
  return m;
}

SimplicialMesh build_unit_square_mesh(int n) {
  if (n < 1) throw std::invalid_argument("build_unit_square_mesh: n >= 1 required");
  const int nv = (n + 1) * (n + 1);
  Eigen::MatrixXd V(nv, 2);
  auto vid = [n](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) V.row(vid(i, j)) << double(i) / n, double(j) / n;

  Eigen::MatrixXi C(2 * n * n, 3);
  int c = 0;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      C.row(c++) << vid(i, j), vid(i + 1, j), vid(i + 1, j + 1);
      C.row(c++) << vid(i, j), vid(i + 1, j + 1), vid(i, j + 1);
    }
  }
  return finalize_mesh(2, std::move(V), std::move(C));
}

SimplicialMesh build_unit_cube_mesh(int n) {
  if (n < 1) throw std::invalid_argument("build_unit_cube_mesh: n >= 1 required");
  const int nv = (n + 1) * (n + 1) * (n + 1);
  Eigen::MatrixXd V(nv, 3);
  auto vid = [n](int i, int j, int k) { return (k * (n + 1) + j) * (n + 1) + i; };
  for (int k = 0; k <= n; ++k)
    for (int j = 0; j <= n; ++j)
      for (int i = 0; i <= n; ++i)
        V.row(vid(i, j, k)) << double(i) / n, double(j) / n, double(k) / n;

  // Kuhn split: one tetrahedron per monotone lattice path, six per sub-cube.
  constexpr int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  Eigen::MatrixXi C(6 * n * n * n, 4);
  int c = 0;
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        for (const auto& p : perms) {
          int d[3] = {0, 0, 0};
          int verts[4];
          verts[0] = vid(i, j, k);
          for (int s = 0; s < 3; ++s) {
            d[p[s]] = 1;
            verts[s + 1] = vid(i + d[0], j + d[1], k + d[2]);
          }
          C.row(c++) << verts[0], verts[1], verts[2], verts[3];
        }
      }
    }
  }
  return finalize_mesh(3, std::move(V), std::move(C));
}

}  // namespace expfem
