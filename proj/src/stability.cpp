#include "expfem/stability.hpp"

#include <cmath>
#include <filesystem>

#include "expfem/assemble.hpp"
#include "expfem/quadrature.hpp"
#include "expfem/vtk.hpp"

namespace expfem {

std::vector<StabilityResult> run_stability_demo(const std::vector<double>& eps_list, int n,
                                                const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const SimplicialMesh mesh = build_unit_square_mesh(n);
  const auto rule = triangle_rule(2);

  std::vector<StabilityResult> results;
  for (double eps : eps_list) {
    ProblemConfig<2> cfg;
    cfg.k = 2;
    cfg.eps = eps;
    cfg.beta = [](const Vec2& x) { return Vec2(-x(1), x(0)); };
    cfg.gamma = [](const Vec2&) { return 1.0; };
    cfg.load_vector = [](const Vec2&) { return Vec2(1.0, 1.0); };
    // homogeneous u . n = 0: no Dirichlet data set

    const SparseSystem sys = assemble<2>(mesh, cfg);
    const ReducedSystem red = apply_dirichlet<2>(mesh, sys, cfg);
    const Solution sol = solve(red);

    const DofMap dm = sys.dofs;
    Eigen::MatrixXd avg_u = Eigen::MatrixXd::Zero(mesh.n_cells(), 2);
    Eigen::MatrixXd avg_j = Eigen::MatrixXd::Zero(mesh.n_cells(), 1);
    for (int c = 0; c < mesh.n_cells(); ++c) {
      const auto geom = mesh.cell_geometry<2>(c);
      Eigen::Vector3d coeffs;
      for (int s = 0; s < 3; ++s)
        coeffs(s) = double(dm.cell_signs(c, s)) * sol.coefficients(dm.cell_dofs(c, s));
      Vec2 u_avg = Vec2::Zero();
      double j_avg = 0;
      for (int q = 0; q < rule.size(); ++q) {
        const Vec2 xq = map_point<2, 3>(geom.X, rule.bary[q]);
        const auto pb = point_basis<2, 2>(geom, cfg.beta(xq), cfg.eps, xq);
        u_avg += rule.weights[q] * pb.value_of(coeffs);
        j_avg += rule.weights[q] * pb.flux_of(coeffs)(0);
      }
      avg_u.row(c) = u_avg.transpose();
      avg_j(c, 0) = j_avg;
    }

    StabilityResult res;
    res.eps = eps;
    res.finite = avg_u.allFinite() && avg_j.allFinite() && sol.coefficients.allFinite();
    res.max_norm = avg_u.cwiseAbs().maxCoeff();
    for (int f = 0; f < mesh.n_facets(); ++f) {
      if (mesh.facet_on_boundary[f]) continue;
      const int c0 = mesh.facet_cells(f, 0), c1 = mesh.facet_cells(f, 1);
      res.max_jump = std::max(res.max_jump, (avg_u.row(c0) - avg_u.row(c1)).cwiseAbs().maxCoeff());
    }

    std::ostringstream name;
    name << out_dir << "/stability_eps" << eps << ".vtk";
    res.vtk_path = name.str();
    write_vtk_legacy(res.vtk_path, mesh, {{"u_avg", avg_u}, {"flux_avg", avg_j}},
                     "stability demo");
    results.push_back(res);
  }
  return results;
}

}  // namespace expfem
