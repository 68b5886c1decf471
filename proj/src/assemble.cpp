#include "expfem/assemble.hpp"

#include <chrono>
#include <stdexcept>
#include <vector>

#include "expfem/quadrature.hpp"
#include "expfem/whitney.hpp"

namespace expfem {

namespace {

template <int Dim, int K>
SparseSystem assemble_impl(const SimplicialMesh& mesh, const ProblemConfig<Dim>& cfg,
                           const AssemblyOptions& opts) {
  using Traits = PointBasisTraits<Dim, K>;
  const auto t0 = std::chrono::steady_clock::now();

  SparseSystem sys;
  sys.dofs = build_dofmap(mesh, K);
  const int n = sys.dofs.n_dofs;
  const int nloc = Traits::n_loc;
  const int nc = mesh.n_cells();

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(size_t(nc) * nloc * nloc);
  sys.rhs = Eigen::VectorXd::Zero(n);

  const auto rule = cell_rule<Dim>(opts.reaction_quad_degree);
  int solves = 0;

  for (int c = 0; c < nc; ++c) {
    const auto geom = mesh.cell_geometry<Dim>(c);
    const double vol = geom.volume;

    std::array<int, Traits::n_loc> gdof;
    std::array<double, Traits::n_loc> gsign;
    for (int s = 0; s < nloc; ++s) {
      gdof[s] = sys.dofs.cell_dofs(c, s);
      gsign[s] = double(sys.dofs.cell_signs(c, s));
    }

    // Flux block: J^k(trial)(b_T) . integral of d^k(test), the latter exact
    // since lowest-order test differentials are constant.
    const Vec<Dim> bT = geom.barycenter;
    const auto pb = point_basis<Dim, K>(geom, cfg.beta(bT), cfg.eps, bT);
    ++solves;

    Eigen::Matrix<double, Traits::flux_rows, Traits::n_loc> test_diff;
    if constexpr (K == 0) {
      test_diff = p1_gradients(geom);
    } else if constexpr (K == 1) {
      test_diff = nedelec_curls(geom);
    } else {
      test_diff = rt_divergences(geom).transpose();
    }

    for (int r = 0; r < nloc; ++r) {
      for (int s = 0; s < nloc; ++s) {
        const double a_cd =
            vol * gsign[r] * gsign[s] * test_diff.col(r).dot(pb.fluxes.col(s));
        trips.emplace_back(gdof[r], gdof[s], a_cd);
      }
    }

    // Reaction and load blocks by simplex quadrature; trial values come from
    // the pointwise spline solves, test values from the Whitney basis.
    for (int q = 0; q < rule.size(); ++q) {
      const Vec<Dim> xq = map_point<Dim, Dim + 1>(geom.X, rule.bary[q]);
      const double wq = rule.weights[q] * vol;
      const auto pq = point_basis<Dim, K>(geom, cfg.beta(xq), cfg.eps, xq);
      ++solves;

      Eigen::Matrix<double, Traits::value_rows, Traits::n_loc> test_val;
      if constexpr (K == 0) {
        test_val = p1_values(geom, xq).transpose();
      } else if constexpr (K == 1) {
        test_val = nedelec_values(geom, xq);
      } else {
        test_val = rt_values(geom, xq);
      }

      const double gq = cfg.gamma ? cfg.gamma(xq) : 0.0;
      if (gq != 0.0) {
        for (int r = 0; r < nloc; ++r)
          for (int s = 0; s < nloc; ++s)
            trips.emplace_back(gdof[r], gdof[s],
                               wq * gq * gsign[r] * gsign[s] *
                                   test_val.col(r).dot(pq.values.col(s)));
      }

      if constexpr (K == 0) {
        if (cfg.load_scalar) {
          const double fq = cfg.load_scalar(xq);
          for (int r = 0; r < nloc; ++r)
            sys.rhs(gdof[r]) += wq * fq * gsign[r] * test_val(0, r);
        }
      } else {
        if (cfg.load_vector) {
          const Vec<Dim> fq = cfg.load_vector(xq);
          for (int r = 0; r < nloc; ++r)
            sys.rhs(gdof[r]) += wq * gsign[r] * test_val.col(r).dot(fq);
        }
      }
    }
  }

  sys.A.resize(n, n);
  sys.A.setFromTriplets(trips.begin(), trips.end());
  sys.A.makeCompressed();
  sys.stats.n_cells = nc;
  sys.stats.n_point_solves = solves;
  sys.stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return sys;
}

}  // namespace

template <int Dim>
SparseSystem assemble(const SimplicialMesh& mesh, const ProblemConfig<Dim>& cfg,
                      const AssemblyOptions& opts) {
  cfg.validate();
  if (mesh.dim != Dim) throw std::invalid_argument("assemble: mesh/config dimension mismatch");
  switch (cfg.k) {
    case 0:
      return assemble_impl<Dim, 0>(mesh, cfg, opts);
    case 1:
      if constexpr (Dim == 3) return assemble_impl<3, 1>(mesh, cfg, opts);
      break;
    case 2:
      return assemble_impl<Dim, 2>(mesh, cfg, opts);
  }
  throw std::invalid_argument("assemble: unsupported (dim, k)");
}

template <int Dim>
double global_weighted_dof(const SimplicialMesh& mesh, const ProblemConfig<Dim>& cfg, int k,
                           int entity, const VectorField<Dim>& u) {
  if (k == 1) {
    if constexpr (Dim == 3) {
      const auto rule = segment_rule(5);
      const Vec<Dim> a = mesh.vertices.row(mesh.edges(entity, 0)).transpose();
      const Vec<Dim> b = mesh.vertices.row(mesh.edges(entity, 1)).transpose();
      std::vector<double> g, f, w;
      for (int p = 0; p < rule.size(); ++p) {
        const Vec<Dim> x = rule.bary[p](0) * a + rule.bary[p](1) * b;
        g.push_back(cfg.theta(x).dot(x));
        f.push_back(u(x).dot(b - a));
        w.push_back(rule.weights[p]);
      }
      return detail::shifted_weighted_dof(g, f, w, 1.0);
    }
    throw std::invalid_argument("global_weighted_dof: k=1 needs dim 3");
  }
  if (k != 2) throw std::invalid_argument("global_weighted_dof: k in {1,2}");

  if constexpr (Dim == 2) {
    const auto rule = segment_rule(5);
    const Vec2 a = mesh.vertices.row(mesh.edges(entity, 0)).transpose();
    const Vec2 b = mesh.vertices.row(mesh.edges(entity, 1)).transpose();
    const Vec2 n = perp(Vec2((b - a).normalized()));
    const double len = (b - a).norm();
    std::vector<double> g, f, w;
    for (int p = 0; p < rule.size(); ++p) {
      const Vec2 x = rule.bary[p](0) * a + rule.bary[p](1) * b;
      g.push_back(cfg.theta(x).dot(x));
      f.push_back(u(x).dot(n));
      w.push_back(rule.weights[p]);
    }
    return detail::shifted_weighted_dof(g, f, w, len);
  } else {
    const auto rule = triangle_rule(4);
    Eigen::Matrix3d FX;
    for (int v = 0; v < 3; ++v) FX.col(v) = mesh.vertices.row(mesh.facets(entity, v)).transpose();
    const Vec3 nraw = (FX.col(1) - FX.col(0)).cross(FX.col(2) - FX.col(0));
    const double area = 0.5 * nraw.norm();
    const Vec3 n = nraw.normalized();
    std::vector<double> g, f, w;
    for (int p = 0; p < rule.size(); ++p) {
      const Vec3 x = FX * rule.bary[p];
      g.push_back(cfg.theta(x).dot(x));
      f.push_back(u(x).dot(n));
      w.push_back(rule.weights[p]);
    }
    return detail::shifted_weighted_dof(g, f, w, area);
  }
}

template <int Dim>
ReducedSystem apply_dirichlet(const SimplicialMesh& mesh, const SparseSystem& system,
                              const ProblemConfig<Dim>& cfg) {
  const DofMap& dm = system.dofs;
  ReducedSystem red;
  red.dofs = dm;
  red.boundary_values = Eigen::VectorXd::Zero(dm.n_dofs);

  const bool have_data = (cfg.k == 0) ? bool(cfg.dirichlet_scalar) : bool(cfg.dirichlet_vector);
  if (have_data) {
    for (int d = 0; d < dm.n_dofs; ++d) {
      if (!dm.on_boundary[d]) continue;
      if (cfg.k == 0) {
        const Vec<Dim> x = mesh.vertices.row(d).transpose();
        red.boundary_values(d) = cfg.dirichlet_scalar(x);
      } else {
        red.boundary_values(d) = global_weighted_dof<Dim>(mesh, cfg, cfg.k, d, cfg.dirichlet_vector);
      }
    }
  }

  const int nf = dm.n_free();
  if (nf == 0) throw SolverError("apply_dirichlet: no free DOFs (all-boundary system)");

  std::vector<Eigen::Triplet<double>> trips;
  red.rhs = Eigen::VectorXd::Zero(nf);
  for (int r = 0; r < dm.n_dofs; ++r) {
    const int fr = dm.free_index[r];
    if (fr < 0) continue;
    red.rhs(fr) = system.rhs(r);
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(system.A, r); it; ++it) {
      const int fc = dm.free_index[int(it.col())];
      if (fc >= 0)
        trips.emplace_back(fr, fc, it.value());
      else
        red.rhs(fr) -= it.value() * red.boundary_values(it.col());
    }
  }
  red.A.resize(nf, nf);
  red.A.setFromTriplets(trips.begin(), trips.end());
  red.A.makeCompressed();
  return red;
}

template SparseSystem assemble<2>(const SimplicialMesh&, const ProblemConfig<2>&,
                                  const AssemblyOptions&);
template SparseSystem assemble<3>(const SimplicialMesh&, const ProblemConfig<3>&,
                                  const AssemblyOptions&);
template ReducedSystem apply_dirichlet<2>(const SimplicialMesh&, const SparseSystem&,
                                          const ProblemConfig<2>&);
template ReducedSystem apply_dirichlet<3>(const SimplicialMesh&, const SparseSystem&,
                                          const ProblemConfig<3>&);
template double global_weighted_dof<2>(const SimplicialMesh&, const ProblemConfig<2>&, int, int,
                                       const VectorField<2>&);
template double global_weighted_dof<3>(const SimplicialMesh&, const ProblemConfig<3>&, int, int,
                                       const VectorField<3>&);

}  // namespace expfem
