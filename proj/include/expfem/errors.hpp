#pragma once

#include <Eigen/Core>

#include "expfem/cases.hpp"
#include "expfem/expfit.hpp"
#include "expfem/mesh.hpp"
#include "expfem/quadrature.hpp"

namespace expfem {

struct ErrorPair {
  double solution = 0.0;
  double flux = 0.0;
};

namespace detail {

template <int Dim, int K>
ErrorPair l2_errors_impl(const SimplicialMesh& mesh, const ProblemConfig<Dim>& cfg,
                         const Eigen::VectorXd& U, const ManufacturedCase<Dim>& mc,
                         int quad_degree) {
  using Traits = PointBasisTraits<Dim, K>;
  const auto rule = cell_rule<Dim>(quad_degree);
  const DofMap dm = build_dofmap(mesh, K);

  const auto exact_flux_v = (K != 2) ? mc.flux_vector(cfg.eps) : VectorField<Dim>();
  const auto exact_flux_s = (K == 2) ? mc.flux_scalar(cfg.eps) : ScalarField<Dim>();

  double err_u2 = 0.0, err_j2 = 0.0;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto geom = mesh.cell_geometry<Dim>(c);
    Eigen::Matrix<double, Traits::n_loc, 1> coeffs;
    for (int s = 0; s < Traits::n_loc; ++s)
      coeffs(s) = double(dm.cell_signs(c, s)) * U(dm.cell_dofs(c, s));

    for (int q = 0; q < rule.size(); ++q) {
      const Vec<Dim> xq = map_point<Dim, Dim + 1>(geom.X, rule.bary[q]);
      const double wq = rule.weights[q] * geom.volume;
      const auto pb = point_basis<Dim, K>(geom, cfg.beta(xq), cfg.eps, xq);

      if constexpr (K == 0) {
        const double uh = pb.value_of(coeffs)(0);
        const double du = uh - mc.exact_scalar(xq);
        err_u2 += wq * du * du;
        err_j2 += wq * (pb.flux_of(coeffs) - exact_flux_v(xq)).squaredNorm();
      } else if constexpr (K == 1) {
        err_u2 += wq * (pb.value_of(coeffs) - mc.exact_vector(xq)).squaredNorm();
        err_j2 += wq * (pb.flux_of(coeffs) - exact_flux_v(xq)).squaredNorm();
      } else {
        err_u2 += wq * (pb.value_of(coeffs) - mc.exact_vector(xq)).squaredNorm();
        const double dj = pb.flux_of(coeffs)(0) - exact_flux_s(xq);
        err_j2 += wq * dj * dj;
      }
    }
  }
  return {std::sqrt(err_u2), std::sqrt(err_j2)};
}

}  // namespace detail

/// L2 errors of the solution and of the discrete flux against the exact
/// fields, with the discrete side reconstructed through the pointwise solves.
template <int Dim>
ErrorPair l2_errors(const SimplicialMesh& mesh, const ProblemConfig<Dim>& cfg,
                    const Eigen::VectorXd& U, const ManufacturedCase<Dim>& mc,
                    int quad_degree = 4) {
  switch (cfg.k) {
    case 0:
      return detail::l2_errors_impl<Dim, 0>(mesh, cfg, U, mc, quad_degree);
    case 1:
      if constexpr (Dim == 3) return detail::l2_errors_impl<3, 1>(mesh, cfg, U, mc, quad_degree);
      break;
    case 2:
      return detail::l2_errors_impl<Dim, 2>(mesh, cfg, U, mc, quad_degree);
  }
  throw std::invalid_argument("l2_errors: unsupported (dim, k)");
}

}  // namespace expfem
