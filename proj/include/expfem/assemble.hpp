#pragma once

#include <Eigen/Sparse>

#include "expfem/dofmap.hpp"
#include "expfem/expfit.hpp"
#include "expfem/mesh.hpp"

namespace expfem {

struct AssemblyStats {
  int n_cells = 0;
  int n_point_solves = 0;
  double seconds = 0.0;
};

/// Petrov-Galerkin system on the full DOF set (trial: fitted space, test:
/// polynomial space sharing the same entities); CSR layout, row = test DOF.
struct SparseSystem {
  Eigen::SparseMatrix<double, Eigen::RowMajor> A;
  Eigen::VectorXd rhs;
  DofMap dofs;
  AssemblyStats stats;
};

/// System after Dirichlet elimination: free unknowns only, boundary DOF
/// values moved to the right-hand side.
struct ReducedSystem {
  Eigen::SparseMatrix<double, Eigen::RowMajor> A;
  Eigen::VectorXd rhs;
  Eigen::VectorXd boundary_values;  // full-size, zero on free DOFs
  DofMap dofs;
};

struct AssemblyOptions {
  int reaction_quad_degree = 2;  // reaction and load quadrature
};

/// Assembles the unified convection-diffusion bilinear form: the flux block
/// uses one barycenter evaluation of the discrete flux per cell against the
/// exact integral of the constant test differential; reaction and load use
/// the configured simplex rule.
template <int Dim>
SparseSystem assemble(const SimplicialMesh& mesh, const ProblemConfig<Dim>& cfg,
                      const AssemblyOptions& opts = {});

/// Computes boundary DOF values by weighted interpolation of the Dirichlet
/// data (zero when no data is set) and eliminates them.
template <int Dim>
ReducedSystem apply_dirichlet(const SimplicialMesh& mesh, const SparseSystem& system,
                              const ProblemConfig<Dim>& cfg);

/// Weighted DOF value of the field u on one global entity (edge DOFs against
/// the ascending global tangent, facet DOFs against the global normal).
template <int Dim>
double global_weighted_dof(const SimplicialMesh& mesh, const ProblemConfig<Dim>& cfg, int k,
                           int entity, const VectorField<Dim>& u);

}  // namespace expfem
