#include "expfem/solve.hpp"

#include <Eigen/SparseLU>
#include <unsupported/Eigen/IterativeSolvers>

#include <chrono>
#include <sstream>

namespace expfem {

namespace {
constexpr int kDirectLimit = 300000;  // beyond this, switch to GMRES/ILU
}

Solution solve(const ReducedSystem& system, SolveMethod method, double tol) {
  const auto t0 = std::chrono::steady_clock::now();
  const int n = int(system.A.rows());
  if (n == 0) throw SolverError("solve: empty system");

  if (method == SolveMethod::automatic)
    method = (n <= kDirectLimit) ? SolveMethod::direct_lu : SolveMethod::gmres_ilu;

  Eigen::SparseMatrix<double> A = system.A;  // column-major copy for the solvers
  Eigen::VectorXd x;
  SolveReport report;

  if (method == SolveMethod::direct_lu) {
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success) throw SolverError("solve: sparse LU factorization failed");
    x = lu.solve(system.rhs);
    report.method = "direct-lu";
  } else {
    Eigen::GMRES<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>> gmres;
    gmres.setTolerance(tol);
    gmres.setMaxIterations(4000);
    gmres.set_restart(120);
    gmres.preconditioner().setFillfactor(20);
    gmres.compute(A);
    if (gmres.info() != Eigen::Success) throw SolverError("solve: ILU preconditioner failed");
    x = gmres.solve(system.rhs);
    report.method = "gmres-ilu";
    report.iterations = int(gmres.iterations());
    if (gmres.info() != Eigen::Success) {
      std::ostringstream ss;
      ss << "solve: GMRES did not converge, error " << gmres.error() << " after "
         << gmres.iterations() << " iterations";
      throw SolverError(ss.str());
    }
  }

  const double rhs_norm = system.rhs.norm();
  report.residual = (A * x - system.rhs).norm() / (rhs_norm > 0 ? rhs_norm : 1.0);
  if (!(report.residual <= std::max(tol, 1e-8)))
    throw SolverError("solve: residual above tolerance: " + std::to_string(report.residual));

  Solution sol;
  sol.coefficients = system.boundary_values;
  for (int f = 0; f < int(system.dofs.free_list.size()); ++f)
    sol.coefficients(system.dofs.free_list[f]) = x(f);
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  sol.report = report;
  return sol;
}

}  // namespace expfem
