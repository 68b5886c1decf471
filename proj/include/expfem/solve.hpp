#pragma once

#include <Eigen/Core>

#include <string>

#include "expfem/assemble.hpp"

namespace expfem {

enum class SolveMethod { automatic, direct_lu, gmres_ilu };

struct SolveReport {
  std::string method;
  int iterations = 0;       // 0 for direct solves
  double residual = 0.0;    // relative residual of the reduced system
  double seconds = 0.0;
};

struct Solution {
  Eigen::VectorXd coefficients;  // full DOF vector, boundary values included
  SolveReport report;
};

/// Solves the reduced system; sparse LU by default, ILU-preconditioned GMRES
/// for large systems or on request. Throws SolverError on breakdown.
Solution solve(const ReducedSystem& system, SolveMethod method = SolveMethod::automatic,
               double tol = 1e-10);

}  // namespace expfem
