#pragma once

#include <limits>
#include <string>
#include <vector>

#include "expfem/cases.hpp"
#include "expfem/solve.hpp"

namespace expfem {

struct ConvergenceRow {
  int inv_h = 0;
  double eps = 0.0;
  double err_solution = 0.0;
  double order_solution = std::numeric_limits<double>::quiet_NaN();
  double err_flux = 0.0;
  double order_flux = std::numeric_limits<double>::quiet_NaN();
};

struct ConvergenceTable {
  std::string case_name;
  std::vector<ConvergenceRow> rows;  // grouped by eps, levels ascending
};

/// Manufactured-solution refinement study; orders are log2 ratios of errors
/// on consecutive levels.
template <int Dim>
ConvergenceTable run_convergence(const ManufacturedCase<Dim>& mc, const std::vector<int>& levels,
                                 const std::vector<double>& eps_list,
                                 SolveMethod method = SolveMethod::automatic);

/// CSV with header inv_h,eps,err_solution,order_solution,err_flux,order_flux
/// and shortest round-trip formatting.
void write_csv(const ConvergenceTable& table, const std::string& path);
ConvergenceTable read_csv(const std::string& path);

extern template ConvergenceTable run_convergence<2>(const ManufacturedCase<2>&,
                                                    const std::vector<int>&,
                                                    const std::vector<double>&, SolveMethod);
extern template ConvergenceTable run_convergence<3>(const ManufacturedCase<3>&,
                                                    const std::vector<int>&,
                                                    const std::vector<double>&, SolveMethod);

}  // namespace expfem
