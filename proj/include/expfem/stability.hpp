#pragma once

#include <string>
#include <vector>

#include "expfem/solve.hpp"

namespace expfem {

struct StabilityResult {
  double eps = 0.0;
  double max_norm = 0.0;      // max over cells of the cell-average magnitude
  double max_jump = 0.0;      // layer-oscillation proxy: worst neighbor jump
  bool finite = false;
  std::string vtk_path;
};

/// Rotational-convection 2D H(div) demo with unit load: solves on the n x n
/// square for each eps, exports cell-average solution and flux to VTK, and
/// reports the max-norm plus a neighbor-jump oscillation indicator.
std::vector<StabilityResult> run_stability_demo(const std::vector<double>& eps_list, int n,
                                                const std::string& out_dir);

}  // namespace expfem
