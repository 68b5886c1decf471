#pragma once

#include <functional>
#include <string>

#include "expfem/expfit.hpp"
#include "expfem/types.hpp"

namespace expfem {

/// A manufactured convection-diffusion problem: exact solution, velocity and
/// reaction fields, and the analytically derived flux and load as functions
/// of the diffusion coefficient.
template <int Dim>
struct ManufacturedCase {
  std::string name;
  int k = 0;
  VectorField<Dim> beta;
  ScalarField<Dim> gamma;

  ScalarField<Dim> exact_scalar;  // k = 0
  VectorField<Dim> exact_vector;  // k = 1, 2

  std::function<VectorField<Dim>(double)> flux_vector;  // k = 0, 1
  std::function<ScalarField<Dim>(double)> flux_scalar;  // k = 2
  std::function<ScalarField<Dim>(double)> load_scalar;  // k = 0
  std::function<VectorField<Dim>(double)> load_vector;  // k = 1, 2

  ProblemConfig<Dim> config(double eps) const {
    ProblemConfig<Dim> cfg;
    cfg.k = k;
    cfg.eps = eps;
    cfg.beta = beta;
    cfg.gamma = gamma;
    if (k == 0) {
      cfg.load_scalar = load_scalar(eps);
      cfg.dirichlet_scalar = exact_scalar;
    } else {
      cfg.load_vector = load_vector(eps);
      cfg.dirichlet_vector = exact_vector;
    }
    return cfg;
  }
};

// Unit-square / unit-cube test problems. div2d and curl3d are the tabulated
// reference cases; the others complete the CLI coverage.
ManufacturedCase<2> make_case_div2d();
ManufacturedCase<2> make_case_grad2d();
ManufacturedCase<3> make_case_curl3d();
ManufacturedCase<3> make_case_grad3d();
ManufacturedCase<3> make_case_div3d();

}  // namespace expfem
