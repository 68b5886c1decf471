#pragma once

#include <Eigen/Dense>

#include <stdexcept>

#include "expfem/geometry.hpp"
#include "expfem/quadrature.hpp"
#include "expfem/types.hpp"

namespace expfem {

// Lowest-order polynomial families used as Petrov-Galerkin test spaces and as
// the beta = 0 reference for the fitted spaces. All traces and degrees of
// freedom follow the cell-local convention: edge DOFs integrate against the
// local ascending tangent, facet DOFs against the outward normal.

enum class WhitneyFamily { lagrange_p1, nedelec0, rt0, dg0 };

/// Barycentric hat values at x.
template <int Dim>
Vec<Dim + 1> p1_values(const CellGeometry<Dim>& g, const Vec<Dim>& x) {
  return g.barycentric(x);
}

template <int Dim>
Eigen::Matrix<double, Dim, Dim + 1> p1_gradients(const CellGeometry<Dim>& g) {
  return g.grad_lambda;
}

/// Edge elements lambda_i grad lambda_j - lambda_j grad lambda_i, one column
/// per local edge (3D only).
inline Eigen::Matrix<double, 3, 6> nedelec_values(const CellGeometry<3>& g, const Vec3& x) {
  const Eigen::Vector4d lam = g.barycentric(x);
  Eigen::Matrix<double, 3, 6> W;
  int q = 0;
  for (auto [i, j] : local_edges<3>())
    W.col(q++) = lam(i) * g.grad_lambda.col(j) - lam(j) * g.grad_lambda.col(i);
  return W;
}

/// Constant curls 2 grad lambda_i x grad lambda_j.
inline Eigen::Matrix<double, 3, 6> nedelec_curls(const CellGeometry<3>& g) {
  Eigen::Matrix<double, 3, 6> C;
  int q = 0;
  for (auto [i, j] : local_edges<3>())
    C.col(q++) = 2.0 * g.grad_lambda.col(i).cross(g.grad_lambda.col(j));
  return C;
}

/// Raviart-Thomas basis (x - x_f) / (Dim |T|), unit outward-normal integral on
/// its own facet.
template <int Dim>
Eigen::Matrix<double, Dim, Dim + 1> rt_values(const CellGeometry<Dim>& g, const Vec<Dim>& x) {
  Eigen::Matrix<double, Dim, Dim + 1> R;
  for (int f = 0; f <= Dim; ++f) R.col(f) = (x - g.vertex(f)) / (Dim * g.volume);
  return R;
}

template <int Dim>
Vec<Dim + 1> rt_divergences(const CellGeometry<Dim>& g) {
  return Vec<Dim + 1>::Constant(1.0 / g.volume);
}

template <int Dim>
double dg0_value(const CellGeometry<Dim>& g) {
  return 1.0 / g.volume;
}

/// Family dispatch used by generic callers; hot paths use the typed functions.
template <int Dim>
Eigen::MatrixXd eval_whitney(WhitneyFamily family, const CellGeometry<Dim>& g, const Vec<Dim>& x) {
  switch (family) {
    case WhitneyFamily::lagrange_p1:
      return p1_values(g, x).transpose();
    case WhitneyFamily::nedelec0:
      if constexpr (Dim == 3) return nedelec_values(g, x);
      break;
    case WhitneyFamily::rt0:
      return rt_values(g, x);
    case WhitneyFamily::dg0:
      return Eigen::MatrixXd::Constant(1, 1, dg0_value(g));
  }
  throw std::invalid_argument("eval_whitney: family not available in this dimension");
}

/// Constant differentials: gradients (P1), curls (Nedelec), divergences (RT),
/// zero (DG0).
template <int Dim>
Eigen::MatrixXd eval_whitney_diff(WhitneyFamily family, const CellGeometry<Dim>& g) {
  switch (family) {
    case WhitneyFamily::lagrange_p1:
      return p1_gradients(g);
    case WhitneyFamily::nedelec0:
      if constexpr (Dim == 3) return nedelec_curls(g);
      break;
    case WhitneyFamily::rt0:
      return rt_divergences(g).transpose();
    case WhitneyFamily::dg0:
      return Eigen::MatrixXd::Zero(1, 1);
  }
  throw std::invalid_argument("eval_whitney_diff: family not available in this dimension");
}

// Canonical DOF functionals: point values, edge tangential integrals, facet
// outward-normal integrals, cell integrals. Fixed degree-4 Gauss rules.

template <int Dim>
Vec<Dim + 1> canonical_dofs_p1(const CellGeometry<Dim>& g, const ScalarField<Dim>& w) {
  Vec<Dim + 1> d;
  for (int i = 0; i <= Dim; ++i) d(i) = w(g.vertex(i));
  return d;
}

inline Eigen::Matrix<double, 6, 1> canonical_dofs_nedelec(const CellGeometry<3>& g,
                                                          const VectorField<3>& w) {
  const auto rule = segment_rule(5);
  Eigen::Matrix<double, 6, 1> d;
  int q = 0;
  for (auto [i, j] : local_edges<3>()) {
    const Vec3 a = g.vertex(i), b = g.vertex(j);
    double acc = 0;
    for (int p = 0; p < rule.size(); ++p) {
      const Vec3 x = rule.bary[p](0) * a + rule.bary[p](1) * b;
      acc += rule.weights[p] * w(x).dot(b - a);
    }
    d(q++) = acc;  // integral of w . t over the edge (|E| folded into b - a)
  }
  return d;
}

template <int Dim>
Vec<Dim + 1> canonical_dofs_rt(const CellGeometry<Dim>& g, const VectorField<Dim>& w) {
  const auto rule = facet_rule<Dim>(4);
  Vec<Dim + 1> d;
  for (int f = 0; f <= Dim; ++f) {
    Eigen::Matrix<double, Dim, Dim> FX;  // facet vertices
    int q = 0;
    for (int v = 0; v <= Dim; ++v)
      if (v != f) FX.col(q++) = g.vertex(v);
    const Vec<Dim> n = g.outward_normal(f);
    const double area = g.facet_measure(f);
    double acc = 0;
    for (int p = 0; p < rule.size(); ++p) {
      const Vec<Dim> x = map_point<Dim, Dim>(FX, rule.bary[p]);
      acc += rule.weights[p] * w(x).dot(n);
    }
    d(f) = acc * area;
  }
  return d;
}

template <int Dim>
double canonical_dof_dg0(const CellGeometry<Dim>& g, const ScalarField<Dim>& w) {
  const auto rule = cell_rule<Dim>(4);
  double acc = 0;
  for (int p = 0; p < rule.size(); ++p)
    acc += rule.weights[p] * w(map_point<Dim, Dim + 1>(g.X, rule.bary[p]));
  return acc * g.volume;
}

}  // namespace expfem
