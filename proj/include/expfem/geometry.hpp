#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>

#include "expfem/types.hpp"

namespace expfem {

/// Local edge enumeration on a simplex: ascending pairs of vertex slots.
/// 2D: (0,1),(0,2),(1,2).  3D: (0,1),(0,2),(0,3),(1,2),(1,3),(2,3).
template <int Dim>
constexpr int num_local_edges() { return Dim * (Dim + 1) / 2; }

template <int Dim>
constexpr std::array<std::array<int, 2>, num_local_edges<Dim>()> local_edges() {
  std::array<std::array<int, 2>, num_local_edges<Dim>()> e{};
  int q = 0;
  for (int i = 0; i <= Dim; ++i)
    for (int j = i + 1; j <= Dim; ++j) e[q++] = {i, j};
  return e;
}

/// Per-cell geometric quantities of a nondegenerate simplex with positive
/// orientation: volume, barycenter, barycentric gradients, facet data.
template <int Dim>
struct CellGeometry {
  Eigen::Matrix<double, Dim, Dim + 1> X;            // vertex coordinates, one column each
  double volume = 0.0;                              // positive by construction
  Vec<Dim> barycenter = Vec<Dim>::Zero();
  Eigen::Matrix<double, Dim, Dim + 1> grad_lambda;  // constant barycentric gradients
  double diameter = 0.0;                            // longest edge

  Vec<Dim> vertex(int i) const { return X.col(i); }
  Vec<Dim> edge_vector(int i, int j) const { return X.col(j) - X.col(i); }
  double edge_length(int i, int j) const { return edge_vector(i, j).norm(); }
  Vec<Dim> tangent(int i, int j) const { return edge_vector(i, j).normalized(); }

  // Facet i is opposite vertex i; lambda_i vanishes there and grows inward.
  Vec<Dim> outward_normal(int i) const { return (-grad_lambda.col(i)).normalized(); }
  double facet_measure(int i) const { return Dim * volume * grad_lambda.col(i).norm(); }

  /// Barycentric coordinates; affine, sums to one.
  Vec<Dim + 1> barycentric(const Vec<Dim>& x) const {
    Vec<Dim + 1> lambda;
    for (int i = 0; i <= Dim; ++i)
      lambda(i) = 1.0 / double(Dim + 1) + grad_lambda.col(i).dot(x - barycenter);
    return lambda;
  }

  /// Sub-edge vectors l_i = x_i - x for all vertices.
  Eigen::Matrix<double, Dim, Dim + 1> sub_vectors(const Vec<Dim>& x) const {
    return X.colwise() - x;
  }

  bool contains(const Vec<Dim>& x, double tol = 1e-12) const {
    return barycentric(x).minCoeff() >= -tol;
  }
};

/// Signed volume of the simplex spanned by the columns of X.
template <int Dim>
double signed_volume(const Eigen::Matrix<double, Dim, Dim + 1>& X) {
  Eigen::Matrix<double, Dim, Dim> E;
  for (int j = 0; j < Dim; ++j) E.col(j) = X.col(j + 1) - X.col(0);
  double det = E.determinant();
  constexpr double fact = (Dim == 2) ? 2.0 : 6.0;
  return det / fact;
}

template <int Dim>
CellGeometry<Dim> make_cell_geometry(const Eigen::Matrix<double, Dim, Dim + 1>& X) {
  CellGeometry<Dim> g;
  g.X = X;
  g.barycenter = X.rowwise().mean();
  for (auto [i, j] : local_edges<Dim>())
    g.diameter = std::max(g.diameter, (X.col(j) - X.col(i)).norm());

  const double vol = signed_volume<Dim>(X);
  if (!(vol > 1e-14 * std::pow(g.diameter, Dim)))
    throw GeometryError("make_cell_geometry: degenerate or negatively oriented cell");
  g.volume = vol;

  // lambda_i(x) = lambda_i(b) + g_i . (x - b); gradients come from the inverse
  // edge matrix, with grad lambda_0 closing the partition of unity.
  Eigen::Matrix<double, Dim, Dim> E;
  for (int j = 0; j < Dim; ++j) E.col(j) = X.col(j + 1) - X.col(0);
  Eigen::Matrix<double, Dim, Dim> Einv = E.inverse();
  g.grad_lambda.col(0).setZero();
  for (int j = 0; j < Dim; ++j) {
    g.grad_lambda.col(j + 1) = Einv.row(j).transpose();
    g.grad_lambda.col(0) -= Einv.row(j).transpose();
  }
  return g;
}

/// Reference simplex: origin plus the canonical basis vectors.
template <int Dim>
CellGeometry<Dim> reference_cell() {
  Eigen::Matrix<double, Dim, Dim + 1> X = Eigen::Matrix<double, Dim, Dim + 1>::Zero();
  for (int j = 0; j < Dim; ++j) X(j, j + 1) = 1.0;
  return make_cell_geometry<Dim>(X);
}

}  // namespace expfem
