#pragma once

#include <Eigen/Core>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "expfem/geometry.hpp"
#include "expfem/types.hpp"

namespace expfem {

/// Quadrature rule in barycentric coordinates; weights sum to one and are
/// applied against the measure of the mapped sub-simplex.
template <int NVert>
struct SimplexRule {
  std::vector<Eigen::Matrix<double, NVert, 1>> bary;
  std::vector<double> weights;
  int size() const { return int(weights.size()); }
};

/// Gauss rules on a segment, exact for polynomials of degree 3 (npts=2),
/// 5 (npts=3) and 9 (npts=5).
inline SimplexRule<2> segment_rule(int degree) {
  SimplexRule<2> r;
  auto add = [&r](double t, double w) {
    Eigen::Vector2d b(1.0 - t, t);
    r.bary.push_back(b);
    r.weights.push_back(w);
  };
  if (degree <= 3) {
    const double d = 0.5 / std::sqrt(3.0);
    add(0.5 - d, 0.5);
    add(0.5 + d, 0.5);
  } else if (degree <= 5) {
    const double d = 0.5 * std::sqrt(3.0 / 5.0);
    add(0.5 - d, 5.0 / 18.0);
    add(0.5, 8.0 / 18.0);
    add(0.5 + d, 5.0 / 18.0);
  } else {
    const double a1 = 0.5 * 0.9061798459386640, a2 = 0.5 * 0.5384693101056831;
    const double w1 = 0.5 * 0.2369268850561891, w2 = 0.5 * 0.4786286704993665;
    add(0.5 - a1, w1);
    add(0.5 - a2, w2);
    add(0.5, 0.5 * 0.5688888888888889);
    add(0.5 + a2, w2);
    add(0.5 + a1, w1);
  }
  return r;
}

/// Symmetric triangle rules, exact for degree 2 (3 points) or 4 (6 points).
inline SimplexRule<3> triangle_rule(int degree) {
  SimplexRule<3> r;
  auto add3 = [&r](double a, double w) {
    const double b = 1.0 - 2.0 * a;
    r.bary.push_back({b, a, a});
    r.bary.push_back({a, b, a});
    r.bary.push_back({a, a, b});
    r.weights.insert(r.weights.end(), 3, w);
  };
  if (degree <= 2) {
    add3(1.0 / 6.0, 1.0 / 3.0);
  } else {
    add3(0.445948490915965, 0.223381589678011);
    add3(0.091576213509771, 0.109951743655322);
  }
  return r;
}

/// Symmetric tetrahedron rules, exact for degree 2 (4 points) or 5 (14 points).
inline SimplexRule<4> tetrahedron_rule(int degree) {
  SimplexRule<4> r;
  auto add4 = [&r](double a, double w) {
    const double b = 1.0 - 3.0 * a;
    for (int i = 0; i < 4; ++i) {
      Eigen::Vector4d p = Eigen::Vector4d::Constant(a);
      p(i) = b;
      r.bary.push_back(p);
      r.weights.push_back(w);
    }
  };
  auto add6 = [&r](double a, double w) {
    const double b = 0.5 - a;
    for (int i = 0; i < 4; ++i) {
      for (int j = i + 1; j < 4; ++j) {
        Eigen::Vector4d p = Eigen::Vector4d::Constant(b);
        p(i) = a;
        p(j) = a;
        r.bary.push_back(p);
        r.weights.push_back(w);
      }
    }
  };
  if (degree <= 2) {
    const double a = 0.138196601125011;  // (5 - sqrt(5)) / 20
    add4(a, 0.25);
  } else {
    add4(0.0927352503108912, 0.0734930431163619);
    add4(0.3108859192633006, 0.1126879257180159);
    add6(0.0455037041256497, 0.0425460207770812);
  }
  return r;
}

template <int Dim>
SimplexRule<Dim + 1> cell_rule(int degree) {
  if constexpr (Dim == 2)
    return triangle_rule(degree);
  else
    return tetrahedron_rule(degree);
}

/// Facet rule for a Dim-cell: segment in 2D, triangle in 3D.
template <int Dim>
SimplexRule<Dim> facet_rule(int degree) {
  if constexpr (Dim == 2)
    return segment_rule(degree);
  else
    return triangle_rule(degree);
}

/// Physical point of a barycentric quadrature node on simplex vertices.
template <int Dim, int NVert>
Vec<Dim> map_point(const Eigen::Matrix<double, Dim, NVert>& X,
                   const Eigen::Matrix<double, NVert, 1>& bary) {
  return X * bary;
}

}  // namespace expfem
