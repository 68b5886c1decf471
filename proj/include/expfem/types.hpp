#pragma once

#include <Eigen/Core>
#include <functional>
#include <stdexcept>

namespace expfem {

template <int Dim>
using Vec = Eigen::Matrix<double, Dim, 1>;

using Vec2 = Vec<2>;
using Vec3 = Vec<3>;

template <int Dim>
using ScalarField = std::function<double(const Vec<Dim>&)>;

template <int Dim>
using VectorField = std::function<Vec<Dim>(const Vec<Dim>&)>;

/// Thrown when a cell is degenerate or a point query leaves the admissible set.
struct GeometryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown when a pointwise spline system cannot be factored reliably.
struct PointSolveError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown when the global linear solve breaks down or has no free unknowns.
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// 2D scalar cross product and clockwise rotation; the rotation convention
// fixes the global edge-normal orientation in 2D.
inline double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }
inline Vec2 perp(const Vec2& a) { return Vec2(a.y(), -a.x()); }

}  // namespace expfem
