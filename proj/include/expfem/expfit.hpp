#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <sstream>

#include "expfem/bernoulli.hpp"
#include "expfem/geometry.hpp"
#include "expfem/quadrature.hpp"
#include "expfem/types.hpp"

namespace expfem {

/// Data of one convection-diffusion problem in the unified k-form setting.
template <int Dim>
struct ProblemConfig {
  int k = 0;          // form degree: 0 grad, 1 curl (3D), 2 div
  double eps = 1.0;   // diffusion, > 0
  VectorField<Dim> beta;
  ScalarField<Dim> gamma;

  ScalarField<Dim> load_scalar;       // k = 0
  VectorField<Dim> load_vector;       // k = 1, 2
  ScalarField<Dim> dirichlet_scalar;  // boundary data (exact trace), k = 0
  VectorField<Dim> dirichlet_vector;  // boundary data, k = 1, 2

  Vec<Dim> theta(const Vec<Dim>& x) const { return beta(x) / eps; }

  void validate() const {
    if (!(eps > 0)) throw std::invalid_argument("ProblemConfig: eps must be positive");
    if (k < 0 || k > 2) throw std::invalid_argument("ProblemConfig: k in {0,1,2}");
    if (Dim == 2 && k == 1) throw std::invalid_argument("ProblemConfig: k=1 needs dim 3");
  }
};

template <int Dim, int K>
struct PointBasisTraits {
  static constexpr int n_loc = (K == 1) ? 6 : Dim + 1;       // local DOFs
  static constexpr int value_rows = (K == 0) ? 1 : Dim;      // scalar or vector basis
  static constexpr int flux_rows = (K == 2) ? 1 : Dim;       // vector or scalar flux
  static constexpr int n_sys = value_rows + flux_rows;       // square system size
};

/// Pointwise basis and auxiliary flux values of the fitted space S1-^K on one
/// cell, all local DOFs at once, plus factorization diagnostics.
template <int Dim, int K>
struct PointBasis {
  using Traits = PointBasisTraits<Dim, K>;
  Eigen::Matrix<double, Traits::value_rows, Traits::n_loc> values;
  Eigen::Matrix<double, Traits::flux_rows, Traits::n_loc> fluxes;
  double det = 0.0;        // determinant of the system matrix
  int det_sign = 0;        // sign from pivots; immune to value underflow
  double min_pivot = 0.0;  // smallest LU pivot magnitude
  bool refined = false;    // long double retry was needed

  Eigen::Matrix<double, Traits::value_rows, 1> value_of(
      const Eigen::Matrix<double, Traits::n_loc, 1>& coeffs) const {
    return values * coeffs;
  }
  Eigen::Matrix<double, Traits::flux_rows, 1> flux_of(
      const Eigen::Matrix<double, Traits::n_loc, 1>& coeffs) const {
    return fluxes * coeffs;
  }
};

namespace detail {

// Row layouts of the spline systems. The div rows hard-code the orientation
// signs for positively oriented cells: each first entry is the sub-simplex
// measure and each pair order makes the sub-facet normals outward.
inline constexpr int kDivPairs3[4][3][3] = {
    {{1, 2, 3}, {2, 3, 1}, {3, 1, 2}},
    {{2, 0, 3}, {0, 3, 2}, {3, 2, 0}},
    {{3, 0, 1}, {0, 1, 3}, {1, 3, 0}},
    {{0, 2, 1}, {2, 1, 0}, {1, 0, 2}}};
inline constexpr int kDivPairs2[3][2] = {{1, 2}, {2, 0}, {0, 1}};

template <class Real, int Dim, int K, class Policy>
void build_point_system(const CellGeometry<Dim>& geom, const Vec<Dim>& beta_x, double eps,
                        const Vec<Dim>& x,
                        Eigen::Matrix<Real, PointBasisTraits<Dim, K>::n_sys,
                                      PointBasisTraits<Dim, K>::n_sys>& D,
                        Eigen::Matrix<Real, PointBasisTraits<Dim, K>::n_sys,
                                      PointBasisTraits<Dim, K>::n_loc>& R) {
  using RVec = Eigen::Matrix<Real, Dim, 1>;
  const Real ep(eps);

  std::array<RVec, Dim + 1> l;
  std::array<Real, Dim + 1> sig;
  for (int i = 0; i <= Dim; ++i) {
    l[i] = (geom.vertex(i) - x).template cast<Real>();
    sig[i] = beta_x.template cast<Real>().dot(l[i]);
  }
  auto sig_edge = [&](int s, int t) { return sig[t] - sig[s]; };

  D.setZero();
  R.setZero();

  if constexpr (K == 0) {
    for (int r = 0; r <= Dim; ++r) {
      D.template block<1, Dim>(r, 0) = l[r].transpose();
      D(r, Dim) = Policy::template b1<Real>(sig[r], ep);
      R(r, r) = Policy::template b1<Real>(-sig[r], ep);
    }
  } else if constexpr (K == 1) {
    static_assert(Dim == 3);
    int q = 0;
    for (auto [s, t] : local_edges<3>()) {
      D.template block<1, 3>(q, 0) = Real(0.5) * l[s].cross(l[t]).transpose();
      D.template block<1, 3>(q, 3) =
          (-Policy::template b2<Real>(sig[s], sig[t], ep) * l[s] +
           Policy::template b2<Real>(sig[t], sig[s], ep) * l[t])
              .transpose();
      R(q, q) = Policy::template b2<Real>(sig_edge(s, t), -sig[s], ep);
      ++q;
    }
  } else if constexpr (Dim == 3) {  // K == 2, 3D
    for (int j = 0; j < 4; ++j) {
      const auto& rows = kDivPairs3[j];
      // |T_j| as the mixed product of the first row triple; positive for
      // positively oriented cells and x inside.
      D(j, 0) = l[rows[0][0]].cross(l[rows[0][1]]).dot(l[rows[0][2]]) / Real(6);
      for (int p = 0; p < 3; ++p) {
        const int s = rows[p][0], t = rows[p][1], r = rows[p][2];
        D.template block<1, 3>(j, 1) +=
            Policy::template b3<Real>(sig[s], sig[t], sig[r], ep) *
            (Real(0.5) * l[s].cross(l[t])).transpose();
      }
      int comp[3], q = 0;
      for (int v = 0; v < 4; ++v)
        if (v != j) comp[q++] = v;
      R(j, j) = Policy::template b3<Real>(sig_edge(comp[0], comp[1]), sig_edge(comp[0], comp[2]),
                                          -sig[comp[0]], ep);
    }
  } else {  // K == 2, 2D
    for (int j = 0; j < 3; ++j) {
      const int s = kDivPairs2[j][0], t = kDivPairs2[j][1];
      D(j, 0) = Real(0.5) * (l[s].x() * l[t].y() - l[s].y() * l[t].x());
      const RVec ps(l[s].y(), -l[s].x()), pt(l[t].y(), -l[t].x());
      D.template block<1, 2>(j, 1) =
          (-Policy::template b2<Real>(sig[s], sig[t], ep) * ps +
           Policy::template b2<Real>(sig[t], sig[s], ep) * pt)
              .transpose();
      R(j, j) = Policy::template b2<Real>(sig_edge(s, t), -sig[s], ep);
    }
  }
}

template <class Real, int Dim, int K, class Policy>
bool try_point_solve(const CellGeometry<Dim>& geom, const Vec<Dim>& beta_x, double eps,
                     const Vec<Dim>& x, PointBasis<Dim, K>& out) {
  using T = PointBasisTraits<Dim, K>;
  Eigen::Matrix<Real, T::n_sys, T::n_sys> D;
  Eigen::Matrix<Real, T::n_sys, T::n_loc> R;
  build_point_system<Real, Dim, K, Policy>(geom, beta_x, eps, x, D, R);

  Eigen::PartialPivLU<Eigen::Matrix<Real, T::n_sys, T::n_sys>> lu(D);
  const Real min_pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  const Real scale = D.cwiseAbs().rowwise().sum().maxCoeff();
  out.min_pivot = double(min_pivot);
  // Reported in the value-block-first column convention, in which the
  // well-posedness determinants are positive.
  constexpr double parity = (T::value_rows * T::flux_rows) % 2 == 0 ? 1.0 : -1.0;
  out.det = parity * double(lu.determinant());
  int sign = parity > 0 ? 1 : -1;
  sign *= int(lu.permutationP().determinant());
  for (int i = 0; i < T::n_sys; ++i) {
    const Real piv = lu.matrixLU()(i, i);
    if (piv < 0) sign = -sign;
    if (piv == 0) sign = 0;
  }
  out.det_sign = sign;
  if (!(min_pivot > Real(1e-13) * scale)) return false;

  Eigen::Matrix<Real, T::n_sys, T::n_loc> X = lu.solve(R);
  if constexpr (K == 2) {
    out.fluxes = X.template topRows<1>().template cast<double>();
    out.values = X.template bottomRows<Dim>().template cast<double>();
  } else {
    out.fluxes = X.template topRows<T::flux_rows>().template cast<double>();
    out.values = X.template bottomRows<T::value_rows>().template cast<double>();
  }
  return true;
}

}  // namespace detail

/// Solves the pointwise spline system for all local DOFs at x; one
/// factorization serves every right-hand side. Falls back to long double if
/// a pivot degenerates, then reports failure with the local data.
template <int Dim, int K, class Policy = StdBernoulli>
PointBasis<Dim, K> point_basis(const CellGeometry<Dim>& geom, const Vec<Dim>& beta_x, double eps,
                               const Vec<Dim>& x) {
  static_assert(K >= 0 && K <= 2);
  static_assert(!(K == 1 && Dim == 2), "curl spline needs dim 3");
  if (!(eps > 0)) throw std::invalid_argument("point_basis: eps must be positive");

  PointBasis<Dim, K> out;
  if (detail::try_point_solve<double, Dim, K, Policy>(geom, beta_x, eps, x, out)) return out;
  if (detail::try_point_solve<long double, Dim, K, Policy>(geom, beta_x, eps, x, out)) {
    out.refined = true;
    return out;
  }

  std::ostringstream ss;
  ss << "point_basis: singular spline system (k=" << K << ", dim=" << Dim << ") at x=["
     << x.transpose() << "], lambda=[" << geom.barycentric(x).transpose() << "], sigma=[";
  for (int i = 0; i <= Dim; ++i) ss << beta_x.dot(geom.vertex(i) - x) << (i < Dim ? " " : "]");
  ss << ", eps=" << eps;
  throw PointSolveError(ss.str());
}

/// Convenience wrappers named by the operator they fit.
template <int Dim, class Policy = StdBernoulli>
PointBasis<Dim, 0> solve_grad_point(const CellGeometry<Dim>& geom, const ProblemConfig<Dim>& cfg,
                                    const Vec<Dim>& x) {
  return point_basis<Dim, 0, Policy>(geom, cfg.beta(x), cfg.eps, x);
}

template <class Policy = StdBernoulli>
PointBasis<3, 1> solve_curl_point(const CellGeometry<3>& geom, const ProblemConfig<3>& cfg,
                                  const Vec3& x) {
  return point_basis<3, 1, Policy>(geom, cfg.beta(x), cfg.eps, x);
}

template <int Dim, class Policy = StdBernoulli>
PointBasis<Dim, 2> solve_div_point(const CellGeometry<Dim>& geom, const ProblemConfig<Dim>& cfg,
                                   const Vec<Dim>& x) {
  return point_basis<Dim, 2, Policy>(geom, cfg.beta(x), cfg.eps, x);
}

/// Local discrete flux of the coefficient vector at x.
template <int Dim, int K, class Policy = StdBernoulli>
Eigen::Matrix<double, PointBasisTraits<Dim, K>::flux_rows, 1> discrete_flux(
    const CellGeometry<Dim>& geom, const ProblemConfig<Dim>& cfg,
    const Eigen::Matrix<double, PointBasisTraits<Dim, K>::n_loc, 1>& coeffs, const Vec<Dim>& x) {
  return point_basis<Dim, K, Policy>(geom, cfg.beta(x), cfg.eps, x).flux_of(coeffs);
}

// ---------------------------------------------------------------------------
// Weighted interpolation: canonical DOFs of E_theta * w normalized by the
// sub-simplex mean of E_theta, with E_theta(x) = exp(beta(x) . x / eps)
// evaluated pointwise and a per-DOF shift for overflow safety.

namespace detail {

// (integral of e^{g} f over S) / (mean of e^{g} over S) evaluated from
// quadrature samples (g_q, f_q) and the measure of S.
inline double shifted_weighted_dof(const std::vector<double>& g, const std::vector<double>& f,
                                   const std::vector<double>& w, double measure) {
  double c = g[0];
  for (double v : g) c = std::max(c, v);
  double num = 0, den = 0;
  for (size_t q = 0; q < g.size(); ++q) {
    const double e = std::exp(g[q] - c);
    num += w[q] * e * f[q];
    den += w[q] * e;
  }
  return measure * num / den;
}

}  // namespace detail

/// Vertex interpolation; the exponential weight cancels exactly at points.
template <int Dim>
Vec<Dim + 1> weighted_interp_grad(const CellGeometry<Dim>& geom, const ProblemConfig<Dim>& cfg,
                                  const ScalarField<Dim>& w) {
  Vec<Dim + 1> d;
  for (int i = 0; i <= Dim; ++i) d(i) = w(geom.vertex(i));
  return d;
}

/// Edge DOFs weighted by E_theta (3D).
inline Eigen::Matrix<double, 6, 1> weighted_interp_curl(const CellGeometry<3>& geom,
                                                        const ProblemConfig<3>& cfg,
                                                        const VectorField<3>& w) {
  const auto rule = segment_rule(5);
  Eigen::Matrix<double, 6, 1> d;
  int q = 0;
  for (auto [i, j] : local_edges<3>()) {
    const Vec3 a = geom.vertex(i), b = geom.vertex(j);
    std::vector<double> g, f, wt;
    for (int p = 0; p < rule.size(); ++p) {
      const Vec3 x = rule.bary[p](0) * a + rule.bary[p](1) * b;
      g.push_back(cfg.theta(x).dot(x));
      f.push_back(w(x).dot(b - a));  // tangent times |E|
      wt.push_back(rule.weights[p]);
    }
    d(q++) = detail::shifted_weighted_dof(g, f, wt, 1.0);
  }
  return d;
}

/// Facet DOFs weighted by E_theta, outward-normal convention.
template <int Dim>
Vec<Dim + 1> weighted_interp_div(const CellGeometry<Dim>& geom, const ProblemConfig<Dim>& cfg,
                                 const VectorField<Dim>& w) {
  const auto rule = facet_rule<Dim>(4);
  Vec<Dim + 1> d;
  for (int fct = 0; fct <= Dim; ++fct) {
    Eigen::Matrix<double, Dim, Dim> FX;
    int q = 0;
    for (int v = 0; v <= Dim; ++v)
      if (v != fct) FX.col(q++) = geom.vertex(v);
    const Vec<Dim> n = geom.outward_normal(fct);
    std::vector<double> g, f, wt;
    for (int p = 0; p < rule.size(); ++p) {
      const Vec<Dim> x = map_point<Dim, Dim>(FX, rule.bary[p]);
      g.push_back(cfg.theta(x).dot(x));
      f.push_back(w(x).dot(n));
      wt.push_back(rule.weights[p]);
    }
    d(fct) = detail::shifted_weighted_dof(g, f, wt, geom.facet_measure(fct));
  }
  return d;
}

/// Cell DOF of the piecewise-constant space S1-^3.
template <int Dim>
double weighted_interp_dg(const CellGeometry<Dim>& geom, const ProblemConfig<Dim>& cfg,
                          const ScalarField<Dim>& w) {
  const auto rule = cell_rule<Dim>(4);
  std::vector<double> g, f, wt;
  for (int p = 0; p < rule.size(); ++p) {
    const Vec<Dim> x = map_point<Dim, Dim + 1>(geom.X, rule.bary[p]);
    g.push_back(cfg.theta(x).dot(x));
    f.push_back(w(x));
    wt.push_back(rule.weights[p]);
  }
  return detail::shifted_weighted_dof(g, f, wt, geom.volume);
}

// ---------------------------------------------------------------------------
// Piola scalings between a reference-cell evaluation (computed with the
// pulled-back velocity B^T beta(F(x))) and the physical cell.

template <int Dim, int K>
PointBasis<Dim, K> piola_map_basis(const PointBasis<Dim, K>& ref,
                                   const Eigen::Matrix<double, Dim, Dim>& B) {
  const double det = B.determinant();
  if (std::abs(det) < 1e-300) throw std::invalid_argument("piola_map_basis: singular map");
  if (K == 2 && det < 0)
    throw std::invalid_argument("piola_map_basis: orientation-reversing map for k=2");

  PointBasis<Dim, K> out = ref;
  const Eigen::Matrix<double, Dim, Dim> Binvt = B.inverse().transpose();
  if constexpr (K == 0) {
    out.fluxes = Binvt * ref.fluxes;
  } else if constexpr (K == 1) {
    out.values = Binvt * ref.values;
    out.fluxes = (B / det) * ref.fluxes;
  } else {
    out.values = (B / det) * ref.values;
    out.fluxes = ref.fluxes / det;
  }
  return out;
}

}  // namespace expfem
