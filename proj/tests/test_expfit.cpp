#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "expfem/expfit.hpp"
#include "expfem/testing/oracles.hpp"
#include "expfem/whitney.hpp"

using namespace expfem;
namespace tst = expfem::testing;

namespace {

template <int Dim>
ProblemConfig<Dim> config_with(VectorField<Dim> beta, double eps) {
  ProblemConfig<Dim> cfg;
  cfg.eps = eps;
  cfg.beta = std::move(beta);
  cfg.gamma = [](const Vec<Dim>&) { return 1.0; };
  return cfg;
}

template <int Dim>
VectorField<Dim> constant_field(const Vec<Dim>& c) {
  return [c](const Vec<Dim>&) { return c; };
}

}  // namespace

TEST_CASE("grad spline: beta=0 reduces to P1 with flux eps grad") {
  std::mt19937_64 rng(101);
  for (int t = 0; t < 10; ++t) {
    auto g = tst::random_cell<3>(rng);
    const Vec3 x = tst::random_point_in<3>(g, rng);
    const double eps = (t % 2) ? 1.0 : 0.37;
    auto pb = point_basis<3, 0>(g, Vec3::Zero(), eps, x);
    const auto lam = g.barycentric(x);
    for (int i = 0; i <= 3; ++i) {
      CHECK(pb.values(0, i) == doctest::Approx(lam(i)).epsilon(1e-12));
      CHECK((pb.fluxes.col(i) - eps * g.grad_lambda.col(i)).norm() <= 1e-12 * eps * g.grad_lambda.col(i).norm());
    }
  }
}

TEST_CASE("grad spline: vertex Kronecker and determinant identity") {
  std::mt19937_64 rng(102);
  for (int t = 0; t < 10; ++t) {
    auto g = tst::random_cell<3>(rng);
    auto beta = tst::random_affine_field<3>(rng, 3.0);
    const double eps = 0.1;

    for (int j = 0; j <= 3; ++j) {
      auto pb = point_basis<3, 0>(g, beta(g.vertex(j)), eps, g.vertex(j));
      for (int i = 0; i <= 3; ++i)
        CHECK(pb.values(0, i) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-10));
    }

    // det D^V = 6 |T| sum_i lambda_i B1(sigma_i), and system residual.
    const Vec3 x = tst::random_point_in<3>(g, rng);
    const Vec3 b(1.0, 2.0, 3.0);
    auto pb = point_basis<3, 0>(g, b, 0.1, x);
    const auto lam = g.barycentric(x);
    double det_ref = 0;
    for (int i = 0; i <= 3; ++i) det_ref += lam(i) * bernoulli1(b.dot(g.vertex(i) - x), 0.1);
    det_ref *= 6.0 * g.volume;
    CHECK(pb.det == doctest::Approx(det_ref).epsilon(1e-10));
    CHECK(pb.det > 0);

    Eigen::Matrix4d D;
    Eigen::Matrix4d R;
    detail::build_point_system<double, 3, 0, StdBernoulli>(g, b, 0.1, x, D, R);
    Eigen::Matrix4d sol;
    sol.topRows(3) = pb.fluxes;
    sol.row(3) = pb.values;
    CHECK((D * sol - R).cwiseAbs().maxCoeff() <= 1e-12 * D.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("curl spline: beta=0 reduces to the Whitney edge basis") {
  std::mt19937_64 rng(103);
  for (int t = 0; t < 10; ++t) {
    auto g = tst::random_cell<3>(rng);
    const Vec3 x = tst::random_point_in<3>(g, rng);
    const double eps = 0.42;
    auto pb = point_basis<3, 1>(g, Vec3::Zero(), eps, x);
    const auto W = nedelec_values(g, x);
    const auto C = nedelec_curls(g);
    for (int e = 0; e < 6; ++e) {
      CHECK((pb.values.col(e) - W.col(e)).norm() <= 1e-12 * std::max(1.0, W.col(e).norm()));
      CHECK((pb.fluxes.col(e) - eps * C.col(e)).norm() <= 1e-12 * eps * C.col(e).norm());
    }
  }
}

TEST_CASE("curl spline: edge-trace Kronecker for variable beta") {
  std::mt19937_64 rng(104);
  for (int t = 0; t < 8; ++t) {
    auto g = tst::random_cell<3>(rng);
    auto beta = tst::random_affine_field<3>(rng, 4.0);
    const double eps = (t % 2) ? 1.0 : 0.05;
    std::uniform_real_distribution<double> u(0.05, 0.95);

    int q = 0;
    for (auto [s, tt] : local_edges<3>()) {
      const double frac = u(rng);
      const Vec3 x = (1 - frac) * g.vertex(s) + frac * g.vertex(tt);
      auto pb = point_basis<3, 1>(g, beta(x), eps, x);
      const Vec3 tangent = g.tangent(s, tt);
      const double len = g.edge_length(s, tt);
      for (int e = 0; e < 6; ++e) {
        const double expected = (e == q) ? 1.0 / len : 0.0;
        CHECK(pb.values.col(e).dot(tangent) == doctest::Approx(expected).epsilon(1e-9).scale(1.0 / len));
      }
      ++q;
    }
  }
}

TEST_CASE("curl spline: vanishing tangential trace on non-containing facets") {
  std::mt19937_64 rng(105);
  for (int t = 0; t < 8; ++t) {
    auto g = tst::random_cell<3>(rng);
    auto beta = tst::random_affine_field<3>(rng, 3.0);
    const double eps = 0.2;

    for (int f = 0; f <= 3; ++f) {
      // Random point on facet f.
      Eigen::Matrix<double, 3, 3> FX;
      int q = 0;
      for (int v = 0; v <= 3; ++v)
        if (v != f) FX.col(q++) = g.vertex(v);
      Eigen::Vector3d bary(0.3, 0.45, 0.25);
      const Vec3 x = FX * bary;
      const Vec3 n = g.outward_normal(f);

      auto pb = point_basis<3, 1>(g, beta(x), eps, x);
      int e = 0;
      for (auto [i, j] : local_edges<3>()) {
        if (i == f || j == f) {
          // Edge not contained in facet f: tangential trace vanishes.
          CHECK(n.cross(pb.values.col(e)).norm() <= 1e-9);
        }
        ++e;
      }
    }
  }
}

TEST_CASE("div spline: beta=0 reduces to RT0; facet Kronecker for variable beta") {
  std::mt19937_64 rng(106);
  for (int t = 0; t < 8; ++t) {
    auto g = tst::random_cell<3>(rng);
    const Vec3 x = tst::random_point_in<3>(g, rng);
    const double eps = 0.63;
    auto pb = point_basis<3, 2>(g, Vec3::Zero(), eps, x);
    const auto R = rt_values(g, x);
    for (int f = 0; f <= 3; ++f) {
      CHECK((pb.values.col(f) - R.col(f)).norm() <= 1e-11 * std::max(1.0, R.col(f).norm()));
      CHECK(pb.fluxes(0, f) == doctest::Approx(eps / g.volume).epsilon(1e-11));
    }

    auto beta = tst::random_affine_field<3>(rng, 4.0);
    for (int f = 0; f <= 3; ++f) {
      Eigen::Matrix<double, 3, 3> FX;
      int q = 0;
      for (int v = 0; v <= 3; ++v)
        if (v != f) FX.col(q++) = g.vertex(v);
      Eigen::Vector3d bary(0.2, 0.5, 0.3);
      const Vec3 xf = FX * bary;
      auto pf = point_basis<3, 2>(g, beta(xf), 0.08, xf);
      const Vec3 n = g.outward_normal(f);
      const double area = g.facet_measure(f);
      for (int b = 0; b <= 3; ++b) {
        const double expected = (b == f) ? 1.0 / area : 0.0;
        CHECK(pf.values.col(b).dot(n) == doctest::Approx(expected).epsilon(1e-9).scale(1.0 / area));
      }
    }
  }
}

TEST_CASE("div spline 2D: beta=0 reduces to RT0; edge Kronecker; constant flux") {
  std::mt19937_64 rng(107);
  for (int t = 0; t < 8; ++t) {
    auto g = tst::random_cell<2>(rng);
    const Vec2 x = tst::random_point_in<2>(g, rng);
    const double eps = 0.8;
    auto pb = point_basis<2, 2>(g, Vec2::Zero(), eps, x);
    const auto R = rt_values(g, x);
    for (int f = 0; f <= 2; ++f) {
      CHECK((pb.values.col(f) - R.col(f)).norm() <= 1e-11 * std::max(1.0, R.col(f).norm()));
      CHECK(pb.fluxes(0, f) == doctest::Approx(eps / g.volume).epsilon(1e-11));
    }

    auto beta = tst::random_affine_field<2>(rng, 3.0);
    for (int f = 0; f <= 2; ++f) {
      int a = -1, b = -1;
      for (int v = 0; v <= 2; ++v) {
        if (v == f) continue;
        if (a < 0) a = v; else b = v;
      }
      std::uniform_real_distribution<double> u(0.1, 0.9);
      const double s = u(rng);
      const Vec2 xf = (1 - s) * g.vertex(a) + s * g.vertex(b);
      auto pf = point_basis<2, 2>(g, beta(xf), 0.05, xf);
      const Vec2 n = g.outward_normal(f);
      const double len = g.facet_measure(f);
      for (int c = 0; c <= 2; ++c) {
        const double expected = (c == f) ? 1.0 / len : 0.0;
        CHECK(pf.values.col(c).dot(n) == doctest::Approx(expected).epsilon(1e-9).scale(1.0 / len));
      }
    }

    // Constant beta: the flux of each basis function is constant in the cell
    // and equals eps * (facet mean of E_theta) / (cell integral of E_theta).
    const Vec2 bconst(1.3, -0.4);
    auto p1 = point_basis<2, 2>(g, bconst, 0.3, tst::random_point_in<2>(g, rng));
    auto p2 = point_basis<2, 2>(g, bconst, 0.3, tst::random_point_in<2>(g, rng));
    for (int f = 0; f <= 2; ++f)
      CHECK(p1.fluxes(0, f) == doctest::Approx(p2.fluxes(0, f)).epsilon(1e-9));
  }
}

TEST_CASE("constants are contained in the fitted spaces with flux beta x c / beta . c") {
  std::mt19937_64 rng(108);
  for (int t = 0; t < 6; ++t) {
    auto g = tst::random_cell<3>(rng);
    auto beta = tst::random_affine_field<3>(rng, 2.5);
    const double eps = (t % 2) ? 0.5 : 0.02;
    const Vec3 c(0.7, -1.1, 0.4);
    const Vec3 x = tst::random_point_in<3>(g, rng);

    // k=1: edge DOFs of a constant are c . E_ij.
    Eigen::Matrix<double, 6, 1> dofs1;
    int q = 0;
    for (auto [i, j] : local_edges<3>()) dofs1(q++) = c.dot(g.edge_vector(i, j));
    auto pb1 = point_basis<3, 1>(g, beta(x), eps, x);
    CHECK((pb1.value_of(dofs1) - c).norm() <= 1e-9 * c.norm());
    CHECK((pb1.flux_of(dofs1) - beta(x).cross(c)).norm() <= 1e-8 * std::max(1.0, beta(x).cross(c).norm()));

    // k=2: facet DOFs of a constant are c . n |F|.
    Eigen::Vector4d dofs2;
    for (int f = 0; f <= 3; ++f) dofs2(f) = c.dot(g.outward_normal(f)) * g.facet_measure(f);
    auto pb2 = point_basis<3, 2>(g, beta(x), eps, x);
    CHECK((pb2.value_of(dofs2) - c).norm() <= 1e-9 * c.norm());
    CHECK(pb2.flux_of(dofs2)(0) == doctest::Approx(beta(x).dot(c)).epsilon(1e-8));
  }
}

TEST_CASE("determinant positivity across random cells, velocities, eps") {
  std::mt19937_64 rng(109);
  std::uniform_real_distribution<double> mag(0.0, 100.0);
  const double eps_list[] = {1.0, 1e-2, 1e-4, 1e-6};
  for (int t = 0; t < 60; ++t) {
    auto g = tst::random_cell<3>(rng);
    auto beta = tst::random_affine_field<3>(rng, mag(rng));
    const double eps = eps_list[t % 4];
    const Vec3 x = tst::random_point_in<3>(g, rng);
    CHECK(point_basis<3, 0>(g, beta(x), eps, x).det_sign > 0);
    CHECK(point_basis<3, 1>(g, beta(x), eps, x).det_sign > 0);
    CHECK(point_basis<3, 2>(g, beta(x), eps, x).det_sign > 0);
  }
  for (int t = 0; t < 40; ++t) {
    auto g = tst::random_cell<2>(rng);
    auto beta = tst::random_affine_field<2>(rng, mag(rng));
    const double eps = eps_list[t % 4];
    const Vec2 x = tst::random_point_in<2>(g, rng);
    CHECK(point_basis<2, 0>(g, beta(x), eps, x).det_sign > 0);
    CHECK(point_basis<2, 2>(g, beta(x), eps, x).det_sign > 0);
  }
}

TEST_CASE("conformity: traces agree between two cells sharing a facet") {
  std::mt19937_64 rng(110);
  for (int t = 0; t < 12; ++t) {
    // Two tetrahedra sharing the facet {v1, v2, v3}.
    auto gA = tst::random_cell<3>(rng);
    const Vec3 v1 = gA.vertex(1), v2 = gA.vertex(2), v3 = gA.vertex(3);
    const Vec3 nshared = ((v2 - v1).cross(v3 - v1)).normalized();
    const Vec3 fc = (v1 + v2 + v3) / 3.0;
    const double side = (gA.vertex(0) - fc).dot(nshared) > 0 ? -1.0 : 1.0;
    Eigen::Matrix<double, 3, 4> XB;
    XB.col(0) = fc + side * nshared * (0.4 + 0.2 * (t % 3));  // opposite side
    XB.col(1) = v1;
    XB.col(2) = v2;
    XB.col(3) = v3;
    if (signed_volume<3>(XB) < 0) XB.col(2).swap(XB.col(3));
    auto gB = make_cell_geometry<3>(XB);

    auto beta = tst::random_affine_field<3>(rng, 3.0);
    const double eps = (t % 2) ? 1.0 : 0.05;
    Eigen::Vector3d bary(0.25, 0.35, 0.40);
    const Vec3 x = bary(0) * v1 + bary(1) * v2 + bary(2) * v3;

    auto pbA = point_basis<3, 1>(gA, beta(x), eps, x);
    auto pbB = point_basis<3, 1>(gB, beta(x), eps, x);

    // Match the shared edges by their physical endpoints and compare
    // tangential traces n x phi.
    auto edge_index = [&](const CellGeometry<3>& g, const Vec3& a, const Vec3& b, double& sign) {
      int q = 0;
      for (auto [i, j] : local_edges<3>()) {
        if ((g.vertex(i) - a).norm() < 1e-12 && (g.vertex(j) - b).norm() < 1e-12) {
          sign = 1.0;
          return q;
        }
        if ((g.vertex(i) - b).norm() < 1e-12 && (g.vertex(j) - a).norm() < 1e-12) {
          sign = -1.0;
          return q;
        }
        ++q;
      }
      return -1;
    };
    const Vec3 shared[3][2] = {{v1, v2}, {v1, v3}, {v2, v3}};
    for (const auto& e : shared) {
      double sA = 0, sB = 0;
      const int iA = edge_index(gA, e[0], e[1], sA);
      const int iB = edge_index(gB, e[0], e[1], sB);
      REQUIRE(iA >= 0);
      REQUIRE(iB >= 0);
      const Vec3 trA = sA * nshared.cross(pbA.values.col(iA));
      const Vec3 trB = sB * nshared.cross(pbB.values.col(iB));
      CHECK((trA - trB).norm() <= 1e-9 * std::max(1.0, trA.norm()));
    }

    // k=2 normal traces: shared facet is local facet 0 in both cells.
    auto pdA = point_basis<3, 2>(gA, beta(x), eps, x);
    auto pdB = point_basis<3, 2>(gB, beta(x), eps, x);
    const double sgnA = gA.outward_normal(0).dot(nshared) > 0 ? 1.0 : -1.0;
    const double sgnB = gB.outward_normal(0).dot(nshared) > 0 ? 1.0 : -1.0;
    const double trA = sgnA * pdA.values.col(0).dot(nshared);
    const double trB = sgnB * pdB.values.col(0).dot(nshared);
    CHECK(trA == doctest::Approx(trB).epsilon(1e-9));
  }
}

TEST_CASE("weighted interpolation: identity on the fitted space, canonical at theta=0") {
  std::mt19937_64 rng(111);
  for (int t = 0; t < 5; ++t) {
    auto g = tst::random_cell<3>(rng);
    auto beta = tst::random_affine_field<3>(rng, 2.0);
    auto cfg = config_with<3>(beta, 0.3);

    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::Matrix<double, 6, 1> c1;
    for (int i = 0; i < 6; ++i) c1(i) = u(rng);
    auto w1 = [&](const Vec3& x) {
      return Vec3(point_basis<3, 1>(g, beta(x), cfg.eps, x).value_of(c1));
    };
    const auto back1 = weighted_interp_curl(g, cfg, w1);
    CHECK((back1 - c1).cwiseAbs().maxCoeff() <= 1e-10 * std::max(1.0, c1.cwiseAbs().maxCoeff()));

    Eigen::Vector4d c2;
    for (int i = 0; i < 4; ++i) c2(i) = u(rng);
    auto w2 = [&](const Vec3& x) {
      return Vec3(point_basis<3, 2>(g, beta(x), cfg.eps, x).value_of(c2));
    };
    const auto back2 = weighted_interp_div<3>(g, cfg, w2);
    CHECK((back2 - c2).cwiseAbs().maxCoeff() <= 1e-10 * std::max(1.0, c2.cwiseAbs().maxCoeff()));

    // theta = 0 reduces to canonical interpolation.
    auto cfg0 = config_with<3>(constant_field<3>(Vec3::Zero()), 1.0);
    VectorField<3> smooth = [](const Vec3& x) {
      return Vec3(std::sin(x(0)), x(1) * x(2), std::exp(0.2 * x(2)));
    };
    const auto wd = weighted_interp_div<3>(g, cfg0, smooth);
    const auto cd = canonical_dofs_rt<3>(g, smooth);
    CHECK((wd - cd).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, cd.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("kernel preservation and discrete complex for constant theta") {
  // The 1e-8 identities hold up to the weighted-DOF quadrature error, so
  // theta * h stays inside the validity envelope of the degree-4 rules.
  std::mt19937_64 rng(112);
  for (int t = 0; t < 6; ++t) {
    auto g = tst::random_cell<3>(rng, 0.5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const Vec3 bvec = 0.08 * Vec3(u(rng), u(rng), u(rng));
    const double eps = (t % 2) ? 1.0 : 0.7;
    auto cfg = config_with<3>(constant_field<3>(bvec), eps);
    const Vec3 theta = bvec / eps;
    auto E_minus = [theta](const Vec3& x) { return std::exp(-theta.dot(x)); };

    auto flux_scale = [](const auto& pb, const auto& coeffs) {
      double s = 0;
      for (int i = 0; i < coeffs.size(); ++i) s += std::abs(coeffs(i)) * pb.fluxes.col(i).norm();
      return std::max(s, 1e-14);
    };

    // k=0: w = E_{-theta} * const has zero discrete flux.
    auto w0 = [&](const Vec3& x) { return 1.7 * E_minus(x); };
    const auto c0 = weighted_interp_grad<3>(g, cfg, w0);
    for (int rep = 0; rep < 5; ++rep) {
      const Vec3 x = tst::random_point_in<3>(g, rng);
      auto pb = point_basis<3, 0>(g, bvec, eps, x);
      CHECK(pb.flux_of(c0).norm() <= 1e-8 * flux_scale(pb, c0));
    }

    // k=1: w = E_{-theta} grad q for a random quadratic q.
    const Vec3 a0(u(rng), u(rng), u(rng));
    Eigen::Matrix3d Q;
    Q.setZero();
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) Q(i, j) = u(rng);
    auto grad_q = [&](const Vec3& x) { return Vec3(a0 + (Q + Q.transpose()) * x); };
    auto w1 = [&](const Vec3& x) { return Vec3(E_minus(x) * grad_q(x)); };
    const auto c1 = weighted_interp_curl(g, cfg, w1);
    for (int rep = 0; rep < 5; ++rep) {
      const Vec3 x = tst::random_point_in<3>(g, rng);
      auto pb = point_basis<3, 1>(g, bvec, eps, x);
      CHECK(pb.flux_of(c1).norm() <= 1e-8 * flux_scale(pb, c1));
    }

    // k=2: w = E_{-theta} curl q for a random polynomial vector q.
    Eigen::Matrix3d A;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) A(i, j) = u(rng);
    auto q_poly = [&](const Vec3& x) { return Vec3(A * x + Vec3(x(1) * x(2), x(0) * x(0), x(0) * x(1))); };
    auto w2 = [&](const Vec3& x) { return Vec3(E_minus(x) * tst::curl_fd(q_poly, x, 1e-4)); };
    const auto c2 = weighted_interp_div<3>(g, cfg, w2);
    for (int rep = 0; rep < 5; ++rep) {
      const Vec3 x = tst::random_point_in<3>(g, rng);
      auto pb = point_basis<3, 2>(g, bvec, eps, x);
      CHECK(std::abs(pb.flux_of(c2)(0)) <= 1e-8 * flux_scale(pb, c2));
    }

    // Composition-zero: Pi^{k+1} J^k w lies in the kernel of the next
    // discrete flux. Quadratic w keeps the smooth factor inside the exactness
    // degree of the weighted-DOF rules.
    auto wsm = [&](const Vec3& x) {
      return 0.3 * x(0) * x(0) + x(0) * x(1) - 0.5 * x(2) * x(2) + x(1) + 1.0;
    };
    auto grad_wsm = [&](const Vec3& x) {
      return Vec3(0.6 * x(0) + x(1), x(0) + 1.0, -x(2));
    };
    auto J0w = [&](const Vec3& x) { return Vec3(eps * grad_wsm(x) + bvec * wsm(x)); };
    const auto cJ0 = weighted_interp_curl(g, cfg, J0w);
    for (int rep = 0; rep < 3; ++rep) {
      const Vec3 x = tst::random_point_in<3>(g, rng);
      auto pb = point_basis<3, 1>(g, bvec, eps, x);
      CHECK(pb.flux_of(cJ0).norm() <= 1e-8 * flux_scale(pb, cJ0));
    }
    VectorField<3> wv = [](const Vec3& x) {
      return Vec3(x(1) * x(2), x(0) * x(0), 0.5 * x(1) * x(1) + x(2));
    };
    auto curl_wv = [](const Vec3& x) { return Vec3(x(1), x(1), 2.0 * x(0) - x(2)); };
    auto J1w = [&](const Vec3& x) { return Vec3(eps * curl_wv(x) + bvec.cross(wv(x))); };
    const auto cJ1 = weighted_interp_div<3>(g, cfg, J1w);
    for (int rep = 0; rep < 3; ++rep) {
      const Vec3 x = tst::random_point_in<3>(g, rng);
      auto pb = point_basis<3, 2>(g, bvec, eps, x);
      CHECK(std::abs(pb.flux_of(cJ1)(0)) <= 1e-8 * flux_scale(pb, cJ1));
    }
  }
}

TEST_CASE("kernel preservation under stronger convection (quadrature-limited)") {
  std::mt19937_64 rng(213);
  for (int t = 0; t < 4; ++t) {
    auto g = tst::random_cell<3>(rng, 0.5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const Vec3 bvec = 0.8 * Vec3(u(rng), u(rng), u(rng));
    const double eps = 1.0;
    auto cfg = config_with<3>(constant_field<3>(bvec), eps);
    const Vec3 theta = bvec / eps;
    auto E_minus = [theta](const Vec3& x) { return std::exp(-theta.dot(x)); };

    const Vec3 a0(u(rng), u(rng), u(rng));
    auto w1 = [&](const Vec3& x) { return Vec3(E_minus(x) * a0); };
    const auto c1 = weighted_interp_curl(g, cfg, w1);
    for (int rep = 0; rep < 3; ++rep) {
      const Vec3 x = tst::random_point_in<3>(g, rng);
      auto pb = point_basis<3, 1>(g, bvec, eps, x);
      double scale = 0;
      for (int i = 0; i < 6; ++i) scale += std::abs(c1(i)) * pb.fluxes.col(i).norm();
      CHECK(pb.flux_of(c1).norm() <= 1e-3 * std::max(scale, 1e-12));
    }
  }
}

TEST_CASE("commutativity of flux and interpolation for constant theta") {
  std::mt19937_64 rng(113);
  for (int t = 0; t < 6; ++t) {
    auto g = tst::random_cell<3>(rng, 0.5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const Vec3 bvec = 0.04 * Vec3(u(rng), u(rng), u(rng));
    const double eps = (t % 2) ? 1.0 : 0.7;
    auto cfg = config_with<3>(constant_field<3>(bvec), eps);

    // k=0 square: Pi^1 J^0 w = J^0_T Pi^0 w.
    auto w = [&](const Vec3& x) { return 0.4 * x(0) * x(0) - x(1) * x(2) + 0.7 * x(1) + 0.2; };
    auto grad_w = [&](const Vec3& x) { return Vec3(0.8 * x(0), -x(2) + 0.7, -x(1)); };
    auto J0w = [&](const Vec3& x) { return Vec3(eps * grad_w(x) + bvec * w(x)); };
    const auto lhs_coeffs = weighted_interp_curl(g, cfg, J0w);
    const auto rhs_coeffs = weighted_interp_grad<3>(g, cfg, w);
    for (int rep = 0; rep < 4; ++rep) {
      const Vec3 x = tst::random_point_in<3>(g, rng);
      const Vec3 lhs = point_basis<3, 1>(g, bvec, eps, x).value_of(lhs_coeffs);
      const Vec3 rhs = point_basis<3, 0>(g, bvec, eps, x).flux_of(rhs_coeffs);
      CHECK((lhs - rhs).norm() <= 1e-8 * std::max(1.0, rhs.norm()));
    }

    // k=1 square: Pi^2 J^1 w = J^1_T Pi^1 w.
    VectorField<3> wv = [](const Vec3& x) {
      return Vec3(x(1) * x(2) + 0.3 * x(0), x(0) * x(0) - 0.5 * x(2), 0.5 * x(1) * x(1) + x(2) * x(0));
    };
    auto curl_wv = [](const Vec3& x) { return Vec3(x(1) + 0.5, x(1) - x(2), 2.0 * x(0) - x(2)); };
    auto J1w = [&](const Vec3& x) { return Vec3(eps * curl_wv(x) + bvec.cross(wv(x))); };
    const auto lhs1 = weighted_interp_div<3>(g, cfg, J1w);
    const auto rhs1 = weighted_interp_curl(g, cfg, wv);
    for (int rep = 0; rep < 4; ++rep) {
      const Vec3 x = tst::random_point_in<3>(g, rng);
      const Vec3 lhs = point_basis<3, 2>(g, bvec, eps, x).value_of(lhs1);
      const Vec3 rhs = point_basis<3, 1>(g, bvec, eps, x).flux_of(rhs1);
      CHECK((lhs - rhs).norm() <= 1e-8 * std::max(1.0, rhs.norm()));
    }

    // k=2 square: Pi^3 J^2 w = J^2_T Pi^2 w (both piecewise constants).
    auto div_wv = [](const Vec3& x) { return 0.3 + x(0); };
    auto J2w = [&](const Vec3& x) { return eps * div_wv(x) + bvec.dot(wv(x)); };
    const double lhs_dg = weighted_interp_dg<3>(g, cfg, J2w) / g.volume;
    const auto rhs2 = weighted_interp_div<3>(g, cfg, wv);
    const Vec3 x = tst::random_point_in<3>(g, rng);
    const double rhs_val = point_basis<3, 2>(g, bvec, eps, x).flux_of(rhs2)(0);
    CHECK(lhs_dg == doctest::Approx(rhs_val).epsilon(1e-8));
  }
}

TEST_CASE("piola maps: identity, covariance against direct solve, orientation guard") {
  std::mt19937_64 rng(114);
  auto ref3 = reference_cell<3>();

  // Identity map leaves basis and flux unchanged.
  const Vec3 xr(0.2, 0.3, 0.1);
  auto pb = point_basis<3, 1>(ref3, Vec3(1.0, -2.0, 0.5), 0.2, xr);
  auto same = piola_map_basis<3, 1>(pb, Eigen::Matrix3d::Identity());
  CHECK((same.values - pb.values).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK((same.fluxes - pb.fluxes).cwiseAbs().maxCoeff() <= 1e-14);

  for (int t = 0; t < 6; ++t) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::Matrix3d B;
    do {
      for (int i = 0; i < 9; ++i) B(i / 3, i % 3) = u(rng);
    } while (B.determinant() < 0.15);
    const Vec3 shift(u(rng), u(rng), u(rng));
    auto beta = tst::random_affine_field<3>(rng, 2.0);
    const double eps = 0.3;

    Eigen::Matrix<double, 3, 4> XP = (B * ref3.X).colwise() + shift;
    auto phys = make_cell_geometry<3>(XP);
    const Vec3 xhat(0.25, 0.25, 0.2);
    const Vec3 x = B * xhat + shift;

    // k=0,1,2 covariance; reference velocity is B^T beta(F(xhat)).
    const Vec3 beta_hat = B.transpose() * beta(x);
    {
      auto r = point_basis<3, 0>(ref3, beta_hat, eps, xhat);
      auto mapped = piola_map_basis<3, 0>(r, B);
      auto direct = point_basis<3, 0>(phys, beta(x), eps, x);
      CHECK((mapped.values - direct.values).cwiseAbs().maxCoeff() <= 1e-10);
      CHECK((mapped.fluxes - direct.fluxes).cwiseAbs().maxCoeff() <=
            1e-10 * std::max(1.0, direct.fluxes.cwiseAbs().maxCoeff()));
    }
    {
      auto r = point_basis<3, 1>(ref3, beta_hat, eps, xhat);
      auto mapped = piola_map_basis<3, 1>(r, B);
      auto direct = point_basis<3, 1>(phys, beta(x), eps, x);
      CHECK((mapped.values - direct.values).cwiseAbs().maxCoeff() <=
            1e-10 * std::max(1.0, direct.values.cwiseAbs().maxCoeff()));
      CHECK((mapped.fluxes - direct.fluxes).cwiseAbs().maxCoeff() <=
            1e-10 * std::max(1.0, direct.fluxes.cwiseAbs().maxCoeff()));
    }
    {
      auto r = point_basis<3, 2>(ref3, beta_hat, eps, xhat);
      auto mapped = piola_map_basis<3, 2>(r, B);
      auto direct = point_basis<3, 2>(phys, beta(x), eps, x);
      CHECK((mapped.values - direct.values).cwiseAbs().maxCoeff() <=
            1e-10 * std::max(1.0, direct.values.cwiseAbs().maxCoeff()));
      CHECK((mapped.fluxes - direct.fluxes).cwiseAbs().maxCoeff() <=
            1e-10 * std::max(1.0, direct.fluxes.cwiseAbs().maxCoeff()));
    }
  }

  Eigen::Matrix3d flip = Eigen::Matrix3d::Identity();
  flip(0, 0) = -1.0;
  auto pb2 = point_basis<3, 2>(ref3, Vec3(1, 0, 0), 0.5, xr);
  CHECK_THROWS_AS((piola_map_basis<3, 2>(pb2, Eigen::Matrix3d::Zero())), std::invalid_argument);
  CHECK_THROWS_AS((piola_map_basis<3, 2>(pb2, flip)), std::invalid_argument);
}
