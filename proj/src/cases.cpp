#include "expfem/cases.hpp"

#include <cmath>

namespace expfem {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

ManufacturedCase<2> make_case_div2d() {
  ManufacturedCase<2> mc;
  mc.name = "div2d";
  mc.k = 2;
  mc.beta = [](const Vec2& x) { return Vec2(-x(1), x(0)); };
  mc.gamma = [](const Vec2&) { return 1.0; };

  auto u1 = [](double x, double y) { return x * y * (1 - x) * (1 - y); };
  auto u2 = [](double x, double y) { return std::sin(kPi * x) * std::sin(kPi * y); };
  mc.exact_vector = [=](const Vec2& p) { return Vec2(u1(p(0), p(1)), u2(p(0), p(1))); };

  auto div_u = [](double x, double y) {
    return y * (1 - y) * (1 - 2 * x) + kPi * std::sin(kPi * x) * std::cos(kPi * y);
  };
  auto beta_u = [=](double x, double y) { return -y * u1(x, y) + x * u2(x, y); };

  mc.flux_scalar = [=](double eps) {
    return ScalarField<2>(
        [=](const Vec2& p) { return eps * div_u(p(0), p(1)) + beta_u(p(0), p(1)); });
  };

  mc.load_vector = [=](double eps) {
    return VectorField<2>([=](const Vec2& p) {
      const double x = p(0), y = p(1);
      const double sx = std::sin(kPi * x), cx = std::cos(kPi * x);
      const double sy = std::sin(kPi * y), cy = std::cos(kPi * y);
      // d/dx and d/dy of the exact flux
      const double ddx = eps * (-2 * y * (1 - y) + kPi * kPi * cx * cy)
                         + (-y * y * (1 - y) * (1 - 2 * x) + sx * sy + kPi * x * cx * sy);
      const double ddy = eps * ((1 - 2 * y) * (1 - 2 * x) - kPi * kPi * sx * sy)
                         + (-x * (1 - x) * (2 * y - 3 * y * y) + kPi * x * sx * cy);
      return Vec2(-ddx + u1(x, y), -ddy + u2(x, y));
    });
  };
  return mc;
}

ManufacturedCase<2> make_case_grad2d() {
  ManufacturedCase<2> mc;
  mc.name = "grad2d";
  mc.k = 0;
  mc.beta = [](const Vec2& x) { return Vec2(-x(1), x(0)); };
  mc.gamma = [](const Vec2&) { return 1.0; };

  mc.exact_scalar = [](const Vec2& p) { return std::sin(kPi * p(0)) * std::sin(kPi * p(1)); };
  auto grad_u = [](const Vec2& p) {
    return Vec2(kPi * std::cos(kPi * p(0)) * std::sin(kPi * p(1)),
                kPi * std::sin(kPi * p(0)) * std::cos(kPi * p(1)));
  };

  mc.flux_vector = [=](double eps) {
    return VectorField<2>([=](const Vec2& p) {
      const double u = std::sin(kPi * p(0)) * std::sin(kPi * p(1));
      return Vec2(eps * grad_u(p) + Vec2(-p(1), p(0)) * u);
    });
  };
  mc.load_scalar = [=](double eps) {
    return ScalarField<2>([=](const Vec2& p) {
      const double u = std::sin(kPi * p(0)) * std::sin(kPi * p(1));
      // div beta = 0, so -div(eps grad u + beta u) = 2 pi^2 eps u - beta . grad u
      return 2 * kPi * kPi * eps * u - Vec2(-p(1), p(0)).dot(grad_u(p)) + u;
    });
  };
  return mc;
}

ManufacturedCase<3> make_case_curl3d() {
  ManufacturedCase<3> mc;
  mc.name = "curl3d";
  mc.k = 1;
  mc.beta = [](const Vec3& x) { return Vec3(x(1), x(2), x(0)); };
  mc.gamma = [](const Vec3&) { return 1.0; };

  mc.exact_vector = [](const Vec3& x) {
    return Vec3(std::sin(x(2)), std::sin(x(0)), std::sin(x(1)));
  };
  auto curl_u = [](const Vec3& x) {
    return Vec3(std::cos(x(1)), std::cos(x(2)), std::cos(x(0)));
  };

  mc.flux_vector = [=](double eps) {
    return VectorField<3>([=](const Vec3& x) {
      const Vec3 u(std::sin(x(2)), std::sin(x(0)), std::sin(x(1)));
      return Vec3(eps * curl_u(x) + Vec3(x(1), x(2), x(0)).cross(u));
    });
  };
  mc.load_vector = [=](double eps) {
    return VectorField<3>([=](const Vec3& x) {
      // curl curl u = u for this field; curl(beta x u) worked out by hand.
      return Vec3((1 + eps) * std::sin(x(2)) + std::sin(x(0)) - x(0) * std::cos(x(2)),
                  (1 + eps) * std::sin(x(0)) + std::sin(x(1)) - x(1) * std::cos(x(0)),
                  (1 + eps) * std::sin(x(1)) + std::sin(x(2)) - x(2) * std::cos(x(1)));
    });
  };
  return mc;
}

ManufacturedCase<3> make_case_grad3d() {
  ManufacturedCase<3> mc;
  mc.name = "grad3d";
  mc.k = 0;
  mc.beta = [](const Vec3& x) { return Vec3(x(1), x(2), x(0)); };
  mc.gamma = [](const Vec3&) { return 1.0; };

  auto u = [](const Vec3& x) {
    return std::sin(kPi * x(0)) * std::sin(kPi * x(1)) * std::sin(kPi * x(2));
  };
  auto grad_u = [](const Vec3& x) {
    const double s0 = std::sin(kPi * x(0)), c0 = std::cos(kPi * x(0));
    const double s1 = std::sin(kPi * x(1)), c1 = std::cos(kPi * x(1));
    const double s2 = std::sin(kPi * x(2)), c2 = std::cos(kPi * x(2));
    return Vec3(kPi * c0 * s1 * s2, kPi * s0 * c1 * s2, kPi * s0 * s1 * c2);
  };
  mc.exact_scalar = u;
  mc.flux_vector = [=](double eps) {
    return VectorField<3>(
        [=](const Vec3& x) { return Vec3(eps * grad_u(x) + Vec3(x(1), x(2), x(0)) * u(x)); });
  };
  mc.load_scalar = [=](double eps) {
    return ScalarField<3>([=](const Vec3& x) {
      return 3 * kPi * kPi * eps * u(x) + Vec3(x(1), x(2), x(0)).dot(grad_u(x)) + u(x);
    });
  };
  return mc;
}

ManufacturedCase<3> make_case_div3d() {
  ManufacturedCase<3> mc;
  mc.name = "div3d";
  mc.k = 2;
  mc.beta = [](const Vec3& x) { return Vec3(x(1), x(2), x(0)); };
  mc.gamma = [](const Vec3&) { return 1.0; };

  mc.exact_vector = [](const Vec3& x) {
    return Vec3(std::sin(kPi * x(0)), std::sin(kPi * x(1)), std::sin(kPi * x(2)));
  };
  mc.flux_scalar = [](double eps) {
    return ScalarField<3>([eps](const Vec3& x) {
      const double div_u =
          kPi * (std::cos(kPi * x(0)) + std::cos(kPi * x(1)) + std::cos(kPi * x(2)));
      const double beta_u =
          x(1) * std::sin(kPi * x(0)) + x(2) * std::sin(kPi * x(1)) + x(0) * std::sin(kPi * x(2));
      return eps * div_u + beta_u;
    });
  };
  mc.load_vector = [](double eps) {
    return VectorField<3>([eps](const Vec3& x) {
      const double s0 = std::sin(kPi * x(0)), s1 = std::sin(kPi * x(1)), s2 = std::sin(kPi * x(2));
      const double c0 = std::cos(kPi * x(0)), c1 = std::cos(kPi * x(1)), c2 = std::cos(kPi * x(2));
      const double d0 = -eps * kPi * kPi * s0 + kPi * x(1) * c0 + s2;
      const double d1 = -eps * kPi * kPi * s1 + s0 + kPi * x(2) * c1;
      const double d2 = -eps * kPi * kPi * s2 + s1 + kPi * x(0) * c2;
      return Vec3(-d0 + s0, -d1 + s1, -d2 + s2);
    });
  };
  return mc;
}

}  // namespace expfem
