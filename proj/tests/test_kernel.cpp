#include <random>

#include <gtest/gtest.h>

#include <diracres/dirac.hpp>
#include <diracres/kernel.hpp>
#include <diracres/surface.hpp>

#include "oracles.hpp"

using namespace diracres;

namespace {

std::vector<surface::SurfacePoint> sample_points() {
  std::vector<surface::SurfacePoint> out;
  for (cplx z : {cplx(0.4, 0.7), cplx(1.8, 0.3), cplx(-1.2, 1.1), cplx(0.0, 2.0)}) {
    const auto p = surface::lift_physical(z);
    out.push_back(p);
    out.push_back(surface::reflect(p));
  }
  return out;
}

}  // namespace

TEST(Kernel, DiracEquationAwayFromOrigin) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (const auto& at : sample_points()) {
    for (int t = 0; t < 8; ++t) {
      Vec3 x(u(rng), u(rng), u(rng));
      x *= (0.5 + 1.5 * std::abs(u(rng))) / x.norm();
      const auto f = [&](const Vec3& y) { return Mat4(kernel::eval_f(at, y)); };
      Mat4 res = (dirac::beta() - at.z * Mat4::Identity()) * f(x);
      for (int j = 0; j < 3; ++j)
        res += dirac::alpha(j + 1) * (-kI) * Mat4(oracle::central_diff4(f, x, Vec3::Unit(j), 1e-3));
      EXPECT_LT(res.cwiseAbs().maxCoeff(), 1e-7);
    }
  }
}

TEST(Kernel, HelmholtzRadialProfile) {
  const cplx w(0.7, -0.4);
  const Vec3 x(0.3, -0.9, 0.4);
  const auto g = [&](const Vec3& y) { return kernel::helmholtz_g(w, y); };
  cplx lap = 0.0;
  const double h = 1e-3;
  for (int j = 0; j < 3; ++j)
    lap += (g(x + h * Vec3::Unit(j)) - 2.0 * g(x) + g(x - h * Vec3::Unit(j))) / (h * h);
  EXPECT_LT(std::abs(lap + w * w * g(x)), 1e-5);
}

TEST(Kernel, ApplyMatchesMatrix) {
  const auto at = surface::lift_physical(cplx(0.5, 0.5));
  Spinor4 p;
  p << 1.0, cplx(0.0, 2.0), -0.5, cplx(0.3, 0.1);
  const Vec3 x(0.2, 0.5, -1.0);
  EXPECT_LT((kernel::apply_f(at, x, p) - kernel::eval_f(at, x) * p).norm(), 1e-15);
  EXPECT_LT((kernel::alpha_dot_apply(x, p) - dirac::alpha_dot(x) * p).norm(), 1e-15);
  EXPECT_LT((kernel::beta_apply(p) - dirac::beta() * p).norm(), 1e-15);
}

TEST(Kernel, PoleAtOrigin) {
  EXPECT_THROW(kernel::eval_f(surface::lift_physical(cplx(0.0, 1.0)), Vec3::Zero()), Error);
}

TEST(Kernel, DecaysOnPhysicalSheetGrowsOnSecond) {
  const auto at = surface::lift_physical(cplx(1.5, 0.5));
  const Vec3 far(0.0, 0.0, 30.0);
  EXPECT_LT(kernel::eval_f(at, far).norm(), 1e-3);
  EXPECT_GT(kernel::eval_f(surface::reflect(at), far).norm(), 1e3);
}
