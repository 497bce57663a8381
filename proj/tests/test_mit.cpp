#include <gtest/gtest.h>

#include <diracres/mit.hpp>

using namespace diracres;

TEST(Mit, ProjectorsSplitTheIdentity) {
  const Vec3 n = Vec3(0.3, -0.4, 1.2);
  const auto [qp, qm] = mit::q_projectors(n, 1.0);
  EXPECT_LT((qp + qm - Mat4::Identity()).norm(), 1e-15);
  EXPECT_LT((qp * qp - qp).norm(), 1e-14);
  EXPECT_LT((qp * qm).norm(), 1e-14);
  EXPECT_LT((qm - qm.adjoint()).norm(), 1e-14);
}

TEST(Mit, CurvatureOfTheExterior) {
  const auto geo = mit::make_geometry(1.5, 4.0, 16);
  EXPECT_DOUBLE_EQ(geo.curvature, -1.0 / 1.5);
  for (const Vec3& s : {Vec3(0, 0, 1), Vec3(0.6, 0.0, 0.8)})
    EXPECT_NEAR(mit::weingarten_mean_curvature(geo, s), -1.0 / 1.5, 1e-8);
  double area = 0.0;
  for (double w : geo.weights) area += w;
  EXPECT_NEAR(area, 4.0 * kPi * 2.25, 1e-12);
}

TEST(Mit, TestFunctionsSatisfyTheBoundaryCondition) {
  const auto geo = mit::make_geometry(1.5, 4.0, 24);
  for (const auto& f : mit::manufactured_family(geo, 3)) {
    const auto s = mit::surface_checks(f, 24);
    EXPECT_LT(s.trace_error, 1e-13);
    EXPECT_LT(s.flux, 1e-13);
    EXPECT_LT(s.p_error, 10.0 * s.step);
  }
}

TEST(Mit, InteriorFunctionsHaveNoBoundaryTerm) {
  const auto geo = mit::make_geometry(1.5, 4.0, 32);
  const auto fam = mit::manufactured_family(geo, 5, 1);
  const auto rep = mit::verify_sl_identity(fam[0], 32, 32);
  EXPECT_LT(rep.boundary, 1e-20);
  EXPECT_LT(rep.mismatch, 1e-3);
}

TEST(Mit, BoundaryCoefficientIsOneMinusInverseRadius) {
  const auto geo = mit::make_geometry(2.0, 4.5, 40);
  const auto fam = mit::manufactured_family(geo, 9, 2);
  const auto rep = mit::verify_sl_identity(fam[1], 40, 40);
  EXPECT_NEAR(rep.boundary_coefficient, 0.5, 0.02);
  EXPECT_LT(rep.mismatch_complete, 0.01);
}

TEST(Mit, InteriorPartMustVanishNearTheSphere) {
  const auto geo = mit::make_geometry(1.5, 4.0, 8);
  const mit::SpinorFn g = [](const Vec3&) { return Spinor4(Spinor4::Ones()); };
  EXPECT_THROW(mit::make_mit_function({}, g, geo), Error);
}
