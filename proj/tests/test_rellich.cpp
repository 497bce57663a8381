#include <gtest/gtest.h>

#include <diracres/rellich.hpp>

using namespace diracres;

namespace {

grid::SpinorField source(const grid::GridPtr& g) {
  return grid::sample_spinor(
      g,
      [](const Vec3& x) {
        Spinor4 s;
        s << 1.0, x(0), cplx(0.0, x(1)), 0.5 * x(2) + 0.3;
        return Spinor4(s * grid::smooth_bump(x.norm()));
      },
      1.0);
}

}  // namespace

TEST(Rellich, RealPointsLieOnTheSurface) {
  for (int sign : {1, -1}) {
    const auto p = rellich::real_point(0.7, sign);
    EXPECT_LT(surface::constraint_residual(p), 1e-15);
    EXPECT_EQ(p.z.real() > 0, sign > 0);
  }
}

TEST(Rellich, ScanReportsTheWorstPoint) {
  const auto r = rellich::real_axis_scan(0.2, 2.0, 10, [](const surface::SurfacePoint& p) { return std::abs(p.omega.real() - 1.0); });
  EXPECT_EQ(r.points.size(), 20u);
  EXPECT_NEAR(r.minimum.kappa, 1.0, 1e-12);
  EXPECT_FALSE(r.pass);
  const auto ok = rellich::real_axis_scan(0.2, 2.0, 10, [](const surface::SurfacePoint&) { return 1.0; });
  EXPECT_TRUE(ok.pass);
}

TEST(Rellich, KappaRangeMustAvoidThreshold) {
  EXPECT_THROW(rellich::real_axis_scan(0.0, 1.0, 5, [](const surface::SurfacePoint&) { return 1.0; }), Error);
}

TEST(Rellich, NonHermitianPotentialRejected) {
  const auto g = grid::build_grid(2.0, 8);
  const auto v = grid::bump_potential(g, cplx(1.0, 0.5), dirac::beta(), 1.0);
  EXPECT_THROW(rellich::rellich_scan(v, 0.2, 2.0, 3, grid::cutoff(1.25, 1.75, g)), Error);
}

TEST(Rellich, FluxIsConservedAndApproachesTheAmplitudeLimit) {
  const auto g = grid::build_grid(1.25, 8);
  const auto phi = source(g);
  const double kappa = 1.0, lambda = std::sqrt(2.0);
  const auto rep = rellich::flux_identity_check(phi, lambda, kappa, {25.0, 50.0, 100.0}, sphere::default_rule());
  EXPECT_GT(rep.t_limit, 0.0);
  for (const auto& row : rep.rows) EXPECT_LT(row.residual, 1e-10 * rep.t_limit);
  EXPECT_NEAR(rep.rows[1].pointwise / rep.rows[2].pointwise, 2.0, 0.3);
}

TEST(Rellich, ZeroModeMatrixIdentity) {
  for (int sign : {1, -1})
    for (const Vec3& s : {Vec3(0, 0, 1), Vec3(0.6, 0.0, 0.8), Vec3(-0.36, 0.48, 0.8)})
      EXPECT_LT(rellich::zero_mode_identity_error(sign, s), 1e-15);
}
