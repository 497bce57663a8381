#include <gtest/gtest.h>

#include <diracres/surface.hpp>

using namespace diracres;
using surface::Chart;

TEST(Surface, LiftPhysicalSatisfiesConstraint) {
  for (cplx z : {cplx(0.3, 0.5), cplx(2.0, 1.0), cplx(-1.5, -0.2), cplx(0.0, 2.0)}) {
    const auto p = surface::lift_physical(z);
    EXPECT_GT(p.omega.imag(), 0.0);
    EXPECT_LT(surface::constraint_residual(p), 1e-14);
  }
}

TEST(Surface, EssentialSpectrumRejected) {
  EXPECT_THROW(surface::lift_physical(cplx(2.0, 0.0)), Error);
}

TEST(Surface, ContinuationAcrossTheCutReachesSecondSheet) {
  const auto a = surface::lift_physical(cplx(1.5, 0.5));
  const auto b = surface::continue_to(a, cplx(1.5, -0.5), Chart::ZChart);
  EXPECT_LT(b.omega.imag(), 0.0);
  EXPECT_LT(surface::constraint_residual(b), 1e-12);
  // Crossing the real axis left of -1 also leaves the physical sheet.
  const auto c = surface::continue_to(a, cplx(-1.5, 0.5), Chart::ZChart);
  const auto d = surface::continue_to(c, cplx(-1.5, -0.5), Chart::ZChart);
  EXPECT_GT(std::abs(d.omega - surface::lift_physical(cplx(-1.5, -0.5)).omega), 1.0);
}

TEST(Surface, MonodromyNegatesOmega) {
  for (int sign : {1, -1}) {
    const auto once = surface::monodromy_loop(sign, 0.3);
    EXPECT_LT(std::abs(once.end.z - once.start.z), 1e-12);
    EXPECT_LT(std::abs(once.end.omega + once.start.omega), 1e-10);
    const auto twice = surface::monodromy_loop(sign, 0.3, 2);
    EXPECT_LT(std::abs(twice.end.omega - twice.start.omega), 1e-10);
  }
}

TEST(Surface, OmegaChartAgreesWithZChart) {
  const auto a = surface::lift_physical(cplx(0.8, 0.4));
  const auto b = surface::continue_to(a, a.omega + cplx(0.3, -0.2), Chart::OmegaChart);
  const auto back = surface::continue_to(b, a.z, Chart::ZChart);
  EXPECT_LT(std::abs(back.omega - a.omega), 1e-10);
}

TEST(Surface, SegmentThroughBranchPointRefused) {
  const auto a = surface::lift_physical(cplx(0.5, 0.0) + cplx(0.0, 1e-9));
  EXPECT_THROW(surface::continue_to(a, cplx(1.5, 0.0), Chart::ZChart), Error);
}
