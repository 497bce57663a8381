#include <gtest/gtest.h>

#include <diracres/search.hpp>

using namespace diracres;
using surface::Chart;

namespace {

// det = (z - a)(z - b)^2 on either sheet, with sigma_min ~ |det| near a zero.
const cplx kA(1.4, -0.6), kB(1.7, -0.3);

cplx synthetic(const surface::SurfacePoint& p) { return (p.z - kA) * (p.z - kB) * (p.z - kB); }

linalg::LogDet as_logdet(cplx d) { return {std::log(std::abs(d)), std::arg(d)}; }

search::LogDetFn synthetic_logdet() {
  return [](const surface::SurfacePoint& p) { return as_logdet(synthetic(p)); };
}

search::IndicatorFn synthetic_indicator() {
  return [](const surface::SurfacePoint& p) {
    bs::Indicator ind;
    const cplx d = synthetic(p);
    ind.logdet = as_logdet(d);
    ind.sigma_min = std::min(std::abs(p.z - kA), std::abs(p.z - kB));
    ind.singular = d == 0.0;
    return ind;
  };
}

}  // namespace

TEST(Search, WindingCountsZerosWithMultiplicity) {
  const auto start_at = [](cplx c) { return search::point_on_sheet(Chart::ZChart, c, -1); };
  const auto all = search::rectangle(cplx(1.2, -0.9), cplx(1.9, -0.1));
  EXPECT_EQ(search::winding_number(all, start_at(all[0]), Chart::ZChart, synthetic_logdet()).winding, 3);
  const auto only_b = search::circle_polygon(kB, 0.1);
  EXPECT_EQ(search::winding_number(only_b, start_at(only_b[0]), Chart::ZChart, synthetic_logdet()).winding, 2);
  const auto none = search::rectangle(cplx(1.1, -1.4), cplx(1.3, -1.2));
  EXPECT_EQ(search::winding_number(none, start_at(none[0]), Chart::ZChart, synthetic_logdet()).winding, 0);
}

TEST(Search, WindingStartMustBeOnFirstVertex) {
  const auto poly = search::circle_polygon(kA, 0.1);
  EXPECT_THROW(search::winding_number(poly, search::point_on_sheet(Chart::ZChart, kA, -1), Chart::ZChart, synthetic_logdet()),
               Error);
}

TEST(Search, RefineConvergesToSimpleAndDoubleZeros) {
  search::RefineOptions opt;
  opt.tol = 1e-9;
  for (cplx target : {kA, kB}) {
    const auto seed = search::point_on_sheet(Chart::ZChart, target + cplx(0.04, -0.03), -1);
    const auto rec = search::refine(seed, Chart::ZChart, synthetic_indicator(), opt);
    EXPECT_LT(std::abs(rec.location.z - target), 1e-8);
    EXPECT_LT(rec.newton_iterations, 12);
    EXPECT_LT(rec.location.omega.imag(), 0.0);
  }
}

TEST(Search, LocalMinimaOfScan) {
  search::ScanResult s;
  s.region = search::ScanRegion{Chart::ZChart, cplx(1.2, -0.9), cplx(1.9, -0.1), 3, 3, -1};
  s.cells.resize(9);
  for (int q = 0; q < 9; ++q) s.cells[q].sigma_min = 1.0 + q;
  s.cells[4].sigma_min = 0.1;
  s.cells[0].masked = true;
  const auto m = search::local_minima(s);
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m[0], 4u);
}

TEST(Search, RegionTouchingBranchPointRejected) {
  EXPECT_THROW(search::validate(search::ScanRegion{Chart::ZChart, cplx(0.5, -0.5), cplx(1.5, 0.5), 4, 4, -1}), Error);
}

TEST(Search, PointOnSheetPicksOmegaSign) {
  const auto p = search::point_on_sheet(Chart::ZChart, cplx(1.3, -0.4), -1);
  const auto q = search::point_on_sheet(Chart::ZChart, cplx(1.3, -0.4), 1);
  EXPECT_LT(p.omega.imag(), 0.0);
  EXPECT_GT(q.omega.imag(), 0.0);
  EXPECT_LT(surface::constraint_residual(p), 1e-13);
}
