#include <gtest/gtest.h>

#include <diracres/grid.hpp>
#include <diracres/resolvent.hpp>
#include <diracres/sphere.hpp>

#include "oracles.hpp"

using namespace diracres;

TEST(Grid, CellCentredNodesAndWeights) {
  const auto g = grid::build_grid(2.0, 8);
  EXPECT_EQ(g->size(), 512u);
  EXPECT_DOUBLE_EQ(g->h, 0.5);
  double w = 0.0;
  for (double x : g->weights) w += x;
  EXPECT_NEAR(w, 64.0, 1e-12);
  EXPECT_DOUBLE_EQ(g->nodes[0](0), -1.75);
}

TEST(Grid, GaussianIntegral) {
  const auto g = grid::build_grid(5.0, 40);
  double s = 0.0;
  for (std::size_t i = 0; i < g->size(); ++i) s += std::exp(-g->nodes[i].squaredNorm()) * g->weights[i];
  EXPECT_NEAR(s, std::pow(kPi, 1.5), 1e-9);
}

TEST(Grid, SelfWeightConstantCorrectsTheLatticeSum) {
  // \int e^{-r^2}/r = 2 pi; dropping the origin node costs c* h^2.
  for (double h : {0.5, 0.25}) {
    const double bare = oracle::lattice_gaussian_over_r(h, 0.0);
    const double fixed = oracle::lattice_gaussian_over_r(h, resolvent::kLatticeSelfWeight);
    EXPECT_LT(std::abs(fixed - 2.0 * kPi), 0.05 * std::abs(bare - 2.0 * kPi)) << h;
  }
}

TEST(Grid, CutoffOrdering) {
  const auto g = grid::build_grid(2.0, 8);
  EXPECT_THROW(grid::cutoff(1.5, 1.2, g), Error);
  EXPECT_THROW(grid::cutoff(1.0, 2.5, g), Error);
  const auto rho = grid::cutoff(1.0, 1.5, g);
  const auto v = grid::bump_potential(g, 1.0, dirac::beta(), 0.9);
  EXPECT_TRUE(grid::precedes(v, rho));
  EXPECT_EQ(grid::cutoff_value(0.5, 1.0, 1.5), 1.0);
  EXPECT_EQ(grid::cutoff_value(1.6, 1.0, 1.5), 0.0);
}

TEST(Grid, FieldTextRoundTrip) {
  const auto g = grid::build_grid(1.0, 4);
  const auto phi = grid::sample_spinor(
      g, [](const Vec3& x) { return Spinor4(x(0), cplx(0.1, x(1)), 1.0 / 3.0, cplx(-x(2), 1e-300)); }, 10.0);
  const std::string text = grid::format_field(phi);
  const auto back = std::get<grid::SpinorField>(grid::parse_field(text));
  ASSERT_EQ(back.values.size(), phi.values.size());
  for (std::size_t i = 0; i < phi.values.size(); ++i) EXPECT_EQ(back.values[i], phi.values[i]);
  EXPECT_EQ(grid::format_field(back), text);
}

TEST(Grid, MalformedFieldRejected) {
  EXPECT_THROW(grid::parse_field(std::string("not a field\n")), Error);
}

TEST(Sphere, GaussLegendreIntegratesPolynomials) {
  const auto r = sphere::gauss_legendre(6);
  double s = 0.0;
  for (std::size_t k = 0; k < r.nodes.size(); ++k) s += r.weights[k] * std::pow(r.nodes[k], 10);
  EXPECT_NEAR(s, 2.0 / 11.0, 1e-14);
}

TEST(Sphere, ProductRuleMoments) {
  const auto rule = sphere::product_rule(6, 12);
  double area = 0.0, z2 = 0.0, xy = 0.0;
  for (std::size_t d = 0; d < rule.directions.size(); ++d) {
    const Vec3& s = rule.directions[d];
    area += rule.weights[d];
    z2 += rule.weights[d] * s(2) * s(2);
    xy += rule.weights[d] * s(0) * s(1);
  }
  EXPECT_NEAR(area, 4.0 * kPi, 1e-13);
  EXPECT_NEAR(z2, 4.0 * kPi / 3.0, 1e-13);
  EXPECT_NEAR(xy, 0.0, 1e-13);
}
