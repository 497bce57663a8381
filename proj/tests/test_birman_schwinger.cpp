#include <gtest/gtest.h>

#include <diracres/birman_schwinger.hpp>

#include "oracles.hpp"

using namespace diracres;

namespace {

struct Fixture {
  grid::GridPtr g = grid::build_grid(2.0, 12);
  grid::CutoffField rho = grid::cutoff(1.25, 1.75, g);
};

}  // namespace

TEST(BirmanSchwinger, FreeOperatorHasUnitDeterminant) {
  Fixture s;
  const auto v = grid::zero_potential(s.g);
  const auto at = surface::lift_physical(cplx(1.3, 0.2));
  for (const auto& p : {at, surface::reflect(at)})
    for (auto a : {bs::ActiveSet::PotentialSupport, bs::ActiveSet::CutoffSupport}) {
      const auto d = bs::log_det(p, v, s.rho, bs::Options{a, 1});
      EXPECT_EQ(d.log_abs, 0.0);
      EXPECT_EQ(d.phase, 0.0);
    }
}

TEST(BirmanSchwinger, ActiveSetDoesNotChangeTheDeterminant) {
  Fixture s;
  const auto v = grid::bump_potential(s.g, 3.0, dirac::beta(), 1.0);
  const auto at = surface::reflect(surface::lift_physical(cplx(1.3, 0.4)));
  const auto a = bs::log_det(at, v, s.rho, {bs::ActiveSet::PotentialSupport, 1});
  const auto b = bs::log_det(at, v, s.rho, {bs::ActiveSet::CutoffSupport, 1});
  EXPECT_NEAR(a.log_abs, b.log_abs, 1e-10);
  EXPECT_NEAR(linalg::wrap_phase(a.phase - b.phase), 0.0, 1e-10);
}

TEST(BirmanSchwinger, SmallCouplingIsNearIdentity) {
  Fixture s;
  const auto v = grid::bump_potential(s.g, 1e-3, dirac::beta(), 1.0);
  const auto ind = bs::indicator(surface::lift_physical(cplx(0.5, 0.5)), v, s.rho);
  EXPECT_LT(std::abs(ind.logdet.log_abs), 1e-2);
  EXPECT_GT(ind.sigma_min, 0.95);
}

TEST(BirmanSchwinger, BlocksAreVTimesKernel) {
  Fixture s;
  const auto v = grid::bump_potential(s.g, 2.0, dirac::alpha(3), 1.0);
  const auto at = surface::lift_physical(cplx(0.7, 0.9));
  const auto k = bs::assemble(at, v, s.rho);
  ASSERT_GE(k.nodes.size(), 2u);
  const std::size_t i = k.nodes.front(), j = k.nodes.back();
  const long c = static_cast<long>(k.nodes.size()) - 1;
  const Mat4 expected = v.values[i] * kernel::eval_f(at, s.g->nodes[i] - s.g->nodes[j]) * s.rho.values[j] * s.g->weights[j];
  Mat4 block;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) block(a, b) = k.matrix(a, 4 * c + b);
  EXPECT_LT((block - expected).norm(), 1e-12 * expected.norm());
}

TEST(BirmanSchwinger, IndicatorSigmaMatchesJacobi) {
  Fixture s;
  const auto v = grid::bump_potential(s.g, 8.0, dirac::beta(), 1.0);
  const auto at = surface::reflect(surface::lift_physical(cplx(1.2, 0.6)));
  const auto k = bs::assemble(at, v, s.rho);
  const Eigen::MatrixXcd m = k.matrix.eigen();
  EXPECT_NEAR(bs::indicator(k).sigma_min, oracle::jacobi_singular_values(m).back(), 1e-9);
}
