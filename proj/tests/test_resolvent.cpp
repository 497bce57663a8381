#include <gtest/gtest.h>

#include <diracres/resolvent.hpp>

using namespace diracres;

namespace {

grid::SpinorField bump_source(const grid::GridPtr& g, double radius) {
  return grid::sample_spinor(
      g,
      [radius](const Vec3& x) {
        Spinor4 s;
        s << 1.0, cplx(0.0, x(1)), x(0), 0.5;
        return Spinor4(s * grid::smooth_bump(x.norm() / radius));
      },
      radius);
}

double rel_l2(const grid::SpinorField& a, const grid::SpinorField& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    num += (a.values[i] - b.values[i]).squaredNorm();
    den += b.values[i].squaredNorm();
  }
  return std::sqrt(num / den);
}

}  // namespace

TEST(Resolvent, AgreesWithFourierOracleAndConverges) {
  const cplx z(0.0, 2.0);
  const auto at = surface::lift_physical(z);
  double prev = 0.0;
  for (int n : {16, 32}) {
    const auto g = grid::build_grid(4.0, n);
    const auto phi = bump_source(g, 1.5);
    const double e = rel_l2(resolvent::apply_r0_grid(at, phi), resolvent::fourier_oracle(z, phi, 2));
    if (n == 32) {
      EXPECT_LT(e, 0.02);
      EXPECT_GT(prev / e, 1.8);
    }
    prev = e;
  }
}

TEST(Resolvent, FundamentalSolutionOnSecondSheet) {
  const auto g = grid::build_grid(2.0, 16);
  const auto phi = bump_source(g, 1.2);
  for (const auto& at : {surface::lift_physical(cplx(1.2, 0.4)), surface::reflect(surface::lift_physical(cplx(1.2, 0.4)))}) {
    const auto psi = resolvent::apply_r0_grid(at, phi);
    const auto inner = resolvent::interior_nodes(*g, 1.4);
    double num = 0.0, den = 0.0;
    for (std::size_t q : inner) {
      const Spinor4 r = resolvent::dirac_fd(*g, q, [&](std::size_t k) { return psi.values[k]; }) - at.z * psi.values[q] -
                        phi.values[q];
      num += r.squaredNorm();
      den += phi.values[q].squaredNorm();
    }
    EXPECT_LT(std::sqrt(num / den), 5.0 * g->h);
  }
}

TEST(Resolvent, PlanTargetsOffGridMatchDirectSum) {
  const auto g = grid::build_grid(1.0, 6);
  const auto phi = bump_source(g, 0.9);
  const auto at = surface::lift_physical(cplx(0.3, 0.8));
  const Vec3 y(3.0, -2.0, 1.0);
  const auto v = resolvent::apply_r0(at, phi, resolvent::make_plan(g, {y}, true));
  Spinor4 ref = Spinor4::Zero();
  for (std::size_t j = 0; j < g->size(); ++j) ref += kernel::apply_f(at, y - g->nodes[j], phi.values[j]) * g->weights[j];
  EXPECT_LT((v[0] - ref).norm(), 1e-13 * ref.norm());
}

TEST(Resolvent, OracleRejectsRealZ) {
  const auto g = grid::build_grid(1.0, 4);
  EXPECT_THROW(resolvent::fourier_oracle(cplx(2.0, 0.0), bump_source(g, 0.9)), Error);
}
