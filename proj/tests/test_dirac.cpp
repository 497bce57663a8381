#include <random>

#include <gtest/gtest.h>

#include <diracres/dirac.hpp>

using namespace diracres;

TEST(Dirac, CliffordRelations) {
  const auto r = dirac::verify_clifford();
  EXPECT_TRUE(r.ok());
  for (int j = 1; j <= 3; ++j) {
    for (int k = 1; k <= 3; ++k) {
      const Mat4 ac = dirac::alpha(j) * dirac::alpha(k) + dirac::alpha(k) * dirac::alpha(j);
      EXPECT_LT((ac - 2.0 * (j == k) * Mat4::Identity()).norm(), 1e-15);
    }
    EXPECT_LT((dirac::alpha(j) * dirac::beta() + dirac::beta() * dirac::alpha(j)).norm(), 1e-15);
    EXPECT_LT((dirac::alpha(j) - dirac::alpha(j).adjoint()).norm(), 1e-15);
  }
}

TEST(Dirac, PauliProduct) {
  // sigma_1 sigma_2 = i sigma_3 written out entrywise.
  Mat2 s3;
  s3 << 1, 0, 0, -1;
  EXPECT_LT((dirac::pauli(1) * dirac::pauli(2) - kI * s3).norm(), 1e-15);
}

TEST(Dirac, SymbolSquare) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  for (int t = 0; t < 20; ++t) {
    const Vec3 xi(g(rng), g(rng), g(rng));
    const Mat4 p = dirac::beta() + dirac::alpha_dot(xi);
    EXPECT_LT((p.adjoint() * p - (1.0 + xi.squaredNorm()) * Mat4::Identity()).norm(), 1e-13);
  }
}

TEST(Dirac, MitMatrixIsAnInvolution) {
  const Vec3 n = Vec3(1.0, -2.0, 0.5).normalized();
  const Mat4 b = dirac::mit_b(n);
  EXPECT_LT((b * b - Mat4::Identity()).norm(), 1e-14);
  EXPECT_LT((b - b.adjoint()).norm(), 1e-14);
}
