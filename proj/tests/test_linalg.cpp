#include <random>

#include <gtest/gtest.h>

#include <diracres/linalg.hpp>

#include "oracles.hpp"

using namespace diracres;

namespace {

Eigen::MatrixXcd random_matrix(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXcd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = cplx(g(rng), g(rng));
  return a;
}

}  // namespace

TEST(Linalg, LogDetMatchesCofactorExpansion) {
  for (int n = 1; n <= 6; ++n) {
    const auto a = random_matrix(n, 10 + n);
    const cplx ref = oracle::cofactor_det(a);
    const auto d = linalg::log_det(linalg::CMatrix(a));
    EXPECT_NEAR(d.log_abs, std::log(std::abs(ref)), 1e-12) << n;
    EXPECT_NEAR(std::abs(std::polar(1.0, d.phase) - ref / std::abs(ref)), 0.0, 1e-12) << n;
  }
}

TEST(Linalg, PhaseIsWrapped) {
  const auto d = linalg::log_det(linalg::CMatrix(Eigen::MatrixXcd::Identity(3, 3) * cplx(-1.0, 0.0)));
  EXPECT_NEAR(d.phase, kPi, 1e-15);
  EXPECT_NEAR(d.log_abs, 0.0, 1e-15);
}

TEST(Linalg, SmallestSingularValueMatchesJacobi) {
  for (int n : {4, 12, 40}) {
    const auto a = random_matrix(n, 77 + n);
    const double ref = oracle::jacobi_singular_values(a).back();
    EXPECT_NEAR(linalg::min_singular(linalg::CMatrix(a)), ref, 1e-9 * ref) << n;
  }
}

TEST(Linalg, JacobiOracleAgreesWithEigenSvd) {
  const auto a = random_matrix(9, 5);
  const auto s = oracle::jacobi_singular_values(a);
  const Eigen::VectorXd e = Eigen::JacobiSVD<Eigen::MatrixXcd>(a).singularValues();
  for (int k = 0; k < 9; ++k) EXPECT_NEAR(s[k], e(k), 1e-12);
}

TEST(Linalg, ExactlySingularIsRecordedNotThrown) {
  Eigen::MatrixXcd a = random_matrix(5, 3);
  a.row(4) = a.row(1);
  const auto f = linalg::lu_factor(linalg::CMatrix(a));
  const auto est = linalg::smallest_singular(f, linalg::CMatrix(a));
  const double s = oracle::jacobi_singular_values(a).back();
  EXPECT_LT(s, 1e-13);
  EXPECT_LT(est.sigma, 1e-12);
}

TEST(Linalg, NullVectorOfNearSingular) {
  Eigen::MatrixXcd a = random_matrix(6, 8);
  a.col(5) = a.col(0) + a.col(2) * cplx(0.0, 1.0);
  a(0, 5) += 1e-10;
  const auto v = linalg::null_vector(linalg::CMatrix(a), 1e-6);
  EXPECT_NEAR(v.norm(), 1.0, 1e-12);
  EXPECT_LT((a * v).norm(), 1e-8);
}

TEST(Linalg, NonFiniteRejected) {
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Identity(2, 2);
  a(1, 0) = cplx(std::nan(""), 0.0);
  EXPECT_THROW(linalg::CMatrix{a}, Error);
}
