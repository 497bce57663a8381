#pragma once

#include <complex>
#include <numbers>

#include <Eigen/Dense>

namespace diracres {

using cplx = std::complex<double>;

using Vec3 = Eigen::Vector3d;
using Vec3c = Eigen::Vector3cd;
using Mat2 = Eigen::Matrix<cplx, 2, 2>;
using Mat4 = Eigen::Matrix<cplx, 4, 4>;
using Spinor4 = Eigen::Matrix<cplx, 4, 1>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr cplx kI{0.0, 1.0};

inline bool all_finite(const cplx& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (!all_finite(cplx(m(i, j)))) return false;
  return true;
}

}  // namespace diracres
