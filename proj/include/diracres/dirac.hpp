#pragma once

// Dirac and Pauli matrices in the standard representation.

#include <string>

#include "errors.hpp"
#include "types.hpp"

namespace diracres::dirac {

inline Mat2 pauli(int j) {
  Mat2 s = Mat2::Zero();
  switch (j) {
    case 1:
      s(0, 1) = 1.0;
      s(1, 0) = 1.0;
      break;
    case 2:
      s(0, 1) = -kI;
      s(1, 0) = kI;
      break;
    case 3:
      s(0, 0) = 1.0;
      s(1, 1) = -1.0;
      break;
    default:
      throw Error(ErrorKind::IndexOutOfRange, "pauli: index " + std::to_string(j) + " not in 1..3");
  }
  return s;
}

inline Mat4 identity() { return Mat4::Identity(); }

/// beta = diag(I2, -I2)
inline Mat4 beta() {
  Mat4 b = Mat4::Zero();
  b(0, 0) = b(1, 1) = 1.0;
  b(2, 2) = b(3, 3) = -1.0;
  return b;
}

/// alpha_j = [[0, sigma_j], [sigma_j, 0]]
inline Mat4 alpha(int j) {
  const Mat2 s = pauli(j);
  Mat4 a = Mat4::Zero();
  a.topRightCorner<2, 2>() = s;
  a.bottomLeftCorner<2, 2>() = s;
  return a;
}

/// gamma5 = -i alpha_1 alpha_2 alpha_3 = [[0, I2], [I2, 0]]
inline Mat4 gamma5() { return -kI * alpha(1) * alpha(2) * alpha(3); }

inline Mat4 alpha_dot(const Vec3c& x) {
  Mat4 a = Mat4::Zero();
  // sigma.x, filled directly
  Mat2 s;
  s(0, 0) = x(2);
  s(0, 1) = x(0) - kI * x(1);
  s(1, 0) = x(0) + kI * x(1);
  s(1, 1) = -x(2);
  a.topRightCorner<2, 2>() = s;
  a.bottomLeftCorner<2, 2>() = s;
  return a;
}

inline Mat4 alpha_dot(const Vec3& x) { return alpha_dot(Vec3c(x.cast<cplx>())); }

/// MIT bag matrix B = -i beta alpha.n
inline Mat4 mit_b(const Vec3& n) { return -kI * beta() * alpha_dot(n); }

struct CliffordReport {
  bool alpha_anticommute = true;  ///< alpha_i alpha_j + alpha_j alpha_i = 2 delta_ij
  bool alpha_beta_anticommute = true;
  bool beta_square = true;
  bool ok() const { return alpha_anticommute && alpha_beta_anticommute && beta_square; }
};

/// Checks the anticommutation relations with exact floating-point equality.
inline CliffordReport verify_clifford() {
  CliffordReport r;
  const Mat4 b = beta();
  const Mat4 id = identity();
  for (int i = 1; i <= 3; ++i) {
    const Mat4 ai = alpha(i);
    for (int j = 1; j <= 3; ++j) {
      const Mat4 aj = alpha(j);
      const Mat4 expect = (i == j ? 2.0 : 0.0) * id;
      if ((ai * aj + aj * ai) != expect) r.alpha_anticommute = false;
    }
    if ((ai * b + b * ai) != Mat4::Zero()) r.alpha_beta_anticommute = false;
  }
  if (b * b != id) r.beta_square = false;
  return r;
}

}  // namespace diracres::dirac
