#pragma once

// Independent reference computations for the unit tests. Nothing here calls
// into the library's numerics.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using cplx = std::complex<double>;
using Dense = Eigen::MatrixXcd;

/// Laplace expansion along the first row.
inline cplx cofactor_det(const Dense& a) {
  const Eigen::Index n = a.rows();
  if (n == 1) return a(0, 0);
  if (n == 2) return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  cplx d = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    Dense minor(n - 1, n - 1);
    for (Eigen::Index r = 1; r < n; ++r)
      for (Eigen::Index c = 0, k = 0; c < n; ++c)
        if (c != j) minor(r - 1, k++) = a(r, c);
    d += (j % 2 ? -1.0 : 1.0) * a(0, j) * cofactor_det(minor);
  }
  return d;
}

/// One-sided Jacobi SVD; returns singular values in decreasing order.
inline std::vector<double> jacobi_singular_values(Dense u) {
  const Eigen::Index n = u.cols();
  for (int sweep = 0; sweep < 60; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double a = u.col(p).squaredNorm(), b = u.col(q).squaredNorm();
        const cplx g = u.col(p).dot(u.col(q));
        if (std::abs(g) <= 1e-15 * std::sqrt(a * b)) continue;
        off = std::max(off, std::abs(g) / std::sqrt(a * b));
        const cplx ph = g / std::abs(g);
        const double zeta = (b - a) / (2.0 * std::abs(g));
        const double t = (zeta >= 0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t), s = c * t;
        const Eigen::VectorXcd up = u.col(p), uq = u.col(q);
        u.col(p) = c * up - s * std::conj(ph) * uq;
        u.col(q) = s * ph * up + c * uq;
      }
    if (off < 1e-15) break;
  }
  std::vector<double> s(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < n; ++j) s[static_cast<std::size_t>(j)] = u.col(j).norm();
  std::sort(s.rbegin(), s.rend());
  return s;
}

/// Fourth-order central difference of f at x along `dir`.
template <typename F>
auto central_diff4(const F& f, const Eigen::Vector3d& x, const Eigen::Vector3d& dir, double h) {
  return (-f(x + 2 * h * dir) + 8.0 * f(x + h * dir) - 8.0 * f(x - h * dir) + f(x - 2 * h * dir)) / (12.0 * h);
}

/// Corrected lattice sum for \int e^{-r^2}/r d^3x = 2 pi on h Z^3 with the
/// origin node removed and replaced by the weight c h^2.
inline double lattice_gaussian_over_r(double h, double c) {
  const int m = static_cast<int>(std::ceil(6.5 / h));
  double s = 0.0;
  for (int i = -m; i <= m; ++i)
    for (int j = -m; j <= m; ++j)
      for (int k = -m; k <= m; ++k) {
        if (!i && !j && !k) continue;
        const double r = h * std::sqrt(double(i * i + j * j + k * k));
        s += std::exp(-r * r) / r;
      }
  return s * h * h * h + c * h * h;
}

}  // namespace oracle
