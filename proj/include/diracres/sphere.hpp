#pragma once

// Quadrature on [-1, 1] and on the unit sphere.

#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>

#include "errors.hpp"
#include "types.hpp"

namespace diracres::sphere {

struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1] (Golub-Welsch).
inline Rule1D gauss_legendre(int n) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "gauss_legendre: n must be positive");
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    j(k, k - 1) = j(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
  Rule1D r;
  for (int k = 0; k < n; ++k) {
    r.nodes.push_back(es.eigenvalues()(k));
    const double v = es.eigenvectors()(0, k);
    r.weights.push_back(2.0 * v * v);
  }
  return r;
}

/// Gauss-Legendre rule mapped to [a, b].
inline Rule1D gauss_legendre(int n, double a, double b) {
  Rule1D r = gauss_legendre(n);
  for (std::size_t k = 0; k < r.nodes.size(); ++k) {
    r.nodes[k] = 0.5 * (a + b) + 0.5 * (b - a) * r.nodes[k];
    r.weights[k] *= 0.5 * (b - a);
  }
  return r;
}

struct SphereRule {
  std::vector<Vec3> directions;
  std::vector<double> weights;  ///< sum to 4 pi
  int n_theta = 0;
  int n_phi = 0;
};

/// Product rule: Gauss-Legendre in cos(theta) times the uniform rule in phi.
/// Exact for spherical polynomials of degree <= min(2 n_theta - 1, n_phi - 1).
inline SphereRule product_rule(int n_theta, int n_phi) {
  if (n_theta < 1 || n_phi < 1) throw Error(ErrorKind::InvalidArgument, "product_rule: sizes must be positive");
  const Rule1D gl = gauss_legendre(n_theta);
  SphereRule s;
  s.n_theta = n_theta;
  s.n_phi = n_phi;
  for (int a = 0; a < n_theta; ++a) {
    const double ct = gl.nodes[a];
    const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    for (int b = 0; b < n_phi; ++b) {
      const double ph = 2.0 * kPi * (b + 0.5) / n_phi;
      s.directions.emplace_back(st * std::cos(ph), st * std::sin(ph), ct);
      s.weights.push_back(gl.weights[a] * 2.0 * kPi / n_phi);
    }
  }
  return s;
}

/// Default 110-direction rule (5 x 22).
inline SphereRule default_rule() { return product_rule(5, 22); }

/// Orthonormal tangent frame (t1, t2) at unit vector s.
inline std::pair<Vec3, Vec3> tangent_frame(const Vec3& s) {
  const Vec3 a = std::abs(s(2)) < 0.9 ? Vec3(0.0, 0.0, 1.0) : Vec3(1.0, 0.0, 0.0);
  Vec3 t1 = a.cross(s).normalized();
  Vec3 t2 = s.cross(t1);
  return {t1, t2};
}

}  // namespace diracres::sphere
