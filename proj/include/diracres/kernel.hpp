#pragma once

// Fundamental solution of D - z on the surface, the Helmholtz kernel, and
// the far-field amplitudes of the free resolvent.

#include <cmath>
#include <string>

#include "dirac.hpp"
#include "errors.hpp"
#include "grid.hpp"
#include "surface.hpp"
#include "types.hpp"

namespace diracres::kernel {

using surface::SurfacePoint;

/// G_omega(x) = exp(i omega |x|) / (4 pi |x|)
inline cplx helmholtz_g(cplx omega, const Vec3& x) {
  const double r = x.norm();
  if (r == 0.0) throw Error(ErrorKind::PoleAtOrigin, "helmholtz_g: x = 0");
  return std::exp(kI * omega * r) / (4.0 * kPi * r);
}

/// F(x) = G_omega(x) (z + beta + (i + omega|x|) alpha.x / |x|^2)
inline Mat4 eval_f(const SurfacePoint& at, const Vec3& x) {
  const double r = x.norm();
  if (r == 0.0) throw Error(ErrorKind::PoleAtOrigin, "eval_f: x = 0");
  const cplx g = std::exp(kI * at.omega * r) / (4.0 * kPi * r);
  const cplx t = (kI + at.omega * r) / (r * r);
  Mat4 m = at.z * dirac::identity() + dirac::beta() + t * dirac::alpha_dot(x);
  return g * m;
}

/// (alpha.x) psi without forming the matrix.
inline Spinor4 alpha_dot_apply(const Vec3& x, const Spinor4& p) {
  const cplx xp(x(0), x(1)), xm(x(0), -x(1));
  Spinor4 out;
  out(0) = x(2) * p(2) + xm * p(3);
  out(1) = xp * p(2) - x(2) * p(3);
  out(2) = x(2) * p(0) + xm * p(1);
  out(3) = xp * p(0) - x(2) * p(1);
  return out;
}

inline Spinor4 alpha_dot_apply(const Vec3c& x, const Spinor4& p) {
  const cplx xp = x(0) + kI * x(1), xm = x(0) - kI * x(1);
  Spinor4 out;
  out(0) = x(2) * p(2) + xm * p(3);
  out(1) = xp * p(2) - x(2) * p(3);
  out(2) = x(2) * p(0) + xm * p(1);
  out(3) = xp * p(0) - x(2) * p(1);
  return out;
}

inline Spinor4 beta_apply(const Spinor4& p) {
  Spinor4 out = p;
  out(2) = -p(2);
  out(3) = -p(3);
  return out;
}

/// F(x) p for x != 0; same formula as eval_f, applied directly to a spinor.
inline Spinor4 apply_f(const SurfacePoint& at, const Vec3& x, const Spinor4& p) {
  const double r = x.norm();
  const cplx g = std::exp(kI * at.omega * r) / (4.0 * kPi * r);
  const cplx t = (kI + at.omega * r) / (r * r);
  return g * (at.z * p + beta_apply(p) + t * alpha_dot_apply(x, p));
}

struct FarFieldAmplitude {
  Vec3 direction;
  Spinor4 amplitude;
};

/// Quadrature Fourier transform  sum_j exp(-i k.x_j) phi(x_j) w_j  at k = omega s.
inline Spinor4 fourier_transform(const grid::SpinorField& phi, const Vec3c& k) {
  Spinor4 acc = Spinor4::Zero();
  const auto& g = *phi.grid;
  for (std::size_t j = 0; j < phi.values.size(); ++j) {
    if (phi.values[j].isZero(0.0)) continue;
    const Vec3& x = g.nodes[j];
    const cplx kx = k(0) * x(0) + k(1) * x(1) + k(2) * x(2);
    acc += std::exp(-kI * kx) * g.weights[j] * phi.values[j];
  }
  return acc;
}

/// Leading far-field coefficient: R0 phi(r s) ~ exp(i omega r)/(4 pi r) * amplitude.
inline FarFieldAmplitude far_field_amplitude(const SurfacePoint& at, const grid::SpinorField& phi, const Vec3& s) {
  if (std::abs(s.norm() - 1.0) > 1e-14) throw Error(ErrorKind::InvalidArgument, "far_field_amplitude: |s| != 1");
  const Vec3c k = at.omega * s.cast<cplx>();
  const Spinor4 ph = fourier_transform(phi, k);
  FarFieldAmplitude out;
  out.direction = s;
  out.amplitude = at.z * ph + beta_apply(ph) + at.omega * alpha_dot_apply(s, ph);
  return out;
}

/// Coefficient of 1/r^2 in D_j R0(+-1, 0) phi (r s).
inline Spinor4 zero_mode_derivative_asymptotics(const grid::SpinorField& phi, int sign, const Vec3& s, int j) {
  if (sign != 1 && sign != -1) throw Error(ErrorKind::InvalidArgument, "zero_mode_derivative_asymptotics: sign must be +-1");
  if (j < 1 || j > 3) throw Error(ErrorKind::IndexOutOfRange, "zero_mode_derivative_asymptotics: j not in 1..3");
  const Spinor4 m = phi.integral();
  const Spinor4 v = static_cast<double>(sign) * m + beta_apply(m);
  return (kI * s(j - 1) / (4.0 * kPi)) * v;
}

}  // namespace diracres::kernel
