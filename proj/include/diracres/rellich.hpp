#pragma once

// Absence of real resonances for hermitian V, and the far-field flux
// identities behind it.

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "birman_schwinger.hpp"
#include "dirac.hpp"
#include "errors.hpp"
#include "grid.hpp"
#include "kernel.hpp"
#include "parallel.hpp"
#include "resolvent.hpp"
#include "sphere.hpp"
#include "surface.hpp"

namespace diracres::rellich {

using surface::SurfacePoint;

/// Real point (lambda, kappa) of the surface with lambda = sign sqrt(1 + kappa^2).
inline SurfacePoint real_point(double kappa, int sign) {
  const double lambda = sign * std::sqrt(1.0 + kappa * kappa);
  return SurfacePoint{cplx(lambda, 0.0), cplx(kappa, 0.0), surface::chart_for(cplx(kappa, 0.0))};
}

struct RealPoint {
  double lambda;
  double kappa;
  double sigma_min;
};

struct RealScanResult {
  std::vector<RealPoint> points;
  RealPoint minimum{0.0, 0.0, 0.0};
  double threshold = 0.0;
  bool pass = false;
};

using SigmaFn = std::function<double(const SurfacePoint&)>;

/// Evaluates `sigma` at n_points values of kappa in [kappa_lo, kappa_hi] and
/// both signs of lambda; passes iff every value is at least 10 * tol.
inline RealScanResult real_axis_scan(double kappa_lo, double kappa_hi, int n_points, const SigmaFn& sigma,
                                     double tol = 1e-6, int workers = 1) {
  if (n_points < 1) throw Error(ErrorKind::InvalidArgument, "rellich_scan: need at least one point");
  if (!(kappa_lo <= kappa_hi)) throw Error(ErrorKind::InvalidArgument, "rellich_scan: empty kappa range");
  if ((kappa_lo < 0.1 && kappa_hi > -0.1))
    throw Error(ErrorKind::InvalidArgument, "rellich_scan: kappa range must exclude |kappa| < 0.1");
  RealScanResult out;
  out.threshold = 10.0 * tol;
  out.points.resize(2 * static_cast<std::size_t>(n_points));
  parallel_for(out.points.size(), workers, [&](std::size_t q) {
    const int k = static_cast<int>(q / 2);
    const int sign = q % 2 == 0 ? 1 : -1;
    const double kappa = n_points == 1 ? kappa_lo : kappa_lo + (kappa_hi - kappa_lo) * k / (n_points - 1);
    const SurfacePoint p = real_point(kappa, sign);
    out.points[q] = RealPoint{p.z.real(), kappa, sigma(p)};
  });
  out.minimum = out.points.front();
  for (const auto& p : out.points)
    if (p.sigma_min < out.minimum.sigma_min) out.minimum = p;
  out.pass = out.minimum.sigma_min >= out.threshold;
  return out;
}

inline RealScanResult rellich_scan(const grid::PotentialField& v, double kappa_lo, double kappa_hi, int n_points,
                                   const grid::CutoffField& rho, double tol = 1e-6, const bs::Options& opt = {}) {
  if (!v.hermitian) throw Error(ErrorKind::HermitianRequired, "rellich_scan: potential is not hermitian");
  bs::Options inner = opt;
  inner.workers = 1;
  return real_axis_scan(
      kappa_lo, kappa_hi, n_points,
      [&](const SurfacePoint& p) {
        const auto ind = bs::indicator(p, v, rho, inner);
        return ind.sigma_min;
      },
      tol, opt.workers);
}

// ---- flux identity ----------------------------------------------------------------

/// Values of R0(at) phi at the points r s for a sphere rule (plain sums; the
/// sphere lies outside the support of phi).
inline std::vector<Spinor4> sphere_values(const SurfacePoint& at, const grid::SpinorField& phi, double r,
                                          const sphere::SphereRule& rule, int workers = 1) {
  std::vector<Vec3> targets;
  for (const auto& s : rule.directions) targets.push_back(r * s);
  return resolvent::apply_r0(at, phi, resolvent::make_plan(phi.grid, targets, true, workers));
}

struct FluxRow {
  double r;
  double flux;       ///< S(r) = r^2 \oint psi^* (alpha.s) psi
  double residual;   ///< |S(r) - T|
  double pointwise;  ///< max_s |r^2 psi^* (alpha.s) psi - (kappa/lambda) |amplitude(s)|^2 / (16 pi^2)|
};

struct FluxReport {
  double t_limit = 0.0;  ///< T = (kappa/lambda)/(16 pi^2) \oint |(lambda + beta + kappa alpha.s) phi^(kappa s)|^2
  std::vector<FluxRow> rows;
};

inline FluxReport flux_identity_check(const grid::SpinorField& phi, double lambda, double kappa,
                                      const std::vector<double>& radii, const sphere::SphereRule& rule,
                                      int workers = 1) {
  if (kappa == 0.0) throw Error(ErrorKind::InvalidArgument, "flux_identity_check: kappa = 0 uses zero_mode_check");
  const SurfacePoint at = surface::make_point(cplx(lambda, 0.0), cplx(kappa, 0.0));
  FluxReport rep;
  const double pref = (kappa / lambda) / (16.0 * kPi * kPi);
  std::vector<double> limit(rule.directions.size());
  for (std::size_t d = 0; d < rule.directions.size(); ++d) {
    const Vec3& s = rule.directions[d];
    limit[d] = pref * kernel::far_field_amplitude(at, phi, s).amplitude.squaredNorm();
    rep.t_limit += rule.weights[d] * limit[d];
  }
  for (double r : radii) {
    const auto vals = sphere_values(at, phi, r, rule, workers);
    double flux = 0.0, worst = 0.0;
    for (std::size_t d = 0; d < vals.size(); ++d) {
      const Spinor4 as = kernel::alpha_dot_apply(rule.directions[d], vals[d]);
      const double density = r * r * vals[d].dot(as).real();
      flux += rule.weights[d] * density;
      worst = std::max(worst, std::abs(density - limit[d]));
    }
    rep.rows.push_back({r, flux, std::abs(flux - rep.t_limit), worst});
  }
  return rep;
}

// ---- far-field amplitude ---------------------------------------------------------

struct AmplitudeRow {
  double r;
  double residual;  ///< max over directions of |R0 phi(r s) 4 pi r e^{-i omega r} - amplitude|
};

inline std::vector<AmplitudeRow> amplitude_check(const SurfacePoint& at, const grid::SpinorField& phi,
                                                 const std::vector<double>& radii, const std::vector<Vec3>& directions,
                                                 int workers = 1) {
  std::vector<AmplitudeRow> out;
  std::vector<Spinor4> amps;
  for (const auto& s : directions) amps.push_back(kernel::far_field_amplitude(at, phi, s).amplitude);
  for (double r : radii) {
    std::vector<Vec3> targets;
    for (const auto& s : directions) targets.push_back(r * s);
    const auto vals = resolvent::apply_r0(at, phi, resolvent::make_plan(phi.grid, targets, true, workers));
    double worst = 0.0;
    for (std::size_t d = 0; d < directions.size(); ++d) {
      const Spinor4 scaled = vals[d] * (4.0 * kPi * r * std::exp(-kI * at.omega * r));
      worst = std::max(worst, (scaled - amps[d]).norm());
    }
    out.push_back({r, worst});
  }
  return out;
}

// ---- zero-mode checks ---------------------------------------------------------------

struct ZeroModeRow {
  double r;
  double scaled_flux;        ///< max over directions of r^3 |psi^* beta (alpha.s) psi|
  double derivative_residual;  ///< max over directions, j of |r^2 D_j psi(r s) - coefficient|
};

struct ZeroModeReport {
  double identity_error = 0.0;  ///< max |(+-1 + beta)^* beta (alpha.s) (+-1 + beta)|
  std::vector<ZeroModeRow> rows;
};

inline double zero_mode_identity_error(int sign, const Vec3& s) {
  const Mat4 p = static_cast<double>(sign) * dirac::identity() + dirac::beta();
  return (p.adjoint() * dirac::beta() * dirac::alpha_dot(s) * p).cwiseAbs().maxCoeff();
}

/// psi = R0(+-1, 0) phi. Derivatives D_j = -i d/dx_j by central differences
/// with step `fd_step`.
inline ZeroModeReport zero_mode_check(const grid::SpinorField& phi, int sign, const std::vector<double>& radii,
                                      const std::vector<Vec3>& directions, double fd_step = 1e-3, int workers = 1) {
  if (sign != 1 && sign != -1) throw Error(ErrorKind::InvalidArgument, "zero_mode_check: sign must be +-1");
  const SurfacePoint at{cplx(sign, 0.0), cplx(0.0, 0.0), surface::Chart::OmegaChart};
  ZeroModeReport rep;
  for (const auto& s : directions) rep.identity_error = std::max(rep.identity_error, zero_mode_identity_error(sign, s));
  const Mat4 b = dirac::beta();
  for (double r : radii) {
    std::vector<Vec3> targets;
    for (const auto& s : directions) {
      targets.push_back(r * s);
      for (int a = 0; a < 3; ++a) {
        Vec3 e = Vec3::Zero();
        e(a) = fd_step;
        targets.push_back(r * s + e);
        targets.push_back(r * s - e);
      }
    }
    const auto vals = resolvent::apply_r0(at, phi, resolvent::make_plan(phi.grid, targets, true, workers));
    ZeroModeRow row{r, 0.0, 0.0};
    for (std::size_t d = 0; d < directions.size(); ++d) {
      const Vec3& s = directions[d];
      const Spinor4& psi = vals[7 * d];
      const cplx q = psi.dot(b * kernel::alpha_dot_apply(s, psi));
      row.scaled_flux = std::max(row.scaled_flux, r * r * r * std::abs(q));
      for (int j = 1; j <= 3; ++j) {
        const Spinor4 dj = -kI * (vals[7 * d + 2 * j - 1] - vals[7 * d + 2 * j]) / (2.0 * fd_step);
        const Spinor4 coef = kernel::zero_mode_derivative_asymptotics(phi, sign, s, j);
        row.derivative_residual = std::max(row.derivative_residual, (r * r * dj - coef).norm());
      }
    }
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace diracres::rellich
