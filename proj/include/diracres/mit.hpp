#pragma once

// Square-form identity for the Dirac operator with MIT boundary condition on
// the exterior of a ball, checked on manufactured test functions.

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "dirac.hpp"
#include "errors.hpp"
#include "grid.hpp"
#include "parallel.hpp"
#include "sphere.hpp"
#include "types.hpp"

namespace diracres::mit {

using SpinorFn = std::function<Spinor4(const Vec3&)>;

/// Omega = R^3 minus the closed ball of radius R, truncated at R_out.
struct SphereGeometry {
  double radius = 1.0;
  double outer = 2.0;
  sphere::SphereRule rule;         ///< unit-sphere directions
  std::vector<double> weights;     ///< surface weights, sum 4 pi R^2
  double curvature = 0.0;          ///< h

  /// Outward normal of Omega at the surface point R s.
  Vec3 normal(const Vec3& s) const { return -s; }
};

inline SphereGeometry make_geometry(double radius, double outer, int n_angular) {
  if (!(radius > 0.0) || !(outer > radius))
    throw Error(ErrorKind::InvalidArgument, "make_geometry: need 0 < radius < outer");
  if (n_angular < 2) throw Error(ErrorKind::InvalidArgument, "make_geometry: n_angular must be >= 2");
  SphereGeometry g;
  g.radius = radius;
  g.outer = outer;
  g.rule = sphere::product_rule(n_angular / 2, n_angular);
  for (double w : g.rule.weights) g.weights.push_back(w * radius * radius);
  g.curvature = -1.0 / radius;
  return g;
}

/// Half the trace of the Weingarten map v -> d/dt n(c(t)) on the tangent
/// plane, evaluated by differentiating the normal along great circles.
inline double weingarten_mean_curvature(const SphereGeometry& g, const Vec3& s, double eps = 1e-5) {
  const auto [t1, t2] = sphere::tangent_frame(s);
  double tr = 0.0;
  for (const Vec3& t : {t1, t2}) {
    const Vec3 sp = std::cos(eps) * s + std::sin(eps) * t;
    const Vec3 sm = std::cos(eps) * s - std::sin(eps) * t;
    const Vec3 dn = (g.normal(sp) - g.normal(sm)) / (2.0 * eps * g.radius);
    tr += dn.dot(t);
  }
  return 0.5 * tr;
}

inline Mat4 mit_b(const Vec3& n) { return dirac::mit_b(n); }

/// Q+- = (chi/2)(I +- i beta alpha.N/|N|).
inline std::pair<Mat4, Mat4> q_projectors(const Vec3& n, double chi) {
  if (chi == 0.0) return {Mat4::Zero(), Mat4::Zero()};
  const double len = n.norm();
  if (!(len > 0.0)) throw Error(ErrorKind::InvalidArgument, "q_projectors: vanishing N inside the support of chi");
  const Mat4 j = kI * dirac::beta() * dirac::alpha_dot(Vec3(n / len));
  const Mat4 id = dirac::identity();
  return {0.5 * chi * (id + j), 0.5 * chi * (id - j)};
}

inline std::pair<std::vector<Mat4>, std::vector<Mat4>> q_projectors(const std::vector<Vec3>& n_field,
                                                                    const std::vector<double>& chi) {
  if (n_field.size() != chi.size()) throw Error(ErrorKind::Dimension, "q_projectors: field sizes differ");
  std::pair<std::vector<Mat4>, std::vector<Mat4>> out;
  for (std::size_t i = 0; i < chi.size(); ++i) {
    auto [p, m] = q_projectors(n_field[i], chi[i]);
    out.first.push_back(p);
    out.second.push_back(m);
  }
  return out;
}

/// C-infinity step: 1 for r <= a, 0 for r >= b.
inline double taper(double r, double a, double b) {
  if (r <= a) return 1.0;
  if (r >= b) return 0.0;
  const double t = (r - a) / (b - a);
  const double p = std::exp(-1.0 / (1.0 - t));
  const double q = std::exp(-1.0 / t);
  return p / (p + q);
}

struct MITTestFunction {
  SphereGeometry geometry;
  SpinorFn h;
  SpinorFn g;
  double chi_inner;  ///< chi = 1 for |x| <= chi_inner
  double chi_outer;

  /// Q- extended with N(x) = -x/|x|.
  Spinor4 qminus_h(const Vec3& x) const {
    const double chi = taper(x.norm(), chi_inner, chi_outer);
    if (chi == 0.0) return Spinor4::Zero();
    return q_projectors(Vec3(-x), chi).second * h(x);
  }
  Spinor4 operator()(const Vec3& x) const { return g(x) + qminus_h(x); }
};

/// f = g + Q- h. g must vanish on the shell R <= |x| <= R + margin.
inline MITTestFunction make_mit_function(SpinorFn h, SpinorFn g, const SphereGeometry& geo, double margin = 0.2) {
  if (!h) h = [](const Vec3&) { return Spinor4(Spinor4::Zero()); };
  if (!g) g = [](const Vec3&) { return Spinor4(Spinor4::Zero()); };
  const int nr = 8;
  for (int a = 0; a <= nr; ++a) {
    const double r = geo.radius + margin * a / nr;
    for (const auto& s : geo.rule.directions)
      if (!g(r * s).isZero(0.0))
        throw Error(ErrorKind::SupportViolation, "make_mit_function: g does not vanish near the sphere");
  }
  const double span = geo.outer - geo.radius;
  return MITTestFunction{geo, std::move(h), std::move(g), geo.radius + 0.2 * span, geo.radius + 0.7 * span};
}

struct SLReport {
  double lhs = 0.0;      ///< \int |(beta + alpha.D) f|^2
  double l2 = 0.0;       ///< \int |f|^2
  double gradient = 0.0; ///< sum_j \int |D_j f|^2
  double surface = 0.0;  ///< h \oint |f|^2
  double boundary = 0.0; ///< \oint |f|^2
  double rhs = 0.0;
  double rhs_complete = 0.0;  ///< rhs + \oint f^* (-i beta alpha.n) f, the mass cross term
  double mismatch = 0.0; ///< |lhs - rhs| / max(lhs, rhs)
  double mismatch_complete = 0.0;
  double boundary_coefficient = 0.0;  ///< (lhs - l2 - gradient) / boundary; NaN when the trace vanishes
  int n_radial = 0;
  int n_angular = 0;
};

/// Shell quadrature: Gauss-Legendre in r on [R, R_out] times the product rule
/// on the sphere; derivatives by central differences with step
/// (R_out - R) / n_radial.
inline SLReport verify_sl_identity(const MITTestFunction& f, int n_radial, int n_angular, int workers = 1) {
  if (n_radial < 2 || n_angular < 2) throw Error(ErrorKind::InvalidArgument, "verify_sl_identity: resolution too small");
  const SphereGeometry& geo = f.geometry;
  const sphere::Rule1D rad = sphere::gauss_legendre(n_radial, geo.radius, geo.outer);
  const sphere::SphereRule ang = sphere::product_rule(n_angular / 2, n_angular);
  const double d = (geo.outer - geo.radius) / n_radial;
  const Mat4 b = dirac::beta();
  std::vector<std::array<double, 3>> part(rad.nodes.size(), {0.0, 0.0, 0.0});
  parallel_for(rad.nodes.size(), workers, [&](std::size_t a) {
    const double r = rad.nodes[a];
    std::array<double, 3> acc{0.0, 0.0, 0.0};
    for (std::size_t q = 0; q < ang.directions.size(); ++q) {
      const Vec3 x = r * ang.directions[q];
      const double w = rad.weights[a] * r * r * ang.weights[q];
      const Spinor4 v = f(x);
      Spinor4 hv = b * v;
      double grad = 0.0;
      for (int j = 0; j < 3; ++j) {
        Vec3 e = Vec3::Zero();
        e(j) = d;
        const Spinor4 dj = -kI * (f(x + e) - f(x - e)) / (2.0 * d);
        grad += dj.squaredNorm();
        hv += dirac::alpha(j + 1) * dj;
      }
      acc[0] += w * hv.squaredNorm();
      acc[1] += w * v.squaredNorm();
      acc[2] += w * grad;
    }
    part[a] = acc;
  });
  SLReport rep;
  rep.n_radial = n_radial;
  rep.n_angular = n_angular;
  for (const auto& p : part) {
    rep.lhs += p[0];
    rep.l2 += p[1];
    rep.gradient += p[2];
  }
  const double r = geo.radius;
  for (std::size_t q = 0; q < ang.directions.size(); ++q)
    rep.surface += ang.weights[q] * r * r * f(r * ang.directions[q]).squaredNorm();
  rep.boundary = rep.surface;
  rep.surface *= geo.curvature;
  rep.rhs = rep.l2 + rep.gradient + rep.surface;
  rep.rhs_complete = rep.rhs + rep.boundary;
  const double scale = std::max(std::abs(rep.lhs), std::abs(rep.rhs));
  rep.mismatch = scale > 0.0 ? std::abs(rep.lhs - rep.rhs) / scale : 0.0;
  rep.boundary_coefficient = rep.boundary > 0.0 ? (rep.lhs - rep.l2 - rep.gradient) / rep.boundary
                                                 : std::numeric_limits<double>::quiet_NaN();
  const double scale_c = std::max(std::abs(rep.lhs), std::abs(rep.rhs_complete));
  rep.mismatch_complete = scale_c > 0.0 ? std::abs(rep.lhs - rep.rhs_complete) / scale_c : 0.0;
  return rep;
}

/// Pf = alpha1 alpha2 (n1 d2 - n2 d1) + alpha1 alpha3 (n1 d3 - n3 d1) + alpha2 alpha3 (n2 d3 - n3 d2) applied to f.
/// Only tangential derivatives enter; they are taken along great circles with
/// arc step `step` in the frame of tangent_frame.
inline Spinor4 surface_operator(const MITTestFunction& f, const Vec3& s, double step) {
  const SphereGeometry& geo = f.geometry;
  const double r = geo.radius;
  const auto [t1, t2] = sphere::tangent_frame(s);
  auto along = [&](const Vec3& t) {
    const Vec3 xp = r * (std::cos(step) * s + std::sin(step) * t);
    const Vec3 xm = r * (std::cos(step) * s - std::sin(step) * t);
    return Spinor4((f(xp) - f(xm)) / (2.0 * r * step));
  };
  const Spinor4 d1 = along(t1);
  const Spinor4 d2 = along(t2);
  // Gradient restricted to the tangent plane: grad f = t1 d1 + t2 d2.
  const Vec3 n = geo.normal(s);
  Spinor4 out = Spinor4::Zero();
  for (int a = 0; a < 3; ++a) {
    for (int c = a + 1; c < 3; ++c) {
      const Spinor4 da = t1(a) * d1 + t2(a) * d2;
      const Spinor4 dc = t1(c) * d1 + t2(c) * d2;
      out += dirac::alpha(a + 1) * dirac::alpha(c + 1) * (n(a) * dc - n(c) * da);
    }
  }
  return out;
}

struct SurfaceReport {
  double trace_error = 0.0;  ///< max |B f - f|
  double flux = 0.0;         ///< max |f^* (-i alpha.n) f|
  double p_error = 0.0;      ///< max |P f - (2 h f - B P f)|
  double step = 0.0;
};

inline SurfaceReport surface_checks(const MITTestFunction& f, int n_angular) {
  const SphereGeometry& geo = f.geometry;
  const sphere::SphereRule ang = sphere::product_rule(n_angular / 2, n_angular);
  SurfaceReport rep;
  rep.step = kPi / n_angular;
  for (const auto& s : ang.directions) {
    const Vec3 n = geo.normal(s);
    const Mat4 bm = mit_b(n);
    const Spinor4 v = f(geo.radius * s);
    rep.trace_error = std::max(rep.trace_error, (bm * v - v).norm());
    rep.flux = std::max(rep.flux, std::abs(v.dot(-kI * dirac::alpha_dot(n) * v)));
    const Spinor4 pf = surface_operator(f, s, rep.step);
    rep.p_error = std::max(rep.p_error, (pf - (2.0 * geo.curvature * v - bm * pf)).norm());
  }
  return rep;
}

// ---- manufactured families ------------------------------------------------------------

/// Smooth spinor (c0 + sum_j c_j x_j / width) e^{-|x - x0|^2 / width^2},
/// truncated smoothly between cut_a and cut_b.
inline SpinorFn polynomial_gaussian(const std::array<Spinor4, 4>& c, const Vec3& x0, double width, double cut_a,
                                    double cut_b) {
  return [c, x0, width, cut_a, cut_b](const Vec3& x) {
    const double t = taper(x.norm(), cut_a, cut_b);
    if (t == 0.0) return Spinor4(Spinor4::Zero());
    const Vec3 u = x / width;
    Spinor4 v = c[0] + u(0) * c[1] + u(1) * c[2] + u(2) * c[3];
    return Spinor4(v * (t * std::exp(-(x - x0).squaredNorm() / (width * width))));
  };
}

/// Spinor supported in the open shell a < |x| < b.
inline SpinorFn shell_bump(const Spinor4& c0, const Spinor4& c1, double a, double b) {
  return [c0, c1, a, b](const Vec3& x) {
    const double r = x.norm();
    if (r <= a || r >= b) return Spinor4(Spinor4::Zero());
    const double t = (2.0 * r - a - b) / (b - a);
    return Spinor4((c0 + x(2) * c1) * grid::smooth_bump(std::abs(t)));
  };
}

/// Five test functions; k = 0 has h = 0 (interior only), the rest mix both parts.
inline std::vector<MITTestFunction> manufactured_family(const SphereGeometry& geo, std::uint64_t seed, int count = 5) {
  std::vector<MITTestFunction> out;
  std::uint64_t st = seed;
  auto next = [&st]() {
    st = st * 6364136223846793005ULL + 1442695040888963407ULL;
    return static_cast<double>(st >> 11) * 0x1.0p-53 * 2.0 - 1.0;
  };
  auto spinor = [&]() {
    Spinor4 v;
    for (int k = 0; k < 4; ++k) v(k) = cplx(next(), next());
    return v;
  };
  const double span = geo.outer - geo.radius;
  const double cut_a = geo.radius + 0.7 * span;
  const double cut_b = geo.outer - 0.05 * span;
  for (int k = 0; k < count; ++k) {
    const Spinor4 g0 = 0.3 * spinor(), g1 = 0.3 * spinor() / geo.outer;
    SpinorFn g = shell_bump(g0, g1, geo.radius + 0.25 * span, geo.outer - 0.1 * span);
    SpinorFn h;
    if (k > 0) {
      std::array<Spinor4, 4> c{spinor(), spinor(), spinor(), spinor()};
      const Vec3 x0 = geo.radius * Vec3(next(), next(), next());
      h = polynomial_gaussian(c, x0, 0.5 * span, cut_a, cut_b);
    }
    out.push_back(make_mit_function(h, g, geo));
  }
  return out;
}

}  // namespace diracres::mit
