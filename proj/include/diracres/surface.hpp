#pragma once

// Points of the surface z^2 - omega^2 = 1, the two coordinate charts, and
// numerical analytic continuation along straight segments.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "errors.hpp"
#include "types.hpp"

namespace diracres::surface {

enum class Chart { ZChart, OmegaChart };

inline const char* to_string(Chart c) { return c == Chart::ZChart ? "z" : "omega"; }

inline constexpr double kChartSwitch = 0.1;
inline constexpr double kChartHysteresis = 0.05;
inline constexpr double kRamificationGuard = 1e-3;
inline constexpr double kMinStep = 1e-6;

struct SurfacePoint {
  cplx z{0.0, 0.0};
  cplx omega{0.0, 1.0};
  Chart chart = Chart::ZChart;

  cplx coordinate(Chart c) const { return c == Chart::ZChart ? z : omega; }
  cplx coordinate() const { return coordinate(chart); }
};

inline double constraint_residual(cplx z, cplx omega) {
  return std::abs(z * z - omega * omega - 1.0) / (1.0 + std::norm(z) + std::norm(omega));
}
inline double constraint_residual(const SurfacePoint& p) { return constraint_residual(p.z, p.omega); }

/// Chart label with hysteresis: OmegaChart below |omega| = 0.1, and a point
/// already in OmegaChart keeps it until |omega| exceeds 0.15.
inline Chart chart_for(cplx omega, Chart previous = Chart::ZChart) {
  const double a = std::abs(omega);
  if (a < kChartSwitch) return Chart::OmegaChart;
  if (previous == Chart::OmegaChart && a <= kChartSwitch + kChartHysteresis) return Chart::OmegaChart;
  return Chart::ZChart;
}

inline SurfacePoint make_point(cplx z, cplx omega, Chart previous = Chart::ZChart) {
  if (!all_finite(z) || !all_finite(omega)) throw Error(ErrorKind::NonFinite, "surface point: non-finite coordinate");
  if (constraint_residual(z, omega) > 1e-12) {
    throw Error(ErrorKind::InvalidArgument, "surface point: z^2 - omega^2 != 1");
  }
  return SurfacePoint{z, omega, chart_for(omega, previous)};
}

/// (z, omega) with Im omega > 0.
inline SurfacePoint lift_physical(cplx z) {
  if (!all_finite(z)) throw Error(ErrorKind::NonFinite, "lift_physical: non-finite z");
  cplx w = std::sqrt(z * z - 1.0);
  if (w.imag() < 0.0) w = -w;
  if (!(w.imag() > 0.0)) {
    throw Error(ErrorKind::BranchCut, "lift_physical: z on the essential spectrum");
  }
  // One Newton polish on w^2 = z^2 - 1.
  w -= (w * w - (z * z - 1.0)) / (2.0 * w);
  return SurfacePoint{z, w, chart_for(w)};
}

/// Sheet involution omega -> -omega.
inline SurfacePoint reflect(const SurfacePoint& p) { return SurfacePoint{p.z, -p.omega, p.chart}; }

inline bool on_physical_sheet(const SurfacePoint& p) { return p.omega.imag() > 0.0; }

struct SurfacePath {
  std::vector<SurfacePoint> points;
  std::vector<double> steps;
};

namespace detail {

inline double segment_distance(cplx a, cplx b, cplx p) {
  const cplx d = b - a;
  const double len2 = std::norm(d);
  if (len2 == 0.0) return std::abs(p - a);
  const double t = std::clamp(((p - a) * std::conj(d)).real() / len2, 0.0, 1.0);
  return std::abs(a + t * d - p);
}

// Tracks v with v^2 = u^2 + s as u moves from u0 to u1.
// ZChart: u = z, v = omega, s = -1.  OmegaChart: u = omega, v = z, s = +1.
inline cplx track(cplx u0, cplx v0, cplx u1, double s, SurfacePath* path, Chart chart, Chart& label,
                  const SurfacePoint& last_good) {
  auto f = [s](cplx u) { return u * u + s; };
  auto newton = [&](cplx u, cplx v) {
    for (int k = 0; k < 2; ++k) v -= (v * v - f(u)) / (2.0 * v);
    return v;
  };
  cplx u = u0, v = v0;
  const cplx du_total = u1 - u0;
  double t = 0.0, dt = 1.0;
  while (t < 1.0) {
    dt = std::min(dt, 1.0 - t);
    const double tn = dt >= 1.0 - t ? 1.0 : t + dt;
    const cplx un = tn == 1.0 ? u1 : u0 + tn * du_total;
    const cplx dv = (u / v) * (un - u);
    bool ok = std::abs(dv) <= 0.25 * std::abs(v);  // small relative change: Newton cannot hop sheets
    cplx vn = v;
    if (ok) {
      vn = newton(un, v + dv);
      const double res = std::abs(vn * vn - f(un)) / (1.0 + std::norm(un) + std::norm(vn));
      ok = all_finite(vn) && res <= 1e-10 && std::abs(vn - v) <= 0.5 * std::abs(v);
    }
    if (!ok) {
      dt *= 0.5;
      if (dt * std::abs(du_total) < kMinStep) {
        throw Error(ErrorKind::ContinuationFailure,
                    "continue_to: step below 1e-6 at u=(" + std::to_string(u.real()) + "," +
                        std::to_string(u.imag()) + "); last good z=(" + std::to_string(last_good.z.real()) + "," +
                        std::to_string(last_good.z.imag()) + ")");
      }
      continue;
    }
    if (path) {
      const cplx z = chart == Chart::ZChart ? un : vn;
      const cplx w = chart == Chart::ZChart ? vn : un;
      label = chart_for(w, label);
      path->points.push_back(SurfacePoint{z, w, label});
      path->steps.push_back(std::abs(un - u) + std::abs(vn - v));
    }
    u = un;
    v = vn;
    t = tn;
    dt *= 2.0;
  }
  for (int k = 0; k < 3; ++k) v -= (v * v - f(u)) / (2.0 * v);
  return v;
}

}  // namespace detail

/// Continues `start` along the straight segment from its coordinate in
/// `in_chart` to `target`. ZChart segments must stay 1e-3 away from z = +-1;
/// OmegaChart segments must stay 1e-3 away from omega = +-i (where dz/domega
/// blows up).
inline SurfacePoint continue_to(const SurfacePoint& start, cplx target, Chart in_chart, SurfacePath* path = nullptr) {
  if (!all_finite(target)) throw Error(ErrorKind::NonFinite, "continue_to: non-finite target");
  const cplx u0 = start.coordinate(in_chart);
  if (path && path->points.empty()) {
    path->points.push_back(start);
    path->steps.push_back(0.0);
  }
  if (u0 == target) return start;
  const cplx sing = in_chart == Chart::ZChart ? cplx(1.0, 0.0) : cplx(0.0, 1.0);
  if (detail::segment_distance(u0, target, sing) < kRamificationGuard ||
      detail::segment_distance(u0, target, -sing) < kRamificationGuard) {
    throw Error(ErrorKind::ChartSwitchRequired,
                std::string("continue_to: segment passes a singular point of the ") + to_string(in_chart) + " chart");
  }
  Chart label = start.chart;
  if (in_chart == Chart::ZChart) {
    const cplx w = detail::track(start.z, start.omega, target, -1.0, path, in_chart, label, start);
    return SurfacePoint{target, w, chart_for(w, start.chart)};
  }
  const cplx z = detail::track(start.omega, start.z, target, 1.0, path, in_chart, label, start);
  return SurfacePoint{z, target, chart_for(target, start.chart)};
}

/// Continues through a sequence of waypoints, each leg a straight segment.
inline SurfacePoint continue_along(const SurfacePoint& start, const std::vector<cplx>& waypoints, Chart in_chart,
                                   SurfacePath* path = nullptr) {
  SurfacePoint p = start;
  for (const cplx& w : waypoints) p = continue_to(p, w, in_chart, path);
  return p;
}

struct MonodromyResult {
  int sign = 0;
  SurfacePoint start;
  SurfacePoint end;
};

/// Continues once (or `turns` times) around the circle of given radius about
/// the ramification point (center_sign, 0), starting on the physical sheet.
inline MonodromyResult monodromy_loop(int center_sign, double radius, int turns = 1, int chords = 64) {
  if (center_sign != 1 && center_sign != -1)
    throw Error(ErrorKind::InvalidArgument, "monodromy_loop: center must be +1 or -1");
  if (!(radius > 0.0 && radius < 0.5)) throw Error(ErrorKind::InvalidArgument, "monodromy_loop: radius not in (0, 0.5)");
  const cplx c(center_sign, 0.0);
  MonodromyResult r;
  r.start = lift_physical(c + kI * radius);
  SurfacePoint p = r.start;
  for (int t = 0; t < turns; ++t) {
    for (int k = 1; k <= chords; ++k) {
      const double th = kPi / 2.0 + 2.0 * kPi * k / chords;
      cplx target = c + radius * std::exp(kI * th);
      if (k == chords) target = r.start.z;
      p = continue_to(p, target, Chart::ZChart);
    }
  }
  r.end = p;
  const cplx q = p.omega / r.start.omega;
  if (std::abs(q - 1.0) < 1e-8) {
    r.sign = 1;
  } else if (std::abs(q + 1.0) < 1e-8) {
    r.sign = -1;
  } else {
    throw Error(ErrorKind::ContinuationFailure, "monodromy_loop: endpoint does not match either sheet");
  }
  return r;
}

}  // namespace diracres::surface
