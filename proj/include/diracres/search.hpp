#pragma once

// Resonance location: indicator scans, argument-principle zero counts, Newton
// refinement, residue rank and the outgoing-state check.

#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/SVD>

#include "birman_schwinger.hpp"
#include "errors.hpp"
#include "grid.hpp"
#include "linalg.hpp"
#include "parallel.hpp"
#include "resolvent.hpp"
#include "surface.hpp"

namespace diracres::search {

using surface::Chart;
using surface::SurfacePoint;

inline constexpr double kDetectionTol = 1e-6;
inline constexpr double kRegionGuard = 1e-2;

// ---- scan regions -------------------------------------------------------------

/// Rectangle [lo, hi] in a chart coordinate. `sheet` picks the branch at the
/// center: in ZChart it is the sign of Im omega, in OmegaChart the sign of Re z.
struct ScanRegion {
  Chart chart = Chart::ZChart;
  cplx lo{0.0, 0.0};
  cplx hi{1.0, 1.0};
  int nx = 2;
  int ny = 2;
  int sheet = 1;

  cplx center() const { return 0.5 * (lo + hi); }
  cplx cell(int i, int j) const {
    const double tx = nx > 1 ? static_cast<double>(i) / (nx - 1) : 0.5;
    const double ty = ny > 1 ? static_cast<double>(j) / (ny - 1) : 0.5;
    return {lo.real() + tx * (hi.real() - lo.real()), lo.imag() + ty * (hi.imag() - lo.imag())};
  }
};

inline double rect_distance(const ScanRegion& r, cplx p) {
  const double dx = std::max({r.lo.real() - p.real(), 0.0, p.real() - r.hi.real()});
  const double dy = std::max({r.lo.imag() - p.imag(), 0.0, p.imag() - r.hi.imag()});
  return std::hypot(dx, dy);
}

inline void validate(const ScanRegion& r) {
  if (!(r.lo.real() <= r.hi.real() && r.lo.imag() <= r.hi.imag()))
    throw Error(ErrorKind::InvalidArgument, "scan region: lo must be below-left of hi");
  if (r.nx < 1 || r.ny < 1) throw Error(ErrorKind::InvalidArgument, "scan region: resolution must be positive");
  if (r.sheet != 1 && r.sheet != -1) throw Error(ErrorKind::InvalidArgument, "scan region: sheet must be +1 or -1");
  const cplx sing = r.chart == Chart::ZChart ? cplx(1.0, 0.0) : cplx(0.0, 1.0);
  if (rect_distance(r, sing) < kRegionGuard || rect_distance(r, -sing) < kRegionGuard) {
    throw Error(ErrorKind::InvalidArgument, std::string("scan region: rectangle within 1e-2 of a singular point of the ") +
                                                surface::to_string(r.chart) + " chart");
  }
}

/// Surface point at a chart coordinate, choosing the branch by `sheet`.
inline SurfacePoint point_on_sheet(Chart chart, cplx coord, int sheet) {
  if (chart == Chart::ZChart) {
    cplx w = std::sqrt(coord * coord - 1.0);
    if (w.imag() == 0.0) throw Error(ErrorKind::InvalidArgument, "sheet undefined: omega is real at this z");
    if ((w.imag() > 0.0) != (sheet > 0)) w = -w;
    return surface::make_point(coord, w);
  }
  cplx z = std::sqrt(1.0 + coord * coord);
  if (z.real() == 0.0) throw Error(ErrorKind::InvalidArgument, "sheet undefined: z is imaginary at this omega");
  if ((z.real() > 0.0) != (sheet > 0)) z = -z;
  return surface::make_point(z, coord);
}

inline SurfacePoint region_point(const ScanRegion& r, cplx coord) {
  const SurfacePoint c = point_on_sheet(r.chart, r.center(), r.sheet);
  return surface::continue_to(c, coord, r.chart);
}

struct ScanCell {
  cplx coord;
  SurfacePoint at;
  bool masked = false;
  std::string error;
  linalg::LogDet logdet;
  double sigma_min = 0.0;
};

struct ScanResult {
  ScanRegion region;
  std::vector<ScanCell> cells;  ///< row-major, imaginary part slowest
};

/// Indicator at every cell; per-cell failures are recorded as masked cells.
inline ScanResult scan(const ScanRegion& region, const grid::PotentialField& v, const grid::CutoffField& rho,
                       const bs::Options& opt = {}) {
  validate(region);
  ScanResult out;
  out.region = region;
  out.cells.resize(static_cast<std::size_t>(region.nx) * region.ny);
  const SurfacePoint center = point_on_sheet(region.chart, region.center(), region.sheet);
  bs::Options inner = opt;
  inner.workers = 1;
  parallel_for(out.cells.size(), opt.workers, [&](std::size_t q) {
    const int i = static_cast<int>(q % region.nx);
    const int j = static_cast<int>(q / region.nx);
    ScanCell& c = out.cells[q];
    c.coord = region.cell(i, j);
    try {
      c.at = surface::continue_to(center, c.coord, region.chart);
      const auto ind = bs::indicator(c.at, v, rho, inner);
      if (ind.singular) {
        c.logdet.log_abs = -std::numeric_limits<double>::infinity();
        c.sigma_min = 0.0;
      } else {
        c.logdet = ind.logdet;
        c.sigma_min = ind.sigma_min;
      }
    } catch (const Error& e) {
      c.masked = true;
      c.error = to_string(e.kind());
    }
  });
  return out;
}

/// Cells whose sigma_min is below all unmasked 8-neighbours.
inline std::vector<std::size_t> local_minima(const ScanResult& s) {
  std::vector<std::size_t> out;
  const int nx = s.region.nx, ny = s.region.ny;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const auto& c = s.cells[static_cast<std::size_t>(j) * nx + i];
      if (c.masked) continue;
      bool is_min = true;
      for (int dj = -1; dj <= 1 && is_min; ++dj)
        for (int di = -1; di <= 1; ++di) {
          if (!di && !dj) continue;
          const int a = i + di, b = j + dj;
          if (a < 0 || b < 0 || a >= nx || b >= ny) continue;
          const auto& o = s.cells[static_cast<std::size_t>(b) * nx + a];
          if (!o.masked && o.sigma_min < c.sigma_min) {
            is_min = false;
            break;
          }
        }
      if (is_min) out.push_back(static_cast<std::size_t>(j) * nx + i);
    }
  return out;
}

// ---- argument principle ---------------------------------------------------------

using LogDetFn = std::function<linalg::LogDet(const SurfacePoint&)>;

inline LogDetFn bs_log_det(const grid::PotentialField& v, const grid::CutoffField& rho, const bs::Options& opt = {}) {
  return [&v, &rho, opt](const SurfacePoint& p) { return bs::log_det(p, v, rho, opt); };
}

struct WindingOptions {
  int initial_per_edge = 8;
  int max_evaluations = 4000;
  double min_step = 1e-9;
};

struct WindingResult {
  int winding = 0;
  double total_phase = 0.0;
  int evaluations = 0;
};

/// Zeros of det(1 + K) inside a closed polygon (vertices in chart
/// coordinates, counter-clockwise), counted by the total phase increment.
/// `start` must lie on the first vertex. Segments are bisected until every
/// phase step is below pi/2.
inline WindingResult winding_number(const std::vector<cplx>& vertices, const SurfacePoint& start, Chart chart,
                                    const LogDetFn& f, const WindingOptions& opt = {}) {
  if (vertices.size() < 3) throw Error(ErrorKind::InvalidArgument, "winding_number: need at least 3 vertices");
  if (std::abs(start.coordinate(chart) - vertices.front()) > 1e-12)
    throw Error(ErrorKind::InvalidArgument, "winding_number: start is not on the first vertex");

  struct Node {
    cplx coord;
    SurfacePoint at;
    double phase;
  };
  WindingResult out;
  auto eval = [&](const SurfacePoint& p) {
    if (++out.evaluations > opt.max_evaluations)
      throw Error(ErrorKind::PhaseUnwrapFailure, "winding_number: evaluation budget exhausted");
    return f(p).phase;
  };

  std::vector<cplx> coords;
  for (std::size_t e = 0; e < vertices.size(); ++e) {
    const cplx a = vertices[e], b = vertices[(e + 1) % vertices.size()];
    for (int k = 0; k < opt.initial_per_edge; ++k) coords.push_back(a + (b - a) * (static_cast<double>(k) / opt.initial_per_edge));
  }
  coords.push_back(vertices.front());

  Node cur{coords[0], start, eval(start)};
  const double phase0 = cur.phase;
  double total = 0.0;
  for (std::size_t k = 1; k < coords.size(); ++k) {
    // Walk from cur to coords[k], bisecting as needed.
    std::vector<cplx> pending{coords[k]};
    while (!pending.empty()) {
      const cplx target = pending.back();
      const SurfacePoint p = surface::continue_to(cur.at, target, chart);
      const double ph = eval(p);
      const double d = linalg::wrap_phase(ph - cur.phase);
      if (std::abs(d) >= kPi / 2.0) {
        const cplx mid = 0.5 * (cur.coord + target);
        if (std::abs(target - cur.coord) < opt.min_step)
          throw Error(ErrorKind::PhaseUnwrapFailure, "winding_number: phase jump does not resolve under bisection");
        pending.push_back(mid);
        continue;
      }
      total += d;
      cur = Node{target, p, ph};
      pending.pop_back();
    }
  }
  if (std::abs(cur.at.omega - start.omega) > 1e-8 * (1.0 + std::abs(start.omega)) ||
      std::abs(cur.at.z - start.z) > 1e-8 * (1.0 + std::abs(start.z))) {
    throw Error(ErrorKind::InvalidArgument, "winding_number: contour does not close on the same sheet");
  }
  (void)phase0;
  out.total_phase = total;
  out.winding = static_cast<int>(std::lround(total / (2.0 * kPi)));
  return out;
}

inline std::vector<cplx> rectangle(cplx lo, cplx hi) {
  return {lo, cplx(hi.real(), lo.imag()), hi, cplx(lo.real(), hi.imag())};
}

inline std::vector<cplx> circle_polygon(cplx c, double r, int n = 16) {
  std::vector<cplx> out;
  for (int k = 0; k < n; ++k) out.push_back(c + r * std::exp(kI * (2.0 * kPi * k / n)));
  return out;
}

// ---- Newton refinement ------------------------------------------------------------

struct NewtonStep {
  cplx coord;
  double log_abs;
  double sigma_min;
};

struct ResonanceRecord {
  SurfacePoint location;
  Chart chart = Chart::ZChart;
  linalg::LogDet logdet;
  double sigma_min = 1.0;
  int newton_iterations = 0;
  int winding = 0;
  int multiplicity = 0;
  std::vector<NewtonStep> history;
  std::optional<grid::SpinorField> state;
};

struct RefineOptions {
  double tol = kDetectionTol;
  double fd_step = 1e-5;
  int max_iterations = 50;
  double min_step = 1e-12;
};

/// Evaluates (log det, sigma_min) at a surface point.
using IndicatorFn = std::function<bs::Indicator(const SurfacePoint&)>;

inline IndicatorFn bs_indicator(const grid::PotentialField& v, const grid::CutoffField& rho, const bs::Options& opt = {}) {
  return [&v, &rho, opt](const SurfacePoint& p) { return bs::indicator(p, v, rho, opt); };
}

inline cplx log_value(const linalg::LogDet& d) { return {d.log_abs, d.phase}; }

/// Damped Newton iteration for the zeros of det in the chart coordinate,
/// applied to det/det' so that multiple zeros converge quadratically too:
/// with L = log det the step is L'/L''. Both derivatives are central
/// differences of the log-determinant; the difference step shrinks with the
/// Newton step so it stays small against the distance to the zero.
inline ResonanceRecord refine(const SurfacePoint& seed, Chart chart, const IndicatorFn& f, const RefineOptions& opt = {}) {
  ResonanceRecord rec;
  rec.chart = chart;
  SurfacePoint p = seed;
  bs::Indicator cur = f(p);
  rec.history.push_back({p.coordinate(chart), cur.logdet.log_abs, cur.sigma_min});
  double delta = opt.fd_step;
  auto fail = [&](const std::string& why) {
    std::string trace;
    for (const auto& s : rec.history)
      trace += " (" + std::to_string(s.coord.real()) + "," + std::to_string(s.coord.imag()) + ";" +
               std::to_string(s.sigma_min) + ")";
    throw Error(ErrorKind::RefineFailure, "refine: " + why + "; trace:" + trace);
  };
  for (int it = 0; it < opt.max_iterations; ++it) {
    if (cur.singular || cur.sigma_min <= opt.tol) {
      rec.newton_iterations = it;
      rec.location = p;
      rec.logdet = cur.logdet;
      rec.sigma_min = cur.sigma_min;
      return rec;
    }
    const cplx zeta = p.coordinate(chart);
    const SurfacePoint pp = surface::continue_to(p, zeta + delta, chart);
    const SurfacePoint pm = surface::continue_to(p, zeta - delta, chart);
    const cplx l0 = log_value(cur.logdet);
    const cplx lp = log_value(f(pp).logdet), lm = log_value(f(pm).logdet);
    const cplx dp(lp.real() - l0.real(), linalg::wrap_phase(lp.imag() - l0.imag()));
    const cplx dm(lm.real() - l0.real(), linalg::wrap_phase(lm.imag() - l0.imag()));
    const cplx d1 = (dp - dm) / (2.0 * delta);
    const cplx d2 = (dp + dm) / (delta * delta);
    if (std::abs(d2) == 0.0 || !all_finite(d1) || !all_finite(d2)) fail("degenerate log-determinant derivatives");
    cplx step = d1 / d2;
    bool accepted = false;
    for (int damp = 0; damp < 12; ++damp) {
      SurfacePoint q;
      try {
        q = surface::continue_to(p, zeta + step, chart);
      } catch (const Error&) {
        step *= 0.5;
        continue;
      }
      const bs::Indicator next = f(q);
      if (next.singular || next.logdet.log_abs < cur.logdet.log_abs) {
        p = q;
        cur = next;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      // Difference step wider than the distance to the zero: retry smaller.
      if (delta > 1e-10) {
        delta = std::max(1e-10, 0.01 * delta);
        continue;
      }
      fail("no descent after damping");
    }
    rec.history.push_back({p.coordinate(chart), cur.logdet.log_abs, cur.sigma_min});
    delta = std::clamp(0.1 * std::abs(step), 1e-10, opt.fd_step);
    if (std::abs(step) <= opt.min_step) {
      rec.newton_iterations = it + 1;
      rec.location = p;
      rec.logdet = cur.logdet;
      rec.sigma_min = cur.sigma_min;
      return rec;
    }
  }
  fail("iteration cap reached");
  return rec;
}

// ---- residue rank -----------------------------------------------------------------

/// Continued resolvent R(m) = R0 (1 + V R0 rho)^{-1} (1 - V R0 (1 - rho)),
/// applied to several sources at once and sampled at the `targets` nodes.
class ContinuedResolvent {
 public:
  ContinuedResolvent(const grid::PotentialField& v, const grid::CutoffField& rho, std::vector<std::size_t> targets,
                     bs::Options opt = {})
      : v_(v), rho_(rho), targets_(std::move(targets)), opt_(opt) {}

  /// Columns: one per source field; rows: 4 per target node.
  Eigen::MatrixXcd apply(const SurfacePoint& at, const std::vector<grid::SpinorField>& sources) const {
    const bs::BSMatrix k = bs::assemble(at, v_, rho_, opt_);
    const auto& g = *v_.grid;
    const auto& S = k.nodes;
    std::vector<char> in_s(g.size(), 0);
    for (auto i : S) in_s[i] = 1;
    const linalg::Factorization lu = linalg::lu_factor(k.matrix);
    const auto plan_s = resolvent::node_plan(v_.grid, S);
    const auto plan_t = resolvent::node_plan(v_.grid, targets_);

    Eigen::MatrixXcd out(4 * static_cast<Eigen::Index>(targets_.size()), static_cast<Eigen::Index>(sources.size()));
    for (std::size_t c = 0; c < sources.size(); ++c) {
      const grid::SpinorField& u = sources[c];
      // w = u - V R0 ((1 - rho) u)
      grid::SpinorField outer = u;
      for (std::size_t i = 0; i < g.size(); ++i) outer.values[i] *= (1.0 - rho_.values[i]);
      grid::SpinorField w = u;
      if (!S.empty()) {
        const auto r0o = resolvent::apply_r0(at, outer, plan_s);
        for (std::size_t r = 0; r < S.size(); ++r) w.values[S[r]] -= v_.values[S[r]] * r0o[r];
      }
      // y = (1 + V R0 rho)^{-1} w: y = w off S; on S solve with the coupling
      // to the off-S part moved to the right-hand side.
      grid::SpinorField y = w;
      if (!S.empty()) {
        grid::SpinorField off = w;
        for (std::size_t i = 0; i < g.size(); ++i) off.values[i] = in_s[i] ? Spinor4::Zero() : Spinor4(rho_.values[i] * w.values[i]);
        const auto coupling = resolvent::apply_r0(at, off, plan_s);
        linalg::Vector rhs(4 * static_cast<Eigen::Index>(S.size()));
        for (std::size_t r = 0; r < S.size(); ++r)
          rhs.segment<4>(4 * static_cast<Eigen::Index>(r)) = w.values[S[r]] - v_.values[S[r]] * coupling[r];
        const linalg::Vector ys = lu.solve(rhs);
        for (std::size_t r = 0; r < S.size(); ++r) y.values[S[r]] = ys.segment<4>(4 * static_cast<Eigen::Index>(r));
      }
      const auto res = resolvent::apply_r0(at, y, plan_t);
      for (std::size_t t = 0; t < targets_.size(); ++t) out.block<4, 1>(4 * static_cast<Eigen::Index>(t), c) = res[t];
    }
    return out;
  }

 private:
  const grid::PotentialField& v_;
  const grid::CutoffField& rho_;
  std::vector<std::size_t> targets_;
  bs::Options opt_;
};

struct ResidueOptions {
  int probes = 8;
  int initial_nodes = 32;
  int max_nodes = 1024;
  double stability = 1e-6;
  double rank_eps = 1e-6;
  std::uint64_t seed = 20240601;
  /// Multiply the integrand by (zeta - center)^power (power 1 probes the
  /// nilpotent part of the Laurent expansion).
  int power = 0;
};

struct ResidueResult {
  int rank = 0;
  std::vector<double> singular_values;
  double threshold = 0.0;
  int nodes = 0;
};

/// Random smooth probes chi_tilde * f, f with independent Gaussian spinor
/// coefficients on a few low-order polynomials.
inline std::vector<grid::SpinorField> make_probes(const grid::GridPtr& g, const grid::CutoffField& chi_tilde, int count,
                                                  std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::vector<grid::SpinorField> out;
  for (int p = 0; p < count; ++p) {
    Spinor4 coef[4];
    for (auto& c : coef)
      for (int k = 0; k < 4; ++k) c(k) = cplx(gauss(rng), gauss(rng));
    grid::SpinorField f = grid::zero_spinor(g);
    for (std::size_t i = 0; i < g->size(); ++i) {
      if (chi_tilde.values[i] == 0.0) continue;
      const Vec3& x = g->nodes[i];
      f.values[i] = chi_tilde.values[i] * (coef[0] + x(0) * coef[1] + x(1) * coef[2] + x(2) * coef[3]);
    }
    f.support_radius = chi_tilde.outer;
    out.push_back(std::move(f));
  }
  return out;
}

/// epsilon-rank of (1/(2 pi i)) \oint chi R chi_tilde dzeta over the circle of
/// `radius` around `center` (chart coordinate), applied to random probes.
inline ResidueResult residue_rank(const SurfacePoint& center, Chart chart, const grid::PotentialField& v,
                                  const grid::CutoffField& rho, const grid::CutoffField& chi,
                                  const grid::CutoffField& chi_tilde, double radius, const ResidueOptions& opt = {},
                                  const bs::Options& bopt = {}) {
  std::vector<std::size_t> targets;
  for (std::size_t i = 0; i < chi.values.size(); ++i)
    if (chi.values[i] != 0.0) targets.push_back(i);
  const ContinuedResolvent r(v, rho, targets, bopt);
  const auto probes = make_probes(v.grid, chi_tilde, opt.probes, opt.seed);
  const cplx c0 = center.coordinate(chart);

  // Integrand samples keyed by angle index on the finest circle used so far.
  auto sample = [&](const SurfacePoint& at, cplx zeta) {
    Eigen::MatrixXcd m = r.apply(at, probes);
    for (std::size_t t = 0; t < targets.size(); ++t) m.middleRows<4>(4 * static_cast<Eigen::Index>(t)) *= chi.values[targets[t]];
    if (opt.power > 0) m *= std::pow(zeta - c0, opt.power);
    return m;
  };
  // Points on the circle are reached radially from the center, so every node
  // sits on the sheet of `center`.
  auto point_at = [&](double theta) {
    return surface::continue_to(center, c0 + radius * std::exp(kI * theta), chart);
  };

  int n = opt.initial_nodes;
  std::vector<Eigen::MatrixXcd> vals;
  double max_norm = 0.0;
  for (int k = 0; k < n; ++k) {
    const double th = 2.0 * kPi * k / n;
    vals.push_back(sample(point_at(th), c0 + radius * std::exp(kI * th)));
    max_norm = std::max(max_norm, vals.back().norm());
  }
  auto integrate = [&](int nn) {
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(vals[0].rows(), vals[0].cols());
    for (int k = 0; k < nn; ++k) acc += vals[k] * (radius * std::exp(kI * (2.0 * kPi * k / nn)));
    return Eigen::MatrixXcd(acc / static_cast<double>(nn));
  };
  Eigen::MatrixXcd prev = integrate(n);
  for (;;) {
    if (2 * n > opt.max_nodes) throw Error(ErrorKind::ContourFailure, "residue_rank: trapezoid rule did not stabilise");
    std::vector<Eigen::MatrixXcd> finer(2 * n);
    for (int k = 0; k < n; ++k) finer[2 * k] = vals[k];
    for (int k = 0; k < n; ++k) {
      const double th = 2.0 * kPi * (2 * k + 1) / (2 * n);
      finer[2 * k + 1] = sample(point_at(th), c0 + radius * std::exp(kI * th));
      max_norm = std::max(max_norm, finer[2 * k + 1].norm());
    }
    vals = std::move(finer);
    n *= 2;
    const Eigen::MatrixXcd cur = integrate(n);
    const double scale = std::max(cur.norm(), radius * max_norm);
    const double change = (cur - prev).norm();
    prev = cur;
    if (change <= opt.stability * scale) break;
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(prev);
  ResidueResult out;
  out.nodes = n;
  const auto s = svd.singularValues();
  const double smax = s.size() ? s(0) : 0.0;
  out.threshold = opt.rank_eps * std::max(smax, radius * max_norm);
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    out.singular_values.push_back(s(k));
    if (s(k) > out.threshold) ++out.rank;
  }
  return out;
}

// ---- outgoing check -------------------------------------------------------------

struct OutgoingReport {
  double mismatch = 0.0;
  bool degenerate = false;
  std::size_t targets = 0;
};

/// Builds phi = -alpha.(D rho) psi = i (alpha.grad rho) psi and compares
/// R0(m) phi with psi at grid nodes with outer <= |y| <= 2 outer.
inline OutgoingReport outgoing_check(const grid::SpinorField& psi, const SurfacePoint& at, const grid::CutoffField& rho,
                                     int workers = 1) {
  OutgoingReport rep;
  const auto& g = *psi.grid;
  grid::SpinorField src = grid::zero_spinor(psi.grid);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Vec3& gr = rho.gradient[i];
    if (gr.isZero(0.0)) continue;
    src.values[i] = kI * kernel::alpha_dot_apply(gr, psi.values[i]);
  }
  src.support_radius = rho.outer;
  std::vector<std::size_t> targets;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double r = g.nodes[i].norm();
    if (r >= rho.outer && r <= 2.0 * rho.outer) targets.push_back(i);
  }
  rep.targets = targets.size();
  const auto vals = resolvent::apply_r0(at, src, resolvent::node_plan(psi.grid, targets, workers));
  double num = 0.0, den = 0.0;
  for (std::size_t t = 0; t < targets.size(); ++t) {
    num += (vals[t] - psi.values[targets[t]]).squaredNorm();
    den += psi.values[targets[t]].squaredNorm();
  }
  if (den == 0.0) {
    rep.degenerate = true;
    rep.mismatch = std::sqrt(num);
    return rep;
  }
  rep.mismatch = std::sqrt(num / den);
  return rep;
}

}  // namespace diracres::search
