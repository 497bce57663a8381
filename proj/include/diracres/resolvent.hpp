#pragma once

// Free resolvent R0(m) phi = F_m * phi by corrected midpoint quadrature, and
// a Fourier-multiplier reference on the physical sheet.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <fftw3.h>

#include "dirac.hpp"
#include "errors.hpp"
#include "grid.hpp"
#include "kernel.hpp"
#include "parallel.hpp"
#include "surface.hpp"
#include "types.hpp"

namespace diracres::resolvent {

using grid::SpinorField;
using surface::SurfacePoint;

/// Lattice self-weight: for smooth compactly supported g,
///   sum_{j != 0} h^3 g(jh)/|jh| + kLatticeSelfWeight h^2 g(0)
/// matches the integral of g/|x| up to O(h^4). Equals -Z(1/2) for the
/// Epstein zeta function of the cubic lattice.
inline constexpr double kLatticeSelfWeight = 2.8372974794806;

/// Largest |omega| h for which the quadrature is trusted.
inline constexpr double kEnvelope = 0.5;

inline bool within_envelope(const SurfacePoint& at, double h) { return std::abs(at.omega) * h <= kEnvelope; }

/// Self-cell correction added to a node target: the 1/|x| and constant parts
/// of the Taylor expansion of exp(i omega r)/r, times (z + beta). The alpha
/// terms are odd and vanish on the cubic lattice.
inline Mat4 diag_correction(const SurfacePoint& at, double h) {
  const cplx c = (kLatticeSelfWeight * h * h + kI * at.omega * h * h * h) / (4.0 * kPi);
  return c * (at.z * dirac::identity() + dirac::beta());
}

/// Lattice correction of the odd part i alpha.x/(4 pi |x|^3) against the
/// linear part of the source: (c h^2 / (12 pi)) alpha.D phi(y), with D = -i grad
/// taken by central differences. Returns the block multiplying phi(y + s h e_a).
inline Mat4 neighbour_correction(int axis, int s, double h) {
  const cplx c = kLatticeSelfWeight * h * h / (12.0 * kPi) * (-kI) * static_cast<double>(s) / (2.0 * h);
  return c * dirac::alpha(axis + 1);
}

/// Applies the full near-field correction at node q of g to the nodal field
/// `value` (missing neighbours at the grid boundary count as zero).
template <typename Lookup>
Spinor4 apply_correction(const SurfacePoint& at, const grid::QuadratureGrid& g, std::size_t q, Lookup&& value) {
  Spinor4 out = diag_correction(at, g.h) * value(q);
  const int n = g.n;
  const int idx[3] = {static_cast<int>(q / (static_cast<std::size_t>(n) * n)), static_cast<int>((q / n) % n),
                      static_cast<int>(q % n)};
  const std::size_t step[3] = {static_cast<std::size_t>(n) * n, static_cast<std::size_t>(n), 1};
  for (int a = 0; a < 3; ++a) {
    if (idx[a] + 1 < n) out += neighbour_correction(a, +1, g.h) * value(q + step[a]);
    if (idx[a] > 0) out += neighbour_correction(a, -1, g.h) * value(q - step[a]);
  }
  return out;
}

struct ConvolutionPlan {
  grid::GridPtr source;
  std::vector<Vec3> targets;
  /// Grid node each target coincides with, if any.
  std::vector<std::optional<std::size_t>> node_of_target;
  double correction_radius = 0.0;
  bool correction = true;
  int workers = 1;
};

/// Index of the grid node at y, or nothing when y is not (to 1e-9 h) a node.
inline std::optional<std::size_t> node_at(const grid::QuadratureGrid& g, const Vec3& y) {
  int idx[3];
  for (int a = 0; a < 3; ++a) {
    const double u = (y(a) + g.radius) / g.h - 0.5;
    const double r = std::round(u);
    if (std::abs(u - r) > 1e-9 || r < 0 || r >= g.n) return std::nullopt;
    idx[a] = static_cast<int>(r);
  }
  return g.index(idx[0], idx[1], idx[2]);
}

inline ConvolutionPlan make_plan(const grid::GridPtr& g, std::vector<Vec3> targets, bool correction = true,
                                 int workers = 1) {
  ConvolutionPlan p;
  p.source = g;
  p.targets = std::move(targets);
  p.correction_radius = g->h;
  p.correction = correction;
  p.workers = workers;
  p.node_of_target.reserve(p.targets.size());
  for (const auto& y : p.targets) p.node_of_target.push_back(node_at(*g, y));
  return p;
}

inline ConvolutionPlan node_plan(const grid::GridPtr& g, const std::vector<std::size_t>& nodes, int workers = 1) {
  ConvolutionPlan p;
  p.source = g;
  p.correction_radius = g->h;
  p.workers = workers;
  for (auto j : nodes) {
    p.targets.push_back(g->nodes[j]);
    p.node_of_target.emplace_back(j);
  }
  return p;
}

/// R0(at) phi at the plan's targets. Node targets skip their own cell and
/// receive the near-field correction instead; off-grid targets use the plain
/// sum. The per-target reduction runs in node order.
inline std::vector<Spinor4> apply_r0(const SurfacePoint& at, const SpinorField& phi, const ConvolutionPlan& plan) {
  grid::require_same_grid(phi.grid, plan.source, "apply_r0");
  const auto& g = *phi.grid;
  std::vector<std::size_t> support;
  for (std::size_t j = 0; j < phi.values.size(); ++j)
    if (!phi.values[j].isZero(0.0)) support.push_back(j);

  std::vector<Spinor4> out(plan.targets.size(), Spinor4::Zero());
  parallel_for(plan.targets.size(), plan.workers, [&](std::size_t t) {
    const Vec3& y = plan.targets[t];
    const auto self = plan.node_of_target[t];
    Spinor4 acc = Spinor4::Zero();
    for (std::size_t j : support) {
      if (self && *self == j) continue;
      const Vec3 d = y - g.nodes[j];
      if (d.squaredNorm() == 0.0) throw Error(ErrorKind::PoleAtOrigin, "apply_r0: target coincides with a source node");
      acc += g.weights[j] * kernel::apply_f(at, d, phi.values[j]);
    }
    if (self) {
      if (!plan.correction && !phi.values[*self].isZero(0.0))
        throw Error(ErrorKind::PoleAtOrigin, "apply_r0: node target with correction disabled");
      if (plan.correction) acc += apply_correction(at, g, *self, [&](std::size_t p) { return phi.values[p]; });
    }
    out[t] = acc;
  });
  return out;
}

/// R0(at) phi on every grid node, as a field on the same grid.
inline SpinorField apply_r0_grid(const SurfacePoint& at, const SpinorField& phi, int workers = 1) {
  std::vector<std::size_t> all(phi.grid->size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  SpinorField out;
  out.grid = phi.grid;
  out.values = apply_r0(at, phi, node_plan(phi.grid, all, workers));
  out.support_radius = std::sqrt(3.0) * phi.grid->radius;
  return out;
}

/// (beta + alpha.xi - z)^{-1} = (beta + alpha.xi + z) / (1 + |xi|^2 - z^2)
inline Mat4 resolvent_multiplier(cplx z, const Vec3& xi) {
  return (dirac::beta() + dirac::alpha_dot(xi) + z * dirac::identity()) / (1.0 + xi.squaredNorm() - z * z);
}

/// Reference for R0 on the physical sheet: multiply the discrete Fourier
/// transform of phi (zero-padded `pad` times per axis) by the resolvent symbol
/// and transform back. Only defined for Im z != 0.
inline SpinorField fourier_oracle(cplx z, const SpinorField& phi, int pad = 4) {
  if (z.imag() == 0.0) throw Error(ErrorKind::OracleDomain, "fourier_oracle: z must be off the real axis");
  const auto& g = *phi.grid;
  const int n = g.n;
  const int N = pad * n;
  const std::size_t total = static_cast<std::size_t>(N) * N * N;
  const double L = N * g.h;

  fftw_complex* buf[4];
  for (auto& b : buf) {
    b = fftw_alloc_complex(total);
    if (!b) throw Error(ErrorKind::InvalidArgument, "fourier_oracle: allocation failed");
    std::fill(reinterpret_cast<double*>(b), reinterpret_cast<double*>(b) + 2 * total, 0.0);
  }
  auto at = [N](int i, int j, int k) { return (static_cast<std::size_t>(i) * N + j) * N + k; };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const Spinor4& v = phi.values[g.index(i, j, k)];
        for (int c = 0; c < 4; ++c) {
          buf[c][at(i, j, k)][0] = v(c).real();
          buf[c][at(i, j, k)][1] = v(c).imag();
        }
      }
  for (auto& b : buf) {
    fftw_plan p = fftw_plan_dft_3d(N, N, N, b, b, FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_execute(p);
    fftw_destroy_plan(p);
  }
  auto freq = [N, L](int i) { return 2.0 * kPi * (i < N / 2 ? i : i - N) / L; };
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k) {
        const std::size_t q = at(i, j, k);
        const Vec3 xi(freq(i), freq(j), freq(k));
        const Mat4 m = resolvent_multiplier(z, xi);
        Spinor4 v;
        for (int c = 0; c < 4; ++c) v(c) = cplx(buf[c][q][0], buf[c][q][1]);
        const Spinor4 w = m * v;
        for (int c = 0; c < 4; ++c) {
          buf[c][q][0] = w(c).real();
          buf[c][q][1] = w(c).imag();
        }
      }
  for (auto& b : buf) {
    fftw_plan p = fftw_plan_dft_3d(N, N, N, b, b, FFTW_BACKWARD, FFTW_ESTIMATE);
    fftw_execute(p);
    fftw_destroy_plan(p);
  }
  SpinorField out = grid::zero_spinor(phi.grid);
  out.support_radius = std::sqrt(3.0) * g.radius;
  const double scale = 1.0 / static_cast<double>(total);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int c = 0; c < 4; ++c) {
          const std::size_t q = at(i, j, k);
          out.values[g.index(i, j, k)](c) = cplx(buf[c][q][0], buf[c][q][1]) * scale;
        }
  for (auto& b : buf) fftw_free(b);
  return out;
}

// ---- finite-difference Dirac operator on grid nodes -------------------------

/// Nodes whose six axis neighbours lie in the grid and within `radius`.
inline std::vector<std::size_t> interior_nodes(const grid::QuadratureGrid& g, double radius) {
  std::vector<std::size_t> out;
  for (int i = 1; i + 1 < g.n; ++i)
    for (int j = 1; j + 1 < g.n; ++j)
      for (int k = 1; k + 1 < g.n; ++k) {
        const std::size_t q = g.index(i, j, k);
        if (g.nodes[q].norm() + g.h <= radius) out.push_back(q);
      }
  return out;
}

/// Interior nodes together with their axis neighbours (sorted, unique).
inline std::vector<std::size_t> with_neighbours(const grid::QuadratureGrid& g, const std::vector<std::size_t>& nodes) {
  std::vector<char> mark(g.size(), 0);
  const std::size_t step[3] = {static_cast<std::size_t>(g.n) * g.n, static_cast<std::size_t>(g.n), 1};
  for (auto q : nodes) {
    mark[q] = 1;
    for (auto s : step) {
      mark[q - s] = 1;
      mark[q + s] = 1;
    }
  }
  std::vector<std::size_t> out;
  for (std::size_t q = 0; q < mark.size(); ++q)
    if (mark[q]) out.push_back(q);
  return out;
}

/// (beta + alpha.D) psi at an interior node by central differences with the
/// grid spacing; `value(q)` returns psi at node q.
template <typename Lookup>
Spinor4 dirac_fd(const grid::QuadratureGrid& g, std::size_t q, Lookup&& value) {
  const std::size_t step[3] = {static_cast<std::size_t>(g.n) * g.n, static_cast<std::size_t>(g.n), 1};
  Spinor4 out = kernel::beta_apply(value(q));
  for (int a = 0; a < 3; ++a) {
    const Spinor4 d = (value(q + step[a]) - value(q - step[a])) / (2.0 * g.h);
    // alpha_a (-i d)
    Vec3 e = Vec3::Zero();
    e(a) = 1.0;
    out += kernel::alpha_dot_apply(e, Spinor4(-kI * d));
  }
  return out;
}

}  // namespace diracres::resolvent
