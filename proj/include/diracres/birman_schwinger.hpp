#pragma once

// The discretized operator 1 + V R0(m) rho and its resonance indicators.

#include <limits>
#include <string>
#include <vector>

#include "errors.hpp"
#include "grid.hpp"
#include "kernel.hpp"
#include "linalg.hpp"
#include "parallel.hpp"
#include "resolvent.hpp"
#include "surface.hpp"

namespace diracres::bs {

using surface::SurfacePoint;

/// Which nodes carry unknowns. Rows of K vanish wherever V does, so 1 + K is
/// block triangular and both choices give the same determinant and the same
/// null vectors; PotentialSupport is just much smaller.
enum class ActiveSet { PotentialSupport, CutoffSupport };

struct Options {
  ActiveSet active = ActiveSet::PotentialSupport;
  int workers = 1;
};

struct BSMatrix {
  linalg::CMatrix matrix;
  SurfacePoint at;
  grid::GridPtr grid;
  std::vector<std::size_t> nodes;  ///< grid index of each 4x4 block row/column
};

inline std::vector<std::size_t> active_nodes(const grid::PotentialField& v, const grid::CutoffField& rho, ActiveSet a) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < v.values.size(); ++i) {
    const bool on = a == ActiveSet::PotentialSupport ? !v.values[i].isZero(0.0) : rho.values[i] != 0.0;
    if (on) out.push_back(i);
  }
  return out;
}

inline void check_preconditions(const SurfacePoint& at, const grid::PotentialField& v, const grid::CutoffField& rho) {
  grid::require_same_grid(v.grid, rho.grid, "bs::assemble");
  if (!grid::precedes(v, rho)) throw Error(ErrorKind::CutoffOrder, "bs::assemble: rho is not 1 on the support of V");
  if (!resolvent::within_envelope(at, v.grid->h)) {
    throw Error(ErrorKind::Resolution, "bs::assemble: |omega| h = " + std::to_string(std::abs(at.omega) * v.grid->h) +
                                           " exceeds " + std::to_string(resolvent::kEnvelope));
  }
}

/// Block (i, j) = V(x_i) A_ij w_j rho(x_j), where A_ij = F(x_i - x_j) off the
/// near stencil and the resolvent's near-field correction blocks on it.
inline BSMatrix assemble(const SurfacePoint& at, const grid::PotentialField& v, const grid::CutoffField& rho,
                         const Options& opt = {}) {
  check_preconditions(at, v, rho);
  const auto& g = *v.grid;
  BSMatrix out;
  out.at = at;
  out.grid = v.grid;
  out.nodes = active_nodes(v, rho, opt.active);
  const auto m = static_cast<Eigen::Index>(out.nodes.size());
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Identity(4 * m, 4 * m);
  if (m == 0) {
    out.matrix = linalg::CMatrix(std::move(a));
    return out;
  }
  std::vector<long> pos(g.size(), -1);
  for (Eigen::Index k = 0; k < m; ++k) pos[out.nodes[k]] = static_cast<long>(k);

  const Mat4 diag = resolvent::diag_correction(at, g.h);
  const int n = g.n;
  const std::size_t step[3] = {static_cast<std::size_t>(n) * n, static_cast<std::size_t>(n), 1};

  parallel_for(static_cast<std::size_t>(m), opt.workers, [&](std::size_t r) {
    const std::size_t i = out.nodes[r];
    const Mat4& vi = v.values[i];
    if (vi.isZero(0.0)) return;
    const Vec3& xi = g.nodes[i];
    for (Eigen::Index c = 0; c < m; ++c) {
      const std::size_t j = out.nodes[c];
      if (rho.values[j] == 0.0) continue;
      Mat4 blk;
      if (i == j) {
        blk = diag;
      } else {
        blk = kernel::eval_f(at, xi - g.nodes[j]) * g.weights[j];
      }
      a.block<4, 4>(4 * static_cast<Eigen::Index>(r), 4 * c) += vi * blk * rho.values[j];
    }
    const int idx[3] = {static_cast<int>(i / step[0]), static_cast<int>((i / n) % n), static_cast<int>(i % n)};
    for (int ax = 0; ax < 3; ++ax) {
      for (int s : {+1, -1}) {
        if ((s > 0 && idx[ax] + 1 >= n) || (s < 0 && idx[ax] == 0)) continue;
        const std::size_t j = s > 0 ? i + step[ax] : i - step[ax];
        if (pos[j] < 0 || rho.values[j] == 0.0) continue;
        a.block<4, 4>(4 * static_cast<Eigen::Index>(r), 4 * pos[j]) +=
            vi * resolvent::neighbour_correction(ax, s, g.h) * rho.values[j];
      }
    }
  });
  out.matrix = linalg::CMatrix(std::move(a));
  return out;
}

struct Indicator {
  linalg::LogDet logdet;
  double sigma_min = 1.0;
  bool singular = false;  ///< exact zero pivot; logdet is then meaningless
};

/// Exactly the identity (every V block vanished): det 1 without factoring.
inline bool is_identity(const BSMatrix& k) { return k.matrix.eigen().isIdentity(0.0); }

inline Indicator indicator(const BSMatrix& k) {
  Indicator out;
  if (k.matrix.rows() == 0 || is_identity(k)) return out;
  const linalg::Factorization f = linalg::lu_factor(k.matrix);
  if (f.singular()) {
    out.singular = true;
    out.sigma_min = 0.0;
    out.logdet.log_abs = -std::numeric_limits<double>::infinity();
    return out;
  }
  out.logdet = linalg::log_det(f);
  out.sigma_min = linalg::smallest_singular(f, k.matrix).sigma;
  return out;
}

inline Indicator indicator(const SurfacePoint& at, const grid::PotentialField& v, const grid::CutoffField& rho,
                           const Options& opt = {}) {
  return indicator(assemble(at, v, rho, opt));
}

/// Log-determinant alone (no singular value), for contour and Newton work.
inline linalg::LogDet log_det(const SurfacePoint& at, const grid::PotentialField& v, const grid::CutoffField& rho,
                              const Options& opt = {}) {
  const BSMatrix k = assemble(at, v, rho, opt);
  if (k.matrix.rows() == 0 || is_identity(k)) return {};
  return linalg::log_det(k.matrix);
}

struct CandidateState {
  grid::SpinorField phi;  ///< null vector of 1 + K, as a field (zero off the active nodes)
  grid::SpinorField psi;  ///< R0(m)(rho phi) on every grid node
  double sigma_min = 0.0;
};

/// Null vector phi of 1 + K mapped to psi = R0(m)(rho phi).
inline CandidateState resonant_candidate_state(const SurfacePoint& at, const grid::PotentialField& v,
                                               const grid::CutoffField& rho, double tol, const Options& opt = {}) {
  const BSMatrix k = assemble(at, v, rho, opt);
  if (k.matrix.rows() == 0) throw Error(ErrorKind::NotNearSingular, "resonant_candidate_state: V vanishes");
  const linalg::Factorization f = linalg::lu_factor(k.matrix);
  const auto est = linalg::smallest_singular(f, k.matrix);
  const linalg::Vector nv = linalg::null_vector(k.matrix, tol);
  CandidateState out;
  out.sigma_min = est.sigma;
  out.phi = grid::zero_spinor(v.grid);
  double support = 0.0;
  for (std::size_t r = 0; r < k.nodes.size(); ++r) {
    const std::size_t i = k.nodes[r];
    out.phi.values[i] = nv.segment<4>(4 * static_cast<Eigen::Index>(r));
    support = std::max(support, v.grid->nodes[i].norm());
  }
  out.phi.support_radius = support;
  grid::SpinorField src = out.phi;
  for (std::size_t i = 0; i < src.values.size(); ++i) src.values[i] *= rho.values[i];
  out.psi = resolvent::apply_r0_grid(at, src, opt.workers);
  return out;
}

}  // namespace diracres::bs
