#pragma once

// Dense complex linear algebra: LU factorization, log-determinant, smallest
// singular value and null vectors. Every discretized operator in the library
// ends up here.

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "types.hpp"

namespace diracres::linalg {

using Vector = Eigen::VectorXcd;

/// Dense complex matrix with all entries finite. Immutable once built.
class CMatrix {
 public:
  CMatrix() = default;
  explicit CMatrix(Eigen::MatrixXcd m) : m_(std::move(m)) {
    if (!all_finite(m_)) throw Error(ErrorKind::NonFinite, "CMatrix: non-finite entry");
  }

  static CMatrix identity(Eigen::Index n) { return CMatrix(Eigen::MatrixXcd::Identity(n, n)); }

  Eigen::Index rows() const noexcept { return m_.rows(); }
  Eigen::Index cols() const noexcept { return m_.cols(); }
  bool square() const noexcept { return m_.rows() == m_.cols(); }
  cplx operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }
  const Eigen::MatrixXcd& eigen() const noexcept { return m_; }

 private:
  Eigen::MatrixXcd m_;
};

/// Determinant in log space: det = exp(log_abs + i*phase), phase in (-pi, pi].
struct LogDet {
  double log_abs = 0.0;
  double phase = 0.0;
};

inline double wrap_phase(double p) {
  double w = std::remainder(p, 2.0 * kPi);
  if (w <= -kPi) w += 2.0 * kPi;
  return w;
}

/// Partial-pivoted LU, P*A = L*U. A singular input is not an error here: the
/// first exactly-zero pivot is recorded instead.
class Factorization {
 public:
  explicit Factorization(const CMatrix& a) : lu_(a.eigen()) {
    const auto& u = lu_.matrixLU();
    for (Eigen::Index k = 0; k < u.rows(); ++k) {
      if (u(k, k) == cplx(0.0)) {
        zero_pivot_ = static_cast<std::size_t>(k);
        break;
      }
    }
  }

  Eigen::Index dim() const noexcept { return lu_.matrixLU().rows(); }
  bool singular() const noexcept { return zero_pivot_.has_value(); }
  std::optional<std::size_t> zero_pivot() const noexcept { return zero_pivot_; }

  Vector pivots() const { return lu_.matrixLU().diagonal(); }
  Eigen::MatrixXcd lower() const {
    Eigen::MatrixXcd l = lu_.matrixLU().triangularView<Eigen::UnitLower>();
    return l;
  }
  Eigen::MatrixXcd upper() const {
    Eigen::MatrixXcd u = lu_.matrixLU().triangularView<Eigen::Upper>();
    return u;
  }
  Eigen::MatrixXcd permutation() const {
    Eigen::MatrixXcd p = lu_.permutationP();
    return p;
  }
  int permutation_sign() const { return lu_.permutationP().determinant(); }

  /// P^T * L * U, i.e. the input matrix up to rounding.
  Eigen::MatrixXcd reconstruct() const { return lu_.reconstructedMatrix(); }

  Vector solve(const Vector& b) const { return lu_.solve(b); }
  Vector solve_adjoint(const Vector& b) const { return lu_.adjoint().solve(b); }
  Eigen::MatrixXcd solve(const Eigen::MatrixXcd& b) const { return lu_.solve(b); }

  /// Unit vector v with U*v = 0, available when a pivot is exactly zero.
  Vector kernel_vector() const {
    const auto k = static_cast<Eigen::Index>(*zero_pivot_);
    const auto& lu = lu_.matrixLU();
    Vector v = Vector::Zero(dim());
    v(k) = 1.0;
    if (k > 0) {
      v.head(k) = lu.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(-lu.col(k).head(k));
    }
    return v.normalized();
  }

 private:
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu_;
  std::optional<std::size_t> zero_pivot_;
};

inline Factorization lu_factor(const CMatrix& a) {
  if (!a.square())
    throw Error(ErrorKind::Dimension, "lu_factor: matrix is " + std::to_string(a.rows()) + "x" +
                                          std::to_string(a.cols()));
  if (a.rows() == 0) throw Error(ErrorKind::Dimension, "lu_factor: empty matrix");
  return Factorization(a);
}

inline LogDet log_det(const Factorization& f) {
  if (f.singular()) {
    throw SingularMatrixError(*f.zero_pivot(),
                              "log_det: zero pivot at index " + std::to_string(*f.zero_pivot()));
  }
  const Vector p = f.pivots();
  LogDet out;
  double phase = f.permutation_sign() < 0 ? kPi : 0.0;
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    out.log_abs += std::log(std::abs(p(k)));
    phase += std::arg(p(k));
  }
  out.phase = wrap_phase(phase);
  return out;
}

inline LogDet log_det(const CMatrix& a) { return log_det(lu_factor(a)); }

struct SingularEstimate {
  double sigma = 0.0;
  Vector right_vector;  ///< unit vector v with |A v| ~ sigma
  int iterations = 0;
};

inline constexpr int kMaxSingularIterations = 200;

/// Smallest singular value of `a`, reusing its factorization. The top
/// eigenpair of (A^H A)^{-1} is found by Lanczos with full
/// reorthogonalization: each step costs one solve with A and one with A^H.
/// Stops once the Ritz residual bound gives ~1e-10 relative accuracy in sigma;
/// throws ConvergenceFailure if the iteration cap is hit first.
inline SingularEstimate smallest_singular(const Factorization& f, const CMatrix& a,
                                          int max_iterations = kMaxSingularIterations,
                                          double rel_tol = 1e-10) {
  const Eigen::Index n = f.dim();
  SingularEstimate out;
  if (f.singular()) {
    out.sigma = 0.0;
    out.right_vector = f.kernel_vector();
    return out;
  }

  std::mt19937_64 rng(0x5eed1234abcdULL);
  std::normal_distribution<double> gauss;
  Vector q(n);
  for (Eigen::Index i = 0; i < n; ++i) q(i) = cplx(gauss(rng), gauss(rng));
  q.normalize();

  const int cap = static_cast<int>(std::min<Eigen::Index>(max_iterations, n));
  Eigen::MatrixXcd basis(n, cap);
  std::vector<double> alpha, beta;
  double theta = 0.0;
  Eigen::VectorXd ritz;
  bool converged = false;

  for (int k = 0; k < cap; ++k) {
    basis.col(k) = q;
    Vector w = f.solve(f.solve_adjoint(q));
    alpha.push_back(q.dot(w).real());
    // Full reorthogonalization, applied twice.
    for (int pass = 0; pass < 2; ++pass) {
      const Vector c = basis.leftCols(k + 1).adjoint() * w;
      w.noalias() -= basis.leftCols(k + 1) * c;
    }
    const double b = w.norm();
    beta.push_back(b);

    const int m = k + 1;
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      t(i, i) = alpha[i];
      if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
    theta = es.eigenvalues()(m - 1);
    ritz = es.eigenvectors().col(m - 1);
    const double residual = b * std::abs(ritz(m - 1));
    out.iterations = m;
    if (residual <= rel_tol * theta || b <= 1e-300 || m == n) {
      converged = true;
      break;
    }
    q = w / b;
  }
  if (!converged) {
    throw Error(ErrorKind::ConvergenceFailure,
                "smallest_singular: no convergence in " + std::to_string(cap) + " iterations");
  }
  Vector v = basis.leftCols(out.iterations) * ritz.cast<cplx>();
  v.normalize();
  const double direct = (a.eigen() * v).norm();
  const double from_ritz = theta > 0.0 ? 1.0 / std::sqrt(theta) : direct;
  out.sigma = std::min(direct, from_ritz);
  out.right_vector = std::move(v);
  return out;
}

inline double min_singular(const CMatrix& a) {
  const Factorization f = lu_factor(a);
  return smallest_singular(f, a).sigma;
}

/// Unit vector spanning (approximately) the kernel of a nearly singular matrix.
inline Vector null_vector(const CMatrix& a, double tol) {
  const Factorization f = lu_factor(a);
  SingularEstimate est = smallest_singular(f, a);
  if (est.sigma > tol) {
    throw Error(ErrorKind::NotNearSingular, "null_vector: smallest singular value " +
                                                std::to_string(est.sigma) + " exceeds tolerance " +
                                                std::to_string(tol));
  }
  Vector v = std::move(est.right_vector);
  if (!f.singular()) {
    // Two inverse-iteration sweeps polish the Ritz vector.
    for (int i = 0; i < 2; ++i) {
      Vector next = f.solve(f.solve_adjoint(v));
      const double nn = next.norm();
      if (!std::isfinite(nn) || nn == 0.0) break;
      v = next / nn;
    }
  }
  return v;
}

}  // namespace diracres::linalg
