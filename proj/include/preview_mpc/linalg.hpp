#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>

#include "preview_mpc/tolerances.hpp"
#include "preview_mpc/util.hpp"

namespace pmpc {

inline double spectral_radius(const Eigen::MatrixXd& F) {
  require(F.rows() == F.cols() && F.rows() > 0, "spectral_radius: square matrix required");
  Eigen::EigenSolver<Eigen::MatrixXd> es(F, /*computeEigenvectors=*/false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

/// Inverse with an explicit conditioning gate; near-singular inputs are
/// rejected rather than amplified.
inline Eigen::MatrixXd inverse(const Eigen::MatrixXd& F, const Tolerances& tol = default_tol()) {
  require(F.rows() == F.cols() && F.rows() > 0, "inverse: square matrix required");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(F);
  const double smax = svd.singularValues().maxCoeff();
  const double smin = svd.singularValues().minCoeff();
  if (!(smin > 0.0) || smax / smin >= tol.cond_limit) {
    throw std::domain_error("inverse: matrix singular or condition number beyond limit");
  }
  Eigen::MatrixXd inv = F.fullPivLu().inverse();
  const double resid = (F * inv - Eigen::MatrixXd::Identity(F.rows(), F.cols()))
                           .lpNorm<Eigen::Infinity>();
  require(resid <= 1e-10 * (1.0 + smax), "inverse: residual check failed");
  return inv;
}

inline double sym_eig_min(const Eigen::MatrixXd& M) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (M + M.transpose()));
  return es.eigenvalues().minCoeff();
}

inline double sym_eig_max(const Eigen::MatrixXd& M) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (M + M.transpose()));
  return es.eigenvalues().maxCoeff();
}

/// Solves F' P F - P + Qbar = 0 for P by Kronecker vectorization; exact up to
/// one dense linear solve at the n^2 scale, which is the right trade at n<=10.
inline Eigen::MatrixXd solve_discrete_lyapunov(const Eigen::MatrixXd& F,
                                               const Eigen::MatrixXd& Qbar,
                                               const Tolerances& tol = default_tol()) {
  const int n = static_cast<int>(F.rows());
  require(F.cols() == n && Qbar.rows() == n && Qbar.cols() == n,
          "solve_discrete_lyapunov: dimension mismatch");
  require((Qbar - Qbar.transpose()).lpNorm<Eigen::Infinity>() <=
              1e-10 * (1.0 + Qbar.lpNorm<Eigen::Infinity>()),
          "solve_discrete_lyapunov: Qbar must be symmetric");
  if (spectral_radius(F) >= 1.0 - tol.spectral_margin) {
    throw std::domain_error("solve_discrete_lyapunov: F must be strictly stable");
  }
  const Eigen::MatrixXd Ft = F.transpose();
  Eigen::MatrixXd K(n * n, n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      K.block(i * n, j * n, n, n) = Ft(i, j) * Ft;
  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(n * n, n * n) - K;
  Eigen::VectorXd vecQ(n * n);
  for (int j = 0; j < n; ++j) vecQ.segment(j * n, n) = Qbar.col(j);
  Eigen::VectorXd vecP = M.partialPivLu().solve(vecQ);
  Eigen::MatrixXd P(n, n);
  for (int j = 0; j < n; ++j) P.col(j) = vecP.segment(j * n, n);
  P = 0.5 * (P + P.transpose());
  const double resid = (Ft * P * F - P + Qbar).lpNorm<Eigen::Infinity>();
  require(resid <= tol.lyap_residual_tol * (1.0 + P.lpNorm<Eigen::Infinity>()),
          "solve_discrete_lyapunov: residual check failed");
  return P;
}

inline Eigen::MatrixXd controllability_matrix(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  const int n = static_cast<int>(A.rows());
  const int m = static_cast<int>(B.cols());
  Eigen::MatrixXd C(n, n * m);
  Eigen::MatrixXd Ai = Eigen::MatrixXd::Identity(n, n);
  for (int i = 0; i < n; ++i) {
    C.middleCols(i * m, m) = Ai * B;
    Ai = A * Ai;
  }
  return C;
}

inline bool is_reachable(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  Eigen::MatrixXd C = controllability_matrix(A, B);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(C);
  const double smax = svd.singularValues().maxCoeff();
  return svd.singularValues().minCoeff() > 1e-10 * (1.0 + smax);
}

struct DareResult {
  Eigen::MatrixXd P;
  Eigen::MatrixXd K;  ///< regulator gain, closed loop A - B K stable
  int iterations = 0;
};

/// Fixed-point Riccati iteration P <- Q + A'PA - A'PB (S + B'PB)^-1 B'PA.
inline DareResult solve_dare(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                             const Eigen::MatrixXd& Q, const Eigen::MatrixXd& S,
                             const Tolerances& tol = default_tol()) {
  const int n = static_cast<int>(A.rows());
  const int m = static_cast<int>(B.cols());
  require(A.cols() == n && B.rows() == n, "solve_dare: dimension mismatch");
  require(Q.rows() == n && Q.cols() == n && S.rows() == m && S.cols() == m,
          "solve_dare: weight dimension mismatch");
  require(sym_eig_min(Q) >= -1e-10, "solve_dare: Q must be PSD");
  require(sym_eig_min(S) > 0.0, "solve_dare: S must be PD");
  require(is_reachable(A, B), "solve_dare: (A,B) not reachable");

  DareResult out;
  Eigen::MatrixXd P = Q;
  for (int it = 0; it < tol.dare_iter_cap; ++it) {
    const Eigen::MatrixXd BtP = B.transpose() * P;
    const Eigen::MatrixXd gain = (S + BtP * B).ldlt().solve(BtP * A);
    Eigen::MatrixXd Pn = Q + A.transpose() * P * A - A.transpose() * P * B * gain;
    Pn = 0.5 * (Pn + Pn.transpose());
    const double delta = (Pn - P).lpNorm<Eigen::Infinity>();
    P = Pn;
    out.iterations = it + 1;
    if (delta <= tol.dare_fp_tol * (1.0 + P.lpNorm<Eigen::Infinity>())) break;
    if (it + 1 == tol.dare_iter_cap) {
      throw std::runtime_error("solve_dare: fixed-point iteration did not converge");
    }
  }
  out.K = (S + B.transpose() * P * B).ldlt().solve(B.transpose() * P * A);
  out.P = P;
  const Eigen::MatrixXd resid =
      A.transpose() * P * A - P -
      A.transpose() * P * B * (S + B.transpose() * P * B).ldlt().solve(B.transpose() * P * A) + Q;
  require(resid.lpNorm<Eigen::Infinity>() <=
              tol.dare_residual_tol * (1.0 + P.lpNorm<Eigen::Infinity>()),
          "solve_dare: residual check failed");
  require(spectral_radius(A - B * out.K) < 1.0, "solve_dare: closed loop not stable");
  return out;
}

/// Deadbeat gain by Ackermann's formula (single input): u = K x places all
/// closed-loop poles at the origin, so (A + BK)^n = 0.
inline Eigen::MatrixXd deadbeat_gain(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  const int n = static_cast<int>(A.rows());
  require(B.cols() == 1, "deadbeat_gain: implemented for single-input systems");
  Eigen::MatrixXd C = controllability_matrix(A, B);
  require(is_reachable(A, B), "deadbeat_gain: (A,B) not reachable");
  Eigen::MatrixXd An = Eigen::MatrixXd::Identity(n, n);
  for (int i = 0; i < n; ++i) An = A * An;
  Eigen::RowVectorXd en = Eigen::RowVectorXd::Zero(n);
  en[n - 1] = 1.0;
  Eigen::RowVectorXd K_place = en * C.partialPivLu().solve(An);
  return -K_place;  // convention u = K x
}

}  // namespace pmpc
