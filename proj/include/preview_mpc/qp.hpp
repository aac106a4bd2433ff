#pragma once

#include <Eigen/Dense>

#include <limits>
#include <vector>

#include "preview_mpc/lp.hpp"
#include "preview_mpc/tolerances.hpp"
#include "preview_mpc/util.hpp"

namespace pmpc {

/// minimize 1/2 x'H x + f'x  subject to  G x <= g,  E x = e.
/// H must be symmetric positive semidefinite (asymmetry up to 1e-10 is
/// repaired by symmetrization; eigenvalues down to -1e-9 are tolerated).
struct QpProblem {
  Eigen::MatrixXd H;
  Eigen::VectorXd f;
  Eigen::MatrixXd G;
  Eigen::VectorXd g;
  Eigen::MatrixXd E;
  Eigen::VectorXd e;

  QpProblem() = default;
  QpProblem(Eigen::MatrixXd H_, Eigen::VectorXd f_, Eigen::MatrixXd G_, Eigen::VectorXd g_)
      : H(std::move(H_)), f(std::move(f_)), G(std::move(G_)), g(std::move(g_)), E(0, f.size()),
        e(0) {}
  QpProblem(Eigen::MatrixXd H_, Eigen::VectorXd f_, Eigen::MatrixXd G_, Eigen::VectorXd g_,
            Eigen::MatrixXd E_, Eigen::VectorXd e_)
      : H(std::move(H_)), f(std::move(f_)), G(std::move(G_)), g(std::move(g_)), E(std::move(E_)),
        e(std::move(e_)) {}
};

struct QpResult {
  Eigen::VectorXd x;
  double value = 0.0;
  SolveStatus status;
  Eigen::VectorXd dual_ineq;
  Eigen::VectorXd dual_eq;
};

namespace detail {

inline double qp_kkt_residual(const QpProblem& p, const QpResult& r) {
  const int q = static_cast<int>(p.G.rows());
  const int neq = static_cast<int>(p.E.rows());
  const double sg = 1.0 + (q > 0 ? p.g.lpNorm<Eigen::Infinity>() : 0.0);
  const double sc = 1.0 + p.f.lpNorm<Eigen::Infinity>() + p.H.lpNorm<Eigen::Infinity>();
  double res = 0.0;
  if (q > 0) res = std::max(res, (p.G * r.x - p.g).maxCoeff() / sg);
  if (neq > 0) res = std::max(res, (p.E * r.x - p.e).lpNorm<Eigen::Infinity>() / sg);
  Eigen::VectorXd stat = p.H * r.x + p.f;
  if (q > 0) stat += p.G.transpose() * r.dual_ineq;
  if (neq > 0) stat += p.E.transpose() * r.dual_eq;
  res = std::max(res, stat.lpNorm<Eigen::Infinity>() / sc);
  if (q > 0) {
    res = std::max(res, -r.dual_ineq.minCoeff());
    for (int i = 0; i < q; ++i) {
      res = std::max(res, std::abs(r.dual_ineq[i] * (p.G.row(i).dot(r.x) - p.g[i])) / sg);
    }
  }
  return std::max(res, 0.0);
}

}  // namespace detail

/// Primal active-set method. A feasible start comes from the simplex phase 1;
/// equality rows stay in the working set for the whole solve. Blocking and
/// dropped constraints are chosen by lowest index, so the optimizer selection
/// is deterministic even for weakly active constraints.
inline QpResult solve_qp(const QpProblem& p_in, const Tolerances& tol = default_tol()) {
  QpProblem p = p_in;
  const int d = static_cast<int>(p.f.size());
  const int q = static_cast<int>(p.G.rows());
  const int neq = static_cast<int>(p.E.rows());
  require(d >= 1, "solve_qp: empty problem");
  require(p.H.rows() == d && p.H.cols() == d, "solve_qp: H dimension mismatch");

  const double hscale = p.H.lpNorm<Eigen::Infinity>();
  require((p.H - p.H.transpose()).lpNorm<Eigen::Infinity>() <= 1e-10 * (1.0 + hscale),
          "solve_qp: H not symmetric");
  p.H = 0.5 * (p.H + p.H.transpose());

  QpResult res;
  res.x = Eigen::VectorXd::Zero(d);
  res.dual_ineq = Eigen::VectorXd::Zero(q);
  res.dual_eq = Eigen::VectorXd::Zero(neq);

  // Zero Hessian degenerates to an LP; hand it to the simplex.
  if (hscale <= 1e-13 * (1.0 + p.f.lpNorm<Eigen::Infinity>())) {
    LpResult lp = solve_lp(LpProblem{p.f, p.G, p.g, p.E, p.e}, tol);
    res.x = lp.x;
    res.value = lp.value;
    res.status = lp.status;
    res.dual_ineq = lp.dual_ineq;
    res.dual_eq = lp.dual_eq;
    return res;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(p.H);
  const double eig_min = es.eigenvalues().minCoeff();
  const double eig_max = es.eigenvalues().maxCoeff();
  require(eig_min >= -1e-9 * (1.0 + eig_max), "solve_qp: H not positive semidefinite");
  // A singular PSD Hessian makes the equality-constrained subproblems rank
  // deficient; a shift far below the KKT tolerance keeps them solvable.
  Eigen::MatrixXd Hw = p.H;
  if (eig_min < 1e-11 * (1.0 + eig_max)) {
    Hw += (1e-11 * (1.0 + eig_max)) * Eigen::MatrixXd::Identity(d, d);
  }

  // Phase 1: any feasible point.
  {
    LpResult feas = solve_lp(LpProblem{Eigen::VectorXd::Zero(d), p.G, p.g, p.E, p.e}, tol);
    if (feas.status.tag != SolveTag::Optimal) {
      res.status = feas.status;
      res.status.kkt_residual = 0.0;
      return res;
    }
    res.x = feas.x;
  }

  // Working set: equalities first (permanent), then independent active rows.
  std::vector<int> work;  // inequality row indices only
  auto working_matrix = [&](int extra_row) {
    const int rows = neq + static_cast<int>(work.size()) + (extra_row >= 0 ? 1 : 0);
    Eigen::MatrixXd W(rows, d);
    for (int i = 0; i < neq; ++i) W.row(i) = p.E.row(i);
    for (std::size_t i = 0; i < work.size(); ++i) W.row(neq + static_cast<int>(i)) = p.G.row(work[i]);
    if (extra_row >= 0) W.row(rows - 1) = p.G.row(extra_row);
    return W;
  };
  auto rank_of = [&](const Eigen::MatrixXd& M) {
    if (M.rows() == 0) return 0;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(M);
    qr.setThreshold(1e-10);
    return static_cast<int>(qr.rank());
  };
  for (int i = 0; i < q; ++i) {
    if (std::abs(p.G.row(i).dot(res.x) - p.g[i]) <= 10 * tol.feas_tol * (1.0 + std::abs(p.g[i]))) {
      if (static_cast<int>(work.size()) + neq >= d) break;
      Eigen::MatrixXd trial = working_matrix(i);
      if (rank_of(trial) == trial.rows()) work.push_back(i);
    }
  }

  const int cap = tol.lp_iter_factor * (d + q + neq + 1) * 2;
  int iters = 0;
  while (true) {
    if (++iters > cap) {
      res.status.tag = SolveTag::NumericalFailure;
      res.status.iterations = iters;
      return res;
    }
    const int nw = neq + static_cast<int>(work.size());
    Eigen::MatrixXd W = working_matrix(-1);
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(d + nw, d + nw);
    kkt.topLeftCorner(d, d) = Hw;
    if (nw > 0) {
      kkt.topRightCorner(d, nw) = W.transpose();
      kkt.bottomLeftCorner(nw, d) = W;
    }
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(d + nw);
    rhs.head(d) = -(Hw * res.x + p.f);
    Eigen::VectorXd sol = kkt.partialPivLu().solve(rhs);
    Eigen::VectorXd step = sol.head(d);
    Eigen::VectorXd mult = sol.tail(nw);

    if (step.lpNorm<Eigen::Infinity>() <= 1e-11 * (1.0 + res.x.lpNorm<Eigen::Infinity>())) {
      // Stationary on the working set; check inequality multipliers.
      int drop = -1;
      for (std::size_t i = 0; i < work.size(); ++i) {
        if (mult[neq + static_cast<int>(i)] < -tol.opt_tol) {
          if (drop < 0 || work[i] < work[static_cast<std::size_t>(drop)]) {
            drop = static_cast<int>(i);
          }
        }
      }
      if (drop < 0) {
        res.dual_ineq.setZero();
        for (std::size_t i = 0; i < work.size(); ++i) {
          res.dual_ineq[work[i]] = std::max(0.0, mult[neq + static_cast<int>(i)]);
        }
        res.dual_eq = mult.head(neq);
        res.value = 0.5 * res.x.dot(p.H * res.x) + p.f.dot(res.x);
        res.status.iterations = iters;
        res.status.kkt_residual = detail::qp_kkt_residual(p, res);
        res.status.tag = res.status.kkt_residual <= tol.kkt_tol ? SolveTag::Optimal
                                                                : SolveTag::NumericalFailure;
        return res;
      }
      work.erase(work.begin() + drop);
      continue;
    }

    // Step toward the subproblem minimizer; stop at the first blocking row.
    double alpha = 1.0;
    int block = -1;
    for (int i = 0; i < q; ++i) {
      bool in_work = false;
      for (int wrow : work) {
        if (wrow == i) { in_work = true; break; }
      }
      if (in_work) continue;
      const double advance = p.G.row(i).dot(step);
      if (advance <= 1e-12 * (1.0 + step.lpNorm<Eigen::Infinity>())) continue;
      const double slack = p.g[i] - p.G.row(i).dot(res.x);
      const double ratio = std::max(0.0, slack) / advance;
      if (ratio < alpha - 1e-13) {
        alpha = ratio;
        block = i;
      }
    }
    res.x += alpha * step;
    if (block >= 0) work.push_back(block);
  }
}

}  // namespace pmpc
