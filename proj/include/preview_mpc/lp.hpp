#pragma once

#include <Eigen/Dense>

#include <limits>
#include <vector>

#include "preview_mpc/tolerances.hpp"
#include "preview_mpc/util.hpp"

namespace pmpc {

enum class SolveTag { Optimal, Infeasible, Unbounded, NumericalFailure };

struct SolveStatus {
  SolveTag tag = SolveTag::NumericalFailure;
  int iterations = 0;
  double kkt_residual = 0.0;
};

inline const char* to_string(SolveTag t) {
  switch (t) {
    case SolveTag::Optimal: return "optimal";
    case SolveTag::Infeasible: return "infeasible";
    case SolveTag::Unbounded: return "unbounded";
    default: return "numerical_failure";
  }
}

/// minimize c'x  subject to  G x <= g,  E x = e (E optional, zero rows).
struct LpProblem {
  Eigen::VectorXd c;
  Eigen::MatrixXd G;
  Eigen::VectorXd g;
  Eigen::MatrixXd E;
  Eigen::VectorXd e;

  LpProblem() = default;
  LpProblem(Eigen::VectorXd c_, Eigen::MatrixXd G_, Eigen::VectorXd g_)
      : c(std::move(c_)), G(std::move(G_)), g(std::move(g_)), E(0, c.size()), e(0) {}
  LpProblem(Eigen::VectorXd c_, Eigen::MatrixXd G_, Eigen::VectorXd g_, Eigen::MatrixXd E_,
            Eigen::VectorXd e_)
      : c(std::move(c_)), G(std::move(G_)), g(std::move(g_)), E(std::move(E_)), e(std::move(e_)) {}
};

struct LpResult {
  Eigen::VectorXd x;
  double value = 0.0;
  SolveStatus status;
  Eigen::VectorXd dual_ineq;  ///< multipliers of G x <= g, nonnegative at optimum
  Eigen::VectorXd dual_eq;
};

namespace detail {

/// Revised two-phase simplex on the split form
///   variables v = (x+, x-, s) >= 0 plus one artificial per row,
///   rows scaled so the right-hand side is nonnegative.
/// Bland's rule (lowest index) everywhere, which both prevents cycling and
/// pins a deterministic vertex for degenerate problems.
class SimplexEngine {
 public:
  SimplexEngine(const LpProblem& p, const Tolerances& tol)
      : p_(p), tol_(tol), d_(static_cast<int>(p.c.size())), q_(static_cast<int>(p.G.rows())),
        neq_(static_cast<int>(p.E.rows())), rows_(q_ + neq_) {
    require(p_.G.cols() == d_ || q_ == 0, "solve_lp: G column count mismatch");
    require(p_.g.size() == q_, "solve_lp: g size mismatch");
    require(p_.E.cols() == d_ || neq_ == 0, "solve_lp: E column count mismatch");
    require(p_.e.size() == neq_, "solve_lp: e size mismatch");
    n_real_ = 2 * d_ + q_;
    n_cols_ = n_real_ + rows_;
    build();
  }

  LpResult run() {
    LpResult res;
    res.x = Eigen::VectorXd::Zero(d_);
    res.dual_ineq = Eigen::VectorXd::Zero(q_);
    res.dual_eq = Eigen::VectorXd::Zero(neq_);

    const int cap = tol_.lp_iter_factor * (d_ + rows_ + 1);

    // Phase 1: minimize the artificial sum from the all-artificial basis.
    Eigen::VectorXd cost1 = Eigen::VectorXd::Zero(n_cols_);
    cost1.tail(rows_).setOnes();
    SolveTag t1 = iterate(cost1, /*allow_artificial_entering=*/false, cap);
    if (t1 == SolveTag::NumericalFailure) {
      res.status.tag = SolveTag::NumericalFailure;
      res.status.iterations = iters_;
      return res;
    }
    const double scale_b = 1.0 + b_.lpNorm<Eigen::Infinity>();
    if (phase_objective(cost1) > 1e3 * tol_.feas_tol * scale_b) {
      // Infeasible; verify the Farkas certificate carried by the phase-1 duals.
      Eigen::VectorXd y = duals(cost1);
      Eigen::VectorXd lam = -y.head(q_);
      Eigen::VectorXd nu = -y.tail(neq_);
      const double cert_tol = 1e-7 * (1.0 + y.lpNorm<Eigen::Infinity>());
      Eigen::VectorXd comb = Eigen::VectorXd::Zero(d_);
      if (q_ > 0) comb += p_.G.transpose() * lam;
      if (neq_ > 0) comb += p_.E.transpose() * nu;
      double gap = lam.dot(p_.g) + (neq_ > 0 ? nu.dot(p_.e) : 0.0);
      const bool cert_ok = lam.minCoeff() >= -cert_tol &&
                           comb.lpNorm<Eigen::Infinity>() <= cert_tol && gap < cert_tol;
      res.status.tag = cert_ok ? SolveTag::Infeasible : SolveTag::NumericalFailure;
      res.status.iterations = iters_;
      return res;
    }

    // Phase 2: original objective; artificials may stay basic at zero but can
    // never re-enter or grow.
    Eigen::VectorXd cost2 = Eigen::VectorXd::Zero(n_cols_);
    cost2.head(d_) = p_.c;
    cost2.segment(d_, d_) = -p_.c;
    SolveTag t2 = iterate(cost2, /*allow_artificial_entering=*/false, cap);
    res.status.iterations = iters_;
    if (t2 != SolveTag::Optimal) {
      res.status.tag = t2;
      return res;
    }

    extract_primal(res.x);
    res.value = p_.c.dot(res.x);
    Eigen::VectorXd y = duals(cost2);
    res.dual_ineq = -y.head(q_);
    res.dual_eq = -y.tail(neq_);
    res.status.kkt_residual = kkt_residual(res);
    res.status.tag =
        res.status.kkt_residual <= tol_.kkt_tol ? SolveTag::Optimal : SolveTag::NumericalFailure;
    return res;
  }

 private:
  void build() {
    A_ = Eigen::MatrixXd::Zero(rows_, n_cols_);
    b_ = Eigen::VectorXd::Zero(rows_);
    sigma_ = Eigen::VectorXd::Ones(rows_);
    for (int i = 0; i < q_; ++i) {
      double s = p_.g[i] < 0.0 ? -1.0 : 1.0;
      sigma_[i] = s;
      A_.row(i).head(d_) = s * p_.G.row(i);
      A_.row(i).segment(d_, d_) = -s * p_.G.row(i);
      A_(i, 2 * d_ + i) = s;  // slack
      b_[i] = s * p_.g[i];
    }
    for (int j = 0; j < neq_; ++j) {
      const int r = q_ + j;
      double s = p_.e[j] < 0.0 ? -1.0 : 1.0;
      sigma_[r] = s;
      A_.row(r).head(d_) = s * p_.E.row(j);
      A_.row(r).segment(d_, d_) = -s * p_.E.row(j);
      b_[r] = s * p_.e[j];
    }
    for (int r = 0; r < rows_; ++r) A_(r, n_real_ + r) = 1.0;  // artificials
    basis_.resize(rows_);
    for (int r = 0; r < rows_; ++r) basis_[r] = n_real_ + r;
  }

  Eigen::MatrixXd basis_matrix() const {
    Eigen::MatrixXd B(rows_, rows_);
    for (int r = 0; r < rows_; ++r) B.col(r) = A_.col(basis_[r]);
    return B;
  }

  double phase_objective(const Eigen::VectorXd& cost) const {
    Eigen::VectorXd xB = basis_matrix().partialPivLu().solve(b_);
    double v = 0.0;
    for (int r = 0; r < rows_; ++r) v += cost[basis_[r]] * xB[r];
    return v;
  }

  /// Dual vector of the row system in original (unflipped) row scaling.
  Eigen::VectorXd duals(const Eigen::VectorXd& cost) const {
    Eigen::VectorXd cB(rows_);
    for (int r = 0; r < rows_; ++r) cB[r] = cost[basis_[r]];
    Eigen::VectorXd y = basis_matrix().transpose().partialPivLu().solve(cB);
    return sigma_.asDiagonal() * y;
  }

  void extract_primal(Eigen::VectorXd& x) const {
    Eigen::VectorXd xB = basis_matrix().partialPivLu().solve(b_);
    x.setZero();
    for (int r = 0; r < rows_; ++r) {
      const int col = basis_[r];
      if (col < d_) x[col] += xB[r];
      else if (col < 2 * d_) x[col - d_] -= xB[r];
    }
  }

  SolveTag iterate(const Eigen::VectorXd& cost, bool allow_artificial_entering, int cap) {
    while (true) {
      if (++iters_ > cap) return SolveTag::NumericalFailure;
      Eigen::PartialPivLU<Eigen::MatrixXd> blu(basis_matrix());
      Eigen::VectorXd xB = blu.solve(b_);
      Eigen::VectorXd cB(rows_);
      for (int r = 0; r < rows_; ++r) cB[r] = cost[basis_[r]];
      Eigen::VectorXd y = blu.transpose().solve(cB);

      std::vector<char> in_basis(n_cols_, 0);
      for (int r = 0; r < rows_; ++r) in_basis[basis_[r]] = 1;

      // Bland: smallest-index column with negative reduced cost enters.
      int enter = -1;
      for (int j = 0; j < n_cols_; ++j) {
        if (in_basis[j]) continue;
        if (!allow_artificial_entering && j >= n_real_) continue;
        const double rc = cost[j] - A_.col(j).dot(y);
        if (rc < -tol_.opt_tol) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return SolveTag::Optimal;

      Eigen::VectorXd dir = blu.solve(A_.col(enter));
      // Ratio test. An artificial basic at zero whose value would grow blocks
      // immediately (step 0) and leaves instead, keeping artificials pinned.
      double best = std::numeric_limits<double>::infinity();
      int leave = -1;
      for (int r = 0; r < rows_; ++r) {
        const bool art = basis_[r] >= n_real_;
        double ratio = std::numeric_limits<double>::infinity();
        if (dir[r] > 1e-11) ratio = std::max(0.0, xB[r]) / dir[r];
        else if (art && dir[r] < -1e-11 && xB[r] <= tol_.feas_tol) ratio = 0.0;
        if (ratio < best - 1e-13 ||
            (ratio < best + 1e-13 && leave >= 0 && basis_[r] < basis_[leave])) {
          best = ratio;
          leave = r;
        }
      }
      if (leave < 0) return SolveTag::Unbounded;
      basis_[leave] = enter;
    }
  }

  double kkt_residual(const LpResult& res) const {
    const double sg = 1.0 + p_.g.lpNorm<Eigen::Infinity>();
    const double sc = 1.0 + p_.c.lpNorm<Eigen::Infinity>();
    double primal = 0.0;
    if (q_ > 0) primal = std::max(primal, ((p_.G * res.x - p_.g).maxCoeff()) / sg);
    if (neq_ > 0) primal = std::max(primal, (p_.E * res.x - p_.e).lpNorm<Eigen::Infinity>() / sg);
    Eigen::VectorXd stat = p_.c;
    if (q_ > 0) stat += p_.G.transpose() * res.dual_ineq;
    if (neq_ > 0) stat += p_.E.transpose() * res.dual_eq;
    double r = std::max(primal, stat.lpNorm<Eigen::Infinity>() / sc);
    if (q_ > 0) {
      r = std::max(r, -res.dual_ineq.minCoeff());
      for (int i = 0; i < q_; ++i) {
        r = std::max(r, std::abs(res.dual_ineq[i] * (p_.G.row(i).dot(res.x) - p_.g[i])) / sg);
      }
    }
    return std::max(r, 0.0);
  }

  const LpProblem& p_;
  const Tolerances& tol_;
  int d_, q_, neq_, rows_, n_real_ = 0, n_cols_ = 0;
  int iters_ = 0;
  Eigen::MatrixXd A_;
  Eigen::VectorXd b_;
  Eigen::VectorXd sigma_;
  std::vector<int> basis_;
};

}  // namespace detail

inline LpResult solve_lp(const LpProblem& p, const Tolerances& tol = default_tol()) {
  require(p.c.size() >= 1, "solve_lp: empty problem");
  require(p.G.rows() + p.E.rows() >= 1, "solve_lp: at least one constraint row required");
  for (double v : p.c) require(std::isfinite(v), "solve_lp: non-finite cost");
  detail::SimplexEngine engine(p, tol);
  return engine.run();
}

}  // namespace pmpc
