#pragma once

namespace pmpc {

/// Central numeric configuration. Every solver and set operation reads its
/// tolerances from one of these; the defaults are the values used throughout
/// the test suite.
struct Tolerances {
  // LP / QP
  double feas_tol = 1e-9;        ///< primal feasibility slack
  double opt_tol = 1e-9;         ///< reduced-cost / multiplier threshold
  double kkt_tol = 1e-8;         ///< post-solve KKT verification bound
  int lp_iter_factor = 10;       ///< iteration cap = factor * (vars + rows)

  // Linear algebra
  double lyap_residual_tol = 1e-10;
  double dare_fp_tol = 1e-12;    ///< fixed-point increment tolerance
  int dare_iter_cap = 10000;
  double dare_residual_tol = 1e-9;
  double cond_limit = 1e12;      ///< inverse() rejects beyond this
  double spectral_margin = 1e-9; ///< stability means rho(F) < 1 - margin

  // Polytopes
  double containment_tol = 1e-9; ///< support-gap tolerance for set inclusion
  double row_drop_tol = 1e-12;   ///< rows with smaller norm are degenerate
  int invariant_iter_cap = 500;  ///< Gilbert-Tan determination cap
  double mrpi_eps = 1e-3;        ///< default mRPI outer-approximation epsilon
  int mrpi_power_cap = 60;

  // Verification sampling
  double descent_tol = 1e-8;
  double fixed_point_tol = 1e-10;
};

inline const Tolerances& default_tol() {
  static const Tolerances t{};
  return t;
}

}  // namespace pmpc
