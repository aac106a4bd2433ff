#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "json.hpp"
#include "preview_mpc/linalg.hpp"
#include "preview_mpc/lp.hpp"
#include "preview_mpc/qp.hpp"
#include "preview_mpc/tolerances.hpp"
#include "preview_mpc/util.hpp"

namespace pmpc {

/// Convex polyhedron in halfspace form {x : G x <= g}. Zero rows denote the
/// whole space; the empty set is carried as an explicit flag together with
/// the single infeasible row 0'x <= -1 so it cannot be mistaken for anything
/// feasible.
struct HPolytope {
  Eigen::MatrixXd G;
  Eigen::VectorXd g;
  int dim = 0;
  bool empty = false;

  HPolytope() = default;
  HPolytope(Eigen::MatrixXd G_, Eigen::VectorXd g_)
      : G(std::move(G_)), g(std::move(g_)), dim(static_cast<int>(G.cols())) {
    require(G.rows() == g.size(), "HPolytope: row count mismatch");
  }

  int rows() const { return static_cast<int>(G.rows()); }

  bool contains(const Eigen::VectorXd& x, double tol = 1e-9) const {
    if (empty) return false;
    if (rows() == 0) return true;
    return ((G * x - g).array() <= tol).all();
  }
};

inline HPolytope whole_space(int dim) {
  HPolytope p;
  p.G = Eigen::MatrixXd::Zero(0, dim);
  p.g = Eigen::VectorXd::Zero(0);
  p.dim = dim;
  return p;
}

inline HPolytope empty_set(int dim) {
  HPolytope p;
  p.G = Eigen::MatrixXd::Zero(1, dim);
  p.g = -Eigen::VectorXd::Ones(1);
  p.dim = dim;
  p.empty = true;
  return p;
}

/// ||x||_inf <= radius.
inline HPolytope inf_ball(int dim, double radius) {
  Eigen::MatrixXd G(2 * dim, dim);
  G.setZero();
  Eigen::VectorXd g(2 * dim);
  for (int i = 0; i < dim; ++i) {
    G(2 * i, i) = 1.0;
    G(2 * i + 1, i) = -1.0;
    g[2 * i] = radius;
    g[2 * i + 1] = radius;
  }
  return HPolytope{std::move(G), std::move(g)};
}

inline HPolytope box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  const int d = static_cast<int>(lo.size());
  Eigen::MatrixXd G(2 * d, d);
  G.setZero();
  Eigen::VectorXd g(2 * d);
  for (int i = 0; i < d; ++i) {
    G(2 * i, i) = 1.0;
    g[2 * i] = hi[i];
    G(2 * i + 1, i) = -1.0;
    g[2 * i + 1] = -lo[i];
  }
  return HPolytope{std::move(G), std::move(g)};
}

inline HPolytope singleton(const Eigen::VectorXd& p) {
  const int d = static_cast<int>(p.size());
  Eigen::MatrixXd G(2 * d, d);
  G << Eigen::MatrixXd::Identity(d, d), -Eigen::MatrixXd::Identity(d, d);
  Eigen::VectorXd g(2 * d);
  g << p, -p;
  return HPolytope{std::move(G), std::move(g)};
}

/// max d'x over P, +inf when unbounded in that direction. P must be nonempty.
inline double support(const HPolytope& P, const Eigen::VectorXd& dir,
                      const Tolerances& tol = default_tol()) {
  if (P.empty) throw std::domain_error("support: empty polytope");
  if (dir.lpNorm<Eigen::Infinity>() == 0.0) return 0.0;
  if (P.rows() == 0) return std::numeric_limits<double>::infinity();
  LpResult r = solve_lp(LpProblem{-dir, P.G, P.g}, tol);
  if (r.status.tag == SolveTag::Unbounded) return std::numeric_limits<double>::infinity();
  if (r.status.tag != SolveTag::Optimal) {
    throw std::runtime_error("support: LP failed");
  }
  return -r.value;
}

inline bool is_bounded(const HPolytope& P, const Tolerances& tol = default_tol()) {
  if (P.empty) return true;
  if (P.rows() == 0) return false;
  for (int i = 0; i < P.dim; ++i) {
    Eigen::VectorXd d = Eigen::VectorXd::Zero(P.dim);
    d[i] = 1.0;
    if (!std::isfinite(support(P, d, tol))) return false;
    d[i] = -1.0;
    if (!std::isfinite(support(P, d, tol))) return false;
  }
  return true;
}

namespace detail {

/// Row normalization plus removal of degenerate and duplicated rows.
/// A zero row with negative bound makes the set empty.
inline bool tidy_rows(Eigen::MatrixXd& G, Eigen::VectorXd& g, const Tolerances& tol) {
  std::vector<int> keep;
  for (int i = 0; i < G.rows(); ++i) {
    const double n = G.row(i).norm();
    if (n < tol.row_drop_tol) {
      if (g[i] < -1e-9) return false;  // 0'x <= negative: empty
      continue;                        // trivially satisfied
    }
    G.row(i) /= n;
    g[i] /= n;
    keep.push_back(i);
  }
  std::vector<int> final_rows;
  for (std::size_t a = 0; a < keep.size(); ++a) {
    bool dominated = false;
    for (std::size_t b = 0; b < keep.size(); ++b) {
      if (a == b) continue;
      const int i = keep[a], j = keep[b];
      if ((G.row(i) - G.row(j)).lpNorm<Eigen::Infinity>() <= 1e-12) {
        // parallel identical normals: the looser bound is redundant
        if (g[j] < g[i] - 1e-15 || (std::abs(g[j] - g[i]) <= 1e-15 && b < a)) {
          dominated = true;
          break;
        }
      }
    }
    if (!dominated) final_rows.push_back(keep[a]);
  }
  Eigen::MatrixXd Gn(final_rows.size(), G.cols());
  Eigen::VectorXd gn(final_rows.size());
  for (std::size_t r = 0; r < final_rows.size(); ++r) {
    Gn.row(static_cast<int>(r)) = G.row(final_rows[r]);
    gn[static_cast<int>(r)] = g[final_rows[r]];
  }
  G = std::move(Gn);
  g = std::move(gn);
  return true;
}

}  // namespace detail

/// Normalizes rows and strips every redundant halfspace (one LP per row).
/// The result describes exactly the same point set; emptiness becomes the
/// canonical explicit form.
inline HPolytope canonicalize(const HPolytope& P_in, const Tolerances& tol = default_tol()) {
  if (P_in.empty) return empty_set(P_in.dim);
  Eigen::MatrixXd G = P_in.G;
  Eigen::VectorXd g = P_in.g;
  if (!detail::tidy_rows(G, g, tol)) return empty_set(P_in.dim);
  if (G.rows() == 0) return whole_space(P_in.dim);

  // feasibility (free when the origin already satisfies every row)
  if (g.minCoeff() < 0.0) {
    LpResult r = solve_lp(LpProblem{Eigen::VectorXd::Zero(P_in.dim), G, g}, tol);
    if (r.status.tag == SolveTag::Infeasible) return empty_set(P_in.dim);
  }

  // redundancy: maximize each row subject to the others (own bound relaxed)
  std::vector<int> keep(G.rows());
  for (std::size_t i = 0; i < keep.size(); ++i) keep[i] = 1;
  for (int i = 0; i < G.rows(); ++i) {
    std::vector<int> act;
    for (int j = 0; j < G.rows(); ++j)
      if (keep[j] || j == i) act.push_back(j);
    Eigen::MatrixXd Gs(act.size(), G.cols());
    Eigen::VectorXd gs(act.size());
    for (std::size_t r = 0; r < act.size(); ++r) {
      Gs.row(static_cast<int>(r)) = G.row(act[r]);
      gs[static_cast<int>(r)] = g[act[r]] + (act[r] == i ? 1.0 : 0.0);
    }
    LpResult r = solve_lp(LpProblem{-G.row(i).transpose(), Gs, gs}, tol);
    if (r.status.tag == SolveTag::Optimal && -r.value <= g[i] + 1e-9) keep[i] = 0;
  }
  std::vector<int> rows;
  for (int i = 0; i < G.rows(); ++i)
    if (keep[i]) rows.push_back(i);
  if (rows.empty()) return whole_space(P_in.dim);
  Eigen::MatrixXd Gf(rows.size(), G.cols());
  Eigen::VectorXd gf(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    Gf.row(static_cast<int>(r)) = G.row(rows[r]);
    gf[static_cast<int>(r)] = g[rows[r]];
  }
  return HPolytope{std::move(Gf), std::move(gf)};
}

inline HPolytope intersect(const HPolytope& P, const HPolytope& Q,
                           const Tolerances& tol = default_tol()) {
  require(P.dim == Q.dim, "intersect: dimension mismatch");
  if (P.empty || Q.empty) return empty_set(P.dim);
  Eigen::MatrixXd G(P.rows() + Q.rows(), P.dim);
  Eigen::VectorXd g(P.rows() + Q.rows());
  G << P.G, Q.G;
  g << P.g, Q.g;
  return canonicalize(HPolytope{std::move(G), std::move(g)}, tol);
}

/// {x : M x in P}.
inline HPolytope affine_preimage(const Eigen::MatrixXd& M, const HPolytope& P,
                                 const Tolerances& tol = default_tol()) {
  require(static_cast<int>(M.rows()) == P.dim, "affine_preimage: map range mismatch");
  const int d_in = static_cast<int>(M.cols());
  if (P.empty) return empty_set(d_in);
  if (P.rows() == 0) return whole_space(d_in);
  return canonicalize(HPolytope{P.G * M, P.g}, tol);
}

/// {x : G (x - t) <= g}.
inline HPolytope translate(const HPolytope& P, const Eigen::VectorXd& t) {
  require(static_cast<int>(t.size()) == P.dim, "translate: dimension mismatch");
  if (P.empty || P.rows() == 0) return P;
  return HPolytope{P.G, P.g + P.G * t};
}

/// s * P for s >= 0 (exact for polytopes containing recession-free geometry).
inline HPolytope scale(const HPolytope& P, double s) {
  require(s >= 0.0, "scale: negative factor rejected");
  if (P.empty || P.rows() == 0) return P;
  return HPolytope{P.G, s * P.g};
}

namespace detail {

/// One Fourier-Motzkin step: eliminates column `col`.
inline void fm_eliminate(Eigen::MatrixXd& G, Eigen::VectorXd& g, int col) {
  std::vector<int> pos, neg, zero;
  for (int i = 0; i < G.rows(); ++i) {
    const double a = G(i, col);
    if (a > 1e-11) pos.push_back(i);
    else if (a < -1e-11) neg.push_back(i);
    else zero.push_back(i);
  }
  const int nc = static_cast<int>(G.cols()) - 1;
  const int n_out = static_cast<int>(zero.size() + pos.size() * neg.size());
  Eigen::MatrixXd Gn(n_out, nc);
  Eigen::VectorXd gn(n_out);
  auto strip = [&](int row) {
    Eigen::RowVectorXd out(nc);
    int c = 0;
    for (int j = 0; j < G.cols(); ++j)
      if (j != col) out[c++] = G(row, j);
    return out;
  };
  int r = 0;
  for (int z : zero) {
    Gn.row(r) = strip(z);
    gn[r++] = g[z];
  }
  for (int i : pos) {
    for (int j : neg) {
      const double p = G(i, col);
      const double n = -G(j, col);
      Gn.row(r) = n * strip(i) + p * strip(j);
      gn[r++] = n * g[i] + p * g[j];
    }
  }
  G = std::move(Gn);
  g = std::move(gn);
}

}  // namespace detail

/// {M p + q : p in P, q in Q}, computed by projecting the lifted system
/// {(z,p) : G_Q (z - M p) <= g_Q, G_P p <= g_P} onto z. Redundancy is removed
/// after every eliminated variable to keep the row count in check.
inline HPolytope minkowski_sum_image(const Eigen::MatrixXd& M, const HPolytope& P,
                                     const HPolytope& Q, const Tolerances& tol = default_tol()) {
  const int dp = P.dim;
  const int dq = Q.dim;
  require(static_cast<int>(M.rows()) == dq && static_cast<int>(M.cols()) == dp,
          "minkowski_sum_image: map dimension mismatch");
  if (P.empty || Q.empty) return empty_set(dq);
  require(is_bounded(P, tol) && is_bounded(Q, tol),
          "minkowski_sum_image: unbounded input rejected");

  Eigen::MatrixXd G(P.rows() + Q.rows(), dq + dp);
  Eigen::VectorXd g(P.rows() + Q.rows());
  G.setZero();
  G.topLeftCorner(Q.rows(), dq) = Q.G;
  G.topRightCorner(Q.rows(), dp) = -Q.G * M;
  G.bottomRightCorner(P.rows(), dp) = P.G;
  g << Q.g, P.g;

  for (int step = 0; step < dp; ++step) {
    detail::fm_eliminate(G, g, static_cast<int>(G.cols()) - 1);
    HPolytope inter = canonicalize(HPolytope{G, g}, tol);
    if (inter.empty) return empty_set(dq);
    G = inter.G;
    g = inter.g;
  }
  if (G.rows() == 0) return whole_space(dq);
  return HPolytope{std::move(G), std::move(g)};
}

inline HPolytope minkowski_sum(const HPolytope& P, const HPolytope& Q,
                               const Tolerances& tol = default_tol()) {
  require(P.dim == Q.dim, "minkowski_sum: dimension mismatch");
  return minkowski_sum_image(Eigen::MatrixXd::Identity(P.dim, P.dim), P, Q, tol);
}

/// {M x : x in P} for bounded P.
inline HPolytope affine_image(const Eigen::MatrixXd& M, const HPolytope& P,
                              const Tolerances& tol = default_tol()) {
  require(static_cast<int>(M.cols()) == P.dim, "affine_image: dimension mismatch");
  const int dq = static_cast<int>(M.rows());
  return minkowski_sum_image(M, P, singleton(Eigen::VectorXd::Zero(dq)), tol);
}

/// Q subset of P, decided facet-by-facet through support functions.
inline bool contains_set(const HPolytope& P, const HPolytope& Q,
                         const Tolerances& tol = default_tol()) {
  require(P.dim == Q.dim, "contains_set: dimension mismatch");
  if (Q.empty) return true;
  if (P.empty) return false;
  for (int i = 0; i < P.rows(); ++i) {
    const double s = support(Q, P.G.row(i).transpose(), tol);
    if (!(s <= P.g[i] + tol.containment_tol)) return false;
  }
  return true;
}

inline bool set_equal(const HPolytope& P, const HPolytope& Q,
                      const Tolerances& tol = default_tol()) {
  return contains_set(P, Q, tol) && contains_set(Q, P, tol);
}

/// Smallest alpha >= 0 with Q inside alpha * P; P must have the origin in its
/// interior (every canonical bound positive). Returns +inf when a zero-bound
/// facet of P blocks every scaling.
inline double min_scale_containment(const HPolytope& Q, const HPolytope& P,
                                    const Tolerances& tol = default_tol()) {
  require(P.dim == Q.dim, "min_scale_containment: dimension mismatch");
  if (Q.empty) return 0.0;
  double alpha = 0.0;
  for (int i = 0; i < P.rows(); ++i) {
    const double s = support(Q, P.G.row(i).transpose(), tol);
    if (P.g[i] > tol.row_drop_tol) {
      alpha = std::max(alpha, s / P.g[i]);
    } else if (s > tol.containment_tol) {
      return std::numeric_limits<double>::infinity();
    }
  }
  return std::max(alpha, 0.0);
}

struct SetFlags {
  bool is_c_set = false;   ///< compact, convex, contains the origin
  bool is_pc_set = false;  ///< compact, convex, origin interior
};

inline SetFlags classify(const HPolytope& P_in, const Tolerances& tol = default_tol()) {
  SetFlags f;
  HPolytope P = canonicalize(P_in, tol);
  if (P.empty || P.rows() == 0 || !is_bounded(P, tol)) return f;
  f.is_c_set = P.g.minCoeff() >= -tol.containment_tol;
  f.is_pc_set = P.g.minCoeff() > tol.containment_tol;
  if (f.is_pc_set) f.is_c_set = true;
  return f;
}

struct MaxInvariantResult {
  HPolytope set;
  int determination_index = -1;
  bool determined = false;
};

/// Maximal constraint-admissible invariant set for x+ = F x within C:
/// O_inf = {x : F^t x in C for all t >= 0}, iterated until the intersection
/// stops changing (Gilbert-Tan finite determination).
inline MaxInvariantResult max_admissible_invariant(const Eigen::MatrixXd& F, const HPolytope& C,
                                                   int cap = default_tol().invariant_iter_cap,
                                                   const Tolerances& tol = default_tol()) {
  require(static_cast<int>(F.rows()) == C.dim && static_cast<int>(F.cols()) == C.dim,
          "max_admissible_invariant: dimension mismatch");
  if (spectral_radius(F) >= 1.0 - tol.spectral_margin) {
    throw std::domain_error("max_admissible_invariant: F must be strictly stable");
  }
  MaxInvariantResult out;
  HPolytope omega = canonicalize(C, tol);
  Eigen::MatrixXd Fp = F;
  for (int t = 0; t < cap; ++t) {
    HPolytope next = intersect(omega, affine_preimage(Fp, C, tol), tol);
    if (set_equal(next, omega, tol)) {
      out.set = omega;
      out.determination_index = t;
      out.determined = true;
      return out;
    }
    omega = next;
    Fp = F * Fp;
  }
  out.set = omega;
  return out;
}

/// Outer approximation of the minimal robust positively invariant set of
/// x+ = F x + w, w in W: the truncated sum W + FW + ... + F^{k-1}W inflated
/// by 1/(1-theta) once F^k W fits inside theta W with theta <= eps.
inline HPolytope mrpi_outer_approx(const Eigen::MatrixXd& F, const HPolytope& W, double eps,
                                   const Tolerances& tol = default_tol()) {
  require(eps > 0.0, "mrpi_outer_approx: eps must be positive");
  require(static_cast<int>(F.rows()) == W.dim && static_cast<int>(F.cols()) == W.dim,
          "mrpi_outer_approx: dimension mismatch");
  if (spectral_radius(F) >= 1.0 - tol.spectral_margin) {
    throw std::domain_error("mrpi_outer_approx: F must be strictly stable");
  }
  HPolytope Wc = canonicalize(W, tol);
  HPolytope sum = Wc;
  Eigen::MatrixXd Fp = F;  // F^k with k = 1 initially
  for (int k = 1; k <= tol.mrpi_power_cap; ++k) {
    // theta_k = min scale with F^k W inside theta W, via support calls only
    double theta = 0.0;
    bool admissible = true;
    for (int i = 0; i < Wc.rows(); ++i) {
      const double s = support(Wc, Fp.transpose() * Wc.G.row(i).transpose(), tol);
      if (Wc.g[i] > tol.row_drop_tol) theta = std::max(theta, s / Wc.g[i]);
      else if (s > tol.containment_tol) { admissible = false; break; }
    }
    if (admissible && theta <= eps && theta < 1.0) {
      HPolytope R = canonicalize(scale(sum, 1.0 / (1.0 - theta)), tol);
      HPolytope step = minkowski_sum_image(F, R, Wc, tol);  // F R + W
      require(contains_set(R, step, tol), "mrpi_outer_approx: RPI verification failed");
      return R;
    }
    sum = minkowski_sum(sum, affine_image(Fp, Wc, tol), tol);
    Fp = F * Fp;
  }
  throw std::runtime_error("mrpi_outer_approx: no admissible scaling within the power cap");
}

/// All vertices by enumerating facet d-subsets; intended for small dimensions.
inline std::vector<Eigen::VectorXd> vertices(const HPolytope& P_in,
                                             const Tolerances& tol = default_tol()) {
  HPolytope P = canonicalize(P_in, tol);
  std::vector<Eigen::VectorXd> out;
  if (P.empty || P.rows() == 0) return out;
  require(is_bounded(P, tol), "vertices: unbounded polytope");
  const int d = P.dim;
  const int q = P.rows();
  std::vector<int> idx(d);
  std::function<void(int, int)> rec = [&](int start, int chosen) {
    if (chosen == d) {
      Eigen::MatrixXd M(d, d);
      Eigen::VectorXd rhs(d);
      for (int i = 0; i < d; ++i) {
        M.row(i) = P.G.row(idx[i]);
        rhs[i] = P.g[idx[i]];
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
      lu.setThreshold(1e-9);
      if (!lu.isInvertible()) return;
      Eigen::VectorXd x = lu.solve(rhs);
      if (!P.contains(x, 1e-7)) return;
      for (const auto& v : out)
        if ((v - x).lpNorm<Eigen::Infinity>() <= 1e-7 * (1.0 + x.lpNorm<Eigen::Infinity>()))
          return;
      out.push_back(x);
      return;
    }
    for (int i = start; i <= q - (d - chosen); ++i) {
      idx[chosen] = i;
      rec(i + 1, chosen + 1);
    }
  };
  rec(0, 0);
  return out;
}

struct ChebyshevResult {
  Eigen::VectorXd center;
  double radius = 0.0;
};

/// Center and radius of the largest inscribed ball (radius 0 for flat sets).
inline ChebyshevResult chebyshev_center(const HPolytope& P_in,
                                        const Tolerances& tol = default_tol()) {
  HPolytope P = canonicalize(P_in, tol);
  if (P.empty) throw std::domain_error("chebyshev_center: empty polytope");
  const int d = P.dim;
  if (P.rows() == 0) return {Eigen::VectorXd::Zero(d), std::numeric_limits<double>::infinity()};
  Eigen::MatrixXd G(P.rows() + 1, d + 1);
  G.setZero();
  G.topLeftCorner(P.rows(), d) = P.G;
  G.col(d).head(P.rows()).setOnes();  // rows are unit-normalized
  G(P.rows(), d) = -1.0;              // r >= 0
  Eigen::VectorXd g(P.rows() + 1);
  g << P.g, 0.0;
  Eigen::VectorXd c = Eigen::VectorXd::Zero(d + 1);
  c[d] = -1.0;
  LpResult r = solve_lp(LpProblem{c, G, g}, tol);
  if (r.status.tag == SolveTag::Unbounded) {
    throw std::domain_error("chebyshev_center: unbounded polytope");
  }
  require(r.status.tag == SolveTag::Optimal, "chebyshev_center: LP failed");
  return {r.x.head(d), r.x[d]};
}

/// Euclidean projection onto P.
inline Eigen::VectorXd project_point(const HPolytope& P, const Eigen::VectorXd& y,
                                     const Tolerances& tol = default_tol()) {
  if (P.empty) throw std::domain_error("project_point: empty polytope");
  if (P.contains(y, tol.containment_tol)) return y;
  QpProblem qp{2.0 * Eigen::MatrixXd::Identity(P.dim, P.dim), -2.0 * y, P.G, P.g};
  QpResult r = solve_qp(qp, tol);
  require(r.status.tag == SolveTag::Optimal, "project_point: QP failed");
  return r.x;
}

struct BoundingBox {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
};

inline BoundingBox bounding_box(const HPolytope& P, const Tolerances& tol = default_tol()) {
  BoundingBox bb;
  bb.lo.resize(P.dim);
  bb.hi.resize(P.dim);
  for (int i = 0; i < P.dim; ++i) {
    Eigen::VectorXd d = Eigen::VectorXd::Zero(P.dim);
    d[i] = 1.0;
    bb.hi[i] = support(P, d, tol);
    d[i] = -1.0;
    bb.lo[i] = -support(P, d, tol);
  }
  return bb;
}

/// Halton points inside P: rejection from the bounding box, falling back to
/// Euclidean projection when the set is flat and rejection cannot land.
inline std::vector<Eigen::VectorXd> sample_in(const HPolytope& P, int count,
                                              std::uint64_t halton_offset = 0,
                                              const Tolerances& tol = default_tol()) {
  std::vector<Eigen::VectorXd> out;
  if (P.empty || count <= 0) return out;
  BoundingBox bb = bounding_box(P, tol);
  const std::uint64_t budget = static_cast<std::uint64_t>(count) * 60;
  std::uint64_t i = 0;
  for (; i < budget && static_cast<int>(out.size()) < count; ++i) {
    Eigen::VectorXd u = halton_point(halton_offset + i, P.dim);
    Eigen::VectorXd x = bb.lo + (bb.hi - bb.lo).cwiseProduct(u);
    if (P.contains(x, tol.containment_tol)) out.push_back(x);
  }
  while (static_cast<int>(out.size()) < count) {
    Eigen::VectorXd u = halton_point(halton_offset + i++, P.dim);
    Eigen::VectorXd x = bb.lo + (bb.hi - bb.lo).cwiseProduct(u);
    out.push_back(project_point(P, x, tol));
  }
  return out;
}

/// One representative point per facet: the point of the facet closest to the
/// Chebyshev center.
inline std::vector<Eigen::VectorXd> facet_centers(const HPolytope& P_in,
                                                  const Tolerances& tol = default_tol()) {
  HPolytope P = canonicalize(P_in, tol);
  std::vector<Eigen::VectorXd> out;
  if (P.empty || P.rows() == 0) return out;
  const Eigen::VectorXd xc = chebyshev_center(P, tol).center;
  for (int i = 0; i < P.rows(); ++i) {
    Eigen::MatrixXd E = P.G.row(i);
    Eigen::VectorXd e(1);
    e << P.g[i];
    QpProblem qp{2.0 * Eigen::MatrixXd::Identity(P.dim, P.dim), -2.0 * xc, P.G, P.g, E, e};
    QpResult r = solve_qp(qp, tol);
    if (r.status.tag == SolveTag::Optimal) out.push_back(r.x);
  }
  return out;
}

inline void to_json(nlohmann::json& j, const HPolytope& P) {
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < P.rows(); ++i) {
    std::vector<double> r(P.dim);
    for (int c = 0; c < P.dim; ++c) r[c] = P.G(i, c);
    rows.push_back(std::move(r));
  }
  std::vector<double> bound(P.g.data(), P.g.data() + P.g.size());
  j = nlohmann::json{{"G", rows}, {"g", bound}, {"dim", P.dim}};
  if (P.empty) j["empty"] = true;
}

inline void from_json(const nlohmann::json& j, HPolytope& P) {
  const auto rows = j.at("G").get<std::vector<std::vector<double>>>();
  const auto bound = j.at("g").get<std::vector<double>>();
  require(rows.size() == bound.size(), "HPolytope json: row mismatch");
  int dim = j.contains("dim") ? j.at("dim").get<int>() : (rows.empty() ? 0 : static_cast<int>(rows[0].size()));
  Eigen::MatrixXd G(rows.size(), dim);
  Eigen::VectorXd g(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    require(static_cast<int>(rows[i].size()) == dim, "HPolytope json: ragged G");
    for (int c = 0; c < dim; ++c) G(static_cast<int>(i), c) = rows[i][c];
    g[static_cast<int>(i)] = bound[i];
  }
  P = HPolytope{std::move(G), std::move(g)};
  P.dim = dim;
  if (j.contains("empty") && j.at("empty").get<bool>()) P.empty = true;
}

}  // namespace pmpc
