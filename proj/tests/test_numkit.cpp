#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>

#include "oracles.hpp"
#include "preview_mpc/linalg.hpp"
#include "preview_mpc/lp.hpp"
#include "preview_mpc/qp.hpp"

using namespace pmpc;

namespace {

Eigen::MatrixXd box2(double r) {
  Eigen::MatrixXd G(4, 2);
  G << 1, 0, -1, 0, 0, 1, 0, -1;
  (void)r;
  return G;
}

Eigen::VectorXd vec2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("lp: box minimum with deterministic tie-break", "[numkit]") {
  LpProblem p{vec2(1, 0), box2(1), Eigen::VectorXd::Ones(4)};
  LpResult r = solve_lp(p);
  REQUIRE(r.status.tag == SolveTag::Optimal);
  CHECK(r.value == Catch::Approx(-1.0).margin(1e-9));
  CHECK(r.x[0] == Catch::Approx(-1.0).margin(1e-9));
  CHECK(std::abs(r.x[1]) <= 1.0 + 1e-9);
  // same problem, same vertex
  LpResult r2 = solve_lp(p);
  CHECK(r2.x == r.x);
}

TEST_CASE("lp: contradictory bounds are infeasible", "[numkit]") {
  Eigen::MatrixXd G(2, 1);
  G << 1, -1;
  Eigen::VectorXd g(2);
  g << -1, -1;  // x <= -1 and -x <= -1
  LpResult r = solve_lp(LpProblem{Eigen::VectorXd::Zero(1), G, g});
  CHECK(r.status.tag == SolveTag::Infeasible);
}

TEST_CASE("lp: support function of the state box", "[numkit]") {
  // max (1,1).x over ||x||_inf <= 10, solved as min of the negated cost
  LpProblem p{vec2(-1, -1), box2(1), 10 * Eigen::VectorXd::Ones(4)};
  LpResult r = solve_lp(p);
  REQUIRE(r.status.tag == SolveTag::Optimal);
  CHECK(-r.value == Catch::Approx(20.0).margin(1e-8));
}

TEST_CASE("lp: unbounded detection", "[numkit]") {
  Eigen::MatrixXd G(1, 2);
  G << 1, 0;
  Eigen::VectorXd g(1);
  g << 1;
  LpResult r = solve_lp(LpProblem{vec2(-1, 0), G, g});
  // cost decreases along -x0? no: c=-1 so minimizing -x0 pushes x0 up against
  // the bound; x1 is free in both directions but has zero cost -> optimal.
  CHECK(r.status.tag == SolveTag::Optimal);
  LpResult r2 = solve_lp(LpProblem{vec2(1, 0), G, g});
  CHECK(r2.status.tag == SolveTag::Unbounded);
}

TEST_CASE("lp: equality rows", "[numkit]") {
  Eigen::MatrixXd E(1, 2);
  E << 1, 1;
  Eigen::VectorXd e(1);
  e << 1;
  LpProblem p{vec2(1, 0), box2(1), 2 * Eigen::VectorXd::Ones(4), E, e};
  LpResult r = solve_lp(p);
  REQUIRE(r.status.tag == SolveTag::Optimal);
  CHECK(r.x[0] + r.x[1] == Catch::Approx(1.0).margin(1e-9));
  CHECK(r.x[0] == Catch::Approx(-1.0).margin(1e-9));  // x1 capped at 2
}

TEST_CASE("lp: random instances match vertex enumeration", "[numkit]") {
  Rng rng(20260801);
  int checked = 0;
  for (int trial = 0; trial < 120; ++trial) {
    const int d = 1 + static_cast<int>(rng.uniform() * 4.0);
    LpProblem p = oracle::random_lp(rng, d, 1 + static_cast<int>(rng.uniform() * 4.0));
    LpResult r = solve_lp(p);
    oracle::Optimum ref = oracle::lp_enumerate(p);
    if (!ref.feasible) {
      CHECK(r.status.tag == SolveTag::Infeasible);
      continue;
    }
    REQUIRE(r.status.tag == SolveTag::Optimal);
    CHECK(r.value == Catch::Approx(ref.value).margin(1e-7));
    CHECK(r.status.kkt_residual <= 1e-8);
    ++checked;
  }
  CHECK(checked > 60);
}

TEST_CASE("qp: single active constraint", "[numkit]") {
  Eigen::MatrixXd H(1, 1);
  H << 2;
  Eigen::MatrixXd G(1, 1);
  G << -1;
  Eigen::VectorXd g(1);
  g << -1;  // x >= 1
  QpResult r = solve_qp(QpProblem{H, Eigen::VectorXd::Zero(1), G, g});
  REQUIRE(r.status.tag == SolveTag::Optimal);
  CHECK(r.x[0] == Catch::Approx(1.0).margin(1e-9));
  CHECK(r.value == Catch::Approx(1.0).margin(1e-9));  // (1/2)*2*x^2 at x=1
}

TEST_CASE("qp: unconstrained minimum at gradient zero", "[numkit]") {
  Eigen::MatrixXd H = Eigen::MatrixXd::Identity(2, 2);
  Eigen::MatrixXd G(1, 2);
  G << 1, 0;
  Eigen::VectorXd g(1);
  g << 100;  // inactive
  QpResult r = solve_qp(QpProblem{H, vec2(-1, -1), G, g});
  REQUIRE(r.status.tag == SolveTag::Optimal);
  CHECK(r.x[0] == Catch::Approx(1.0).margin(1e-9));
  CHECK(r.x[1] == Catch::Approx(1.0).margin(1e-9));
  CHECK(r.value == Catch::Approx(-1.0).margin(1e-9));
}

TEST_CASE("qp: random instances match exhaustive active-set oracle", "[numkit]") {
  Rng rng(777001);
  int optimal = 0;
  for (int trial = 0; trial < 120; ++trial) {
    const int d = 2 + static_cast<int>(rng.uniform() * 2.0);
    QpProblem p = oracle::random_qp(rng, d, 5);
    QpResult r = solve_qp(p);
    oracle::Optimum ref = oracle::qp_enumerate(p);
    if (!ref.feasible) {
      CHECK(r.status.tag == SolveTag::Infeasible);
      continue;
    }
    REQUIRE(r.status.tag == SolveTag::Optimal);
    CHECK(r.value == Catch::Approx(ref.value).margin(1e-7));
    CHECK((r.x - ref.x).lpNorm<Eigen::Infinity>() <= 1e-6);
    ++optimal;
  }
  CHECK(optimal > 80);
}

TEST_CASE("qp: zero Hessian agrees with the LP path", "[numkit]") {
  Rng rng(31415);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 1 + static_cast<int>(rng.uniform() * 3.0);
    LpProblem lp = oracle::random_lp(rng, d, 2);
    QpProblem qp{Eigen::MatrixXd::Zero(d, d), lp.c, lp.G, lp.g};
    LpResult rl = solve_lp(lp);
    QpResult rq = solve_qp(qp);
    REQUIRE(rl.status.tag == rq.status.tag);
    if (rl.status.tag == SolveTag::Optimal) {
      CHECK(rq.value == Catch::Approx(rl.value).margin(1e-7));
    }
  }
}

TEST_CASE("qp: infeasible constraint set reported", "[numkit]") {
  Eigen::MatrixXd H = Eigen::MatrixXd::Identity(1, 1);
  Eigen::MatrixXd G(2, 1);
  G << 1, -1;
  Eigen::VectorXd g(2);
  g << -2, 1;  // x <= -2 and x >= -1
  QpResult r = solve_qp(QpProblem{H, Eigen::VectorXd::Zero(1), G, g});
  CHECK(r.status.tag == SolveTag::Infeasible);
}

TEST_CASE("lyapunov: nilpotent and scalar closed forms", "[numkit]") {
  SECTION("F = 0 gives P = Qbar") {
    Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(2, 2) * 3.0;
    Eigen::MatrixXd P = solve_discrete_lyapunov(Eigen::MatrixXd::Zero(2, 2), Q);
    CHECK((P - Q).lpNorm<Eigen::Infinity>() <= 1e-12);
  }
  SECTION("deadbeat closed loop: two-term series") {
    Eigen::MatrixXd Phi(2, 2);
    Phi << 0.5, 0.25, -1.0, -0.5;
    REQUIRE((Phi * Phi).lpNorm<Eigen::Infinity>() <= 1e-14);
    Eigen::MatrixXd P = solve_discrete_lyapunov(Phi, Eigen::MatrixXd::Identity(2, 2));
    Eigen::MatrixXd expect = Eigen::MatrixXd::Identity(2, 2) + Phi.transpose() * Phi;
    CHECK((P - expect).lpNorm<Eigen::Infinity>() <= 1e-10);
  }
  SECTION("scalar geometric series") {
    Eigen::MatrixXd F(1, 1), Q(1, 1);
    F << 0.5;
    Q << 1.0;
    Eigen::MatrixXd P = solve_discrete_lyapunov(F, Q);
    CHECK(P(0, 0) == Catch::Approx(4.0 / 3.0).margin(1e-12));
  }
  SECTION("unstable F rejected") {
    Eigen::MatrixXd F = Eigen::MatrixXd::Identity(2, 2);
    CHECK_THROWS(solve_discrete_lyapunov(F, Eigen::MatrixXd::Identity(2, 2)));
  }
}

TEST_CASE("lyapunov: series positivity on random stable maps", "[numkit]") {
  Rng rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd F(2, 2);
    for (int i = 0; i < 4; ++i) F(i / 2, i % 2) = rng.uniform(-0.9, 0.9);
    F *= 0.45 / std::max(0.45, spectral_radius(F));
    Eigen::MatrixXd Qb = Eigen::MatrixXd::Identity(2, 2);
    Eigen::MatrixXd P = solve_discrete_lyapunov(F, Qb);
    for (int s = 0; s < 50; ++s) {
      Eigen::VectorXd x = vec2(rng.uniform(-1, 1), rng.uniform(-1, 1));
      CHECK(x.dot(P * x) >= x.dot(Qb * x) - 1e-10);
    }
  }
}

TEST_CASE("dare: fixed point and scalar closed forms", "[numkit]") {
  SECTION("A = 0 is already at the fixed point") {
    Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(2, 2);
    Eigen::MatrixXd I = Eigen::MatrixXd::Identity(2, 2);
    DareResult r = solve_dare(Z, I, I, I);
    CHECK((r.P - I).lpNorm<Eigen::Infinity>() <= 1e-12);
    CHECK(r.K.lpNorm<Eigen::Infinity>() <= 1e-12);
  }
  SECTION("scalar golden-ratio solution") {
    Eigen::MatrixXd one = Eigen::MatrixXd::Ones(1, 1);
    DareResult r = solve_dare(one, one, one, one);
    CHECK(r.P(0, 0) == Catch::Approx((1.0 + std::sqrt(5.0)) / 2.0).margin(1e-9));
  }
  SECTION("double-integrator-like pair, cross-checked by independent iteration") {
    Eigen::MatrixXd A(2, 2), B(2, 1);
    A << 1, 1, 0, 1;
    B << 0.5, 1;
    Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(2, 2);
    Eigen::MatrixXd S = Eigen::MatrixXd::Identity(1, 1);
    DareResult r = solve_dare(A, B, Q, S);
    CHECK(spectral_radius(A - B * r.K) < 1.0);
    // independent fixed-point iteration, run to 1e-12
    Eigen::MatrixXd P = Q;
    for (int it = 0; it < 20000; ++it) {
      Eigen::MatrixXd Pn =
          Q + A.transpose() * P * A -
          A.transpose() * P * B *
              (S + B.transpose() * P * B).inverse() * B.transpose() * P * A;
      if ((Pn - P).lpNorm<Eigen::Infinity>() <= 1e-13) { P = Pn; break; }
      P = Pn;
    }
    CHECK((r.P - P).lpNorm<Eigen::Infinity>() <= 1e-9);
    Eigen::MatrixXd resid = A.transpose() * r.P * A - r.P + Q -
                            A.transpose() * r.P * B *
                                (S + B.transpose() * r.P * B).inverse() *
                                B.transpose() * r.P * A;
    CHECK(resid.lpNorm<Eigen::Infinity>() <= 1e-9);
  }
}

TEST_CASE("dare: randomized reachable pairs give stabilizing gains", "[numkit]") {
  Rng rng(4242);
  for (int trial = 0; trial < 25; ++trial) {
    Eigen::MatrixXd A(2, 2), B(2, 1);
    for (int i = 0; i < 4; ++i) A(i / 2, i % 2) = rng.uniform(-1.2, 1.2);
    B << rng.uniform(-1, 1), rng.uniform(0.2, 1.0);
    if (!is_reachable(A, B)) continue;
    DareResult r = solve_dare(A, B, Eigen::MatrixXd::Identity(2, 2),
                              Eigen::MatrixXd::Identity(1, 1));
    CHECK(spectral_radius(A - B * r.K) < 1.0);
  }
}

TEST_CASE("spectral radius", "[numkit]") {
  CHECK(spectral_radius(Eigen::MatrixXd::Identity(3, 3)) == Catch::Approx(1.0).margin(1e-12));
  Eigen::MatrixXd N(2, 2);
  N << 0, 1, 0, 0;
  CHECK(spectral_radius(N) <= 1e-10);
  Eigen::MatrixXd Phi(2, 2);
  Phi << 0.5, 0.25, -1.0, -0.5;
  CHECK(spectral_radius(Phi) <= 1e-7);
}

TEST_CASE("inverse: identity, nilpotent shift, singular rejection", "[numkit]") {
  Eigen::MatrixXd I = Eigen::MatrixXd::Identity(2, 2);
  CHECK((inverse(I) - I).lpNorm<Eigen::Infinity>() <= 1e-14);

  Eigen::MatrixXd Phi(2, 2);
  Phi << 0.5, 0.25, -1.0, -0.5;
  Eigen::MatrixXd Psi = inverse(I - Phi);
  CHECK((Psi - (I + Phi)).lpNorm<Eigen::Infinity>() <= 1e-10);

  Eigen::MatrixXd S(2, 2);
  S << 1, 1, 1, 1;
  CHECK_THROWS(inverse(S));
}

TEST_CASE("deadbeat gain via Ackermann", "[numkit]") {
  Eigen::MatrixXd A(2, 2), B(2, 1);
  A << 1, 1, 0, 1;
  B << 0.5, 1;
  Eigen::MatrixXd K = deadbeat_gain(A, B);
  CHECK(K(0, 0) == Catch::Approx(-1.0).margin(1e-12));
  CHECK(K(0, 1) == Catch::Approx(-1.5).margin(1e-12));
  Eigen::MatrixXd Phi = A + B * K;
  CHECK((Phi * Phi).lpNorm<Eigen::Infinity>() <= 1e-12);
}
