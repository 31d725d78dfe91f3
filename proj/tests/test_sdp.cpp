#include <doctest.h>

#include "sicert/sdp.hpp"

#include <Eigen/Dense>

#include <random>

using namespace sicert;
using namespace sicert::sdp;

TEST_CASE("trace minimization with a pinned off-diagonal") {
  // min tr(X) s.t. X_01 = 1, X PSD:  optimum 2 at X = ones(2,2).
  Problem p(2);
  p.add_objective(0, 0, 1.0);
  p.add_objective(1, 1, 1.0);
  const int row = p.add_constraint(Sense::Eq, 1.0);
  p.add_coeff(row, 0, 1, 0.5);  // tr(A X) = X_01
  const Solution s = p.solve();
  REQUIRE(s.status == Status::Optimal);
  CHECK(s.objective == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(s.X(0, 1) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(s.X(0, 0) == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("largest eigenvalue as an SDP") {
  // min t s.t. t I - B PSD, via X = t I - B with t = t+ - t-.
  std::mt19937_64 rng(21);
  std::normal_distribution<double> gauss;
  const int n = 5;
  Matrix B(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) B(r, c) = gauss(rng);
  B = (0.5 * (B + B.transpose())).eval();

  Problem p(n);
  const int tp = p.add_lin_var(1.0), tm = p.add_lin_var(-1.0);
  for (int r = 0; r < n; ++r)
    for (int c = r; c < n; ++c) {
      const int row = p.add_constraint(Sense::Eq, -B(r, c));
      p.add_coeff(row, r, c, r == c ? 1.0 : 0.5);
      if (r == c) {
        p.add_lin_coeff(row, tp, -1.0);
        p.add_lin_coeff(row, tm, 1.0);
      }
    }
  const Solution s = p.solve();
  REQUIRE(s.status == Status::Optimal);
  Eigen::SelfAdjointEigenSolver<Matrix> es(B, Eigen::EigenvaluesOnly);
  CHECK(s.objective == doctest::Approx(es.eigenvalues().maxCoeff()).epsilon(1e-6));
}

TEST_CASE("inequalities and maximization") {
  // max X_01 s.t. diag = 1, X PSD (2x2)  ->  X_01 = 1; solved as min -X_01.
  Problem p(2);
  p.add_objective(0, 1, -0.5);
  for (int r = 0; r < 2; ++r) {
    const int row = p.add_constraint(Sense::Eq, 1.0);
    p.add_coeff(row, r, r, 1.0);
  }
  // Redundant box |X_01| <= 2 exercises the slack path.
  const int up = p.add_constraint(Sense::Le, 2.0);
  p.add_coeff(up, 0, 1, 0.5);
  const int lo = p.add_constraint(Sense::Ge, -2.0);
  p.add_coeff(lo, 0, 1, 0.5);
  const Solution s = p.solve();
  REQUIRE(s.status == Status::Optimal);
  CHECK(-s.objective == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("active box constraint") {
  // max X_01 s.t. diag = 1, X_01 <= 0.3.
  Problem p(2);
  p.add_objective(0, 1, -0.5);
  for (int r = 0; r < 2; ++r) {
    const int row = p.add_constraint(Sense::Eq, 1.0);
    p.add_coeff(row, r, r, 1.0);
  }
  const int up = p.add_constraint(Sense::Le, 0.3);
  p.add_coeff(up, 0, 1, 0.5);
  const Solution s = p.solve();
  REQUIRE(s.status == Status::Optimal);
  CHECK(-s.objective == doctest::Approx(0.3).epsilon(1e-6));
}

TEST_CASE("infeasible problems are certified") {
  // X_00 = -1 with X PSD is infeasible.
  Problem p(2);
  p.add_objective(0, 0, 1.0);
  const int row = p.add_constraint(Sense::Eq, -1.0);
  p.add_coeff(row, 0, 0, 1.0);
  const Solution s = p.solve();
  CHECK(s.status == Status::PrimalInfeasible);

  // Contradictory bounds on the same entry.
  Problem q(2);
  q.add_objective(0, 0, 1.0);
  for (int r = 0; r < 2; ++r) {
    const int row2 = q.add_constraint(Sense::Eq, 1.0);
    q.add_coeff(row2, r, r, 1.0);
  }
  const int ge = q.add_constraint(Sense::Ge, 0.9);
  q.add_coeff(ge, 0, 1, 0.5);
  const int le = q.add_constraint(Sense::Le, 0.5);
  q.add_coeff(le, 0, 1, 0.5);
  const Solution sq = q.solve();
  CHECK(sq.status == Status::PrimalInfeasible);
}

TEST_CASE("random feasible problems reach optimality certificates") {
  std::mt19937_64 rng(33);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 6, m = 8;
    // Random strictly feasible X0 fixes b = A(X0).
    Matrix G(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) G(r, c) = gauss(rng);
    const Matrix X0 = G * G.transpose() + 0.1 * Matrix::Identity(n, n);

    // PSD objective keeps the problem bounded below.
    Matrix Gc(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) Gc(r, c) = gauss(rng);
    const Matrix C = Gc * Gc.transpose() + 0.1 * Matrix::Identity(n, n);

    Problem p(n);
    for (int r = 0; r < n; ++r)
      for (int c = r; c < n; ++c) p.add_objective(r, c, C(r, c));
    for (int i = 0; i < m; ++i) {
      std::vector<std::tuple<int, int, double>> coeffs;
      double b = 0.0;
      for (int k = 0; k < 4; ++k) {
        const int r = static_cast<int>(rng() % n), c = static_cast<int>(rng() % n);
        const double v = gauss(rng);
        coeffs.emplace_back(std::min(r, c), std::max(r, c), v);
        b += (r == c) ? v * X0(r, r) : 2.0 * v * X0(std::min(r, c), std::max(r, c));
      }
      const int row = p.add_constraint(Sense::Eq, b);
      for (auto [r, c, v] : coeffs) p.add_coeff(row, r, c, v);
    }
    const Solution s = p.solve();
    REQUIRE(s.status == Status::Optimal);
    CHECK(s.primal_infeas < 1e-7);
    CHECK(s.dual_infeas < 1e-7);
    CHECK(s.rel_gap < 1e-6);
    Eigen::SelfAdjointEigenSolver<Matrix> es(s.X, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() > -1e-8);
  }
}

TEST_CASE("unbounded problems are flagged dual infeasible") {
  // min -X_00 with only X_11 pinned: X_00 free to grow.
  Problem p(2);
  p.add_objective(0, 0, -1.0);
  const int row = p.add_constraint(Sense::Eq, 1.0);
  p.add_coeff(row, 1, 1, 1.0);
  const Solution s = p.solve();
  CHECK(s.status == Status::DualInfeasible);
}
