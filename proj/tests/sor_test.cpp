#include "fdpinn/sor.hpp"

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "fdpinn/errors.hpp"
#include "fdpinn/stencils.hpp"

namespace fdpinn {
namespace {

ScalarField trough_start(std::size_t n) {
  ScalarField f(trough_grid(n));
  apply_trough_boundary(f, {});
  return f;
}

// Plain Jacobi iteration on an n x n trough, independent of sor_sweep.
std::vector<double> jacobi_trough(std::size_t n, double tol) {
  std::vector<double> v(n * n, 0.0), next(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v[(n - 1) * n + i] = 1.0;
  next = v;
  for (int it = 0; it < 2'000'000; ++it) {
    double delta = 0.0;
    for (std::size_t j = 1; j + 1 < n; ++j) {
      for (std::size_t i = 1; i + 1 < n; ++i) {
        const double x =
            0.25 * (v[j * n + i - 1] + v[j * n + i + 1] + v[(j - 1) * n + i] + v[(j + 1) * n + i]);
        delta = std::max(delta, std::abs(x - v[j * n + i]));
        next[j * n + i] = x;
      }
    }
    std::swap(v, next);
    if (delta < tol) break;
  }
  return v;
}

TEST(TroughBoundaryTest, TopCornersBelongToTheLid) {
  const auto f = trough_start(5);
  EXPECT_EQ(f(0, 4), 1.0);
  EXPECT_EQ(f(4, 4), 1.0);
  EXPECT_EQ(f(0, 0), 0.0);
  EXPECT_EQ(f(4, 0), 0.0);
  EXPECT_EQ(f(2, 2), 0.0);
}

TEST(SorSweepTest, SingleInteriorNode) {
  auto f = trough_start(3);
  const double update = sor_sweep(f, {}, 1.0);
  EXPECT_DOUBLE_EQ(f(1, 1), 0.25);
  EXPECT_DOUBLE_EQ(update, 0.25);
}

TEST(SorSweepTest, OverRelaxedSingleNode) {
  auto f = trough_start(3);
  sor_sweep(f, {}, 1.5);
  EXPECT_DOUBLE_EQ(f(1, 1), 0.375);
}

TEST(SorSweepTest, LeavesBoundaryUntouchedAndUsesUpdatedNeighbours) {
  auto f = trough_start(4);
  sor_sweep(f, {}, 1.0);
  // Gauss-Seidel order: (1,1) then (2,1) sees the new (1,1).
  EXPECT_DOUBLE_EQ(f(1, 1), 0.0);
  EXPECT_DOUBLE_EQ(f(1, 2), 0.25);
  EXPECT_DOUBLE_EQ(f(2, 2), 0.25 * (0.25 + 1.0));
  EXPECT_EQ(f(3, 3), 1.0);
  EXPECT_EQ(f(0, 1), 0.0);
}

TEST(SorSweepTest, RequiresImposedBoundary) {
  ScalarField f(trough_grid(5));
  EXPECT_THROW(sor_sweep(f, {}, 1.0), ConfigurationError);
}

TEST(SorSweepTest, DivergenceNamesTheNode) {
  auto f = trough_start(5);
  f(2, 2) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(sor_sweep(f, {}, 1.0), NumericError);
}

TEST(SorSweepTest, FixedPointBarelyMoves) {
  auto sol = solve_trough(21);
  const double update = sor_sweep(sol.field, {}, SorConfig::defaults(21).omega);
  EXPECT_LT(update, 1e-8);
}

TEST(SorConfigTest, Defaults) {
  const auto c = SorConfig::defaults(41);
  EXPECT_DOUBLE_EQ(c.omega, 2.0 / (1.0 + std::sin(std::numbers::pi / 40.0)));
  EXPECT_EQ(c.tol, 1e-8);
  EXPECT_EQ(c.max_iter, 100u * 41u * 41u);
}

TEST(SorConfigTest, RejectsBadSettings) {
  SorConfig c = SorConfig::defaults(9);
  c.omega = 2.0;
  EXPECT_THROW(solve_trough(9, c), ConfigurationError);
  c.omega = 0.9;
  EXPECT_THROW(solve_trough(9, c), ConfigurationError);
  c = SorConfig::defaults(9);
  c.tol = 0.0;
  EXPECT_THROW(solve_trough(9, c), ConfigurationError);
}

TEST(SolveTroughTest, BudgetExhaustionReportsLastUpdate) {
  SorConfig c = SorConfig::defaults(21);
  c.max_iter = 3;
  try {
    solve_trough(21, c);
    FAIL() << "expected NonConvergenceError";
  } catch (const NonConvergenceError& e) {
    EXPECT_GT(e.last_update(), c.tol);
  }
}

TEST(SolveTroughTest, TinyGridConvergesImmediately) {
  const auto sol = solve_trough(3);
  EXPECT_LE(sol.sweeps, 2u);
  EXPECT_DOUBLE_EQ(sol.field(1, 1), 0.25);
}

TEST(SolveTroughTest, CenterValueIsAQuarter) {
  const auto sol = solve_trough(41);
  EXPECT_NEAR(sol.field(20, 20), 0.25, 1e-3);
}

TEST(SolveTroughTest, MaximumPrincipleAndSmallResidual) {
  const auto sol = solve_trough(41);
  const auto& f = sol.field;
  const double h2 = f.grid().h_i() * f.grid().h_i();
  for (std::size_t j = 1; j < 40; ++j) {
    for (std::size_t i = 1; i < 40; ++i) {
      ASSERT_GT(f(i, j), 0.0);
      ASSERT_LT(f(i, j), 1.0);
      // Residual scaled back to an averaging defect.
      ASSERT_LT(std::abs(laplace_residual(f, i, j)) * h2 / 4.0, 10 * 1e-8);
    }
  }
}

TEST(SolveTroughTest, OverRelaxationCutsSweeps) {
  const std::size_t n = 21;
  SorConfig c = SorConfig::defaults(n);
  const std::size_t optimal = solve_trough(n, c).sweeps;
  c.omega = 1.5;
  const std::size_t mid = solve_trough(n, c).sweeps;
  c.omega = 1.0;
  const std::size_t gauss_seidel = solve_trough(n, c).sweeps;
  EXPECT_LT(mid, gauss_seidel);
  EXPECT_LT(optimal, mid);
}

TEST(SolveTroughTest, GridRefinementSelfConvergence) {
  const auto coarse = solve_trough(21).field;
  const auto mid = solve_trough(41).field;
  const auto fine = solve_trough(81).field;
  // Compare on the coarse nodes away from the discontinuous lid corners.
  double d1 = 0.0, d2 = 0.0;
  for (std::size_t j = 1; j < 20; ++j) {
    for (std::size_t i = 1; i < 20; ++i) {
      const Point2 p = coarse.grid().node_coords(i, j);
      if (p.y > 0.8 && (p.x < 0.2 || p.x > 0.8)) continue;
      d1 = std::max(d1, std::abs(coarse(i, j) - mid(2 * i, 2 * j)));
      d2 = std::max(d2, std::abs(mid(2 * i, 2 * j) - fine(4 * i, 4 * j)));
    }
  }
  EXPECT_GT(d1 / d2, 3.0);
  EXPECT_LT(d1 / d2, 5.0);
}

TEST(AnalyticTroughTest, CenterAndBottom) {
  EXPECT_NEAR(analytic_trough(0.5, 0.5, 200), 0.25, 1e-9);
  for (double x : {0.1, 0.5, 0.77}) {
    for (int n : {1, 10, 200}) EXPECT_EQ(analytic_trough(x, 0.0, n), 0.0);
  }
  EXPECT_THROW(analytic_trough(0.5, 0.5, 0), ConfigurationError);
}

TEST(AnalyticTroughTest, NoOverflowNearTheLid) {
  const double v = analytic_trough(0.5, 0.999, 5000);
  EXPECT_TRUE(std::isfinite(v));
  EXPECT_NEAR(v, 1.0, 0.01);
}

TEST(AnalyticTroughTest, MatchesDenseJacobiSolve) {
  // Richardson-extrapolated Jacobi solves on 81^2 and 161^2 grids.
  const auto coarse = jacobi_trough(81, 1e-11);
  const auto fine = jacobi_trough(161, 1e-11);
  const double v81 = coarse[60 * 81 + 40];
  const double v161 = fine[120 * 161 + 80];
  const double extrapolated = (4.0 * v161 - v81) / 3.0;
  EXPECT_NEAR(analytic_trough(0.5, 0.75, 200), extrapolated, 1e-4);
}

}  // namespace
}  // namespace fdpinn
