#pragma once

#include <cstddef>

#include "fdpinn/grid.hpp"

namespace fdpinn {

/// Dirichlet values on the unit-square trough. Edges are imposed in the
/// order left, bottom, right, top, so the two top corners take `top`.
struct TroughBoundary {
  double left = 0.0;    // x = 0
  double bottom = 0.0;  // y = 0
  double right = 0.0;   // x = 1
  double top = 1.0;     // y = 1
};

struct SorConfig {
  double omega = 1.0;
  double tol = 1e-8;
  std::size_t max_iter = 1;

  /// omega = 2 / (1 + sin(pi / (n - 1))), tol = 1e-8, max_iter = 100 n^2.
  static SorConfig defaults(std::size_t n);

  /// Throws ConfigurationError unless 1 <= omega < 2, tol > 0, max_iter >= 1.
  void validate() const;
};

UniformGrid2D trough_grid(std::size_t n);

/// Writes the boundary values onto the edge nodes of `field`.
void apply_trough_boundary(ScalarField& field, const TroughBoundary& boundary);

/// One lexicographic Gauss-Seidel pass over interior nodes (i fastest):
///   r = (V(i-1,j) + V(i+1,j) + V(i,j-1) + V(i,j+1)) / 4 - V(i,j)
///   V(i,j) += omega * r
/// Edge nodes are left untouched and must already hold `boundary`
/// (ConfigurationError otherwise). Returns max |omega * r|.
/// Throws NumericError if any update is non-finite.
double sor_sweep(ScalarField& field, const TroughBoundary& boundary, double omega);

struct SorSolution {
  ScalarField field;
  std::size_t sweeps = 0;
};

/// Sweeps from a zero interior until the max update drops below config.tol.
/// Throws NonConvergenceError when the sweep budget runs out.
SorSolution solve_trough(std::size_t n, const SorConfig& config,
                         const TroughBoundary& boundary = {});
SorSolution solve_trough(std::size_t n);

/// Separation-of-variables series for the trough with a unit top lid:
///   sum over odd k < 2 n_terms of 4/(k pi) sin(k pi x) sinh(k pi y)/sinh(k pi)
double analytic_trough(double x, double y, int n_terms);

}  // namespace fdpinn
