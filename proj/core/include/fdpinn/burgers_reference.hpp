#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>

#include "fdpinn/grid.hpp"
#include "fdpinn/stencils.hpp"

namespace fdpinn {

/// Viscous Burgers on [-1, 1] x [0, 1] with u(x, 0) = -sin(pi x) and
/// u(+-1, t) = 0.
struct BurgersProblem {
  double nu = kBurgersViscosity;
  Interval x{-1.0, 1.0};
  Interval t{0.0, 1.0};

  double initial(double x_value) const noexcept { return -std::sin(std::numbers::pi * x_value); }
};

/// 64 x 25 evaluation grid over the Burgers domain.
UniformGrid2D burgers_eval_grid();

// 1008 = 63 * 16 and 960 = 24 * 40, so every evaluation node is a fine node.
inline constexpr std::size_t kDefaultFineNx = 1009;
inline constexpr std::size_t kDefaultFineNt = 961;

/// Largest stable explicit step: min(0.4 h^2 / nu, 0.4 h / max|u0|).
double burgers_max_stable_dt(const BurgersProblem& problem, std::size_t fine_nx);

/// Time-marches the problem with second-order central differences
/// (skew-symmetric advection) and classical RK4. The result has fine_nx x
/// fine_nt nodes; row j holds t = j / (fine_nt - 1). Each stored row is
/// reached in `substeps` RK4 steps; 0 picks the smallest stable count.
///
/// Throws ConfigurationError for fine_nx < 257 or for an explicit
/// `substeps` that breaks the stability bound (the message carries the
/// minimum fine_nt for one step per row), and NumericError with the step
/// index if the march produces a non-finite value.
ScalarField solve_burgers_fine(const BurgersProblem& problem, std::size_t fine_nx,
                               std::size_t fine_nt, std::size_t substeps = 0);

enum class RestrictionMode { exact, bilinear };

/// Picks (exact) or bilinearly interpolates (bilinear) `fine` at every
/// node of `target`. In exact mode every target node must coincide with a
/// fine node within 1e-9; otherwise RestrictionError names the first
/// offending node.
ScalarField restrict_to_grid(const ScalarField& fine, const UniformGrid2D& target,
                             RestrictionMode mode = RestrictionMode::exact);

/// True if every node of `target` lies on a node of `fine` within 1e-9.
bool grid_aligned(const UniformGrid2D& fine, const UniformGrid2D& target);

/// Fine solve restricted to the 64 x 25 evaluation grid. Falls back to
/// bilinear interpolation, with a note on std::clog, when the fine grid
/// does not contain the evaluation nodes.
ScalarField burgers_ground_truth(std::size_t fine_nx = kDefaultFineNx,
                                 std::size_t fine_nt = kDefaultFineNt);

}  // namespace fdpinn
