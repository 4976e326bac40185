#pragma once

#include <array>
#include <cstddef>
#include <numbers>
#include <span>
#include <string_view>
#include <vector>

#include "fdpinn/grid.hpp"

namespace fdpinn {

enum class StencilAxis { axis0, axis1 };

enum class PdeKind { laplace, burgers };

std::string_view to_string(PdeKind kind) noexcept;
/// Accepts "laplace" or "burgers"; throws ConfigurationError otherwise.
PdeKind parse_pde_kind(std::string_view name);

/// Viscosity of the benchmark Burgers problem, 0.01/pi.
inline constexpr double kBurgersViscosity = 0.01 / std::numbers::pi;

// Three-point one-sided first derivative: (-3 u0 + 4 u1 - u2) / 2h.
inline double forward_diff1(double u0, double u1, double u2, double h) noexcept {
  return (-3.0 * u0 + 4.0 * u1 - u2) / (2.0 * h);
}

// Central second derivative: (u_minus - 2 u0 + u_plus) / h^2.
inline double central_diff2(double u_minus, double u0, double u_plus, double h) noexcept {
  return (u_minus - 2.0 * u0 + u_plus) / (h * h);
}

/// One-sided first derivative at (i, j) along `axis`, using that axis's
/// spacing. Needs the +2 neighbor along the axis.
double forward_diff1(const ScalarField& field, std::size_t i, std::size_t j, StencilAxis axis);

/// Central second derivative at (i, j) along `axis`. Needs both +-1 neighbors.
double central_diff2(const ScalarField& field, std::size_t i, std::size_t j, StencilAxis axis);

/// Five-point Laplacian residual. Requires an interior node and an isotropic
/// grid (ConfigurationError otherwise).
double laplace_residual(const ScalarField& field, std::size_t i, std::size_t j);

/// u_t + u u_x - nu u_xx with forward differences for both first
/// derivatives. Axis 0 is x (spacing h_i), axis 1 is t (spacing h_j).
double burgers_residual(const ScalarField& field, std::size_t i, std::size_t j,
                        double nu = kBurgersViscosity);

struct StencilOffset {
  int di = 0;
  int dj = 0;
};

/// Nodes a residual reads, relative to its center. Entry 0 is always the
/// center node.
std::span<const StencilOffset> residual_footprint(PdeKind kind) noexcept;

/// A residual operator bound to grid spacings. Evaluates from the values at
/// the footprint nodes, in residual_footprint() order, so callers that
/// only hold network outputs at those nodes share the same arithmetic as
/// the field-based functions above.
class PdeResidual {
 public:
  /// Throws ConfigurationError for an anisotropic Laplace grid.
  PdeResidual(PdeKind kind, const UniformGrid2D& grid, double nu = kBurgersViscosity);

  PdeKind kind() const noexcept { return kind_; }
  std::size_t footprint_size() const noexcept { return residual_footprint(kind_).size(); }

  bool reachable(const UniformGrid2D& grid, std::size_t i, std::size_t j) const noexcept;

  double evaluate(std::span<const double> footprint_values) const noexcept;

  /// d(residual)/d(value) for each footprint node.
  void sensitivities(std::span<const double> footprint_values, std::span<double> out) const noexcept;

 private:
  PdeKind kind_;
  double h_i_;
  double h_j_;
  double nu_;
};

/// Nodes at which the residual for `kind` is fully inside the grid.
struct CollocationSet {
  PdeKind kind = PdeKind::laplace;
  std::vector<NodeIndex> nodes;

  std::size_t size() const noexcept { return nodes.size(); }
};

/// Laplace: i in [1, n_i-2], j in [1, n_j-2]. Burgers: i in [1, n_i-3],
/// j in [0, n_j-3]. Ordered with i fastest.
CollocationSet collocation_nodes(const UniformGrid2D& grid, PdeKind kind);

}  // namespace fdpinn
