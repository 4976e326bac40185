#include "fdpinn/stencils.hpp"

#include <string>

#include "fdpinn/errors.hpp"

namespace fdpinn {

namespace {

constexpr std::array<StencilOffset, 5> kLaplaceFootprint{{{0, 0}, {-1, 0}, {1, 0}, {0, -1}, {0, 1}}};
// center, t+1, t+2, x+1, x+2, x-1
constexpr std::array<StencilOffset, 6> kBurgersFootprint{
    {{0, 0}, {0, 1}, {0, 2}, {1, 0}, {2, 0}, {-1, 0}}};

const char* axis_name(StencilAxis axis) { return axis == StencilAxis::axis0 ? "axis0" : "axis1"; }

double spacing(const UniformGrid2D& g, StencilAxis axis) {
  return axis == StencilAxis::axis0 ? g.h_i() : g.h_j();
}

// Value at (i, j) shifted by `k` along `axis`; caller guarantees reach.
double shifted(const ScalarField& f, std::size_t i, std::size_t j, StencilAxis axis, long k) {
  return axis == StencilAxis::axis0 ? f(i + k, j) : f(i, j + k);
}

std::size_t axis_index(std::size_t i, std::size_t j, StencilAxis axis) {
  return axis == StencilAxis::axis0 ? i : j;
}

std::size_t axis_count(const UniformGrid2D& g, StencilAxis axis) {
  return axis == StencilAxis::axis0 ? g.n_i() : g.n_j();
}

void require_node(const UniformGrid2D& g, std::size_t i, std::size_t j) {
  if (!g.contains(i, j)) throw StencilOutOfBounds(i, j, "node is outside the grid");
}

}  // namespace

std::string_view to_string(PdeKind kind) noexcept {
  return kind == PdeKind::laplace ? "laplace" : "burgers";
}

PdeKind parse_pde_kind(std::string_view name) {
  if (name == "laplace") return PdeKind::laplace;
  if (name == "burgers") return PdeKind::burgers;
  throw ConfigurationError("unknown problem '" + std::string(name) +
                           "', expected laplace or burgers");
}

double forward_diff1(const ScalarField& field, std::size_t i, std::size_t j, StencilAxis axis) {
  const auto& g = field.grid();
  require_node(g, i, j);
  if (axis_index(i, j, axis) + 2 >= axis_count(g, axis)) {
    throw StencilOutOfBounds(i, j, std::string("forward difference needs +2 neighbor along ") +
                                       axis_name(axis));
  }
  return forward_diff1(field(i, j), shifted(field, i, j, axis, 1), shifted(field, i, j, axis, 2),
                       spacing(g, axis));
}

double central_diff2(const ScalarField& field, std::size_t i, std::size_t j, StencilAxis axis) {
  const auto& g = field.grid();
  require_node(g, i, j);
  const std::size_t k = axis_index(i, j, axis);
  if (k == 0 || k + 1 >= axis_count(g, axis)) {
    throw StencilOutOfBounds(i, j, std::string("central difference needs +-1 neighbors along ") +
                                       axis_name(axis));
  }
  return central_diff2(shifted(field, i, j, axis, -1), field(i, j), shifted(field, i, j, axis, 1),
                       spacing(g, axis));
}

double laplace_residual(const ScalarField& field, std::size_t i, std::size_t j) {
  const auto& g = field.grid();
  require_node(g, i, j);
  if (i == 0 || j == 0 || i + 1 >= g.n_i() || j + 1 >= g.n_j()) {
    throw StencilOutOfBounds(i, j, "Laplace residual needs an interior node");
  }
  const PdeResidual op(PdeKind::laplace, g);
  const std::array<double, 5> u{field(i, j), field(i - 1, j), field(i + 1, j), field(i, j - 1),
                                field(i, j + 1)};
  return op.evaluate(u);
}

double burgers_residual(const ScalarField& field, std::size_t i, std::size_t j, double nu) {
  const auto& g = field.grid();
  require_node(g, i, j);
  const PdeResidual op(PdeKind::burgers, g, nu);
  if (!op.reachable(g, i, j)) {
    throw StencilOutOfBounds(i, j, "Burgers residual needs i-1, i+2 and j+2 inside the grid");
  }
  const std::array<double, 6> u{field(i, j),     field(i, j + 1), field(i, j + 2),
                                field(i + 1, j), field(i + 2, j), field(i - 1, j)};
  return op.evaluate(u);
}

std::span<const StencilOffset> residual_footprint(PdeKind kind) noexcept {
  if (kind == PdeKind::laplace) return kLaplaceFootprint;
  return kBurgersFootprint;
}

PdeResidual::PdeResidual(PdeKind kind, const UniformGrid2D& grid, double nu)
    : kind_(kind), h_i_(grid.h_i()), h_j_(grid.h_j()), nu_(nu) {
  if (kind == PdeKind::laplace && !grid.is_isotropic(1e-12)) {
    throw ConfigurationError("Laplace residual assumes one spacing, got h_i=" +
                             std::to_string(h_i_) + " h_j=" + std::to_string(h_j_));
  }
}

bool PdeResidual::reachable(const UniformGrid2D& grid, std::size_t i, std::size_t j) const noexcept {
  for (const auto& o : residual_footprint(kind_)) {
    const long ii = static_cast<long>(i) + o.di;
    const long jj = static_cast<long>(j) + o.dj;
    if (ii < 0 || jj < 0 || !grid.contains(static_cast<std::size_t>(ii), static_cast<std::size_t>(jj)))
      return false;
  }
  return true;
}

double PdeResidual::evaluate(std::span<const double> u) const noexcept {
  if (kind_ == PdeKind::laplace) {
    return (u[1] + u[2] + u[3] + u[4] - 4.0 * u[0]) / (h_i_ * h_i_);
  }
  const double u_t = forward_diff1(u[0], u[1], u[2], h_j_);
  const double u_x = forward_diff1(u[0], u[3], u[4], h_i_);
  const double u_xx = central_diff2(u[5], u[0], u[3], h_i_);
  return u_t + u[0] * u_x - nu_ * u_xx;
}

void PdeResidual::sensitivities(std::span<const double> u, std::span<double> out) const noexcept {
  if (kind_ == PdeKind::laplace) {
    const double w = 1.0 / (h_i_ * h_i_);
    out[0] = -4.0 * w;
    for (std::size_t k = 1; k < 5; ++k) out[k] = w;
    return;
  }
  const double ht = 2.0 * h_j_;
  const double hx = 2.0 * h_i_;
  const double hxx = h_i_ * h_i_;
  const double u_x = forward_diff1(u[0], u[3], u[4], h_i_);
  out[0] = -3.0 / ht + u_x - 3.0 * u[0] / hx + 2.0 * nu_ / hxx;
  out[1] = 4.0 / ht;
  out[2] = -1.0 / ht;
  out[3] = 4.0 * u[0] / hx - nu_ / hxx;
  out[4] = -u[0] / hx;
  out[5] = -nu_ / hxx;
}

CollocationSet collocation_nodes(const UniformGrid2D& grid, PdeKind kind) {
  CollocationSet set{kind, {}};
  const PdeResidual op(kind, grid);
  for (std::size_t j = 0; j < grid.n_j(); ++j) {
    for (std::size_t i = 0; i < grid.n_i(); ++i) {
      if (op.reachable(grid, i, j)) set.nodes.push_back({i, j});
    }
  }
  if (set.nodes.empty()) {
    throw ConfigurationError("grid has no valid collocation node for " +
                             std::string(to_string(kind)));
  }
  return set;
}

}  // namespace fdpinn
