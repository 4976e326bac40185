#include "fdpinn/burgers_reference.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <sstream>
#include <vector>

#include "fdpinn/errors.hpp"

namespace fdpinn {

namespace {

constexpr double kAlignTol = 1e-9;

// du/dt for interior nodes; end values stay pinned at zero.
void burgers_rhs(const std::vector<double>& u, double h, double nu, std::vector<double>& out) {
  const std::size_t n = u.size();
  const double inv_2h = 1.0 / (2.0 * h);
  const double inv_h2 = 1.0 / (h * h);
  out[0] = 0.0;
  out[n - 1] = 0.0;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double um = u[k - 1];
    const double u0 = u[k];
    const double up = u[k + 1];
    // (u u_x + (u^2)_x) / 3 conserves the discrete energy of the advective part.
    const double adv = (u0 * (up - um) + (up * up - um * um)) * inv_2h / 3.0;
    const double diff = (um - 2.0 * u0 + up) * inv_h2;
    out[k] = -adv + nu * diff;
  }
}

double max_abs_initial(const BurgersProblem& p, std::size_t nx) {
  const double h = p.x.width() / static_cast<double>(nx - 1);
  double m = 0.0;
  for (std::size_t k = 0; k < nx; ++k) m = std::max(m, std::abs(p.initial(p.x.min + k * h)));
  return m;
}

std::size_t lower_index(double v, double lo, double h, std::size_t n) {
  const double s = (v - lo) / h;
  if (!(s > 0.0)) return 0;
  return std::min(static_cast<std::size_t>(s), n - 2);
}

}  // namespace

UniformGrid2D burgers_eval_grid() { return make_grid(64, 25, {-1.0, 1.0}, {0.0, 1.0}); }

double burgers_max_stable_dt(const BurgersProblem& problem, std::size_t fine_nx) {
  const double h = problem.x.width() / static_cast<double>(fine_nx - 1);
  const double umax = max_abs_initial(problem, fine_nx);
  double dt = 0.4 * h * h / problem.nu;
  if (umax > 0.0) dt = std::min(dt, 0.4 * h / umax);
  return dt;
}

ScalarField solve_burgers_fine(const BurgersProblem& problem, std::size_t fine_nx,
                               std::size_t fine_nt, std::size_t substeps) {
  if (!(problem.nu > 0.0)) throw ConfigurationError("Burgers viscosity must be positive");
  if (fine_nx < 257) {
    throw ConfigurationError("fine_nx must be at least 257, got " + std::to_string(fine_nx));
  }
  const UniformGrid2D grid = make_grid(fine_nx, fine_nt, problem.x, problem.t);
  const double row_dt = grid.h_j();
  const double dt_max = burgers_max_stable_dt(problem, fine_nx);
  const auto min_substeps = static_cast<std::size_t>(std::ceil(row_dt / dt_max - 1e-12));
  if (substeps == 0) {
    substeps = std::max<std::size_t>(1, min_substeps);
  } else if (substeps < min_substeps) {
    const auto min_nt =
        static_cast<std::size_t>(std::ceil(problem.t.width() / dt_max - 1e-12)) + 1;
    std::ostringstream os;
    os << "explicit step " << row_dt / static_cast<double>(substeps)
       << " exceeds the stability bound " << dt_max << "; need fine_nt >= " << min_nt
       << " (one step per row) or substeps >= " << min_substeps;
    throw ConfigurationError(os.str());
  }
  const double dt = row_dt / static_cast<double>(substeps);
  const double h = grid.h_i();
  const std::size_t n = fine_nx;

  // Mirror the initial data so oddness about x = 0 holds bit-for-bit.
  std::vector<double> u(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t m = n - 1 - k;
    if (k < m) {
      u[k] = problem.initial(grid.node_coords(k, 0).x);
      u[m] = -u[k];
    } else if (k == m) {
      u[k] = 0.0;
    }
  }
  u.front() = 0.0;
  u.back() = 0.0;

  ScalarField field(grid);
  std::copy(u.begin(), u.end(), field.values().begin());

  std::vector<double> k1(n), k2(n), k3(n), k4(n), stage(n);
  std::size_t step = 0;
  for (std::size_t row = 1; row < fine_nt; ++row) {
    for (std::size_t s = 0; s < substeps; ++s, ++step) {
      burgers_rhs(u, h, problem.nu, k1);
      for (std::size_t k = 0; k < n; ++k) stage[k] = u[k] + 0.5 * dt * k1[k];
      burgers_rhs(stage, h, problem.nu, k2);
      for (std::size_t k = 0; k < n; ++k) stage[k] = u[k] + 0.5 * dt * k2[k];
      burgers_rhs(stage, h, problem.nu, k3);
      for (std::size_t k = 0; k < n; ++k) stage[k] = u[k] + dt * k3[k];
      burgers_rhs(stage, h, problem.nu, k4);
      for (std::size_t k = 0; k < n; ++k) {
        u[k] += dt / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
        if (!std::isfinite(u[k])) {
          throw NumericError("Burgers march diverged at step " + std::to_string(step) +
                             ", node " + std::to_string(k));
        }
      }
    }
    std::copy(u.begin(), u.end(), field.values().begin() + static_cast<long>(row * n));
  }
  return field;
}

bool grid_aligned(const UniformGrid2D& fine, const UniformGrid2D& target) {
  for (std::size_t j = 0; j < target.n_j(); ++j) {
    for (std::size_t i = 0; i < target.n_i(); ++i) {
      const Point2 p = target.node_coords(i, j);
      const Point2 q = fine.node_coords(fine.nearest_node(p));
      if (std::abs(p.x - q.x) > kAlignTol || std::abs(p.y - q.y) > kAlignTol) return false;
    }
  }
  return true;
}

ScalarField restrict_to_grid(const ScalarField& fine, const UniformGrid2D& target,
                             RestrictionMode mode) {
  const auto& fg = fine.grid();
  auto inside = [](const Interval& outer, const Interval& inner) {
    return inner.min >= outer.min - kAlignTol && inner.max <= outer.max + kAlignTol;
  };
  if (!inside(fg.range_i(), target.range_i()) || !inside(fg.range_j(), target.range_j())) {
    throw RestrictionError("target grid extends outside the source field's domain");
  }

  ScalarField out(target);
  for (std::size_t j = 0; j < target.n_j(); ++j) {
    for (std::size_t i = 0; i < target.n_i(); ++i) {
      const Point2 p = target.node_coords(i, j);
      if (mode == RestrictionMode::exact) {
        const NodeIndex nn = fg.nearest_node(p);
        const Point2 q = fg.node_coords(nn);
        if (std::abs(p.x - q.x) > kAlignTol || std::abs(p.y - q.y) > kAlignTol) {
          std::ostringstream os;
          os << "target node (" << i << ", " << j << ") at (" << p.x << ", " << p.y
             << ") is not a source node; enable interpolation";
          throw RestrictionError(os.str());
        }
        out(i, j) = fine(nn.i, nn.j);
      } else {
        const std::size_t a = lower_index(p.x, fg.range_i().min, fg.h_i(), fg.n_i());
        const std::size_t b = lower_index(p.y, fg.range_j().min, fg.h_j(), fg.n_j());
        const double sx = std::clamp((p.x - fg.node_coords(a, b).x) / fg.h_i(), 0.0, 1.0);
        const double sy = std::clamp((p.y - fg.node_coords(a, b).y) / fg.h_j(), 0.0, 1.0);
        out(i, j) = (1 - sx) * (1 - sy) * fine(a, b) + sx * (1 - sy) * fine(a + 1, b) +
                    (1 - sx) * sy * fine(a, b + 1) + sx * sy * fine(a + 1, b + 1);
      }
    }
  }
  return out;
}

ScalarField burgers_ground_truth(std::size_t fine_nx, std::size_t fine_nt) {
  const BurgersProblem problem;
  const ScalarField fine = solve_burgers_fine(problem, fine_nx, fine_nt);
  const UniformGrid2D target = burgers_eval_grid();
  if (grid_aligned(fine.grid(), target)) return restrict_to_grid(fine, target);
  std::clog << "burgers reference: " << fine_nx << "x" << fine_nt
            << " fine grid does not contain the 64x25 nodes; using bilinear interpolation\n";
  return restrict_to_grid(fine, target, RestrictionMode::bilinear);
}

}  // namespace fdpinn
