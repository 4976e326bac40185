#include "fdpinn/sor.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "fdpinn/errors.hpp"

namespace fdpinn {

SorConfig SorConfig::defaults(std::size_t n) {
  SorConfig c;
  const double nn = static_cast<double>(n < 3 ? 3 : n);
  c.omega = 2.0 / (1.0 + std::sin(std::numbers::pi / (nn - 1.0)));
  c.tol = 1e-8;
  c.max_iter = 100 * static_cast<std::size_t>(nn) * static_cast<std::size_t>(nn);
  return c;
}

void SorConfig::validate() const {
  if (!(omega >= 1.0 && omega < 2.0)) {
    throw ConfigurationError("SOR omega must lie in [1, 2), got " + std::to_string(omega));
  }
  if (!(tol > 0.0)) throw ConfigurationError("SOR tolerance must be positive");
  if (max_iter < 1) throw ConfigurationError("SOR max_iter must be at least 1");
}

UniformGrid2D trough_grid(std::size_t n) { return make_grid(n, n, {0.0, 1.0}, {0.0, 1.0}); }

void apply_trough_boundary(ScalarField& field, const TroughBoundary& b) {
  const auto& g = field.grid();
  const std::size_t ni = g.n_i();
  const std::size_t nj = g.n_j();
  for (std::size_t j = 0; j < nj; ++j) field(0, j) = b.left;
  for (std::size_t i = 0; i < ni; ++i) field(i, 0) = b.bottom;
  for (std::size_t j = 0; j < nj; ++j) field(ni - 1, j) = b.right;
  for (std::size_t i = 0; i < ni; ++i) field(i, nj - 1) = b.top;
}

namespace {

void check_boundary_imposed(const ScalarField& field, const TroughBoundary& b) {
  const auto& g = field.grid();
  const std::size_t ni = g.n_i();
  const std::size_t nj = g.n_j();
  // Same precedence as apply_trough_boundary: top, right, bottom, left.
  auto expected = [&](std::size_t i, std::size_t j) {
    if (j == nj - 1) return b.top;
    if (i == ni - 1) return b.right;
    if (j == 0) return b.bottom;
    return b.left;
  };
  auto check = [&](std::size_t i, std::size_t j) {
    if (field(i, j) != expected(i, j)) {
      throw ConfigurationError("SOR sweep called before boundary values were imposed (node (" +
                               std::to_string(i) + ", " + std::to_string(j) + "))");
    }
  };
  for (std::size_t i = 0; i < ni; ++i) {
    check(i, 0);
    check(i, nj - 1);
  }
  for (std::size_t j = 0; j < nj; ++j) {
    check(0, j);
    check(ni - 1, j);
  }
}

}  // namespace

double sor_sweep(ScalarField& field, const TroughBoundary& boundary, double omega) {
  const auto& g = field.grid();
  if (!g.is_isotropic()) throw ConfigurationError("SOR sweep requires an isotropic grid");
  check_boundary_imposed(field, boundary);

  double max_update = 0.0;
  for (std::size_t j = 1; j + 1 < g.n_j(); ++j) {
    for (std::size_t i = 1; i + 1 < g.n_i(); ++i) {
      const double avg = 0.25 * (field(i - 1, j) + field(i + 1, j) + field(i, j - 1) + field(i, j + 1));
      const double update = omega * (avg - field(i, j));
      const double v = field(i, j) + update;
      if (!std::isfinite(v)) {
        std::ostringstream os;
        os << "SOR diverged at node (" << i << ", " << j << ")";
        throw NumericError(os.str());
      }
      field(i, j) = v;
      max_update = std::max(max_update, std::abs(update));
    }
  }
  return max_update;
}

SorSolution solve_trough(std::size_t n, const SorConfig& config, const TroughBoundary& boundary) {
  config.validate();
  ScalarField field(trough_grid(n));
  apply_trough_boundary(field, boundary);

  double last = 0.0;
  for (std::size_t sweep = 1; sweep <= config.max_iter; ++sweep) {
    last = sor_sweep(field, boundary, config.omega);
    if (last < config.tol) return {std::move(field), sweep};
  }
  std::ostringstream os;
  os << "SOR did not converge in " << config.max_iter << " sweeps (last update " << last << ")";
  throw NonConvergenceError(os.str(), last);
}

SorSolution solve_trough(std::size_t n) { return solve_trough(n, SorConfig::defaults(n)); }

double analytic_trough(double x, double y, int n_terms) {
  if (n_terms < 1) throw ConfigurationError("analytic_trough needs at least one term");
  constexpr double pi = std::numbers::pi;
  double sum = 0.0;
  for (int t = 0; t < n_terms; ++t) {
    const double k = 2.0 * t + 1.0;
    const double a = k * pi;
    // sinh(a y) / sinh(a) without overflow.
    const double ratio =
        std::exp(a * (y - 1.0)) * (-std::expm1(-2.0 * a * y)) / (-std::expm1(-2.0 * a));
    sum += 4.0 / a * std::sin(a * x) * ratio;
  }
  return sum;
}

}  // namespace fdpinn
