#include "fdpinn/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "fdpinn/errors.hpp"

namespace fdpinn {

namespace {

void check_axis(std::size_t n, const Interval& r, const char* name) {
  if (n < 3) {
    std::ostringstream os;
    os << "axis " << name << " needs at least 3 nodes, got " << n;
    throw ConfigurationError(os.str());
  }
  if (!std::isfinite(r.min) || !std::isfinite(r.max) || !(r.min < r.max)) {
    std::ostringstream os;
    os << "axis " << name << " interval [" << r.min << ", " << r.max << "] is degenerate";
    throw ConfigurationError(os.str());
  }
}

}  // namespace

UniformGrid2D::UniformGrid2D(std::size_t n_i, std::size_t n_j, Interval range_i,
                             Interval range_j)
    : n_i_(n_i), n_j_(n_j), range_i_(range_i), range_j_(range_j), h_i_(0.0), h_j_(0.0) {
  check_axis(n_i, range_i, "i");
  check_axis(n_j, range_j, "j");
  h_i_ = range_i.width() / static_cast<double>(n_i - 1);
  h_j_ = range_j.width() / static_cast<double>(n_j - 1);
}

bool UniformGrid2D::is_isotropic(double tol) const noexcept {
  return std::abs(h_i_ - h_j_) <= tol * std::max(h_i_, h_j_);
}

Point2 UniformGrid2D::node_coords(std::size_t i, std::size_t j) const {
  if (!contains(i, j)) {
    throw std::out_of_range("node (" + std::to_string(i) + ", " + std::to_string(j) +
                            ") outside " + std::to_string(n_i_) + "x" + std::to_string(n_j_) +
                            " grid");
  }
  // Pin the last node to the interval end so the far corner is exact.
  const double x = i + 1 == n_i_ ? range_i_.max : range_i_.min + static_cast<double>(i) * h_i_;
  const double y = j + 1 == n_j_ ? range_j_.max : range_j_.min + static_cast<double>(j) * h_j_;
  return {x, y};
}

NodeIndex UniformGrid2D::nearest_node(Point2 p) const noexcept {
  auto snap = [](double v, double lo, double h, std::size_t n) {
    const double k = std::round((v - lo) / h);
    if (!(k > 0.0)) return std::size_t{0};
    return std::min(static_cast<std::size_t>(k), n - 1);
  };
  return {snap(p.x, range_i_.min, h_i_, n_i_), snap(p.y, range_j_.min, h_j_, n_j_)};
}

UniformGrid2D make_grid(std::size_t n_i, std::size_t n_j, Interval range_i, Interval range_j) {
  return UniformGrid2D(n_i, n_j, range_i, range_j);
}

ScalarField::ScalarField(UniformGrid2D grid, double fill)
    : grid_(grid), values_(grid.size(), fill) {}

ScalarField::ScalarField(UniformGrid2D grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw ConfigurationError("field has " + std::to_string(values_.size()) +
                             " values, grid needs " + std::to_string(grid_.size()));
  }
}

double ScalarField::at(std::size_t i, std::size_t j) const {
  if (!grid_.contains(i, j)) {
    throw std::out_of_range("field index (" + std::to_string(i) + ", " + std::to_string(j) +
                            ") out of range");
  }
  return (*this)(i, j);
}

bool ScalarField::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

ScalarField field_from_fn(const UniformGrid2D& grid, const CoordinateFn& f) {
  ScalarField field(grid);
  for (std::size_t j = 0; j < grid.n_j(); ++j) {
    for (std::size_t i = 0; i < grid.n_i(); ++i) {
      const Point2 p = grid.node_coords(i, j);
      const double v = f(p.x, p.y);
      if (!std::isfinite(v)) {
        std::ostringstream os;
        os << "non-finite value " << v << " at node (" << i << ", " << j << ") = (" << p.x
           << ", " << p.y << ")";
        throw NumericError(os.str());
      }
      field(i, j) = v;
    }
  }
  return field;
}

}  // namespace fdpinn
