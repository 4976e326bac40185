#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace fdpinn {

struct Interval {
  double min = 0.0;
  double max = 1.0;

  double width() const noexcept { return max - min; }
  bool contains(double v) const noexcept { return v >= min && v <= max; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

struct NodeIndex {
  std::size_t i = 0;
  std::size_t j = 0;
  friend bool operator==(const NodeIndex&, const NodeIndex&) = default;
};

struct Point2 {
  double x = 0.0;  // axis 0
  double y = 0.0;  // axis 1 (y for Laplace, t for Burgers)
};

/// Uniform tensor-product grid over a rectangle.
///
/// Axis 0 (index i) is the first coordinate, axis 1 (index j) the second.
/// Spacing is kept per axis because the Burgers grid is anisotropic.
class UniformGrid2D {
 public:
  /// Throws ConfigurationError for fewer than 3 nodes on an axis or an
  /// empty/inverted interval.
  UniformGrid2D(std::size_t n_i, std::size_t n_j, Interval range_i, Interval range_j);

  std::size_t n_i() const noexcept { return n_i_; }
  std::size_t n_j() const noexcept { return n_j_; }
  std::size_t size() const noexcept { return n_i_ * n_j_; }
  const Interval& range_i() const noexcept { return range_i_; }
  const Interval& range_j() const noexcept { return range_j_; }
  double h_i() const noexcept { return h_i_; }
  double h_j() const noexcept { return h_j_; }

  bool is_isotropic(double tol = 1e-12) const noexcept;
  bool contains(std::size_t i, std::size_t j) const noexcept { return i < n_i_ && j < n_j_; }

  /// Storage offset; rows of constant j are contiguous.
  std::size_t offset(std::size_t i, std::size_t j) const noexcept { return j * n_i_ + i; }

  /// Throws std::out_of_range for an index outside the grid.
  Point2 node_coords(std::size_t i, std::size_t j) const;
  Point2 node_coords(NodeIndex n) const { return node_coords(n.i, n.j); }

  /// Nearest node to a point, clamped to the grid.
  NodeIndex nearest_node(Point2 p) const noexcept;

  friend bool operator==(const UniformGrid2D&, const UniformGrid2D&) = default;

 private:
  std::size_t n_i_;
  std::size_t n_j_;
  Interval range_i_;
  Interval range_j_;
  double h_i_;
  double h_j_;
};

UniformGrid2D make_grid(std::size_t n_i, std::size_t n_j, Interval range_i, Interval range_j);

/// One real value per grid node.
class ScalarField {
 public:
  explicit ScalarField(UniformGrid2D grid, double fill = 0.0);
  /// Throws ConfigurationError if values.size() != grid.size().
  ScalarField(UniformGrid2D grid, std::vector<double> values);

  const UniformGrid2D& grid() const noexcept { return grid_; }

  double operator()(std::size_t i, std::size_t j) const noexcept {
    return values_[grid_.offset(i, j)];
  }
  double& operator()(std::size_t i, std::size_t j) noexcept { return values_[grid_.offset(i, j)]; }

  /// Bounds-checked access.
  double at(std::size_t i, std::size_t j) const;

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  bool all_finite() const noexcept;

  friend bool operator==(const ScalarField&, const ScalarField&) = default;

 private:
  UniformGrid2D grid_;
  std::vector<double> values_;
};

using CoordinateFn = std::function<double(double, double)>;

/// Samples f at every node. Throws NumericError naming the node when f
/// returns a non-finite value.
ScalarField field_from_fn(const UniformGrid2D& grid, const CoordinateFn& f);

}  // namespace fdpinn
