#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fdpinn {

// Invalid sizes, ranges, hyperparameters or problem setup.
class ConfigurationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A finite-difference stencil would read outside the grid.
class StencilOutOfBounds : public std::out_of_range {
 public:
  StencilOutOfBounds(std::size_t i, std::size_t j, const std::string& what)
      : std::out_of_range("stencil out of bounds at node (" + std::to_string(i) + ", " +
                          std::to_string(j) + "): " + what),
        i_(i),
        j_(j) {}

  std::size_t i() const noexcept { return i_; }
  std::size_t j() const noexcept { return j_; }

 private:
  std::size_t i_;
  std::size_t j_;
};

// A NaN or infinity showed up where only finite values are allowed.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonConvergenceError : public std::runtime_error {
 public:
  NonConvergenceError(const std::string& what, double last_update)
      : std::runtime_error(what), last_update_(last_update) {}

  double last_update() const noexcept { return last_update_; }

 private:
  double last_update_;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : std::runtime_error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class SamplingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Target nodes do not line up with the source grid.
class RestrictionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MeasurementError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fdpinn
