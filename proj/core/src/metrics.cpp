#include "fdpinn/metrics.hpp"

#include <cmath>
#include <numeric>

#include "fdpinn/errors.hpp"
#include "fdpinn/training.hpp"

namespace fdpinn {

namespace {

void require_same_grid(const ScalarField& a, const ScalarField& b) {
  if (a.grid() != b.grid()) throw ConfigurationError("fields live on different grids");
}

}  // namespace

double l2_laplace(const ScalarField& pred, const ScalarField& truth) {
  require_same_grid(pred, truth);
  double sum = 0.0;
  const auto p = pred.values();
  const auto t = truth.values();
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double d = t[k] - p[k];
    sum += d * d;
  }
  return std::sqrt(sum);
}

std::vector<double> l2_slices(const ScalarField& pred, const ScalarField& truth) {
  require_same_grid(pred, truth);
  const auto& g = pred.grid();
  std::vector<double> slices(g.n_j());
  for (std::size_t j = 0; j < g.n_j(); ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < g.n_i(); ++i) {
      const double d = pred(i, j) - truth(i, j);
      sum += d * d;
    }
    slices[j] = std::sqrt(sum);
  }
  return slices;
}

double l2_burgers(const ScalarField& pred, const ScalarField& truth) {
  const auto slices = l2_slices(pred, truth);
  return std::accumulate(slices.begin(), slices.end(), 0.0) / static_cast<double>(slices.size());
}

double l2_error(PdeKind kind, const ScalarField& pred, const ScalarField& truth) {
  return kind == PdeKind::laplace ? l2_laplace(pred, truth) : l2_burgers(pred, truth);
}

double iteration_timer(const TrainHistory& history) {
  if (history.iterations() == 0) {
    throw MeasurementError("cannot time a run with zero iterations");
  }
  return history.loop_seconds / static_cast<double>(history.iterations());
}

}  // namespace fdpinn
