#pragma once

#include <string>
#include <vector>

#include "fdpinn/grid.hpp"
#include "fdpinn/stencils.hpp"

namespace fdpinn {

struct TrainHistory;

/// sqrt of the sum of squared differences over every node.
double l2_laplace(const ScalarField& pred, const ScalarField& truth);

/// Per time slice j: sqrt(sum_i (pred - truth)^2).
std::vector<double> l2_slices(const ScalarField& pred, const ScalarField& truth);

/// Mean of l2_slices over the n_j time slices.
double l2_burgers(const ScalarField& pred, const ScalarField& truth);

/// The evaluation norm used for `kind`.
double l2_error(PdeKind kind, const ScalarField& pred, const ScalarField& truth);

/// Wall-clock seconds per iteration of a finished run, from the training
/// loop only (no setup or evaluation). Throws MeasurementError for a run
/// with zero iterations. Runs shorter than 100 iterations give noisy values.
double iteration_timer(const TrainHistory& history);

struct EvalReport {
  double l2 = 0.0;
  std::vector<double> slice_l2;  // Burgers only, one per time slice
  double sec_per_iter = 0.0;
  std::string arm;
  std::string config_fingerprint;
};

}  // namespace fdpinn
