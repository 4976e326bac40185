#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fdpinn/grid.hpp"
#include "fdpinn/mlp.hpp"
#include "fdpinn/stencils.hpp"

namespace fdpinn {

enum class Arm { nn_only, fdm_pinn };

std::string_view to_string(Arm arm) noexcept;
/// Accepts "nn-only" or "fdm-pinn".
Arm parse_arm(std::string_view name);

enum class SampleKind { initial, boundary, subsampled_truth };

/// Supervised (coordinate, target) pairs of one kind.
struct SampleSet {
  SampleKind kind = SampleKind::initial;
  std::vector<Point2> inputs;
  std::vector<double> targets;

  std::size_t size() const noexcept { return targets.size(); }
};

struct TrainConfig {
  PdeKind problem = PdeKind::laplace;
  Arm arm = Arm::fdm_pinn;
  double lambda = 0.7;
  double gamma_mu = 1e-1;
  double gamma_f = 1e-4;
  std::size_t minibatch_mu = 4;
  std::size_t minibatch_f = 32;
  std::size_t iterations = 10000;
  std::size_t n_ini = 20;
  std::size_t n_bc = 20;
  std::uint64_t seed = 0;
  std::vector<int> architecture{2, 50, 50, 50, 1};
  double momentum = 0.5;
  double nu = kBurgersViscosity;
  // Constant standing in for d(residual)/d(center output).
  double stencil_slope = -1.0;
  // Seed every footprint node with its true stencil sensitivity instead.
  bool exact_stencil_backprop = false;
  // Evaluate the L2 error every this many iterations (0 = only at the end).
  std::size_t eval_every = 0;

  static TrainConfig laplace_defaults();
  static TrainConfig burgers_defaults();

  /// Throws ConfigurationError for missing or out-of-range settings.
  void validate() const;
};

/// Per-iteration traces of a run.
struct TrainHistory {
  std::vector<double> loss_mu;
  std::vector<double> loss_f;  // zero for the nn-only arm
  std::vector<double> iter_seconds;
  std::vector<std::pair<std::size_t, double>> eval_l2;  // (iterations done, l2)
  double loop_seconds = 0.0;

  std::size_t iterations() const noexcept { return loss_mu.size(); }
};

/// Thrown when a run goes non-finite. Carries the history up to the failure.
class TrainingError : public std::runtime_error {
 public:
  TrainingError(const std::string& what, std::size_t iteration, TrainHistory partial)
      : std::runtime_error(what), iteration_(iteration), partial_(std::move(partial)) {}

  std::size_t iteration() const noexcept { return iteration_; }
  const TrainHistory& partial_history() const noexcept { return partial_; }

 private:
  std::size_t iteration_;
  TrainHistory partial_;
};

struct TrainResult {
  MlpParams params;
  TrainHistory history;
};

/// What one iteration saw; handed to TrainOptions::observer.
struct IterationTrace {
  std::size_t iteration = 0;
  double loss_mu = 0.0;
  double loss_f = 0.0;
  std::span<const NodeIndex> collocation_batch;
  std::span<const double> residuals;
  // minibatch_f x footprint values, center first (residual_footprint order).
  std::span<const Point2> footprint_coords;
  std::span<const double> footprint_values;
};

struct TrainOptions {
  std::function<void(const IterationTrace&)> observer;
  // Start from these parameters instead of init_mlp(architecture, seed).
  std::optional<MlpParams> initial_params;
};

/// Mean of squared differences. Throws ConfigurationError on empty or
/// mismatched input.
double mse_loss(std::span<const double> preds, std::span<const double> targets);

/// Mean of squared residuals. Throws ConfigurationError on empty input.
double physics_loss(std::span<const double> residuals);

/// Center-node seeds lambda * (2 / batch_size) * residual * slope.
std::vector<double> physics_seed_batch(std::span<const double> residuals, double lambda,
                                       std::size_t batch_size, double slope = 1.0);

/// Laplace: n_ini distinct interior ground-truth nodes plus n_bc edge points
/// split evenly over left, bottom, right, top. Burgers: n_ini points of
/// -sin(pi x) at t = 0 plus n_bc zero-valued points split between x = -1
/// and x = +1. Throws SamplingError if n_ini exceeds the interior nodes.
std::vector<SampleSet> sample_supervised_data(const TrainConfig& config,
                                              const ScalarField& ground_truth, std::uint64_t seed);

/// Runs config.iterations steps of minibatch training. Each step backpropagates
/// gamma_mu-scaled MSE seeds and, for fdm-pinn, gamma_f-scaled residual seeds,
/// then applies one momentum update with unit learning rate.
TrainResult train(const TrainConfig& config, const ScalarField& ground_truth,
                  const CollocationSet& collocation, const TrainOptions& options = {});

/// Network output at every node. Throws NumericError naming the node on a
/// non-finite output.
ScalarField predict_field(const MlpParams& params, const UniformGrid2D& grid);

/// Grid each problem is trained and evaluated on.
UniformGrid2D problem_grid(PdeKind kind);

}  // namespace fdpinn
