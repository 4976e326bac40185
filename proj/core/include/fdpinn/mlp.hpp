#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace fdpinn {

/// Hidden-layer nonlinearity. `identity` exists for closed-form gradient
/// tests only; init_mlp always produces tanh networks.
enum class HiddenActivation { tanh, identity };

/// Per-layer weight matrices (out x in) and bias vectors.
struct LayerTensors {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;

  static LayerTensors zeros(std::span<const int> layer_sizes);

  std::size_t layer_count() const noexcept { return weights.size(); }
  std::size_t parameter_count() const noexcept;
  bool same_shape(const LayerTensors& other) const noexcept;
  bool all_finite() const noexcept;
  void set_zero();
};

struct MlpParams {
  std::vector<int> layer_sizes;
  LayerTensors tensors;
  HiddenActivation activation = HiddenActivation::tanh;

  std::size_t layer_count() const noexcept { return tensors.layer_count(); }
};

struct GradientSet {
  LayerTensors tensors;
};

struct MomentumState {
  LayerTensors velocity;
};

/// Throws ConfigurationError unless there are >= 2 entries, the first is
/// 2, the last is 1 and all are positive.
void validate_layer_sizes(std::span<const int> layer_sizes);

/// Glorot-uniform weights, bound sqrt(6 / (fan_in + fan_out)), zero biases.
/// Bit-identical for equal seeds.
MlpParams init_mlp(std::span<const int> layer_sizes, std::uint64_t seed);

MomentumState zero_momentum(const MlpParams& params);

/// A batch of coordinates, one column per sample.
using InputBatch = Eigen::Matrix<double, 2, Eigen::Dynamic>;

/// Activations of every layer for one batch. activations[0] is the input;
/// pre_activations[l] feeds activations[l + 1].
struct ForwardCache {
  std::vector<Eigen::MatrixXd> pre_activations;
  std::vector<Eigen::MatrixXd> activations;

  Eigen::Index batch_size() const noexcept {
    return activations.empty() ? 0 : activations.front().cols();
  }
};

struct ForwardResult {
  Eigen::RowVectorXd outputs;
  ForwardCache cache;
};

/// Tanh hidden layers, affine output. Throws NumericError naming the layer
/// if anything non-finite appears.
ForwardResult forward(const MlpParams& params, const InputBatch& inputs);

/// Outputs only; no cache is kept.
Eigen::RowVectorXd evaluate(const MlpParams& params, const InputBatch& inputs);

/// Gradient of sum_b seeds[b] * output[b] with respect to every parameter.
/// Loss-level scaling is the caller's job and lives in the seeds.
/// Throws ConfigurationError if the seed count does not match the cache.
GradientSet backward_from_output_seeds(const MlpParams& params, const ForwardCache& cache,
                                       std::span<const double> seeds);

/// velocity = momentum * velocity + grads; params -= lr * velocity.
void sga_update(MlpParams& params, const GradientSet& grads, MomentumState& state, double lr,
                double momentum);

}  // namespace fdpinn
