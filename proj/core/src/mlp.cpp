#include "fdpinn/mlp.hpp"

#include <cmath>
#include <random>
#include <string>

#include "fdpinn/errors.hpp"

namespace fdpinn {

LayerTensors LayerTensors::zeros(std::span<const int> layer_sizes) {
  LayerTensors t;
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    t.weights.push_back(Eigen::MatrixXd::Zero(layer_sizes[l + 1], layer_sizes[l]));
    t.biases.push_back(Eigen::VectorXd::Zero(layer_sizes[l + 1]));
  }
  return t;
}

std::size_t LayerTensors::parameter_count() const noexcept {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    n += static_cast<std::size_t>(weights[l].size() + biases[l].size());
  }
  return n;
}

bool LayerTensors::same_shape(const LayerTensors& other) const noexcept {
  if (weights.size() != other.weights.size() || biases.size() != other.biases.size()) return false;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    if (weights[l].rows() != other.weights[l].rows() ||
        weights[l].cols() != other.weights[l].cols() || biases[l].size() != other.biases[l].size())
      return false;
  }
  return true;
}

bool LayerTensors::all_finite() const noexcept {
  for (std::size_t l = 0; l < weights.size(); ++l) {
    if (!weights[l].allFinite() || !biases[l].allFinite()) return false;
  }
  return true;
}

void LayerTensors::set_zero() {
  for (auto& w : weights) w.setZero();
  for (auto& b : biases) b.setZero();
}

void validate_layer_sizes(std::span<const int> sizes) {
  if (sizes.size() < 2) throw ConfigurationError("network needs at least 2 layer sizes");
  if (sizes.front() != 2) throw ConfigurationError("network input size must be 2");
  if (sizes.back() != 1) throw ConfigurationError("network output size must be 1");
  for (int s : sizes) {
    if (s < 1) throw ConfigurationError("layer sizes must be positive");
  }
}

MlpParams init_mlp(std::span<const int> layer_sizes, std::uint64_t seed) {
  validate_layer_sizes(layer_sizes);
  MlpParams p;
  p.layer_sizes.assign(layer_sizes.begin(), layer_sizes.end());
  p.tensors = LayerTensors::zeros(layer_sizes);
  std::mt19937_64 rng(seed);
  for (auto& w : p.tensors.weights) {
    const double bound = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
    std::uniform_real_distribution<double> dist(-bound, bound);
    // Column-major fill order is part of the reproducibility contract.
    for (Eigen::Index k = 0; k < w.size(); ++k) w.data()[k] = dist(rng);
  }
  return p;
}

MomentumState zero_momentum(const MlpParams& params) {
  return {LayerTensors::zeros(params.layer_sizes)};
}

namespace {

void check_input(const MlpParams& params, const InputBatch& inputs) {
  if (params.layer_count() == 0) throw ConfigurationError("network has no layers");
  if (!inputs.allFinite()) throw NumericError("non-finite network input");
}

void check_layer(const Eigen::MatrixXd& m, std::size_t layer) {
  if (!m.allFinite()) {
    throw NumericError("non-finite activation in layer " + std::to_string(layer + 1));
  }
}

}  // namespace

ForwardResult forward(const MlpParams& params, const InputBatch& inputs) {
  check_input(params, inputs);
  const auto& t = params.tensors;
  const std::size_t depth = t.layer_count();
  ForwardResult r;
  r.cache.activations.reserve(depth + 1);
  r.cache.pre_activations.reserve(depth);
  r.cache.activations.emplace_back(inputs);
  for (std::size_t l = 0; l < depth; ++l) {
    Eigen::MatrixXd z = t.weights[l] * r.cache.activations.back();
    z.colwise() += t.biases[l];
    Eigen::MatrixXd a = (l + 1 < depth && params.activation == HiddenActivation::tanh)
                            ? Eigen::MatrixXd(z.array().tanh())
                            : z;
    check_layer(a, l);
    r.cache.pre_activations.push_back(std::move(z));
    r.cache.activations.push_back(std::move(a));
  }
  r.outputs = r.cache.activations.back().row(0);
  return r;
}

Eigen::RowVectorXd evaluate(const MlpParams& params, const InputBatch& inputs) {
  check_input(params, inputs);
  const auto& t = params.tensors;
  const std::size_t depth = t.layer_count();
  Eigen::MatrixXd a = inputs;
  for (std::size_t l = 0; l < depth; ++l) {
    Eigen::MatrixXd z = t.weights[l] * a;
    z.colwise() += t.biases[l];
    if (l + 1 < depth && params.activation == HiddenActivation::tanh) {
      a = z.array().tanh();
    } else {
      a = std::move(z);
    }
    check_layer(a, l);
  }
  return a.row(0);
}

GradientSet backward_from_output_seeds(const MlpParams& params, const ForwardCache& cache,
                                       std::span<const double> seeds) {
  const auto& t = params.tensors;
  const std::size_t depth = t.layer_count();
  if (cache.activations.size() != depth + 1 || cache.pre_activations.size() != depth) {
    throw ConfigurationError("forward cache depth does not match the network");
  }
  if (static_cast<Eigen::Index>(seeds.size()) != cache.batch_size()) {
    throw ConfigurationError("got " + std::to_string(seeds.size()) + " seeds for a batch of " +
                             std::to_string(cache.batch_size()));
  }

  GradientSet g{LayerTensors::zeros(params.layer_sizes)};
  Eigen::MatrixXd delta =
      Eigen::Map<const Eigen::RowVectorXd>(seeds.data(), static_cast<Eigen::Index>(seeds.size()));
  for (std::size_t l = depth; l-- > 0;) {
    const Eigen::MatrixXd& a_in = cache.activations[l];
    g.tensors.weights[l].noalias() = delta * a_in.transpose();
    g.tensors.biases[l] = delta.rowwise().sum();
    if (l == 0) break;
    Eigen::MatrixXd back = t.weights[l].transpose() * delta;
    if (params.activation == HiddenActivation::tanh) {
      back.array() *= 1.0 - a_in.array().square();
    }
    delta = std::move(back);
  }
  return g;
}

void sga_update(MlpParams& params, const GradientSet& grads, MomentumState& state, double lr,
                double momentum) {
  if (!(lr > 0.0)) throw ConfigurationError("learning rate must be positive");
  if (!(momentum >= 0.0 && momentum < 1.0)) {
    throw ConfigurationError("momentum must lie in [0, 1)");
  }
  auto& p = params.tensors;
  auto& v = state.velocity;
  if (!p.same_shape(grads.tensors) || !p.same_shape(v)) {
    throw ConfigurationError("gradient or momentum shape does not match the parameters");
  }
  for (std::size_t l = 0; l < p.layer_count(); ++l) {
    v.weights[l] = momentum * v.weights[l] + grads.tensors.weights[l];
    v.biases[l] = momentum * v.biases[l] + grads.tensors.biases[l];
    p.weights[l] -= lr * v.weights[l];
    p.biases[l] -= lr * v.biases[l];
  }
  if (!p.all_finite()) throw NumericError("parameter update produced a non-finite value");
}

}  // namespace fdpinn
