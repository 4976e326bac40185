#include "fdpinn/training.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>

#include "fdpinn/burgers_reference.hpp"
#include "fdpinn/errors.hpp"
#include "fdpinn/metrics.hpp"
#include "fdpinn/sor.hpp"

namespace fdpinn {

namespace {

using Clock = std::chrono::steady_clock;

// Independent generator streams of one run.
enum class Stream : std::uint64_t { init = 0, samples = 1, supervised = 2, collocation = 3 };

std::mt19937_64 make_rng(std::uint64_t seed, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

std::uint64_t init_seed(std::uint64_t seed) { return make_rng(seed, Stream::init)(); }

std::vector<std::size_t> even_split(std::size_t total, std::size_t parts) {
  std::vector<std::size_t> out(parts, total / parts);
  for (std::size_t k = 0; k < total % parts; ++k) ++out[k];
  return out;
}

std::vector<SampleSet> sample_laplace(const TrainConfig& config, const ScalarField& truth,
                                      std::mt19937_64& rng) {
  const auto& g = truth.grid();
  std::vector<NodeIndex> interior;
  for (std::size_t j = 1; j + 1 < g.n_j(); ++j) {
    for (std::size_t i = 1; i + 1 < g.n_i(); ++i) interior.push_back({i, j});
  }
  if (config.n_ini > interior.size()) {
    throw SamplingError("requested " + std::to_string(config.n_ini) + " ground-truth samples but only " +
                        std::to_string(interior.size()) + " interior nodes exist");
  }
  SampleSet truth_set{SampleKind::subsampled_truth, {}, {}};
  // Partial Fisher-Yates: the first n_ini entries become the sample.
  for (std::size_t k = 0; k < config.n_ini; ++k) {
    std::uniform_int_distribution<std::size_t> pick(k, interior.size() - 1);
    std::swap(interior[k], interior[pick(rng)]);
    truth_set.inputs.push_back(g.node_coords(interior[k]));
    truth_set.targets.push_back(truth(interior[k].i, interior[k].j));
  }

  const TroughBoundary b;
  SampleSet edges{SampleKind::boundary, {}, {}};
  std::uniform_real_distribution<double> along(0.0, 1.0);
  const auto per_edge = even_split(config.n_bc, 4);
  for (std::size_t e = 0; e < 4; ++e) {
    for (std::size_t k = 0; k < per_edge[e]; ++k) {
      const double s = along(rng);
      switch (e) {
        case 0: edges.inputs.push_back({0.0, s}); edges.targets.push_back(b.left); break;
        case 1: edges.inputs.push_back({s, 0.0}); edges.targets.push_back(b.bottom); break;
        case 2: edges.inputs.push_back({1.0, s}); edges.targets.push_back(b.right); break;
        default: edges.inputs.push_back({s, 1.0}); edges.targets.push_back(b.top); break;
      }
    }
  }
  return {std::move(truth_set), std::move(edges)};
}

std::vector<SampleSet> sample_burgers(const TrainConfig& config, std::mt19937_64& rng) {
  const BurgersProblem problem;
  SampleSet initial{SampleKind::initial, {}, {}};
  std::uniform_real_distribution<double> xs(problem.x.min, problem.x.max);
  for (std::size_t k = 0; k < config.n_ini; ++k) {
    const double x = xs(rng);
    initial.inputs.push_back({x, problem.t.min});
    initial.targets.push_back(problem.initial(x));
  }
  SampleSet edges{SampleKind::boundary, {}, {}};
  std::uniform_real_distribution<double> ts(problem.t.min, problem.t.max);
  const auto per_edge = even_split(config.n_bc, 2);
  for (std::size_t e = 0; e < 2; ++e) {
    const double x = e == 0 ? problem.x.min : problem.x.max;
    for (std::size_t k = 0; k < per_edge[e]; ++k) {
      edges.inputs.push_back({x, ts(rng)});
      edges.targets.push_back(0.0);
    }
  }
  return {std::move(initial), std::move(edges)};
}

void check_loss(double loss, const char* name, std::size_t it, TrainHistory& history) {
  if (!std::isfinite(loss)) {
    std::ostringstream os;
    os << name << " became non-finite at iteration " << it;
    throw TrainingError(os.str(), it, std::move(history));
  }
}

}  // namespace

std::string_view to_string(Arm arm) noexcept {
  return arm == Arm::nn_only ? "nn-only" : "fdm-pinn";
}

Arm parse_arm(std::string_view name) {
  if (name == "nn-only") return Arm::nn_only;
  if (name == "fdm-pinn") return Arm::fdm_pinn;
  throw ConfigurationError("unknown arm '" + std::string(name) + "', expected nn-only or fdm-pinn");
}

TrainConfig TrainConfig::laplace_defaults() {
  TrainConfig c;
  c.problem = PdeKind::laplace;
  c.minibatch_mu = 4;
  c.minibatch_f = 32;
  c.n_ini = 100;
  c.n_bc = 20;
  c.architecture = {2, 50, 50, 50, 1};
  return c;
}

TrainConfig TrainConfig::burgers_defaults() {
  TrainConfig c;
  c.problem = PdeKind::burgers;
  c.minibatch_mu = 8;
  c.minibatch_f = 8;
  c.n_ini = 100;
  c.n_bc = 100;
  c.architecture = {2, 30, 30, 30, 1};
  // The centre sensitivity flips sign with u here, so no constant slope
  // works; seed every footprint node with its true derivative instead.
  c.exact_stencil_backprop = true;
  c.gamma_f = 1e-3;
  return c;
}

void TrainConfig::validate() const {
  validate_layer_sizes(architecture);
  auto fail = [](const std::string& msg) { throw ConfigurationError(msg); };
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) fail("lambda must be finite and >= 0");
  if (!(gamma_mu > 0.0) || !std::isfinite(gamma_mu)) fail("gamma_mu must be positive");
  if (!(gamma_f >= 0.0) || !std::isfinite(gamma_f)) fail("gamma_f must be finite and >= 0");
  if (!(momentum >= 0.0 && momentum < 1.0)) fail("momentum must lie in [0, 1)");
  if (!std::isfinite(stencil_slope)) fail("stencil_slope must be finite");
  if (!(nu > 0.0)) fail("nu must be positive");
  if (minibatch_mu < 1) fail("minibatch_mu must be at least 1");
  if (minibatch_f < 1) fail("minibatch_f must be at least 1");
  if (n_ini + n_bc < 1) fail("need at least one supervised sample");
  if (minibatch_mu > n_ini + n_bc) {
    fail("minibatch_mu " + std::to_string(minibatch_mu) + " exceeds the " +
         std::to_string(n_ini + n_bc) + " supervised samples");
  }
}

double mse_loss(std::span<const double> preds, std::span<const double> targets) {
  if (preds.empty()) throw ConfigurationError("mse_loss of an empty batch");
  if (preds.size() != targets.size()) throw ConfigurationError("mse_loss size mismatch");
  double sum = 0.0;
  for (std::size_t k = 0; k < preds.size(); ++k) {
    const double d = preds[k] - targets[k];
    sum += d * d;
  }
  return sum / static_cast<double>(preds.size());
}

double physics_loss(std::span<const double> residuals) {
  if (residuals.empty()) throw ConfigurationError("physics_loss of an empty batch");
  double sum = 0.0;
  for (double r : residuals) sum += r * r;
  return sum / static_cast<double>(residuals.size());
}

std::vector<double> physics_seed_batch(std::span<const double> residuals, double lambda,
                                       std::size_t batch_size, double slope) {
  if (batch_size == 0) throw ConfigurationError("physics_seed_batch needs a positive batch size");
  std::vector<double> seeds(residuals.size());
  const double scale = lambda * 2.0 / static_cast<double>(batch_size) * slope;
  for (std::size_t k = 0; k < residuals.size(); ++k) seeds[k] = scale * residuals[k];
  return seeds;
}

std::vector<SampleSet> sample_supervised_data(const TrainConfig& config,
                                              const ScalarField& ground_truth, std::uint64_t seed) {
  auto rng = make_rng(seed, Stream::samples);
  if (config.problem == PdeKind::laplace) return sample_laplace(config, ground_truth, rng);
  return sample_burgers(config, rng);
}

UniformGrid2D problem_grid(PdeKind kind) {
  return kind == PdeKind::laplace ? trough_grid(41) : burgers_eval_grid();
}

ScalarField predict_field(const MlpParams& params, const UniformGrid2D& grid) {
  InputBatch inputs(2, static_cast<Eigen::Index>(grid.size()));
  for (std::size_t j = 0; j < grid.n_j(); ++j) {
    for (std::size_t i = 0; i < grid.n_i(); ++i) {
      const Point2 p = grid.node_coords(i, j);
      const auto col = static_cast<Eigen::Index>(grid.offset(i, j));
      inputs(0, col) = p.x;
      inputs(1, col) = p.y;
    }
  }
  // Per-node error reporting needs the raw outputs, so skip evaluate()'s layer check.
  Eigen::MatrixXd a = inputs;
  const std::size_t depth = params.layer_count();
  for (std::size_t l = 0; l < depth; ++l) {
    Eigen::MatrixXd z = params.tensors.weights[l] * a;
    z.colwise() += params.tensors.biases[l];
    a = (l + 1 < depth && params.activation == HiddenActivation::tanh)
            ? Eigen::MatrixXd(z.array().tanh())
            : z;
  }
  ScalarField field(grid);
  for (std::size_t j = 0; j < grid.n_j(); ++j) {
    for (std::size_t i = 0; i < grid.n_i(); ++i) {
      const double v = a(0, static_cast<Eigen::Index>(grid.offset(i, j)));
      if (!std::isfinite(v)) {
        throw NumericError("non-finite network output at node (" + std::to_string(i) + ", " +
                           std::to_string(j) + ")");
      }
      field(i, j) = v;
    }
  }
  return field;
}

TrainResult train(const TrainConfig& config, const ScalarField& ground_truth,
                  const CollocationSet& collocation, const TrainOptions& options) {
  config.validate();
  const auto& grid = ground_truth.grid();
  const bool physics = config.arm == Arm::fdm_pinn;
  if (physics && collocation.nodes.empty()) {
    throw ConfigurationError("fdm-pinn arm needs a nonempty collocation set");
  }
  if (physics && collocation.kind != config.problem) {
    throw ConfigurationError("collocation set was built for a different PDE");
  }

  // Flatten every supervised sample into one pool.
  std::vector<Point2> pool_x;
  std::vector<double> pool_y;
  for (const auto& s : sample_supervised_data(config, ground_truth, config.seed)) {
    pool_x.insert(pool_x.end(), s.inputs.begin(), s.inputs.end());
    pool_y.insert(pool_y.end(), s.targets.begin(), s.targets.end());
  }

  TrainResult result{options.initial_params ? *options.initial_params
                                            : init_mlp(config.architecture, init_seed(config.seed)),
                     {}};
  if (result.params.layer_sizes != config.architecture) {
    throw ConfigurationError("initial parameters do not match the configured architecture");
  }
  MlpParams& params = result.params;
  TrainHistory& history = result.history;
  MomentumState momentum = zero_momentum(params);

  auto rng_mu = make_rng(config.seed, Stream::supervised);
  auto rng_f = make_rng(config.seed, Stream::collocation);
  std::uniform_int_distribution<std::size_t> pick_sample(0, pool_y.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_node(
      0, collocation.nodes.empty() ? 0 : collocation.nodes.size() - 1);

  const std::size_t bmu = config.minibatch_mu;
  const std::size_t bf = config.minibatch_f;
  const auto footprint = residual_footprint(config.problem);
  const std::size_t fp = footprint.size();
  const double mu_scale = config.gamma_mu * 2.0 / static_cast<double>(bmu);

  InputBatch sup_in(2, static_cast<Eigen::Index>(bmu));
  std::vector<double> sup_target(bmu), sup_pred(bmu), sup_seed(bmu);

  std::optional<PdeResidual> residual_op;
  if (physics) residual_op.emplace(config.problem, grid, config.nu);
  // Columns [0, bf) are stencil centers; neighbors follow, node-major.
  const std::size_t backprop_cols = config.exact_stencil_backprop ? bf * fp : bf;
  InputBatch seeded_in(2, static_cast<Eigen::Index>(backprop_cols));
  InputBatch free_in(2, static_cast<Eigen::Index>(bf * fp - backprop_cols));
  std::vector<NodeIndex> batch_nodes(bf);
  std::vector<Point2> fp_coords(bf * fp);
  std::vector<double> fp_values(bf * fp), residuals(bf), physics_seed(backprop_cols);
  std::vector<double> sens(fp);
  std::vector<std::size_t> column(bf * fp);

  history.loss_mu.reserve(config.iterations);
  history.loss_f.reserve(config.iterations);
  history.iter_seconds.reserve(config.iterations);

  const auto loop_start = Clock::now();
  double eval_seconds = 0.0;
  for (std::size_t it = 0; it < config.iterations; ++it) {
    const auto t0 = Clock::now();

    for (std::size_t b = 0; b < bmu; ++b) {
      const std::size_t k = pick_sample(rng_mu);
      sup_in(0, static_cast<Eigen::Index>(b)) = pool_x[k].x;
      sup_in(1, static_cast<Eigen::Index>(b)) = pool_x[k].y;
      sup_target[b] = pool_y[k];
    }
    ForwardResult sup;
    try {
      sup = forward(params, sup_in);
    } catch (const NumericError& e) {
      throw TrainingError(std::string(e.what()) + " at iteration " + std::to_string(it), it,
                          std::move(history));
    }
    for (std::size_t b = 0; b < bmu; ++b) {
      sup_pred[b] = sup.outputs(static_cast<Eigen::Index>(b));
      sup_seed[b] = mu_scale * (sup_pred[b] - sup_target[b]);
    }
    const double loss_mu = mse_loss(sup_pred, sup_target);
    check_loss(loss_mu, "supervised loss", it, history);
    GradientSet grads = backward_from_output_seeds(params, sup.cache, sup_seed);

    double loss_f = 0.0;
    if (physics) {
      for (std::size_t b = 0; b < bf; ++b) {
        const NodeIndex n = collocation.nodes[pick_node(rng_f)];
        batch_nodes[b] = n;
        for (std::size_t k = 0; k < fp; ++k) {
          fp_coords[b * fp + k] = grid.node_coords(n.i + footprint[k].di, n.j + footprint[k].dj);
        }
      }
      // Center-only seeding backpropagates just the centers.
      std::size_t seeded = 0, free = 0;
      for (std::size_t k = 0; k < fp; ++k) {
        for (std::size_t b = 0; b < bf; ++b) {
          const Point2& p = fp_coords[b * fp + k];
          const bool is_seeded = config.exact_stencil_backprop || k == 0;
          InputBatch& dst = is_seeded ? seeded_in : free_in;
          const std::size_t col = is_seeded ? seeded++ : free++;
          dst(0, static_cast<Eigen::Index>(col)) = p.x;
          dst(1, static_cast<Eigen::Index>(col)) = p.y;
          column[b * fp + k] = col;
        }
      }
      ForwardResult seeded_out;
      Eigen::RowVectorXd free_out;
      try {
        seeded_out = forward(params, seeded_in);
        if (free_in.cols() > 0) free_out = evaluate(params, free_in);
      } catch (const NumericError& e) {
        throw TrainingError(std::string(e.what()) + " at iteration " + std::to_string(it), it,
                            std::move(history));
      }
      for (std::size_t b = 0; b < bf; ++b) {
        for (std::size_t k = 0; k < fp; ++k) {
          const bool is_seeded = config.exact_stencil_backprop || k == 0;
          const auto col = static_cast<Eigen::Index>(column[b * fp + k]);
          fp_values[b * fp + k] = is_seeded ? seeded_out.outputs(col) : free_out(col);
        }
        residuals[b] = residual_op->evaluate(std::span<const double>(fp_values).subspan(b * fp, fp));
      }
      loss_f = physics_loss(residuals);
      check_loss(loss_f, "physics loss", it, history);

      const double scale = config.gamma_f * config.lambda * 2.0 / static_cast<double>(bf);
      if (config.exact_stencil_backprop) {
        for (std::size_t b = 0; b < bf; ++b) {
          residual_op->sensitivities(std::span<const double>(fp_values).subspan(b * fp, fp), sens);
          for (std::size_t k = 0; k < fp; ++k) {
            physics_seed[column[b * fp + k]] = scale * residuals[b] * sens[k];
          }
        }
      } else {
        const auto seeds = physics_seed_batch(residuals, config.lambda, bf, config.stencil_slope);
        for (std::size_t b = 0; b < bf; ++b) physics_seed[b] = config.gamma_f * seeds[b];
      }
      const GradientSet gf = backward_from_output_seeds(params, seeded_out.cache, physics_seed);
      for (std::size_t l = 0; l < params.layer_count(); ++l) {
        grads.tensors.weights[l] += gf.tensors.weights[l];
        grads.tensors.biases[l] += gf.tensors.biases[l];
      }
    }

    try {
      sga_update(params, grads, momentum, 1.0, config.momentum);
    } catch (const NumericError& e) {
      throw TrainingError(std::string(e.what()) + " at iteration " + std::to_string(it), it,
                          std::move(history));
    }

    const auto t1 = Clock::now();
    history.loss_mu.push_back(loss_mu);
    history.loss_f.push_back(loss_f);
    history.iter_seconds.push_back(std::chrono::duration<double>(t1 - t0).count());

    if (options.observer) {
      options.observer(IterationTrace{it, loss_mu, loss_f,
                                      physics ? std::span<const NodeIndex>(batch_nodes)
                                              : std::span<const NodeIndex>{},
                                      physics ? std::span<const double>(residuals)
                                              : std::span<const double>{},
                                      physics ? std::span<const Point2>(fp_coords)
                                              : std::span<const Point2>{},
                                      physics ? std::span<const double>(fp_values)
                                              : std::span<const double>{}});
    }
    if (config.eval_every > 0 && (it + 1) % config.eval_every == 0) {
      const auto e0 = Clock::now();
      const double l2 = l2_error(config.problem, predict_field(params, grid), ground_truth);
      history.eval_l2.emplace_back(it + 1, l2);
      eval_seconds += std::chrono::duration<double>(Clock::now() - e0).count();
    }
  }
  history.loop_seconds =
      std::chrono::duration<double>(Clock::now() - loop_start).count() - eval_seconds;
  return result;
}

}  // namespace fdpinn
