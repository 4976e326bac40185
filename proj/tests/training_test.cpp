#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "fdpinn/burgers_reference.hpp"
#include "fdpinn/errors.hpp"
#include "fdpinn/metrics.hpp"
#include "fdpinn/sor.hpp"
#include "fdpinn/training.hpp"

using namespace fdpinn;

namespace {

const ScalarField& trough() {
  static const ScalarField f = solve_trough(41).field;
  return f;
}

// Cheap stand-in for the Burgers reference; sampling only needs the grid.
ScalarField burgers_placeholder() { return ScalarField(burgers_eval_grid()); }

TrainConfig small(PdeKind kind, Arm arm, std::size_t iterations = 50) {
  TrainConfig c = kind == PdeKind::laplace ? TrainConfig::laplace_defaults()
                                           : TrainConfig::burgers_defaults();
  c.arm = arm;
  c.iterations = iterations;
  c.architecture = {2, 10, 10, 1};
  return c;
}

}  // namespace

TEST(Losses, MseAndPhysics) {
  const std::vector<double> p{1, 2, 3}, t{0, 0, 0};
  EXPECT_NEAR(mse_loss(p, t), 14.0 / 3.0, 1e-15);
  const std::vector<double> a{3, 0}, b{1, 1};
  EXPECT_DOUBLE_EQ(mse_loss(a, b), 2.5);
  EXPECT_THROW(mse_loss(std::vector<double>{}, std::vector<double>{}), ConfigurationError);
  EXPECT_THROW(mse_loss(p, b), ConfigurationError);

  EXPECT_EQ(physics_loss(std::vector<double>{0, 0, 0}), 0.0);
  EXPECT_EQ(physics_loss(std::vector<double>{2}), 4.0);
  EXPECT_DOUBLE_EQ(physics_loss(std::vector<double>{1, -1, 2}), 2.0);
  EXPECT_THROW(physics_loss(std::vector<double>{}), ConfigurationError);
}

TEST(PhysicsSeeds, Examples) {
  EXPECT_EQ(physics_seed_batch(std::vector<double>{0.0}, 0.7, 1)[0], 0.0);
  EXPECT_DOUBLE_EQ(physics_seed_batch(std::vector<double>{1.0}, 0.7, 1)[0], 1.4);
  const auto s = physics_seed_batch(std::vector<double>{1.0, 1.0}, 1.0, 2);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_DOUBLE_EQ(s[0], 1.0);
  EXPECT_DOUBLE_EQ(s[1], 1.0);
  EXPECT_DOUBLE_EQ(physics_seed_batch(std::vector<double>{2.0}, 0.5, 4, -3.0)[0], -1.5);
}

TEST(Sampling, LaplaceEdgesAndInterior) {
  TrainConfig c = TrainConfig::laplace_defaults();
  c.n_ini = 100;
  c.n_bc = 20;
  const auto sets = sample_supervised_data(c, trough(), 3);
  std::size_t interior = 0;
  std::size_t left = 0, bottom = 0, right = 0, top = 0;
  std::set<std::pair<double, double>> distinct;
  for (const auto& s : sets) {
    for (std::size_t k = 0; k < s.size(); ++k) {
      const Point2 p = s.inputs[k];
      if (s.kind == SampleKind::subsampled_truth) {
        ++interior;
        EXPECT_GT(p.x, 0.0);
        EXPECT_LT(p.x, 1.0);
        EXPECT_GT(p.y, 0.0);
        EXPECT_LT(p.y, 1.0);
        const NodeIndex n = trough().grid().nearest_node(p);
        EXPECT_EQ(s.targets[k], trough()(n.i, n.j));
        distinct.emplace(p.x, p.y);
      } else if (p.y == 1.0) {
        ++top;
        EXPECT_EQ(s.targets[k], 1.0);
      } else {
        EXPECT_EQ(s.targets[k], 0.0);
        if (p.x == 0.0) ++left;
        else if (p.x == 1.0) ++right;
        else if (p.y == 0.0) ++bottom;
      }
    }
  }
  EXPECT_EQ(interior, 100u);
  EXPECT_EQ(distinct.size(), 100u);
  EXPECT_EQ(left, 5u);
  EXPECT_EQ(bottom, 5u);
  EXPECT_EQ(right, 5u);
  EXPECT_EQ(top, 5u);
}

TEST(Sampling, BurgersInitialAndEdges) {
  TrainConfig c = TrainConfig::burgers_defaults();
  c.n_ini = 10;
  c.n_bc = 10;
  const auto sets = sample_supervised_data(c, burgers_placeholder(), 1);
  std::size_t initial = 0, lo = 0, hi = 0;
  for (const auto& s : sets) {
    for (std::size_t k = 0; k < s.size(); ++k) {
      const Point2 p = s.inputs[k];
      if (s.kind == SampleKind::initial) {
        ++initial;
        EXPECT_EQ(p.y, 0.0);
        EXPECT_DOUBLE_EQ(s.targets[k], -std::sin(M_PI * p.x));
        EXPECT_LE(std::abs(s.targets[k]), 1.0);
      } else {
        EXPECT_EQ(s.targets[k], 0.0);
        EXPECT_TRUE(p.x == -1.0 || p.x == 1.0);
        (p.x < 0 ? lo : hi) += 1;
      }
    }
  }
  EXPECT_EQ(initial, 10u);
  EXPECT_EQ(lo, 5u);
  EXPECT_EQ(hi, 5u);
}

TEST(Sampling, DeterministicAndBounded) {
  TrainConfig c = TrainConfig::laplace_defaults();
  c.n_ini = 50;
  const auto a = sample_supervised_data(c, trough(), 9);
  const auto b = sample_supervised_data(c, trough(), 9);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t s = 0; s < a.size(); ++s) {
    EXPECT_EQ(a[s].targets, b[s].targets);
    for (std::size_t k = 0; k < a[s].size(); ++k) {
      EXPECT_EQ(a[s].inputs[k].x, b[s].inputs[k].x);
      EXPECT_EQ(a[s].inputs[k].y, b[s].inputs[k].y);
    }
  }
  c.n_ini = 39 * 39 + 1;
  EXPECT_THROW(sample_supervised_data(c, trough(), 0), SamplingError);
}

TEST(Train, SameConfigSameHistory) {
  const auto col = collocation_nodes(trough().grid(), PdeKind::laplace);
  const auto cfg = small(PdeKind::laplace, Arm::fdm_pinn);
  const auto a = train(cfg, trough(), col);
  const auto b = train(cfg, trough(), col);
  EXPECT_EQ(a.history.loss_mu, b.history.loss_mu);
  EXPECT_EQ(a.history.loss_f, b.history.loss_f);
  EXPECT_EQ(predict_field(a.params, trough().grid()), predict_field(b.params, trough().grid()));
}

TEST(Train, ZeroGammaFMatchesNnOnlyBitwise) {
  for (auto kind : {PdeKind::laplace, PdeKind::burgers}) {
    const ScalarField truth = kind == PdeKind::laplace ? trough() : burgers_placeholder();
    const auto col = collocation_nodes(truth.grid(), kind);
    auto nn = small(kind, Arm::nn_only, 80);
    auto fdm = small(kind, Arm::fdm_pinn, 80);
    fdm.gamma_f = 0.0;
    const auto a = train(nn, truth, col);
    const auto b = train(fdm, truth, col);
    EXPECT_EQ(a.history.loss_mu, b.history.loss_mu) << to_string(kind);
    EXPECT_EQ(predict_field(a.params, truth.grid()), predict_field(b.params, truth.grid()));
    fdm.gamma_f = 1e-4;
    fdm.lambda = 0.0;
    const auto c = train(fdm, truth, col);
    EXPECT_EQ(a.history.loss_mu, c.history.loss_mu) << to_string(kind);
  }
}

TEST(Train, ReportedPhysicsLossMatchesResiduals) {
  const auto col = collocation_nodes(trough().grid(), PdeKind::laplace);
  std::size_t seen = 0;
  TrainOptions opts;
  opts.observer = [&](const IterationTrace& t) {
    ASSERT_EQ(t.residuals.size(), 32u);
    EXPECT_EQ(t.loss_f, physics_loss(t.residuals));
    ++seen;
  };
  const auto r = train(small(PdeKind::laplace, Arm::fdm_pinn, 20), trough(), col, opts);
  EXPECT_EQ(seen, 20u);
  EXPECT_EQ(r.history.loss_f.size(), 20u);
}

TEST(Train, FootprintIsTheStencilNodeSet) {
  for (auto kind : {PdeKind::laplace, PdeKind::burgers}) {
    const ScalarField truth = kind == PdeKind::laplace ? trough() : burgers_placeholder();
    const auto& grid = truth.grid();
    const auto col = collocation_nodes(grid, kind);
    const auto fp = residual_footprint(kind);
    const PdeResidual op(kind, grid);
    auto cfg = small(kind, Arm::fdm_pinn, 1);
    cfg.iterations = 1;
    std::vector<NodeIndex> nodes;
    std::vector<Point2> coords;
    std::vector<double> values, residuals;
    TrainOptions opts;
    opts.observer = [&](const IterationTrace& t) {
      nodes.assign(t.collocation_batch.begin(), t.collocation_batch.end());
      coords.assign(t.footprint_coords.begin(), t.footprint_coords.end());
      values.assign(t.footprint_values.begin(), t.footprint_values.end());
      residuals.assign(t.residuals.begin(), t.residuals.end());
    };
    // Zero steps of learning: the traced values come from the initial net.
    opts.initial_params = init_mlp(cfg.architecture, 77);
    train(cfg, truth, col, opts);
    const ScalarField pred = predict_field(*opts.initial_params, grid);
    ASSERT_EQ(coords.size(), nodes.size() * fp.size());
    for (std::size_t b = 0; b < nodes.size(); ++b) {
      for (std::size_t k = 0; k < fp.size(); ++k) {
        const std::size_t i = nodes[b].i + fp[k].di;
        const std::size_t j = nodes[b].j + fp[k].dj;
        const Point2 expect = grid.node_coords(i, j);
        EXPECT_EQ(coords[b * fp.size() + k].x, expect.x);
        EXPECT_EQ(coords[b * fp.size() + k].y, expect.y);
        EXPECT_NEAR(values[b * fp.size() + k], pred(i, j), 1e-13);
      }
      const double direct = kind == PdeKind::laplace
                                ? laplace_residual(pred, nodes[b].i, nodes[b].j)
                                : burgers_residual(pred, nodes[b].i, nodes[b].j, kBurgersViscosity);
      EXPECT_NEAR(residuals[b], direct, 1e-9 * (1.0 + std::abs(direct)));
    }
  }
}

TEST(Train, ZeroOutputLayerStartsHarmonic) {
  const auto col = collocation_nodes(trough().grid(), PdeKind::laplace);
  auto cfg = small(PdeKind::laplace, Arm::fdm_pinn, 3);
  MlpParams p = init_mlp(cfg.architecture, 5);
  p.tensors.weights.back().setZero();
  p.tensors.biases.back().setZero();
  TrainOptions opts;
  opts.initial_params = p;
  const auto r = train(cfg, trough(), col, opts);
  EXPECT_EQ(r.history.loss_f.front(), 0.0);
}

TEST(Train, NnLossFallsOnConstantTarget) {
  const ScalarField flat(trough_grid(41), 0.5);
  auto cfg = TrainConfig::laplace_defaults();
  cfg.arm = Arm::nn_only;
  cfg.iterations = 100;
  cfg.n_ini = 100;
  cfg.n_bc = 0;
  const auto r = train(cfg, flat, collocation_nodes(flat.grid(), PdeKind::laplace));
  const auto& l = r.history.loss_mu;
  // Each step sees a different minibatch, so compare 20-step block means.
  auto block = [&](std::size_t b) {
    double s = 0.0;
    for (std::size_t k = 20 * b; k < 20 * (b + 1); ++k) s += l[k];
    return s / 20.0;
  };
  EXPECT_GT(block(0), block(1));
  EXPECT_GT(block(1), block(2));
  EXPECT_LT(block(4), 1e-3 * l.front());
}

TEST(Train, DivergenceCarriesPartialHistory) {
  const auto col = collocation_nodes(trough().grid(), PdeKind::laplace);
  auto cfg = TrainConfig::laplace_defaults();
  cfg.iterations = 2000;
  cfg.gamma_f = 1e-3;
  cfg.stencil_slope = -6400.0;
  try {
    train(cfg, trough(), col);
    FAIL() << "expected divergence";
  } catch (const TrainingError& e) {
    EXPECT_EQ(e.partial_history().iterations(), e.iteration());
    EXPECT_NE(std::string(e.what()).find("iteration"), std::string::npos);
  }
}

TEST(Train, RejectsBadConfigs) {
  const auto col = collocation_nodes(trough().grid(), PdeKind::laplace);
  auto cfg = small(PdeKind::laplace, Arm::fdm_pinn);
  cfg.minibatch_mu = 0;
  EXPECT_THROW(train(cfg, trough(), col), ConfigurationError);
  cfg = small(PdeKind::laplace, Arm::fdm_pinn);
  EXPECT_THROW(train(cfg, trough(), CollocationSet{}), ConfigurationError);
  cfg.architecture = {3, 4, 1};
  EXPECT_THROW(train(cfg, trough(), col), ConfigurationError);
}

TEST(PredictField, ConstantNets) {
  const std::vector<int> sizes{2, 6, 1};
  MlpParams p = init_mlp(sizes, 0);
  for (auto& w : p.tensors.weights) w.setZero();
  for (auto& b : p.tensors.biases) b.setZero();
  const auto g = trough_grid(11);
  EXPECT_EQ(predict_field(p, g), ScalarField(g, 0.0));
  p.tensors.biases.back()(0) = 0.3;
  const ScalarField f = predict_field(p, g);
  EXPECT_EQ(f, ScalarField(g, 0.3));
  for (std::size_t j = 1; j + 1 < g.n_j(); ++j)
    for (std::size_t i = 1; i + 1 < g.n_i(); ++i) EXPECT_EQ(laplace_residual(f, i, j), 0.0);
}
