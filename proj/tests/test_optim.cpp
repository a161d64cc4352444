#include "cgnls/optim.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using namespace cgnls;

namespace {

double quadratic(std::span<const double> x, std::span<double> g) {
  if (!g.empty()) g[0] = 2.0 * (x[0] - 3.0);
  return (x[0] - 3.0) * (x[0] - 3.0);
}

double rosenbrock(std::span<const double> x, std::span<double> g) {
  const double a = 1.0 - x[0];
  const double b = x[1] - x[0] * x[0];
  if (!g.empty()) {
    g[0] = -2.0 * a - 400.0 * x[0] * b;
    g[1] = 200.0 * b;
  }
  return a * a + 100.0 * b * b;
}

}  // namespace

TEST(Adam, FirstStepIsBiasCorrected) {
  // from w = 1 with g = 2w: m-hat = g, v-hat = g^2, step = lr * g/(|g|+eps)
  AdamConfig cfg;
  cfg.learning_rate = 0.1;
  cfg.iterations = 1;
  auto r = adam_minimize([](std::span<const double> x, std::span<double> g) {
    g[0] = 2.0 * x[0];
    return x[0] * x[0];
  }, {1.0}, cfg);
  EXPECT_NEAR(r.x[0], 1.0 - 0.1, 1e-8);
}

TEST(Adam, DrivesQuadraticDown) {
  AdamConfig cfg;
  cfg.learning_rate = 0.1;
  cfg.iterations = 500;
  auto r = adam_minimize([](std::span<const double> x, std::span<double> g) {
    g[0] = 2.0 * x[0];
    return x[0] * x[0];
  }, {1.0}, cfg);
  EXPECT_LT(std::abs(r.x[0]), 1e-2);
  EXPECT_LT(r.x[0] * r.x[0], 1e-4);
}

TEST(Adam, ZeroGradientLeavesParametersUnchanged) {
  AdamConfig cfg;
  cfg.iterations = 50;
  auto r = adam_minimize([](std::span<const double>, std::span<double> g) {
    std::fill(g.begin(), g.end(), 0.0);
    return 7.0;
  }, {1.5, -2.5}, cfg);
  EXPECT_EQ(r.x[0], 1.5);
  EXPECT_EQ(r.x[1], -2.5);
}

TEST(Adam, NonFiniteLossAborts) {
  AdamConfig cfg;
  cfg.learning_rate = 1.0;
  cfg.iterations = 10;
  int count = 0;
  EXPECT_THROW(adam_minimize([&](std::span<const double>, std::span<double> g) {
    g[0] = 1.0;
    return ++count >= 3 ? std::nan("") : 1.0;
  }, {0.0}, cfg), NumericError);
}

TEST(Adam, PerIterationObserverSeesDescent) {
  AdamConfig cfg;
  cfg.learning_rate = 0.05;
  cfg.iterations = 200;
  std::vector<double> losses;
  adam_minimize(quadratic, {0.0}, cfg,
                [&](int, double f) { losses.push_back(f); });
  ASSERT_EQ(losses.size(), 200u);
  EXPECT_LT(losses.back(), losses.front());
}

TEST(Lbfgs, QuadraticExactness) {
  LbfgsConfig cfg;
  cfg.grad_tolerance = 1e-10;
  auto r = lbfgs_minimize(quadratic, {0.0}, cfg);
  EXPECT_EQ(r.status, OptimStatus::Converged);
  EXPECT_LE(r.iterations, 5);
  EXPECT_LT(std::abs(r.x[0] - 3.0), 1e-8);
}

TEST(Lbfgs, Rosenbrock) {
  LbfgsConfig cfg;
  cfg.grad_tolerance = 1e-12;
  cfg.max_iterations = 500;
  auto r = lbfgs_minimize(rosenbrock, {-1.2, 1.0}, cfg);
  EXPECT_LT(r.f, 1e-8);
  EXPECT_NEAR(r.x[0], 1.0, 1e-4);
  EXPECT_NEAR(r.x[1], 1.0, 1e-4);
}

TEST(Lbfgs, StationaryPointReturnsImmediately) {
  LbfgsConfig cfg;
  auto r = lbfgs_minimize([](std::span<const double>, std::span<double> g) {
    std::fill(g.begin(), g.end(), 0.0);
    return 2.0;
  }, {4.0, -1.0}, cfg);
  EXPECT_EQ(r.iterations, 0);
  EXPECT_EQ(r.status, OptimStatus::Converged);
  EXPECT_EQ(r.x[0], 4.0);
}

TEST(Lbfgs, LineSearchFailureReturnsBestSoFar) {
  // unbounded descent: f = -w, line search expands until the step cap and
  // cannot satisfy the curvature condition
  LbfgsConfig cfg;
  cfg.max_iterations = 5;
  auto r = lbfgs_minimize([](std::span<const double> x, std::span<double> g) {
    if (!g.empty()) g[0] = -1.0;
    return -x[0];
  }, {0.0}, cfg);
  EXPECT_EQ(r.status, OptimStatus::LineSearchFailed);
  EXPECT_TRUE(std::isfinite(r.f));
  EXPECT_LE(r.f, 0.0);  // made at least some progress before flagging
}

TEST(Lbfgs, HonorsIterationCap) {
  LbfgsConfig cfg;
  cfg.max_iterations = 3;
  cfg.grad_tolerance = 0.0;
  auto r = lbfgs_minimize(rosenbrock, {-1.2, 1.0}, cfg);
  EXPECT_EQ(r.status, OptimStatus::MaxIterations);
  EXPECT_EQ(r.iterations, 3);
}

TEST(OptimConfigs, Validation) {
  AdamConfig a;
  a.learning_rate = 0.0;
  EXPECT_THROW(a.validate(), ConfigError);
  a = AdamConfig{};
  a.beta1 = 1.0;
  EXPECT_THROW(a.validate(), ConfigError);
  LbfgsConfig l;
  l.memory = 0;
  EXPECT_THROW(l.validate(), ConfigError);
  l = LbfgsConfig{};
  l.c2 = l.c1;
  EXPECT_THROW(l.validate(), ConfigError);
}
