#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "cgnls/loss.hpp"
#include "cgnls/optim.hpp"
#include "cgnls/rng.hpp"
#include "cgnls/sampling.hpp"

namespace cgnls {

/// Corrupts each field column independently with zero-mean Gaussian noise of
/// standard deviation level x (sample std of that column). level = 0 returns
/// the dataset unchanged. Deterministic per seed; draw order is row-major,
/// fields (u1, v1, u2, v2) within a row.
inline std::vector<FieldSample> add_noise(std::vector<FieldSample> rows, double level,
                                          std::uint64_t seed) {
  if (level < 0.0) throw UsageError("add_noise: level must be >= 0");
  if (level == 0.0 || rows.empty()) return rows;
  const auto n = static_cast<double>(rows.size());
  std::array<double, 4> mean{}, sq{};
  for (const auto& r : rows) {
    const std::array<double, 4> v{r.u1, r.v1, r.u2, r.v2};
    for (int c = 0; c < 4; ++c) {
      mean[static_cast<std::size_t>(c)] += v[static_cast<std::size_t>(c)];
      sq[static_cast<std::size_t>(c)] += v[static_cast<std::size_t>(c)] * v[static_cast<std::size_t>(c)];
    }
  }
  std::array<double, 4> sigma{};
  for (int c = 0; c < 4; ++c) {
    mean[static_cast<std::size_t>(c)] /= n;
    const double var = (sq[static_cast<std::size_t>(c)] - n * mean[static_cast<std::size_t>(c)] * mean[static_cast<std::size_t>(c)]) /
                       std::max(n - 1.0, 1.0);
    sigma[static_cast<std::size_t>(c)] = std::sqrt(std::max(var, 0.0));
  }
  Rng rng(seed);
  for (auto& r : rows) {
    r.u1 += level * sigma[0] * rng.normal();
    r.v1 += level * sigma[1] * rng.normal();
    r.u2 += level * sigma[2] * rng.normal();
    r.v2 += level * sigma[3] * rng.normal();
  }
  return rows;
}

/// Componentwise |lambda_hat - lambda_truth|.
inline std::array<double, 4> identification_error(const LambdaVector& lambda_hat,
                                                  const LambdaVector& truth) {
  return {std::abs(lambda_hat.l1 - truth.l1), std::abs(lambda_hat.l2 - truth.l2),
          std::abs(lambda_hat.l3 - truth.l3), std::abs(lambda_hat.l4 - truth.l4)};
}

struct InverseExperiment {
  std::vector<FieldSample> dataset;   // the N_u training rows (clean)
  std::vector<FieldSample> rar_pool;  // spare rows refinement may draw from
  double noise_level = 0.0;           // fraction in [0, 1)
  LambdaVector lambda_init{0.0, 0.0, 0.0, 0.0};
  NetworkShape shape;
  Domain domain;
  AdamConfig adam;
  LbfgsConfig lbfgs;
  std::optional<RARConfig> rar;
  std::uint64_t seed = 0;

  void validate() const {
    shape.validate();
    domain.validate();
    if (dataset.empty()) throw ConfigError("InverseExperiment: need N_u >= 1 rows");
    if (noise_level < 0.0 || noise_level >= 1.0)
      throw ConfigError("InverseExperiment: noise_level must lie in [0, 1)");
    if (rar) rar->validate();
  }
};

struct InverseHistoryRecord {
  std::string phase;
  int iteration = 0;
  InverseLoss loss;
};

struct IdentificationReport {
  LambdaVector lambda_hat;
  std::array<double, 4> abs_error{};
  double noise_level = 0.0;
  int n_u = 0;
  std::array<std::string, 2> equations;  // reconstructed system, one line per component
  std::vector<InverseHistoryRecord> records;
  std::vector<RAREvent> rar_events;
  OptimStatus lbfgs_status = OptimStatus::MaxIterations;
  int lbfgs_iterations = 0;
};

namespace detail {

inline std::string identified_equation(int component, double dispersion,
                                       double nonlinearity) {
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "i h%d_t + %.5f h%d_xx + %.5f (|h1|^2 + |h2|^2 + h1 h2*) h%d = 0",
                component, dispersion, component, nonlinearity, component);
  return buf;
}

}  // namespace detail

/// Joint identification of the network and (l1..l4) from sampled field data:
/// Adam, optional residual-based enrichment of the sample set from the spare
/// pool, then L-BFGS. Noise (if any) is applied to dataset and pool together
/// so both share the per-field scale.
inline IdentificationReport train_inverse(const InverseExperiment& exp,
                                          const LambdaVector& truth) {
  exp.validate();

  std::vector<FieldSample> rows = exp.dataset;
  std::vector<FieldSample> pool = exp.rar_pool;
  if (exp.noise_level > 0.0) {
    std::vector<FieldSample> all = rows;
    all.insert(all.end(), pool.begin(), pool.end());
    all = add_noise(std::move(all), exp.noise_level, stream_seed(exp.seed, "noise"));
    std::copy(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(rows.size()), rows.begin());
    std::copy(all.begin() + static_cast<std::ptrdiff_t>(rows.size()), all.end(), pool.begin());
  }

  const InputScaling scaling = InputScaling::from_domain(exp.domain);
  InverseObjective objective(exp.shape, scaling, &rows);

  std::vector<double> x = init_params(exp.shape, stream_seed(exp.seed, "init")).values;
  x.push_back(exp.lambda_init.l1);
  x.push_back(exp.lambda_init.l2);
  x.push_back(exp.lambda_init.l3);
  x.push_back(exp.lambda_init.l4);

  IdentificationReport report;
  report.noise_level = exp.noise_level;

  auto recorder = [&report, &objective](const std::string& phase) {
    return [&report, &objective, phase](int iter, double) {
      report.records.push_back({phase, iter, objective.breakdown()});
    };
  };

  {
    auto r = adam_minimize(objective, std::move(x), exp.adam, recorder("adam"));
    x = std::move(r.x);
  }

  if (exp.rar && !pool.empty()) {
    const RARConfig& rar = *exp.rar;
    const auto lambda_of = [&](const std::vector<double>& v) {
      const std::size_t n = v.size() - 4;
      return LambdaVector{v[n], v[n + 1], v[n + 2], v[n + 3]};
    };
    for (int round = 0;; ++round) {
      std::vector<Point> pts;
      pts.reserve(pool.size());
      for (const auto& r : pool) pts.push_back(r.point);
      const ResidualMode mode = lambda_of(x);
      const std::span<const double> net(x.data(), x.size() - 4);
      auto scores = residual_scores(exp.shape, scaling, net, mode, pts);
      const double err = std::accumulate(scores.begin(), scores.end(), 0.0) /
                         static_cast<double>(scores.size());
      if (err < rar.epsilon0) {
        report.rar_events.push_back({round, err, 0});
        break;
      }
      if (round >= rar.max_rounds) {
        report.rar_events.push_back({round, err, 0});
        break;
      }
      const int m = std::min<int>(rar.m, static_cast<int>(pool.size()));
      std::vector<std::size_t> idx(pool.size());
      std::iota(idx.begin(), idx.end(), std::size_t{0});
      std::partial_sort(idx.begin(), idx.begin() + m, idx.end(),
                        [&](std::size_t a, std::size_t b) {
                          if (scores[a] != scores[b]) return scores[a] > scores[b];
                          return a < b;
                        });
      idx.resize(static_cast<std::size_t>(m));
      std::sort(idx.begin(), idx.end());
      for (auto it = idx.rbegin(); it != idx.rend(); ++it) {
        rows.push_back(pool[*it]);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(*it));
      }
      report.rar_events.push_back({round, err, m});
      if (rar.refit_iterations > 0) {
        AdamConfig ac = exp.adam;
        ac.iterations = rar.refit_iterations;
        auto r = adam_minimize(objective, std::move(x), ac,
                               recorder("adam-refit-" + std::to_string(round + 1)));
        x = std::move(r.x);
      }
      if (pool.empty()) break;
    }
  }

  {
    auto r = lbfgs_minimize(objective, std::move(x), exp.lbfgs, recorder("lbfgs"));
    x = std::move(r.x);
    report.lbfgs_status = r.status;
    report.lbfgs_iterations = r.iterations;
  }

  const std::size_t n = x.size() - 4;
  report.lambda_hat = LambdaVector{x[n], x[n + 1], x[n + 2], x[n + 3]};
  report.abs_error = identification_error(report.lambda_hat, truth);
  report.n_u = static_cast<int>(rows.size());
  report.equations[0] = detail::identified_equation(1, report.lambda_hat.l1,
                                                    report.lambda_hat.l2);
  report.equations[1] = detail::identified_equation(2, report.lambda_hat.l3,
                                                    report.lambda_hat.l4);
  return report;
}

}  // namespace cgnls
