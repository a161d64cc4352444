#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cgnls/loss.hpp"
#include "cgnls/optim.hpp"
#include "cgnls/sampling.hpp"

namespace cgnls {

struct HistoryRecord {
  std::string phase;
  int iteration = 0;
  LossBreakdown loss;
};

struct TrainingHistory {
  std::vector<HistoryRecord> records;
  std::vector<RAREvent> rar_events;
  bool rar_budget_exhausted = false;
  // max residual over a fixed measurement pool before/after the refinement loop
  double rar_pre_max = std::numeric_limits<double>::quiet_NaN();
  double rar_post_max = std::numeric_limits<double>::quiet_NaN();
  OptimStatus lbfgs_status = OptimStatus::MaxIterations;
  int lbfgs_iterations = 0;
};

struct TrainForwardConfig {
  NetworkShape shape;
  Domain domain;
  ResidualMode residual = CGNLSCoefficients{};
  std::optional<RARConfig> rar;  // disengaged = fixed collocation baseline
  AdamConfig adam;
  LbfgsConfig lbfgs;
  std::uint64_t seed = 0;
};

struct TrainForwardResult {
  ParameterVector params;
  TrainingHistory history;
  InputScaling scaling;
};

/// Initial/boundary/collocation sets for a closed-form field: stratified
/// x-samples at t_lo with exact supervision, boundary times (periodic) or
/// supervised edge records, and a Latin hypercube collocation set.
template <typename Field>
TrainingDataSets build_datasets(const Field& field, const Domain& domain, int n0,
                                int nb, int nf, BoundaryMode boundary_mode,
                                std::uint64_t seed) {
  domain.validate();
  if (n0 < 0 || nb < 0 || nf < 1)
    throw ConfigError("build_datasets: require n0, nb >= 0 and nf >= 1");
  TrainingDataSets d;
  d.domain = domain;
  d.boundary_mode = boundary_mode;

  {
    Rng rng(stream_seed(seed, "tau0"));
    const double w = (domain.x_hi - domain.x_lo) / std::max(n0, 1);
    for (int i = 0; i < n0; ++i) {
      const double x = domain.x_lo + (i + rng.uniform()) * w;
      const Point p{x, domain.t_lo};
      const auto [h1, h2] = field(p);
      d.tau0.push_back({p, {h1.real(), h1.imag(), h2.real(), h2.imag()}});
    }
  }
  {
    Rng rng(stream_seed(seed, "taub"));
    const double w = (domain.t_hi - domain.t_lo) / std::max(nb, 1);
    for (int j = 0; j < nb; ++j) {
      const double t = domain.t_lo + (j + rng.uniform()) * w;
      if (boundary_mode == BoundaryMode::Periodic) {
        d.taub_times.push_back(t);
      } else {
        const double x = rng.below(2) == 0 ? domain.x_lo : domain.x_hi;
        const Point p{x, t};
        const auto [h1, h2] = field(p);
        d.taub.push_back({p, {h1.real(), h1.imag(), h2.real(), h2.imag()}});
      }
    }
  }
  d.tauf = lhs_sample(domain, nf, stream_seed(seed, "tauf"));
  return d;
}

/// Same sets built from tabulated rows (no closed form available): tau0 is a
/// random subset of the rows at the earliest time, supervised boundaries are
/// subsets of the edge rows, collocation stays Latin hypercube.
inline TrainingDataSets build_datasets_from_table(std::span<const FieldSample> rows,
                                                  const Domain& domain, int n0, int nb,
                                                  int nf, BoundaryMode boundary_mode,
                                                  std::uint64_t seed) {
  domain.validate();
  if (rows.empty()) throw ConfigError("build_datasets_from_table: empty table");
  if (nf < 1) throw ConfigError("build_datasets_from_table: nf must be >= 1");
  TrainingDataSets d;
  d.domain = domain;
  d.boundary_mode = boundary_mode;

  auto pick = [](std::vector<std::size_t>& idx, int count, Rng& rng,
                 const char* what) {
    if (static_cast<int>(idx.size()) < count)
      throw ConfigError(std::string("build_datasets_from_table: not enough ") + what +
                        " rows (" + std::to_string(idx.size()) + " < " +
                        std::to_string(count) + ")");
    rng.shuffle(idx);
    idx.resize(static_cast<std::size_t>(count));
  };

  if (n0 > 0) {
    double t_first = rows[0].point.t;
    for (const auto& r : rows) t_first = std::min(t_first, r.point.t);
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < rows.size(); ++i)
      if (rows[i].point.t == t_first) idx.push_back(i);
    Rng rng(stream_seed(seed, "tau0"));
    pick(idx, n0, rng, "initial-time");
    for (const std::size_t i : idx) {
      const auto& r = rows[i];
      d.tau0.push_back({{r.point.x, domain.t_lo}, {r.u1, r.v1, r.u2, r.v2}});
    }
  }

  Rng rng_b(stream_seed(seed, "taub"));
  if (boundary_mode == BoundaryMode::Periodic) {
    const double w = (domain.t_hi - domain.t_lo) / std::max(nb, 1);
    for (int j = 0; j < nb; ++j)
      d.taub_times.push_back(domain.t_lo + (j + rng_b.uniform()) * w);
  } else if (nb > 0) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < rows.size(); ++i)
      if (rows[i].point.x == domain.x_lo || rows[i].point.x == domain.x_hi)
        idx.push_back(i);
    pick(idx, nb, rng_b, "edge");
    for (const std::size_t i : idx) {
      const auto& r = rows[i];
      d.taub.push_back({r.point, {r.u1, r.v1, r.u2, r.v2}});
    }
  }

  d.tauf = lhs_sample(domain, nf, stream_seed(seed, "tauf"));
  return d;
}

/// Forward training: Adam, then the residual-based refinement loop (when
/// configured), then L-BFGS. The collocation set grows in place; every
/// refinement round draws a fresh candidate pool, checks the mean residual
/// against epsilon0, appends the top-m points and re-fits briefly with Adam.
inline TrainForwardResult train_forward(const TrainForwardConfig& cfg,
                                        TrainingDataSets& data) {
  cfg.shape.validate();
  data.validate();
  if (cfg.rar) cfg.rar->validate();

  TrainForwardResult res;
  res.scaling = InputScaling::from_domain(cfg.domain);
  ParameterVector params = init_params(cfg.shape, stream_seed(cfg.seed, "init"));
  ForwardObjective objective(cfg.shape, res.scaling, &data, cfg.residual);
  TrainingHistory& hist = res.history;

  auto recorder = [&](const std::string& phase) {
    return [&hist, &objective, phase](int iter, double) {
      hist.records.push_back({phase, iter, objective.breakdown()});
    };
  };

  auto adam_phase = [&](const std::string& phase, int iterations) {
    AdamConfig ac = cfg.adam;
    ac.iterations = iterations;
    auto r = adam_minimize(objective, std::move(params.values), ac, recorder(phase));
    params.values = std::move(r.x);
  };

  adam_phase("adam", cfg.adam.iterations);

  if (cfg.rar) {
    const RARConfig& rar = *cfg.rar;
    const auto pool_scores = [&](std::uint64_t pool_seed)
        -> std::pair<std::vector<Point>, std::vector<double>> {
      auto pool = lhs_sample(cfg.domain, rar.candidate_pool, pool_seed);
      auto scores = residual_scores(cfg.shape, res.scaling, params.values,
                                    cfg.residual, pool);
      return {std::move(pool), std::move(scores)};
    };
    const auto measure_max = [&]() {
      auto [pool, scores] = pool_scores(stream_seed(cfg.seed, "rar-measure"));
      return *std::max_element(scores.begin(), scores.end());
    };

    hist.rar_pre_max = measure_max();
    for (int round = 0;; ++round) {
      auto [pool, scores] = pool_scores(stream_seed(cfg.seed, "rar-pool", static_cast<std::uint64_t>(round)));
      double err = 0.0;
      for (const double s : scores) err += s;
      err /= static_cast<double>(scores.size());
      if (err < rar.epsilon0) {
        hist.rar_events.push_back({round, err, 0});
        break;
      }
      if (round >= rar.max_rounds) {
        hist.rar_events.push_back({round, err, 0});
        hist.rar_budget_exhausted = true;
        break;
      }
      auto selected = select_top_scores(pool, scores, rar.m);
      data.tauf.insert(data.tauf.end(), selected.begin(), selected.end());
      hist.rar_events.push_back({round, err, rar.m});
      if (rar.refit_iterations > 0)
        adam_phase("adam-refit-" + std::to_string(round + 1), rar.refit_iterations);
    }
    hist.rar_post_max = measure_max();
  }

  {
    auto r = lbfgs_minimize(objective, std::move(params.values), cfg.lbfgs,
                            recorder("lbfgs"));
    params.values = std::move(r.x);
    hist.lbfgs_status = r.status;
    hist.lbfgs_iterations = r.iterations;
  }

  res.params = std::move(params);
  return res;
}

/// Residual score at every node of a grid, for stereogram-style plots.
struct ResidualField {
  GridSpec grid;
  std::vector<double> score;  // row-major in t, then x
};

inline ResidualField export_residual_field(const NetworkShape& shape,
                                           const InputScaling& scaling,
                                           const ParameterVector& params,
                                           const ResidualMode& mode,
                                           const GridSpec& grid) {
  grid.validate();
  std::vector<Point> pts;
  pts.reserve(static_cast<std::size_t>(grid.size()));
  for (int it = 0; it < grid.nt; ++it)
    for (int ix = 0; ix < grid.nx; ++ix)
      pts.push_back({grid.x_min + ix * grid.dx(), grid.t_min + it * grid.dt()});
  ResidualField out{grid, residual_scores(shape, scaling, params.values, mode, pts)};
  return out;
}

}  // namespace cgnls
