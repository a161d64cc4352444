#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "cgnls/config.hpp"
#include "cgnls/dataset.hpp"
#include "cgnls/inverse.hpp"
#include "cgnls/metrics.hpp"
#include "cgnls/train.hpp"

namespace cgnls {

using RunSummary = std::vector<std::pair<std::string, std::string>>;

namespace detail {

inline std::string fmt_g17(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.17g", v);
  return b;
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw ConfigError("write to '" + path + "' failed");
}

inline void write_summary(const std::string& path, const RunSummary& s) {
  std::string text;
  for (const auto& [k, v] : s) text += k + " = " + v + "\n";
  write_text(path, text);
}

inline void write_points(const std::string& path, std::span<const Point> pts) {
  std::string text = "x,t\n";
  for (const auto& p : pts)
    text += fmt_g17(p.x) + "," + fmt_g17(p.t) + "\n";
  write_text(path, text);
}

inline void write_loss_curve(const std::string& path,
                             std::span<const HistoryRecord> records) {
  std::string text = "phase,iteration,loss0,lossb,lossf,total\n";
  for (const auto& r : records)
    text += r.phase + "," + std::to_string(r.iteration) + "," + fmt_g17(r.loss.loss0) +
            "," + fmt_g17(r.loss.lossb) + "," + fmt_g17(r.loss.lossf) + "," +
            fmt_g17(r.loss.total) + "\n";
  write_text(path, text);
}

inline void write_inverse_curve(const std::string& path,
                                std::span<const InverseHistoryRecord> records) {
  std::string text = "phase,iteration,mse_p,mse_f,total\n";
  for (const auto& r : records)
    text += r.phase + "," + std::to_string(r.iteration) + "," + fmt_g17(r.loss.mse_p) +
            "," + fmt_g17(r.loss.mse_f) + "," + fmt_g17(r.loss.total) + "\n";
  write_text(path, text);
}

inline void write_rar_events(const std::string& path, std::span<const RAREvent> events) {
  std::string text = "round,err,added\n";
  for (const auto& e : events)
    text += std::to_string(e.round) + "," + fmt_g17(e.err) + "," +
            std::to_string(e.added) + "\n";
  write_text(path, text);
}

inline void write_residual_grid(const std::string& path, const ResidualField& f) {
  std::string text = "x,t,score\n";
  std::size_t i = 0;
  for (int it = 0; it < f.grid.nt; ++it)
    for (int ix = 0; ix < f.grid.nx; ++ix, ++i)
      text += fmt_g17(f.grid.x_min + ix * f.grid.dx()) + "," +
              fmt_g17(f.grid.t_min + it * f.grid.dt()) + "," + fmt_g17(f.score[i]) + "\n";
  write_text(path, text);
}

/// Network field values at the given points (value slots of the jets).
inline std::vector<FieldSample> predict_at(const NetworkShape& shape,
                                           const InputScaling& scaling,
                                           const ParameterVector& params,
                                           std::span<const Point> pts) {
  std::vector<FieldSample> out(pts.size());
  JetBatch batch;
  batch.configure(shape, scaling);
  constexpr std::size_t kChunk = 4096;
  for (std::size_t s = 0; s < pts.size(); s += kChunk) {
    const std::size_t len = std::min(kChunk, pts.size() - s);
    batch.forward(params.values, pts.subspan(s, len));
    for (std::size_t p = 0; p < len; ++p) {
      out[s + p].point = pts[s + p];
      out[s + p].u1 = batch.value(0, static_cast<int>(p));
      out[s + p].v1 = batch.value(1, static_cast<int>(p));
      out[s + p].u2 = batch.value(2, static_cast<int>(p));
      out[s + p].v2 = batch.value(3, static_cast<int>(p));
    }
  }
  return out;
}

inline void write_abs_error(const std::string& path, std::span<const FieldSample> pred,
                            std::span<const FieldSample> exact) {
  std::string text = "x,t,err1,err2\n";
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double e1 = std::abs(std::hypot(pred[i].u1, pred[i].v1) -
                               std::hypot(exact[i].u1, exact[i].v1));
    const double e2 = std::abs(std::hypot(pred[i].u2, pred[i].v2) -
                               std::hypot(exact[i].u2, exact[i].v2));
    text += fmt_g17(pred[i].point.x) + "," + fmt_g17(pred[i].point.t) + "," + fmt_g17(e1) +
            "," + fmt_g17(e2) + "\n";
  }
  write_text(path, text);
}

inline std::vector<FieldSample> oracle_grid(const ExperimentConfig& cfg) {
  switch (cfg.oracle) {
    case OracleKind::OneSoliton:
      return sample_grid(OneSolitonField(cfg.one), cfg.grid);
    case OracleKind::TwoSoliton:
      return sample_grid(TwoSolitonField(cfg.two), cfg.grid);
    case OracleKind::None:
      break;
  }
  throw ConfigError("this mode needs a closed-form oracle or an ingest dataset");
}

inline std::string out_path(const ExperimentConfig& cfg, const std::string& name) {
  const std::string p = (std::filesystem::path(cfg.out_dir) / name).string();
  if (!cfg.dataset_path.empty() &&
      std::filesystem::weakly_canonical(p) ==
          std::filesystem::weakly_canonical(cfg.dataset_path))
    throw ConfigError("input dataset and output path collide: " + p);
  return p;
}

}  // namespace detail

inline RunSummary run_generate(const ExperimentConfig& cfg) {
  const auto rows = detail::oracle_grid(cfg);
  write_dataset(detail::out_path(cfg, "dataset.csv"), rows);
  RunSummary s;
  s.emplace_back("rows", std::to_string(rows.size()));
  s.emplace_back("nx", std::to_string(cfg.grid.nx));
  s.emplace_back("nt", std::to_string(cfg.grid.nt));
  s.emplace_back("dt", detail::fmt_g17(cfg.grid.dt()));
  s.emplace_back("dataset", detail::out_path(cfg, "dataset.csv"));
  return s;
}

inline RunSummary run_train_forward(const ExperimentConfig& cfg) {
  // training point sets, exact grid and evaluation points
  std::vector<FieldSample> exact;
  TrainingDataSets data;
  if (cfg.oracle == OracleKind::None) {
    if (cfg.dataset_path.empty())
      throw ConfigError("train-forward without an oracle requires io.dataset");
    exact = read_dataset(cfg.dataset_path);
    data = build_datasets_from_table(exact, cfg.domain, cfg.n0, cfg.nb, cfg.nf,
                                     cfg.boundary_mode, cfg.seed);
  } else {
    exact = detail::oracle_grid(cfg);
    if (cfg.oracle == OracleKind::OneSoliton) {
      data = build_datasets(OneSolitonField(cfg.one), cfg.domain, cfg.n0, cfg.nb, cfg.nf,
                            cfg.boundary_mode, cfg.seed);
    } else {
      data = build_datasets(TwoSolitonField(cfg.two), cfg.domain, cfg.n0, cfg.nb, cfg.nf,
                            cfg.boundary_mode, cfg.seed);
    }
  }

  TrainForwardConfig tc;
  tc.shape = cfg.shape;
  tc.domain = cfg.domain;
  tc.residual = cfg.oracle == OracleKind::None ? CGNLSCoefficients{1.0, 1.0, {1.0, 0.0}}
                                               : cfg.coefficients();
  if (cfg.rar_enabled) tc.rar = cfg.rar;
  tc.adam = cfg.adam;
  tc.lbfgs = cfg.lbfgs;
  tc.seed = cfg.seed;

  auto res = train_forward(tc, data);

  std::vector<Point> eval_pts;
  eval_pts.reserve(exact.size());
  for (const auto& r : exact) eval_pts.push_back(r.point);
  const auto pred = detail::predict_at(cfg.shape, res.scaling, res.params, eval_pts);
  const auto [e1, e2] = relative_l2(pred, exact);

  write_dataset(detail::out_path(cfg, "pred_grid.csv"), pred);
  write_dataset(detail::out_path(cfg, "exact_grid.csv"), exact);
  detail::write_abs_error(detail::out_path(cfg, "abs_error.csv"), pred, exact);
  detail::write_loss_curve(detail::out_path(cfg, "loss_curve.csv"), res.history.records);
  if (cfg.rar_enabled)
    detail::write_rar_events(detail::out_path(cfg, "rar_events.csv"),
                             res.history.rar_events);
  const auto rf = export_residual_field(cfg.shape, res.scaling, res.params, tc.residual,
                                        cfg.grid);
  detail::write_residual_grid(detail::out_path(cfg, "residual_grid.csv"), rf);

  {
    std::vector<Point> p0, pb;
    for (const auto& r : data.tau0) p0.push_back(r.p);
    if (data.boundary_mode == BoundaryMode::Periodic) {
      for (const double t : data.taub_times) pb.push_back({data.domain.x_lo, t});
      for (const double t : data.taub_times) pb.push_back({data.domain.x_hi, t});
    } else {
      for (const auto& r : data.taub) pb.push_back(r.p);
    }
    detail::write_points(detail::out_path(cfg, "points_tau0.csv"), p0);
    detail::write_points(detail::out_path(cfg, "points_taub.csv"), pb);
    detail::write_points(detail::out_path(cfg, "points_tauf.csv"), data.tauf);
  }

  RunSummary s;
  s.emplace_back("relative_l2_h1", detail::fmt_g17(e1));
  s.emplace_back("relative_l2_h2", detail::fmt_g17(e2));
  if (!res.history.records.empty()) {
    const auto& last = res.history.records.back().loss;
    s.emplace_back("loss0", detail::fmt_g17(last.loss0));
    s.emplace_back("lossb", detail::fmt_g17(last.lossb));
    s.emplace_back("lossf", detail::fmt_g17(last.lossf));
    s.emplace_back("loss_total", detail::fmt_g17(last.total));
  }
  s.emplace_back("nf_final", std::to_string(data.tauf.size()));
  s.emplace_back("lbfgs_iterations", std::to_string(res.history.lbfgs_iterations));
  s.emplace_back("lbfgs_status", to_string(res.history.lbfgs_status));
  if (cfg.rar_enabled) {
    s.emplace_back("rar_pre_max", detail::fmt_g17(res.history.rar_pre_max));
    s.emplace_back("rar_post_max", detail::fmt_g17(res.history.rar_post_max));
    s.emplace_back("rar_rounds_exhausted",
                   res.history.rar_budget_exhausted ? "true" : "false");
  }
  return s;
}

inline RunSummary run_train_inverse(const ExperimentConfig& cfg) {
  std::vector<FieldSample> pool;
  if (cfg.oracle == OracleKind::None) {
    if (cfg.dataset_path.empty())
      throw ConfigError("train-inverse without an oracle requires io.dataset");
    pool = read_dataset(cfg.dataset_path);
  } else {
    pool = detail::oracle_grid(cfg);
  }
  if (static_cast<int>(pool.size()) < cfg.n_u)
    throw ConfigError("train-inverse: dataset smaller than n_u");

  // split pool into the N_u training rows and the refinement reserve
  std::vector<std::size_t> idx(pool.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(stream_seed(cfg.seed, "nu-sample"));
  rng.shuffle(idx);

  InverseExperiment exp;
  exp.dataset.reserve(static_cast<std::size_t>(cfg.n_u));
  for (int i = 0; i < cfg.n_u; ++i) exp.dataset.push_back(pool[idx[static_cast<std::size_t>(i)]]);
  for (std::size_t i = static_cast<std::size_t>(cfg.n_u); i < idx.size(); ++i)
    exp.rar_pool.push_back(pool[idx[i]]);
  exp.noise_level = cfg.noise_level;
  exp.lambda_init = cfg.lambda_init;
  exp.shape = cfg.shape;
  exp.domain = cfg.domain;
  exp.adam = cfg.adam;
  exp.lbfgs = cfg.lbfgs;
  if (cfg.rar_enabled) exp.rar = cfg.rar;
  exp.seed = cfg.seed;

  const auto report = train_inverse(exp, cfg.lambda_truth);

  detail::write_inverse_curve(detail::out_path(cfg, "loss_curve.csv"), report.records);
  if (cfg.rar_enabled)
    detail::write_rar_events(detail::out_path(cfg, "rar_events.csv"), report.rar_events);
  {
    std::string text;
    text += "identified system:\n";
    text += "  " + report.equations[0] + "\n";
    text += "  " + report.equations[1] + "\n";
    text += "lambda_hat = (" + detail::fmt_g17(report.lambda_hat.l1) + ", " +
            detail::fmt_g17(report.lambda_hat.l2) + ", " +
            detail::fmt_g17(report.lambda_hat.l3) + ", " +
            detail::fmt_g17(report.lambda_hat.l4) + ")\n";
    text += "abs_error = (" + detail::fmt_g17(report.abs_error[0]) + ", " +
            detail::fmt_g17(report.abs_error[1]) + ", " +
            detail::fmt_g17(report.abs_error[2]) + ", " +
            detail::fmt_g17(report.abs_error[3]) + ")\n";
    text += "noise_level = " + detail::fmt_g17(report.noise_level) + "\n";
    text += "n_u = " + std::to_string(report.n_u) + "\n";
    detail::write_text(detail::out_path(cfg, "identification.txt"), text);
  }

  RunSummary s;
  s.emplace_back("lambda1", detail::fmt_g17(report.lambda_hat.l1));
  s.emplace_back("lambda2", detail::fmt_g17(report.lambda_hat.l2));
  s.emplace_back("lambda3", detail::fmt_g17(report.lambda_hat.l3));
  s.emplace_back("lambda4", detail::fmt_g17(report.lambda_hat.l4));
  s.emplace_back("err_lambda1", detail::fmt_g17(report.abs_error[0]));
  s.emplace_back("err_lambda2", detail::fmt_g17(report.abs_error[1]));
  s.emplace_back("err_lambda3", detail::fmt_g17(report.abs_error[2]));
  s.emplace_back("err_lambda4", detail::fmt_g17(report.abs_error[3]));
  s.emplace_back("noise_level", detail::fmt_g17(report.noise_level));
  s.emplace_back("n_u_final", std::to_string(report.n_u));
  s.emplace_back("lbfgs_iterations", std::to_string(report.lbfgs_iterations));
  s.emplace_back("lbfgs_status", to_string(report.lbfgs_status));
  return s;
}

inline RunSummary run_evaluate(const ExperimentConfig& cfg) {
  if (cfg.pred_path.empty() || cfg.exact_path.empty())
    throw ConfigError("evaluate requires io.pred and io.exact");
  const auto pred = read_dataset(cfg.pred_path);
  const auto exact = read_dataset(cfg.exact_path);
  const auto [e1, e2] = relative_l2(pred, exact);
  RunSummary s;
  s.emplace_back("relative_l2_h1", detail::fmt_g17(e1));
  s.emplace_back("relative_l2_h2", detail::fmt_g17(e2));
  s.emplace_back("rows", std::to_string(pred.size()));
  return s;
}

/// Executes one configured run: creates the output directory, writes the
/// manifest up front (partial results stay interpretable if training fails),
/// dispatches on the mode, and writes the summary.
inline RunSummary run(const ExperimentConfig& cfg) {
  std::filesystem::create_directories(cfg.out_dir);
  detail::write_text(detail::out_path(cfg, "manifest.txt"), serialize_config(cfg));
  RunSummary s;
  switch (cfg.mode) {
    case RunMode::Generate: s = run_generate(cfg); break;
    case RunMode::TrainForward: s = run_train_forward(cfg); break;
    case RunMode::TrainInverse: s = run_train_inverse(cfg); break;
    case RunMode::Evaluate: s = run_evaluate(cfg); break;
  }
  detail::write_summary(detail::out_path(cfg, "summary.txt"), s);
  return s;
}

}  // namespace cgnls
