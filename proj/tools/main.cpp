#include <cstdio>
#include <exception>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cgnls/run.hpp"

namespace {

struct CommonFlags {
  std::string config;
  std::string preset;
  std::string out;
  std::optional<std::uint64_t> seed;
  bool single_thread = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "key-value config file (overrides the preset)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--preset", f.preset,
                  "named experiment preset: one-soliton | two-soliton-elastic | "
                  "two-soliton-inelastic | three-soliton-ingest | inverse-one-soliton");
  cmd->add_option("--seed", f.seed, "master seed (derives all sampling streams)");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_flag("--single-thread", f.single_thread,
                "reproducibility mode (runs are single-threaded either way; "
                "recorded in the manifest)");
}

cgnls::ExperimentConfig build_config(const CommonFlags& f, cgnls::RunMode mode) {
  cgnls::ExperimentConfig cfg;
  if (!f.preset.empty()) cfg = cgnls::make_preset(f.preset);
  if (!f.config.empty()) cfg = cgnls::load_config_file(f.config, cfg);
  if (f.preset.empty() && f.config.empty())
    throw cgnls::ConfigError("provide --preset and/or --config");
  cfg.mode = mode;
  if (f.seed) cfg.seed = *f.seed;
  if (!f.out.empty()) cfg.out_dir = f.out;
  if (f.single_thread) cfg.single_thread = true;
  return cfg;
}

int execute(const cgnls::ExperimentConfig& cfg) {
  const auto summary = cgnls::run(cfg);
  for (const auto& [k, v] : summary) std::printf("%s = %s\n", k.c_str(), v.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"physics-informed surrogate trainer for the coupled generalized "
               "nonlinear Schrodinger system"};
  app.require_subcommand(1);

  CommonFlags fg, ff, fi, fe;
  std::string pred_path, exact_path;

  auto* gen = app.add_subcommand("generate", "sample an exact field onto a grid dataset");
  add_common(gen, fg);

  auto* fwd = app.add_subcommand("train-forward",
                                 "train a surrogate with adaptive collocation refinement");
  add_common(fwd, ff);

  auto* inv = app.add_subcommand("train-inverse",
                                 "identify dispersion/nonlinearity coefficients from data");
  add_common(inv, fi);

  auto* ev = app.add_subcommand("evaluate", "relative L2 errors between two field files");
  add_common(ev, fe);
  ev->add_option("--pred", pred_path, "predicted field file")->check(CLI::ExistingFile);
  ev->add_option("--exact", exact_path, "reference field file")->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return execute(build_config(fg, cgnls::RunMode::Generate));
    if (fwd->parsed()) return execute(build_config(ff, cgnls::RunMode::TrainForward));
    if (inv->parsed()) return execute(build_config(fi, cgnls::RunMode::TrainInverse));
    if (ev->parsed()) {
      cgnls::ExperimentConfig cfg;
      if (!fe.preset.empty() || !fe.config.empty()) {
        cfg = build_config(fe, cgnls::RunMode::Evaluate);
      } else {
        cfg.mode = cgnls::RunMode::Evaluate;
        if (!fe.out.empty()) cfg.out_dir = fe.out;
        if (fe.seed) cfg.seed = *fe.seed;
      }
      if (!pred_path.empty()) cfg.pred_path = pred_path;
      if (!exact_path.empty()) cfg.exact_path = exact_path;
      return execute(cfg);
    }
  } catch (const cgnls::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const cgnls::UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 1;
  } catch (const cgnls::NumericError& e) {
    std::fprintf(stderr, "numeric failure: %s (partial results, if any, were kept)\n",
                 e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 1;
}
