#pragma once

#include <complex>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cgnls/core.hpp"
#include "cgnls/loss.hpp"
#include "cgnls/net.hpp"
#include "cgnls/optim.hpp"
#include "cgnls/physics.hpp"
#include "cgnls/sampling.hpp"
#include "cgnls/soliton.hpp"
#include "cgnls/version.hpp"

namespace cgnls {

enum class RunMode { Generate, TrainForward, TrainInverse, Evaluate };
enum class OracleKind { OneSoliton, TwoSoliton, None };

inline const char* to_string(RunMode m) {
  switch (m) {
    case RunMode::Generate: return "generate";
    case RunMode::TrainForward: return "train-forward";
    case RunMode::TrainInverse: return "train-inverse";
    case RunMode::Evaluate: return "evaluate";
  }
  return "?";
}

inline const char* to_string(OracleKind k) {
  switch (k) {
    case OracleKind::OneSoliton: return "one-soliton";
    case OracleKind::TwoSoliton: return "two-soliton";
    case OracleKind::None: return "none";
  }
  return "?";
}

inline const char* to_string(BoundaryMode m) {
  return m == BoundaryMode::Periodic ? "periodic" : "supervised";
}

/// Everything a batch run needs, in one flat structure. Presets fill it;
/// config files and CLI flags override it; the manifest echoes it in full.
struct ExperimentConfig {
  RunMode mode = RunMode::TrainForward;
  std::string preset;  // name used, if any (informational)
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  bool single_thread = true;

  Domain domain{-10.0, 10.0, -2.0, 2.0};
  GridSpec grid{-10.0, 10.0, -2.0, 2.0, 300, 201};
  std::optional<double> paper_dt;  // printed snapshot spacing, when it disagrees

  OracleKind oracle = OracleKind::OneSoliton;
  OneSolitonSpec one;
  TwoSolitonSpec two;

  NetworkShape shape{2, 6, 32, 4, Activation::Tanh};
  int n0 = 50;
  int nb = 50;
  int nf = 4000;
  BoundaryMode boundary_mode = BoundaryMode::Periodic;

  bool rar_enabled = true;
  RARConfig rar{5, 0.01, 2, 10000, 1000};

  AdamConfig adam;
  LbfgsConfig lbfgs;

  int n_u = 5000;
  double noise_level = 0.0;
  LambdaVector lambda_init{0.0, 0.0, 0.0, 0.0};
  LambdaVector lambda_truth{1.0, 2.0, 1.0, 2.0};

  std::string dataset_path;  // ingest input / generate output name override
  std::string pred_path;     // evaluate mode
  std::string exact_path;    // evaluate mode

  const CGNLSCoefficients& coefficients() const {
    return oracle == OracleKind::TwoSoliton ? two.coeffs : one.coeffs;
  }
};

/// Named parameter sets of the reference experiments.
inline ExperimentConfig make_preset(const std::string& name) {
  ExperimentConfig c;
  c.preset = name;
  if (name == "one-soliton") {
    c.mode = RunMode::TrainForward;
    c.oracle = OracleKind::OneSoliton;
    c.one = OneSolitonSpec{{1, 0}, {2, 0}, {1.5, 1}, CGNLSCoefficients{1, 1, {1, 0}}};
    c.domain = {-10, 10, -2, 2};
    c.grid = {-10, 10, -2, 2, 300, 201};
    c.n0 = 50;
    c.nb = 50;
    c.nf = 4000;
    c.rar = {5, 0.01, 2, 10000, 1000};
    c.adam.iterations = 10000;
  } else if (name == "two-soliton-elastic") {
    c.mode = RunMode::TrainForward;
    c.oracle = OracleKind::TwoSoliton;
    c.two = TwoSolitonSpec{{1, 1}, {2, -1}, {1, 0}, {1, 0}, {1, 0}, {1, 0},
                           CGNLSCoefficients{2, 2, {0.5, 0.5}}};
    c.domain = {-7, 7, -1, 1};
    c.grid = {-7, 7, -1, 1, 300, 201};
    c.n0 = 100;
    c.nb = 100;
    c.nf = 4000;
    c.rar = {3, 0.055, 5, 10000, 1000};
    c.adam.iterations = 10000;
  } else if (name == "two-soliton-inelastic") {
    c.mode = RunMode::TrainForward;
    c.oracle = OracleKind::TwoSoliton;
    c.two = TwoSolitonSpec{{1, 1}, {2, -1}, {1, 0}, {1, 0},
                           {39.0 / 89.0, 80.0 / 89.0}, {1, 0},
                           CGNLSCoefficients{2, 2, {0.5, 0.5}}};
    c.domain = {-4, 4, -0.3, 0.3};
    c.grid = {-4, 4, -0.3, 0.3, 400, 301};
    c.n0 = 150;
    c.nb = 150;
    c.nf = 15000;
    c.rar = {10, 0.13, 10, 10000, 1000};
    c.adam.iterations = 20000;
  } else if (name == "three-soliton-ingest") {
    c.mode = RunMode::TrainForward;
    c.oracle = OracleKind::None;  // field comes from the ingested dataset
    c.domain = {-6, 6, -0.8, 0.8};
    c.grid = {-6, 6, -0.8, 0.8, 400, 301};
    c.paper_dt = 0.005;  // printed spacing; the 400x301 grid derives 0.00533...
    c.n0 = 120;
    c.nb = 100;
    c.nf = 6000;
    c.rar = {3, 0.07, 6, 10000, 1000};
    c.adam.iterations = 20000;
  } else if (name == "inverse-one-soliton") {
    c.mode = RunMode::TrainInverse;
    c.oracle = OracleKind::OneSoliton;
    c.one = OneSolitonSpec{{1, 0}, {2, 0}, {1.5, 1}, CGNLSCoefficients{1, 1, {1, 0}}};
    c.domain = {-10, 10, -2, 2};
    c.grid = {-10, 10, -2, 2, 300, 201};
    c.n_u = 5000;
    c.noise_level = 0.0;
    c.rar = {5, 0.15, 2, 10000, 1000};
    c.adam.iterations = 5000;
    c.lbfgs.max_iterations = 5000;
    c.lambda_truth = {1, 2, 1, 2};
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  return c;
}

inline std::vector<std::string> preset_names() {
  return {"one-soliton", "two-soliton-elastic", "two-soliton-inelastic",
          "three-soliton-ingest", "inverse-one-soliton"};
}

namespace detail {

struct ConfigParser {
  std::string path;
  std::map<std::string, std::pair<std::string, long>> kv;  // section.key -> (value, line)

  void load_text(const std::string& text) {
    std::istringstream in(text);
    std::string line, section;
    long lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      const auto first = line.find_first_not_of(" \t");
      if (first == std::string::npos) continue;
      if (line[first] == '#' || line[first] == ';') continue;
      const auto last = line.find_last_not_of(" \t");
      std::string body = line.substr(first, last - first + 1);
      if (body.front() == '[') {
        if (body.back() != ']')
          throw ConfigError(path + ":" + std::to_string(lineno) + ": malformed section header");
        section = body.substr(1, body.size() - 2);
        continue;
      }
      const auto eq = body.find('=');
      if (eq == std::string::npos)
        throw ConfigError(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
      std::string key = body.substr(0, eq);
      std::string val = body.substr(eq + 1);
      const auto trim = [](std::string& s) {
        const auto b = s.find_first_not_of(" \t");
        const auto e = s.find_last_not_of(" \t");
        s = b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
      };
      trim(key);
      trim(val);
      if (key.empty())
        throw ConfigError(path + ":" + std::to_string(lineno) + ": empty key");
      kv[section + "." + key] = {val, lineno};
    }
  }

  bool take(const std::string& name, std::string& out) {
    const auto it = kv.find(name);
    if (it == kv.end()) return false;
    out = it->second.first;
    last_line_ = it->second.second;
    kv.erase(it);
    return true;
  }

  template <typename T, typename Parse>
  void apply(const std::string& name, T& target, Parse&& parse) {
    std::string raw;
    if (!take(name, raw)) return;
    try {
      target = parse(raw);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(path + ":" + std::to_string(last_line_) + ": field '" + name +
                        "': " + e.what());
    }
  }

  void fail_field(const std::string& name, const std::string& msg) const {
    throw ConfigError(path + ":" + std::to_string(last_line_) + ": field '" + name +
                      "': " + msg);
  }

  double num(const std::string& raw) const {
    std::size_t used = 0;
    const double v = std::stod(raw, &used);
    if (used != raw.size()) throw std::runtime_error("trailing characters in number");
    return v;
  }

  long line_of_first_unknown() const {
    long best = 0;
    for (const auto& [k, v] : kv)
      if (best == 0 || v.second < best) best = v.second;
    return best;
  }

  long last_line_ = 0;
};

}  // namespace detail

/// Parses the flat key-value config format over an existing configuration
/// (typically a preset); every key overrides the corresponding field.
inline void apply_config_text(ExperimentConfig& c, const std::string& text,
                              const std::string& path_label) {
  detail::ConfigParser p;
  p.path = path_label;
  p.load_text(text);

  const auto as_num = [&p](const std::string& raw) { return p.num(raw); };
  const auto as_int = [&p](const std::string& raw) {
    const double v = p.num(raw);
    const long n = std::lround(v);
    if (static_cast<double>(n) != v) throw std::runtime_error("expected an integer");
    return static_cast<int>(n);
  };
  const auto as_bool = [](const std::string& raw) {
    if (raw == "true" || raw == "1" || raw == "yes") return true;
    if (raw == "false" || raw == "0" || raw == "no") return false;
    throw std::runtime_error("expected true/false");
  };
  const auto as_str = [](const std::string& raw) { return raw; };

  p.apply("experiment.mode", c.mode, [](const std::string& raw) {
    if (raw == "generate") return RunMode::Generate;
    if (raw == "train-forward") return RunMode::TrainForward;
    if (raw == "train-inverse") return RunMode::TrainInverse;
    if (raw == "evaluate") return RunMode::Evaluate;
    throw std::runtime_error("expected generate|train-forward|train-inverse|evaluate");
  });
  p.apply("experiment.preset", c.preset, as_str);
  p.apply("experiment.seed", c.seed, [&](const std::string& raw) {
    return static_cast<std::uint64_t>(std::stoull(raw));
  });
  p.apply("experiment.out", c.out_dir, as_str);
  p.apply("experiment.single_thread", c.single_thread, as_bool);

  p.apply("domain.x_lo", c.domain.x_lo, as_num);
  p.apply("domain.x_hi", c.domain.x_hi, as_num);
  p.apply("domain.t_lo", c.domain.t_lo, as_num);
  p.apply("domain.t_hi", c.domain.t_hi, as_num);

  p.apply("grid.x_min", c.grid.x_min, as_num);
  p.apply("grid.x_max", c.grid.x_max, as_num);
  p.apply("grid.t_min", c.grid.t_min, as_num);
  p.apply("grid.t_max", c.grid.t_max, as_num);
  p.apply("grid.nx", c.grid.nx, as_int);
  p.apply("grid.nt", c.grid.nt, as_int);

  p.apply("oracle.kind", c.oracle, [](const std::string& raw) {
    if (raw == "one-soliton") return OracleKind::OneSoliton;
    if (raw == "two-soliton") return OracleKind::TwoSoliton;
    if (raw == "none") return OracleKind::None;
    throw std::runtime_error("expected one-soliton|two-soliton|none");
  });
  const auto cx = [&](const std::string& base, std::complex<double>& z) {
    double re = z.real(), im = z.imag();
    p.apply(base + "_re", re, as_num);
    p.apply(base + "_im", im, as_num);
    z = {re, im};
  };
  cx("oracle.a", c.one.a);
  cx("oracle.b", c.one.b);
  cx("oracle.k", c.one.k);
  cx("oracle.k1", c.two.k1);
  cx("oracle.k2", c.two.k2);
  cx("oracle.xi11", c.two.xi11);
  cx("oracle.xi12", c.two.xi12);
  cx("oracle.xi21", c.two.xi21);
  cx("oracle.xi22", c.two.xi22);
  {
    double alpha = c.coefficients().alpha, beta = c.coefficients().beta;
    std::complex<double> gamma = c.coefficients().gamma;
    p.apply("oracle.alpha", alpha, as_num);
    p.apply("oracle.beta", beta, as_num);
    cx("oracle.gamma", gamma);
    c.one.coeffs = {alpha, beta, gamma};
    c.two.coeffs = {alpha, beta, gamma};
  }

  p.apply("net.hidden_layers", c.shape.hidden_layers, as_int);
  p.apply("net.hidden_width", c.shape.hidden_width, as_int);
  p.apply("net.outputs", c.shape.output_dim, as_int);
  p.apply("net.activation", c.shape.activation, [](const std::string& raw) {
    if (raw == "tanh") return Activation::Tanh;
    if (raw == "identity") return Activation::Identity;
    throw std::runtime_error("expected tanh|identity");
  });

  p.apply("data.n0", c.n0, as_int);
  p.apply("data.nb", c.nb, as_int);
  p.apply("data.nf", c.nf, as_int);
  p.apply("data.boundary", c.boundary_mode, [](const std::string& raw) {
    if (raw == "periodic") return BoundaryMode::Periodic;
    if (raw == "supervised") return BoundaryMode::Supervised;
    throw std::runtime_error("expected periodic|supervised");
  });

  p.apply("rar.enabled", c.rar_enabled, as_bool);
  p.apply("rar.m", c.rar.m, as_int);
  p.apply("rar.epsilon0", c.rar.epsilon0, as_num);
  p.apply("rar.max_rounds", c.rar.max_rounds, as_int);
  p.apply("rar.candidate_pool", c.rar.candidate_pool, as_int);
  p.apply("rar.refit_iterations", c.rar.refit_iterations, as_int);

  p.apply("adam.learning_rate", c.adam.learning_rate, as_num);
  p.apply("adam.beta1", c.adam.beta1, as_num);
  p.apply("adam.beta2", c.adam.beta2, as_num);
  p.apply("adam.eps", c.adam.eps, as_num);
  p.apply("adam.iterations", c.adam.iterations, as_int);

  p.apply("lbfgs.memory", c.lbfgs.memory, as_int);
  p.apply("lbfgs.gradient_tolerance", c.lbfgs.grad_tolerance, as_num);
  p.apply("lbfgs.max_iterations", c.lbfgs.max_iterations, as_int);

  p.apply("inverse.n_u", c.n_u, as_int);
  p.apply("inverse.noise_level", c.noise_level, as_num);
  p.apply("inverse.lambda_init_1", c.lambda_init.l1, as_num);
  p.apply("inverse.lambda_init_2", c.lambda_init.l2, as_num);
  p.apply("inverse.lambda_init_3", c.lambda_init.l3, as_num);
  p.apply("inverse.lambda_init_4", c.lambda_init.l4, as_num);
  p.apply("inverse.lambda_truth_1", c.lambda_truth.l1, as_num);
  p.apply("inverse.lambda_truth_2", c.lambda_truth.l2, as_num);
  p.apply("inverse.lambda_truth_3", c.lambda_truth.l3, as_num);
  p.apply("inverse.lambda_truth_4", c.lambda_truth.l4, as_num);

  p.apply("io.dataset", c.dataset_path, as_str);
  p.apply("io.pred", c.pred_path, as_str);
  p.apply("io.exact", c.exact_path, as_str);

  if (!p.kv.empty()) {
    const auto& [key, val] = *p.kv.begin();
    throw ConfigError(path_label + ":" + std::to_string(val.second) + ": unknown key '" +
                      key + "'");
  }
}

inline ExperimentConfig load_config_file(const std::string& path,
                                         std::optional<ExperimentConfig> base = {}) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  ExperimentConfig c = base ? *base : ExperimentConfig{};
  apply_config_text(c, ss.str(), path);
  return c;
}

/// Full expansion of a configuration in the same flat key-value format the
/// parser reads; serves as the run manifest (re-runnable via --config).
inline std::string serialize_config(const ExperimentConfig& c) {
  std::string out;
  char buf[256];
  const auto line = [&](const char* fmt, auto... args) {
    std::snprintf(buf, sizeof buf, fmt, args...);
    out += buf;
    out += '\n';
  };
  const auto g17 = [](double v) {
    static thread_local char b[32];
    std::snprintf(b, sizeof b, "%.17g", v);
    return b;
  };

  line("# cgnls-pinn %s (%s)", kVersion, compiler_id());
  line("# threads = 1 (all numerics run single-threaded; reproducible per seed)");
  line("# derived stream seeds: init, tau0, taub, tauf, rar-pool[r], rar-measure, noise");
  if (c.paper_dt) {
    line("# note: source grid prints dt = %s but nx x nt over the domain derives dt = %s;",
         g17(*c.paper_dt), g17(c.grid.dt()));
    line("#       the printed nx x nt is kept and dt is derived.");
  }
  line("[experiment]");
  line("mode = %s", to_string(c.mode));
  if (!c.preset.empty()) line("preset = %s", c.preset.c_str());
  line("seed = %llu", static_cast<unsigned long long>(c.seed));
  line("out = %s", c.out_dir.c_str());
  line("single_thread = %s", c.single_thread ? "true" : "false");
  line("");
  line("[domain]");
  line("x_lo = %s", g17(c.domain.x_lo));
  line("x_hi = %s", g17(c.domain.x_hi));
  line("t_lo = %s", g17(c.domain.t_lo));
  line("t_hi = %s", g17(c.domain.t_hi));
  line("");
  line("[grid]");
  line("x_min = %s", g17(c.grid.x_min));
  line("x_max = %s", g17(c.grid.x_max));
  line("t_min = %s", g17(c.grid.t_min));
  line("t_max = %s", g17(c.grid.t_max));
  line("nx = %d", c.grid.nx);
  line("nt = %d", c.grid.nt);
  line("");
  line("[oracle]");
  line("kind = %s", to_string(c.oracle));
  if (c.oracle == OracleKind::OneSoliton) {
    line("a_re = %s", g17(c.one.a.real()));
    line("a_im = %s", g17(c.one.a.imag()));
    line("b_re = %s", g17(c.one.b.real()));
    line("b_im = %s", g17(c.one.b.imag()));
    line("k_re = %s", g17(c.one.k.real()));
    line("k_im = %s", g17(c.one.k.imag()));
  } else if (c.oracle == OracleKind::TwoSoliton) {
    line("k1_re = %s", g17(c.two.k1.real()));
    line("k1_im = %s", g17(c.two.k1.imag()));
    line("k2_re = %s", g17(c.two.k2.real()));
    line("k2_im = %s", g17(c.two.k2.imag()));
    line("xi11_re = %s", g17(c.two.xi11.real()));
    line("xi11_im = %s", g17(c.two.xi11.imag()));
    line("xi12_re = %s", g17(c.two.xi12.real()));
    line("xi12_im = %s", g17(c.two.xi12.imag()));
    line("xi21_re = %s", g17(c.two.xi21.real()));
    line("xi21_im = %s", g17(c.two.xi21.imag()));
    line("xi22_re = %s", g17(c.two.xi22.real()));
    line("xi22_im = %s", g17(c.two.xi22.imag()));
  }
  if (c.oracle != OracleKind::None) {
    line("alpha = %s", g17(c.coefficients().alpha));
    line("beta = %s", g17(c.coefficients().beta));
    line("gamma_re = %s", g17(c.coefficients().gamma.real()));
    line("gamma_im = %s", g17(c.coefficients().gamma.imag()));
  }
  line("");
  line("[net]");
  line("hidden_layers = %d", c.shape.hidden_layers);
  line("hidden_width = %d", c.shape.hidden_width);
  line("outputs = %d", c.shape.output_dim);
  line("activation = %s", c.shape.activation == Activation::Tanh ? "tanh" : "identity");
  line("");
  line("[data]");
  line("n0 = %d", c.n0);
  line("nb = %d", c.nb);
  line("nf = %d", c.nf);
  line("boundary = %s", to_string(c.boundary_mode));
  line("");
  line("[rar]");
  line("enabled = %s", c.rar_enabled ? "true" : "false");
  line("m = %d", c.rar.m);
  line("epsilon0 = %s", g17(c.rar.epsilon0));
  line("max_rounds = %d", c.rar.max_rounds);
  line("candidate_pool = %d", c.rar.candidate_pool);
  line("refit_iterations = %d", c.rar.refit_iterations);
  line("");
  line("[adam]");
  line("learning_rate = %s", g17(c.adam.learning_rate));
  line("beta1 = %s", g17(c.adam.beta1));
  line("beta2 = %s", g17(c.adam.beta2));
  line("eps = %s", g17(c.adam.eps));
  line("iterations = %d", c.adam.iterations);
  line("");
  line("[lbfgs]");
  line("memory = %d", c.lbfgs.memory);
  line("gradient_tolerance = %s", g17(c.lbfgs.grad_tolerance));
  line("max_iterations = %d", c.lbfgs.max_iterations);
  line("");
  line("[inverse]");
  line("n_u = %d", c.n_u);
  line("noise_level = %s", g17(c.noise_level));
  line("lambda_init_1 = %s", g17(c.lambda_init.l1));
  line("lambda_init_2 = %s", g17(c.lambda_init.l2));
  line("lambda_init_3 = %s", g17(c.lambda_init.l3));
  line("lambda_init_4 = %s", g17(c.lambda_init.l4));
  line("lambda_truth_1 = %s", g17(c.lambda_truth.l1));
  line("lambda_truth_2 = %s", g17(c.lambda_truth.l2));
  line("lambda_truth_3 = %s", g17(c.lambda_truth.l3));
  line("lambda_truth_4 = %s", g17(c.lambda_truth.l4));
  line("");
  line("[io]");
  if (!c.dataset_path.empty()) line("dataset = %s", c.dataset_path.c_str());
  if (!c.pred_path.empty()) line("pred = %s", c.pred_path.c_str());
  if (!c.exact_path.empty()) line("exact = %s", c.exact_path.c_str());
  return out;
}

}  // namespace cgnls
