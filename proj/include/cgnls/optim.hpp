#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "cgnls/core.hpp"

namespace cgnls {

// Objectives are callables double(std::span<const double> x,
// std::span<double> grad) evaluating the loss and filling the gradient.

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  int iterations = 10000;

  void validate() const {
    if (!(learning_rate > 0.0)) throw ConfigError("AdamConfig: learning_rate must be positive");
    if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0)
      throw ConfigError("AdamConfig: betas must lie in [0, 1)");
    if (iterations < 0) throw ConfigError("AdamConfig: iterations must be >= 0");
  }
};

struct LbfgsConfig {
  int memory = 50;
  double grad_tolerance = 1e-9;
  int max_iterations = 20000;
  // Strong Wolfe line-search parameters: sufficient decrease c1, curvature c2.
  double c1 = 1e-4;
  double c2 = 0.9;
  int max_line_evals = 40;

  void validate() const {
    if (memory < 1) throw ConfigError("LbfgsConfig: memory must be >= 1");
    if (!(grad_tolerance >= 0.0)) throw ConfigError("LbfgsConfig: grad_tolerance must be >= 0");
    if (max_iterations < 0) throw ConfigError("LbfgsConfig: max_iterations must be >= 0");
    if (!(0.0 < c1 && c1 < c2 && c2 < 1.0))
      throw ConfigError("LbfgsConfig: require 0 < c1 < c2 < 1");
  }
};

enum class OptimStatus { Converged, MaxIterations, LineSearchFailed };

inline const char* to_string(OptimStatus s) {
  switch (s) {
    case OptimStatus::Converged: return "converged";
    case OptimStatus::MaxIterations: return "max-iterations";
    case OptimStatus::LineSearchFailed: return "line-search-failed";
  }
  return "unknown";
}

struct OptimResult {
  std::vector<double> x;
  double f = 0.0;
  int iterations = 0;
  OptimStatus status = OptimStatus::MaxIterations;
};

/// Full-batch Adam with bias correction. The per-iteration observer receives
/// (iteration index starting at 1, loss before that iteration's update).
template <typename F>
OptimResult adam_minimize(F&& objective, std::vector<double> x,
                          const AdamConfig& cfg,
                          const std::function<void(int, double)>& on_iter = {}) {
  cfg.validate();
  const std::size_t n = x.size();
  std::vector<double> g(n, 0.0), m(n, 0.0), v(n, 0.0);
  double f = 0.0;
  double b1t = 1.0, b2t = 1.0;
  for (int it = 1; it <= cfg.iterations; ++it) {
    f = objective(std::span<const double>(x), std::span<double>(g));
    if (!is_finite(f))
      throw NumericError("adam_minimize: non-finite loss at iteration " + std::to_string(it));
    if (on_iter) on_iter(it, f);
    b1t *= cfg.beta1;
    b2t *= cfg.beta2;
    const double c1 = 1.0 / (1.0 - b1t);
    const double c2 = 1.0 / (1.0 - b2t);
    for (std::size_t i = 0; i < n; ++i) {
      m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
      v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
      x[i] -= cfg.learning_rate * (m[i] * c1) / (std::sqrt(v[i] * c2) + cfg.eps);
    }
  }
  OptimResult res;
  res.f = cfg.iterations > 0 ? f : 0.0;
  if (cfg.iterations == 0) {
    std::vector<double> g0(n, 0.0);
    res.f = objective(std::span<const double>(x), std::span<double>(g0));
  }
  res.x = std::move(x);
  res.iterations = cfg.iterations;
  res.status = OptimStatus::MaxIterations;
  return res;
}

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double inf_norm(std::span<const double> a) {
  double s = 0.0;
  for (const double v : a) s = std::max(s, std::abs(v));
  return s;
}

// Minimizer of the cubic interpolant through (a, fa, ga) and (b, fb, gb),
// safeguarded to the interior of [min(a,b), max(a,b)].
inline double cubic_min(double a, double fa, double ga, double b, double fb,
                        double gb) {
  const double d1 = ga + gb - 3.0 * (fa - fb) / (a - b);
  const double disc = d1 * d1 - ga * gb;
  const double lo = std::min(a, b), hi = std::max(a, b);
  const double span = hi - lo;
  double cand = 0.5 * (a + b);
  if (disc >= 0.0) {
    const double d2 = std::copysign(std::sqrt(disc), b - a);
    cand = b - (b - a) * (gb + d2 - d1) / (gb - ga + 2.0 * d2);
  }
  if (!std::isfinite(cand) || cand <= lo + 1e-3 * span || cand >= hi - 1e-3 * span)
    cand = 0.5 * (lo + hi);
  return cand;
}

}  // namespace detail

/// Limited-memory BFGS with a strong-Wolfe line search. On line-search
/// failure returns the best point seen so far with a flagged status.
template <typename F>
OptimResult lbfgs_minimize(F&& objective, std::vector<double> x,
                           const LbfgsConfig& cfg,
                           const std::function<void(int, double)>& on_iter = {}) {
  cfg.validate();
  const std::size_t n = x.size();
  std::vector<double> g(n), x_new(n), g_new(n), d(n), q(n);
  std::deque<std::vector<double>> s_mem, y_mem;
  std::deque<double> rho_mem;

  double f = objective(std::span<const double>(x), std::span<double>(g));
  if (!is_finite(f)) throw NumericError("lbfgs_minimize: non-finite initial loss");

  std::vector<double> x_best = x;
  double f_best = f;

  OptimResult res;
  if (detail::inf_norm(g) <= cfg.grad_tolerance) {
    res.x = std::move(x);
    res.f = f;
    res.iterations = 0;
    res.status = OptimStatus::Converged;
    return res;
  }

  int it = 0;
  OptimStatus status = OptimStatus::MaxIterations;
  for (; it < cfg.max_iterations; ++it) {
    // two-loop recursion: d = -H g
    q.assign(g.begin(), g.end());
    std::vector<double> alpha(s_mem.size());
    for (std::size_t j = s_mem.size(); j-- > 0;) {
      alpha[j] = rho_mem[j] * detail::dot(s_mem[j], q);
      for (std::size_t i = 0; i < n; ++i) q[i] -= alpha[j] * y_mem[j][i];
    }
    double gamma = 1.0;
    if (!s_mem.empty()) {
      const double sy = detail::dot(s_mem.back(), y_mem.back());
      const double yy = detail::dot(y_mem.back(), y_mem.back());
      if (yy > 0.0) gamma = sy / yy;
    }
    for (std::size_t i = 0; i < n; ++i) q[i] *= gamma;
    for (std::size_t j = 0; j < s_mem.size(); ++j) {
      const double beta = rho_mem[j] * detail::dot(y_mem[j], q);
      for (std::size_t i = 0; i < n; ++i) q[i] += (alpha[j] - beta) * s_mem[j][i];
    }
    for (std::size_t i = 0; i < n; ++i) d[i] = -q[i];

    double dg = detail::dot(d, g);
    if (!(dg < 0.0)) {  // not a descent direction: restart from steepest descent
      s_mem.clear();
      y_mem.clear();
      rho_mem.clear();
      for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
      dg = -detail::dot(g, g);
      if (!(dg < 0.0)) {
        status = OptimStatus::Converged;
        break;
      }
    }

    // Strong Wolfe line search (bracket + zoom with cubic interpolation).
    const double phi0 = f, dphi0 = dg;
    double a_prev = 0.0, phi_prev = phi0, dphi_prev = dphi0;
    double a = it == 0 ? std::min(1.0, 1.0 / detail::inf_norm(g)) : 1.0;
    const double a_max = 1e10;
    bool accepted = false;
    double phi_acc = phi0;
    int evals = 0;
    double a_lo = 0, a_hi = 0, phi_lo = 0, dphi_lo = 0, phi_hi = 0, dphi_hi = 0;
    bool zooming = false;

    auto eval_phi = [&](double step, double& phi, double& dphi) {
      for (std::size_t i = 0; i < n; ++i) x_new[i] = x[i] + step * d[i];
      phi = objective(std::span<const double>(x_new), std::span<double>(g_new));
      dphi = detail::dot(g_new, d);
      ++evals;
      if (is_finite(phi) && phi < f_best) {
        f_best = phi;
        x_best = x_new;
      }
    };

    while (evals < cfg.max_line_evals) {
      double phi, dphi;
      eval_phi(a, phi, dphi);
      if (!is_finite(phi)) {  // overshoot into non-finite territory: back off
        a = 0.5 * (a_prev + a);
        continue;
      }
      if (phi > phi0 + cfg.c1 * a * dphi0 || (evals > 1 && phi >= phi_prev)) {
        a_lo = a_prev; phi_lo = phi_prev; dphi_lo = dphi_prev;
        a_hi = a; phi_hi = phi; dphi_hi = dphi;
        zooming = true;
        break;
      }
      if (std::abs(dphi) <= -cfg.c2 * dphi0) {
        accepted = true;
        phi_acc = phi;
        break;
      }
      if (dphi >= 0.0) {
        a_lo = a; phi_lo = phi; dphi_lo = dphi;
        a_hi = a_prev; phi_hi = phi_prev; dphi_hi = dphi_prev;
        zooming = true;
        break;
      }
      a_prev = a; phi_prev = phi; dphi_prev = dphi;
      a = std::min(2.0 * a, a_max);
      if (a >= a_max) break;
    }

    if (zooming) {
      while (evals < cfg.max_line_evals) {
        if (std::abs(a_hi - a_lo) <= 1e-16 * std::max(1.0, std::abs(a_lo))) break;
        a = detail::cubic_min(a_lo, phi_lo, dphi_lo, a_hi, phi_hi, dphi_hi);
        double phi, dphi;
        eval_phi(a, phi, dphi);
        if (!is_finite(phi) || phi > phi0 + cfg.c1 * a * dphi0 || phi >= phi_lo) {
          a_hi = a; phi_hi = phi; dphi_hi = dphi;
        } else {
          if (std::abs(dphi) <= -cfg.c2 * dphi0) {
            accepted = true;
            phi_acc = phi;
            break;
          }
          if (dphi * (a_hi - a_lo) >= 0.0) {
            a_hi = a_lo; phi_hi = phi_lo; dphi_hi = dphi_lo;
          }
          a_lo = a; phi_lo = phi; dphi_lo = dphi;
        }
      }
    }

    if (!accepted) {
      status = OptimStatus::LineSearchFailed;
      break;
    }

    // x_new, g_new hold the accepted trial point.
    std::vector<double> s(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = x_new[i] - x[i];
      y[i] = g_new[i] - g[i];
    }
    const double sy = detail::dot(s, y);
    x.swap(x_new);
    g.swap(g_new);
    f = phi_acc;
    if (on_iter) on_iter(it + 1, f);

    if (sy > 1e-10 * std::sqrt(detail::dot(s, s)) * std::sqrt(detail::dot(y, y))) {
      s_mem.push_back(std::move(s));
      y_mem.push_back(std::move(y));
      rho_mem.push_back(1.0 / sy);
      if (static_cast<int>(s_mem.size()) > cfg.memory) {
        s_mem.pop_front();
        y_mem.pop_front();
        rho_mem.pop_front();
      }
    }

    if (detail::inf_norm(g) <= cfg.grad_tolerance) {
      status = OptimStatus::Converged;
      ++it;
      break;
    }
  }

  if (status == OptimStatus::LineSearchFailed || f_best < f) {
    res.x = std::move(x_best);
    res.f = f_best;
  } else {
    res.x = std::move(x);
    res.f = f;
  }
  res.iterations = it;
  res.status = status;
  return res;
}

}  // namespace cgnls
