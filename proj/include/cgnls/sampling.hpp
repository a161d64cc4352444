#pragma once

#include <algorithm>
#include <functional>
#include <numeric>
#include <span>
#include <vector>

#include "cgnls/core.hpp"
#include "cgnls/physics.hpp"
#include "cgnls/rng.hpp"

namespace cgnls {

/// One refinement-loop event: the mean candidate-pool residual observed at
/// that round and how many points were appended.
struct RAREvent {
  int round = 0;
  double err = 0.0;
  int added = 0;
};

/// Residual-based refinement loop settings: add m points per round until the
/// mean residual over a fresh candidate pool drops below epsilon0 or
/// max_rounds is exhausted.
struct RARConfig {
  int m = 5;
  double epsilon0 = 0.01;
  int max_rounds = 2;
  int candidate_pool = 10000;
  int refit_iterations = 1000;

  void validate() const {
    if (m < 1) throw ConfigError("RARConfig: m must be >= 1");
    if (!(epsilon0 > 0.0)) throw ConfigError("RARConfig: epsilon0 must be positive");
    if (candidate_pool < m)
      throw ConfigError("RARConfig: candidate_pool must be >= m");
    if (max_rounds < 0) throw ConfigError("RARConfig: max_rounds must be >= 0");
    if (refit_iterations < 0)
      throw ConfigError("RARConfig: refit_iterations must be >= 0");
  }
};

/// Latin hypercube sample of n points: each axis is cut into n equal strata
/// and every stratum receives exactly one point. Deterministic per seed.
inline std::vector<Point> lhs_sample(const Domain& domain, int n,
                                     std::uint64_t seed) {
  domain.validate();
  if (n < 1) throw UsageError("lhs_sample: n must be >= 1");
  Rng rng(seed);
  std::vector<int> sx(static_cast<std::size_t>(n)), st(static_cast<std::size_t>(n));
  std::iota(sx.begin(), sx.end(), 0);
  std::iota(st.begin(), st.end(), 0);
  rng.shuffle(sx);
  rng.shuffle(st);
  const double wx = (domain.x_hi - domain.x_lo) / n;
  const double wt = (domain.t_hi - domain.t_lo) / n;
  std::vector<Point> pts(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    pts[static_cast<std::size_t>(i)].x = domain.x_lo + (sx[static_cast<std::size_t>(i)] + rng.uniform()) * wx;
    pts[static_cast<std::size_t>(i)].t = domain.t_lo + (st[static_cast<std::size_t>(i)] + rng.uniform()) * wt;
  }
  return pts;
}

/// Selection step shared with callers that already hold per-point scores.
inline std::vector<Point> select_top_scores(std::span<const Point> pool,
                                            std::span<const double> score, int m) {
  if (score.size() != pool.size())
    throw UsageError("select_top_scores: score/pool size mismatch");
  if (m < 1 || static_cast<std::size_t>(m) > pool.size())
    throw UsageError("select_top_scores: require 1 <= m <= pool size");
  std::vector<std::size_t> idx(pool.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::partial_sort(idx.begin(), idx.begin() + m, idx.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (score[a] != score[b]) return score[a] > score[b];
                      return a < b;
                    });
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) out.push_back(pool[idx[static_cast<std::size_t>(i)]]);
  return out;
}

/// The m pool points with the largest residual score, ties broken by pool
/// index (earlier first).
inline std::vector<Point> rar_select(
    const std::function<ResidualVector(const Point&)>& residual_at,
    std::span<const Point> pool, int m) {
  if (m < 1 || static_cast<std::size_t>(m) > pool.size())
    throw UsageError("rar_select: require 1 <= m <= pool size");
  std::vector<double> score(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i)
    score[i] = residual_score(residual_at(pool[i]));
  return select_top_scores(pool, score, m);
}

}  // namespace cgnls
