#include "cgnls/sampling.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <vector>

using namespace cgnls;

namespace {

bool stratified(const std::vector<Point>& pts, const Domain& d) {
  const int n = static_cast<int>(pts.size());
  std::vector<int> cx(static_cast<std::size_t>(n), 0), ct(static_cast<std::size_t>(n), 0);
  for (const auto& p : pts) {
    const int ix = std::min(n - 1, static_cast<int>((p.x - d.x_lo) / (d.x_hi - d.x_lo) * n));
    const int it = std::min(n - 1, static_cast<int>((p.t - d.t_lo) / (d.t_hi - d.t_lo) * n));
    if (ix < 0 || it < 0) return false;
    ++cx[static_cast<std::size_t>(ix)];
    ++ct[static_cast<std::size_t>(it)];
  }
  for (int i = 0; i < n; ++i)
    if (cx[static_cast<std::size_t>(i)] != 1 || ct[static_cast<std::size_t>(i)] != 1)
      return false;
  return true;
}

ResidualVector residual_of_score(double s) { return ResidualVector{s, 0, 0, 0}; }

}  // namespace

TEST(LhsSample, StratificationHolds) {
  const Domain d{0, 1, 0, 1};
  for (int n = 1; n <= 64; ++n)
    for (std::uint64_t seed = 0; seed < 10; ++seed)
      EXPECT_TRUE(stratified(lhs_sample(d, n, seed), d)) << "n=" << n << " seed=" << seed;
}

TEST(LhsSample, SinglePointInsideDomain) {
  const Domain d{-3, 5, 2, 7};
  const auto pts = lhs_sample(d, 1, 42);
  ASSERT_EQ(pts.size(), 1u);
  EXPECT_GE(pts[0].x, d.x_lo);
  EXPECT_LT(pts[0].x, d.x_hi);
  EXPECT_GE(pts[0].t, d.t_lo);
  EXPECT_LT(pts[0].t, d.t_hi);
}

TEST(LhsSample, DeterministicPerSeed) {
  const Domain d{-2, 2, -1, 1};
  const auto a = lhs_sample(d, 17, 5);
  const auto b = lhs_sample(d, 17, 5);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].x, b[i].x);
    EXPECT_EQ(a[i].t, b[i].t);
  }
  const auto c = lhs_sample(d, 17, 6);
  bool same = true;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].x != c[i].x) same = false;
  EXPECT_FALSE(same);
}

TEST(LhsSample, BadArguments) {
  EXPECT_THROW(lhs_sample(Domain{1, 0, 0, 1}, 4, 0), std::invalid_argument);
  EXPECT_THROW(lhs_sample(Domain{0, 1, 0, 1}, 0, 0), UsageError);
}

TEST(RarSelect, PicksLargestScores) {
  std::vector<Point> pool{{0, 0}, {1, 0}, {2, 0}, {3, 0}};
  const std::vector<double> scores{3.0, 0.1, 2.0, 0.05};
  auto residual_at = [&](const Point& p) {
    return residual_of_score(scores[static_cast<std::size_t>(p.x + 0.5)]);
  };
  const auto sel = rar_select(residual_at, pool, 2);
  ASSERT_EQ(sel.size(), 2u);
  EXPECT_EQ(sel[0].x, 0.0);
  EXPECT_EQ(sel[1].x, 2.0);
}

TEST(RarSelect, TieBreakByPoolIndex) {
  std::vector<Point> pool{{0, 0}, {1, 0}, {2, 0}};
  auto residual_at = [](const Point&) { return residual_of_score(1.0); };
  const auto sel = rar_select(residual_at, pool, 2);
  ASSERT_EQ(sel.size(), 2u);
  EXPECT_EQ(sel[0].x, 0.0);
  EXPECT_EQ(sel[1].x, 1.0);
}

TEST(RarSelect, WholePool) {
  std::vector<Point> pool{{0, 0}, {1, 0}, {2, 0}};
  auto residual_at = [](const Point& p) { return residual_of_score(p.x); };
  const auto sel = rar_select(residual_at, pool, 3);
  std::vector<double> xs;
  for (const auto& p : sel) xs.push_back(p.x);
  std::sort(xs.begin(), xs.end());
  EXPECT_EQ(xs, (std::vector<double>{0.0, 1.0, 2.0}));
}

TEST(RarSelect, RejectsOversizedRequest) {
  std::vector<Point> pool{{0, 0}};
  auto residual_at = [](const Point&) { return residual_of_score(1.0); };
  EXPECT_THROW(rar_select(residual_at, pool, 2), UsageError);
}

TEST(RarSelect, AgreesWithFullSortBruteForce) {
  Rng rng(404);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 50 + static_cast<int>(rng.below(951));  // pools up to 1000
    std::vector<Point> pool(static_cast<std::size_t>(n));
    std::vector<double> scores(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      pool[static_cast<std::size_t>(i)] = {static_cast<double>(i), 0.0};
      // coarse quantization forces plenty of ties
      scores[static_cast<std::size_t>(i)] = std::floor(rng.uniform() * 8.0);
    }
    const int m = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    const auto sel = select_top_scores(pool, scores, m);

    // brute force: stable full sort by (score desc, index asc)
    std::vector<std::size_t> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return scores[a] > scores[b];
    });
    ASSERT_EQ(sel.size(), static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i)
      EXPECT_EQ(sel[static_cast<std::size_t>(i)].x, pool[idx[static_cast<std::size_t>(i)]].x);
  }
}

TEST(RarSelect, InvariantUnderPositiveRescaling) {
  Rng rng(11);
  const int n = 200;
  std::vector<Point> pool(static_cast<std::size_t>(n));
  std::vector<double> scores(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    pool[static_cast<std::size_t>(i)] = {static_cast<double>(i), 0.0};
    scores[static_cast<std::size_t>(i)] = rng.uniform();
  }
  auto scaled = scores;
  for (auto& s : scaled) s *= 37.5;
  const auto a = select_top_scores(pool, scores, 13);
  const auto b = select_top_scores(pool, scaled, 13);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].x, b[i].x);
}

TEST(RarSelect, SelectedScoresDominateRest) {
  Rng rng(77);
  const int n = 300, m = 25;
  std::vector<Point> pool(static_cast<std::size_t>(n));
  std::vector<double> scores(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    pool[static_cast<std::size_t>(i)] = {static_cast<double>(i), 0.0};
    scores[static_cast<std::size_t>(i)] = rng.uniform();
  }
  const auto sel = select_top_scores(pool, scores, m);
  std::vector<bool> chosen(static_cast<std::size_t>(n), false);
  double min_sel = 1e300;
  for (const auto& p : sel) {
    chosen[static_cast<std::size_t>(p.x + 0.5)] = true;
    min_sel = std::min(min_sel, scores[static_cast<std::size_t>(p.x + 0.5)]);
  }
  for (int i = 0; i < n; ++i)
    if (!chosen[static_cast<std::size_t>(i)])
      EXPECT_LE(scores[static_cast<std::size_t>(i)], min_sel);
}

TEST(RarConfig, Validation) {
  EXPECT_THROW((RARConfig{0, 0.1, 1, 10, 0}.validate()), ConfigError);
  EXPECT_THROW((RARConfig{5, 0.0, 1, 10, 0}.validate()), ConfigError);
  EXPECT_THROW((RARConfig{5, 0.1, 1, 3, 0}.validate()), ConfigError);
  EXPECT_NO_THROW((RARConfig{5, 0.1, 0, 10, 0}.validate()));
}
