#include "cgnls/soliton.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <complex>

#include "cgnls/rng.hpp"

using namespace cgnls;

namespace {

OneSolitonSpec paper_one() { return OneSolitonSpec{}; }  // a=1, b=2, k=1.5+i, unit coeffs

TwoSolitonSpec elastic() {
  TwoSolitonSpec s;
  s.k1 = {1, 1};
  s.k2 = {2, -1};
  s.coeffs = {2.0, 2.0, {0.5, 0.5}};
  return s;
}

TwoSolitonSpec shape_changing() {
  TwoSolitonSpec s = elastic();
  s.xi21 = {39.0 / 89.0, 80.0 / 89.0};
  return s;
}

}  // namespace

TEST(OneSoliton, LocalizationConstantOfPaperPreset) {
  // e^c = (1 + 4 + 2 + 2) / 3^2 = 1, i.e. c = 0
  const auto c = detail::OneSolitonConstants<double>::make(paper_one());
  EXPECT_NEAR(c.ec.real(), 1.0, 1e-15);
  EXPECT_NEAR(c.ec.imag(), 0.0, 1e-15);
}

TEST(OneSoliton, PeakRidesAlongTwiceTime) {
  // |h1| peaks at theta_R + c/2 = 0, i.e. x = 2t, with max |a|/2 e^{-c/2}
  const OneSolitonField f(paper_one());
  for (const double t : {-1.5, 0.0, 0.7, 1.9}) {
    const auto [h1, h2] = f(Point{2.0 * t, t});
    EXPECT_NEAR(std::abs(h1), 0.5, 1e-12);
    EXPECT_NEAR(std::abs(h2), 1.0, 1e-12);
    // off the ridge the magnitude drops
    const auto [g1, g2] = f(Point{2.0 * t + 1.0, t});
    EXPECT_LT(std::abs(g1), 0.5);
  }
}

TEST(OneSoliton, ComponentsProportional) {
  OneSolitonSpec s;
  s.a = {0.7, -0.4};
  s.b = {-1.1, 0.9};
  s.k = {1.2, -0.8};
  s.coeffs = {1.5, 0.5, {0.25, -0.75}};
  const OneSolitonField f(s);
  Rng rng(8);
  for (int i = 0; i < 32; ++i) {
    const auto [h1, h2] = f(Point{rng.uniform(-5, 5), rng.uniform(-2, 2)});
    const auto lhs = h2 * s.a;
    const auto rhs = h1 * s.b;
    EXPECT_NEAR(lhs.real(), rhs.real(), 1e-15 + 1e-12 * std::abs(rhs));
    EXPECT_NEAR(lhs.imag(), rhs.imag(), 1e-15 + 1e-12 * std::abs(rhs));
  }
}

TEST(OneSoliton, SpecValidation) {
  OneSolitonSpec s;
  s.k = {0.0, 1.0};
  EXPECT_THROW(s.validate(), ConfigError);
  OneSolitonSpec zero_num;
  zero_num.a = {1, 0};
  zero_num.b = {0, 0};
  zero_num.coeffs = {0.0, 1.0, {0.0, 0.0}};  // numerator |a|^2*0 + 0 + 0 = 0
  EXPECT_THROW(zero_num.validate(), ConfigError);
}

TEST(PhiMn, DirectSubstitution) {
  // all xi = 1, alpha = beta = 2, gamma = 1: numerator 2 + 2 + 1 + 1 = 6
  TwoSolitonSpec s = elastic();
  s.coeffs.gamma = {1.0, 0.0};
  const auto p11 = phi_mn(s, 1, 1);
  const std::complex<double> want = 6.0 / (s.k1 + std::conj(s.k1));
  EXPECT_NEAR(p11.real(), want.real(), 1e-14);
  EXPECT_NEAR(p11.imag(), want.imag(), 1e-14);
}

TEST(PhiMn, SymmetricUnderEqualParameters) {
  TwoSolitonSpec s = elastic();
  s.k2 = s.k1 = {1.0, 0.5};
  // equal wave numbers and equal seeds: phi_12 = phi_21
  const auto p12 = phi_mn(s, 1, 2);
  const auto p21 = phi_mn(s, 2, 1);
  EXPECT_NEAR(p12.real(), p21.real(), 1e-15);
  EXPECT_NEAR(p12.imag(), p21.imag(), 1e-15);
}

TEST(PhiMn, GammaZeroNumerator) {
  TwoSolitonSpec s = elastic();
  s.coeffs.gamma = {0.0, 0.0};
  for (int m = 1; m <= 2; ++m)
    for (int n = 1; n <= 2; ++n) {
      const auto km = m == 1 ? s.k1 : s.k2;
      const auto kn = n == 1 ? s.k1 : s.k2;
      const std::complex<double> want = 4.0 / (km + std::conj(kn));
      const auto p = phi_mn(s, m, n);
      EXPECT_NEAR(p.real(), want.real(), 1e-14);
      EXPECT_NEAR(p.imag(), want.imag(), 1e-14);
    }
}

TEST(PhiMn, DegenerateDenominator) {
  TwoSolitonSpec s = elastic();
  s.k2 = -std::conj(s.k1);  // k1 + conj(k2) = 0
  EXPECT_THROW(phi_mn(s, 1, 2), ConfigError);
}

TEST(TwoSoliton, SpecValidation) {
  TwoSolitonSpec s = elastic();
  s.k2 = s.k1;
  EXPECT_THROW(s.validate(), ConfigError);
  s = elastic();
  s.k1 = {0, 2};
  EXPECT_THROW(s.validate(), ConfigError);
  s = elastic();
  s.k2 = -std::conj(s.k1);
  EXPECT_THROW(TwoSolitonField{s}, ConfigError);
}

TEST(TwoSoliton, ElasticPresetSatisfiesSystem) {
  const TwoSolitonField f(elastic());
  Rng rng(2718);
  long double worst = 0;
  for (int i = 0; i < 50; ++i) {
    const double x = rng.uniform(-6.8, 6.8);
    const double t = rng.uniform(-0.95, 0.95);
    GridSpec g{x - 0.01, x + 0.01, t - 0.01, t + 0.01, 3, 3};
    worst = std::max<long double>(worst, pde_selfcheck(f, g, 1e-5));
  }
  EXPECT_LT(static_cast<double>(worst), 1e-6);
}

TEST(TwoSoliton, ShapeChangingPresetSatisfiesSystem) {
  const TwoSolitonField f(shape_changing());
  GridSpec g{-4, 4, -0.3, 0.3, 40, 40};
  EXPECT_LT(pde_selfcheck(f, g, 1e-5), 1e-6);
}

TEST(TwoSoliton, FarFieldDecay) {
  const TwoSolitonField f(elastic());
  // soliton ridges pass through x = 2t and x = -2t; far from both at t = -1
  // the field is exponentially small
  const double t = -1.0;
  for (const double x : {-60.0, 45.0, 80.0}) {
    const auto [h1, h2] = f(Point{x, t});
    EXPECT_LT(std::abs(h1), 1e-3);
    EXPECT_LT(std::abs(h2), 1e-3);
  }
}

TEST(SampleGrid, CornerCase2x2) {
  const OneSolitonField f(paper_one());
  const GridSpec g{-1, 1, 0, 2, 2, 2};
  const auto rows = sample_grid(f, g);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].point.x, -1.0);
  EXPECT_EQ(rows[0].point.t, 0.0);
  EXPECT_EQ(rows[1].point.x, 1.0);
  EXPECT_EQ(rows[1].point.t, 0.0);
  EXPECT_EQ(rows[3].point.x, 1.0);
  EXPECT_EQ(rows[3].point.t, 2.0);
}

TEST(SampleGrid, PaperGridDimensions) {
  const OneSolitonField f(paper_one());
  const GridSpec g{-10, 10, -2, 2, 300, 201};
  const auto rows = sample_grid(f, g);
  EXPECT_EQ(rows.size(), 60300u);
  EXPECT_NEAR(g.dt(), 0.02, 1e-15);
}

TEST(SampleGrid, RowsReproduceComplexOracle) {
  const TwoSolitonField f(elastic());
  const GridSpec g{-2, 2, -0.5, 0.5, 7, 5};
  const auto rows = sample_grid(f, g);
  for (const auto& r : rows) {
    const auto [h1, h2] = f(r.point);
    EXPECT_EQ(r.u1, h1.real());
    EXPECT_EQ(r.v1, h1.imag());
    EXPECT_EQ(r.u2, h2.real());
    EXPECT_EQ(r.v2, h2.imag());
  }
}

TEST(PdeSelfcheck, OneSolitonPreset) {
  const OneSolitonField f(paper_one());
  const GridSpec g{-10, 10, -2, 2, 100, 100};
  EXPECT_LT(pde_selfcheck(f, g, 1e-5), 1e-6);
}

TEST(PdeSelfcheck, DetectsCorruption) {
  // a constant shift changes the nonlinear term: residual must jump
  struct Perturbed {
    OneSolitonField base;
    CGNLSCoefficients c;
    const CGNLSCoefficients& coeffs() const { return c; }
    std::pair<std::complex<long double>, std::complex<long double>> eval_ld(
        long double x, long double t) const {
      auto [h1, h2] = base.eval_ld(x, t);
      return {h1 + std::complex<long double>(1e-3L, 0.0L), h2};
    }
  };
  const Perturbed f{OneSolitonField(paper_one()), paper_one().coeffs};
  const GridSpec g{-3, 3, -1, 1, 20, 20};
  EXPECT_GE(pde_selfcheck(f, g, 1e-5), 1e-4);
}

TEST(PdeSelfcheck, UsageErrors) {
  const OneSolitonField f(paper_one());
  EXPECT_THROW(pde_selfcheck(f, GridSpec{-1, 1, -1, 1, 2, 5}, 1e-5), UsageError);
  EXPECT_THROW(pde_selfcheck(f, GridSpec{-1, 1, -1, 1, 5, 5}, 0.0), UsageError);
}
