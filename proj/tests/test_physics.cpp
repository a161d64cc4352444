#include "cgnls/physics.hpp"

#include <gtest/gtest.h>

#include <array>
#include <vector>

#include "cgnls/rng.hpp"
#include "cgnls/soliton.hpp"

using namespace cgnls;

namespace {

// Jets of an exact field by central finite differences (extended precision).
template <typename Field>
std::array<Jet2, 4> fd_jets(const Field& f, double x, double t, long double h = 1e-5L) {
  const auto at = [&](long double xx, long double tt) { return f.eval_ld(xx, tt); };
  const auto c0 = at(x, t), xp = at(x + h, t), xm = at(x - h, t), tp = at(x, t + h),
             tm = at(x, t - h);
  const auto mk = [&](auto sel) {
    return Jet2{static_cast<double>(sel(c0)),
                static_cast<double>((sel(tp) - sel(tm)) / (2 * h)),
                static_cast<double>((sel(xp) - sel(xm)) / (2 * h)),
                static_cast<double>((sel(xp) - 2 * sel(c0) + sel(xm)) / (h * h))};
  };
  return {mk([](const auto& v) { return v.first.real(); }),
          mk([](const auto& v) { return v.first.imag(); }),
          mk([](const auto& v) { return v.second.real(); }),
          mk([](const auto& v) { return v.second.imag(); })};
}

}  // namespace

TEST(CouplingTerm, ZeroField) {
  EXPECT_EQ(coupling_term(0, 0, 0, 0, CGNLSCoefficients{1, 1, {1, 0}}), 0.0);
}

TEST(CouplingTerm, ManakovReduction) {
  // gamma = 0, alpha = beta: G = alpha (|h1|^2 + |h2|^2)
  const CGNLSCoefficients manakov{1.0, 1.0, {0.0, 0.0}};
  EXPECT_DOUBLE_EQ(coupling_term(1, 0, 0, 1, manakov), 2.0);
  EXPECT_DOUBLE_EQ(coupling_term(0.5, 0.5, -0.5, 0.5, manakov), 1.0);
}

TEST(CouplingTerm, DirectArithmetic) {
  // alpha=beta=1, gamma=1 at (1,0,1,0): 1 + 1 + 2*1*1 - 0 = 4
  EXPECT_DOUBLE_EQ(coupling_term(1, 0, 1, 0, CGNLSCoefficients{1, 1, {1, 0}}), 4.0);
}

TEST(ForwardResidual, ZeroJets) {
  const std::array<Jet2, 4> jets{};
  const auto r = forward_residual(jets, CGNLSCoefficients{1, 1, {1, 0}});
  EXPECT_EQ(r.f1u, 0.0);
  EXPECT_EQ(r.f1v, 0.0);
  EXPECT_EQ(r.f2u, 0.0);
  EXPECT_EQ(r.f2v, 0.0);
}

TEST(ForwardResidual, StationaryPlaneWave) {
  // u1 = 1 constant, everything else zero; alpha=1, beta=gamma=0:
  // G = 1, f1u = -2*1*1 = -2, f1v = 2*G*v1 = 0
  std::array<Jet2, 4> jets{};
  jets[0].value = 1.0;
  const auto r = forward_residual(jets, CGNLSCoefficients{1.0, 0.0, {0.0, 0.0}});
  EXPECT_DOUBLE_EQ(r.f1u, -2.0);
  EXPECT_DOUBLE_EQ(r.f1v, 0.0);
  EXPECT_DOUBLE_EQ(r.f2u, 0.0);
  EXPECT_DOUBLE_EQ(r.f2v, 0.0);
}

TEST(ForwardResidual, ExactOneSolitonAnnihilates) {
  const OneSolitonField field{OneSolitonSpec{}};
  Rng rng(31415);
  for (int i = 0; i < 50; ++i) {
    const double x = rng.uniform(-9.5, 9.5);
    const double t = rng.uniform(-1.9, 1.9);
    const auto jets = fd_jets(field, x, t);
    const auto r = forward_residual(jets, field.coeffs());
    EXPECT_LT(std::abs(r.f1u), 1e-6);
    EXPECT_LT(std::abs(r.f1v), 1e-6);
    EXPECT_LT(std::abs(r.f2u), 1e-6);
    EXPECT_LT(std::abs(r.f2v), 1e-6);
  }
}

TEST(InverseResidual, ZeroJetsForAnyLambda) {
  const std::array<Jet2, 4> jets{};
  for (const LambdaVector lam : {LambdaVector{1, 2, 1, 2}, LambdaVector{-3, 0.5, 7, 0}}) {
    const auto r = inverse_residual(jets, lam);
    EXPECT_EQ(r.f1u, 0.0);
    EXPECT_EQ(r.f1v, 0.0);
    EXPECT_EQ(r.f2u, 0.0);
    EXPECT_EQ(r.f2v, 0.0);
  }
}

TEST(InverseResidual, ZeroLambdaLeavesTimeDerivativeOnly) {
  std::array<Jet2, 4> jets{};
  jets[0] = {0.3, 1.5, 0.0, 2.0};   // u1
  jets[1] = {-0.1, -0.7, 0.0, 1.0}; // v1
  jets[2] = {0.2, 0.4, 0.0, -3.0};  // u2
  jets[3] = {0.9, 2.5, 0.0, 0.5};   // v2
  const auto r = inverse_residual(jets, LambdaVector{0, 0, 0, 0});
  EXPECT_DOUBLE_EQ(r.f1u, jets[1].d_t);
  EXPECT_DOUBLE_EQ(r.f1v, jets[0].d_t);
  EXPECT_DOUBLE_EQ(r.f2u, jets[3].d_t);
  EXPECT_DOUBLE_EQ(r.f2v, jets[2].d_t);
}

TEST(InverseResidual, GroundTruthLambdaAnnihilatesOneSoliton) {
  const OneSolitonField field{OneSolitonSpec{}};  // a=1, b=2, k=1.5+i, unit coeffs
  const LambdaVector truth{1, 2, 1, 2};
  Rng rng(99);
  for (int i = 0; i < 25; ++i) {
    const auto jets = fd_jets(field, rng.uniform(-8, 8), rng.uniform(-1.8, 1.8));
    const auto r = inverse_residual(jets, truth);
    EXPECT_LT(std::abs(r.f1u), 1e-6);
    EXPECT_LT(std::abs(r.f1v), 1e-6);
    EXPECT_LT(std::abs(r.f2u), 1e-6);
    EXPECT_LT(std::abs(r.f2v), 1e-6);
  }
}

TEST(InverseResidual, MatchesForwardWithUnitCoefficients) {
  // lambda = (1,2,1,2) absorbs the explicit factor 2 of the forward form
  const CGNLSCoefficients unit{1, 1, {1, 0}};
  const LambdaVector lam{1, 2, 1, 2};
  Rng rng(7);
  for (int i = 0; i < 200; ++i) {
    std::array<Jet2, 4> jets;
    for (auto& j : jets)
      j = {rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
    const auto a = forward_residual(jets, unit);
    const auto b = inverse_residual(jets, lam);
    EXPECT_DOUBLE_EQ(a.f1u, b.f1u);
    EXPECT_DOUBLE_EQ(a.f1v, b.f1v);
    EXPECT_DOUBLE_EQ(a.f2u, b.f2u);
    EXPECT_DOUBLE_EQ(a.f2v, b.f2v);
  }
}

TEST(MeanResidual, RowSums) {
  std::vector<ResidualVector> rs{{1, 1, 1, 1}};
  EXPECT_DOUBLE_EQ(mean_residual(rs), 4.0);
  rs = {{1, 0, 0, 0}, {0, 1, 0, 0}};
  EXPECT_DOUBLE_EQ(mean_residual(rs), 1.0);
  rs = {{-2, 0, 0, 0}};
  EXPECT_DOUBLE_EQ(mean_residual(rs), 2.0);
}

TEST(MeanResidual, EmptyListIsUsageError) {
  std::vector<ResidualVector> rs;
  EXPECT_THROW(mean_residual(rs), UsageError);
}

TEST(MeanResidual, PermutationInvariantAndHomogeneous) {
  Rng rng(0);
  std::vector<ResidualVector> rs;
  for (int i = 0; i < 16; ++i)
    rs.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1),
                  rng.uniform(-1, 1)});
  const double base = mean_residual(rs);
  std::vector<ResidualVector> shuffled(rs.rbegin(), rs.rend());
  EXPECT_DOUBLE_EQ(mean_residual(shuffled), base);
  for (auto& r : rs) {
    r.f1u *= 3.0;
    r.f1v *= 3.0;
    r.f2u *= 3.0;
    r.f2v *= 3.0;
  }
  EXPECT_NEAR(mean_residual(rs), 3.0 * base, 1e-12);
}
