// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "kamreduce/errors.hpp"
#include "kamreduce/hamrep.hpp"
#include "kamreduce/testing.hpp"

namespace
{

using namespace kamreduce;
using kamreduce::testing::bracket_oracle;
using kamreduce::testing::random_tl_ham;

constexpr auto EXACT = 1e-13;

TEST(FourierNorm, SingleModeAndAdditivity)
{
  const auto lat = make_lattice(2, 4);
  Series f(lat->size()), g(lat->size());
  f[lat->index(std::vector<int>{2, -1})] = 1.0;
  EXPECT_NEAR(coeff_fourier_norm(*lat, f, 0.5), 4.4816890703380645, 1e-12);
  g[lat->zero()] = cplx{3.0, 4.0};
  EXPECT_NEAR(coeff_fourier_norm(*lat, g, 0.5), 5.0, EXACT);
  Series h(lat->size());
  for (std::size_t i = 0; i < h.size(); ++i)
  {
    h[i] = f[i] + g[i];
  }
  EXPECT_NEAR(coeff_fourier_norm(*lat, h, 0.5),
              coeff_fourier_norm(*lat, f, 0.5) + coeff_fourier_norm(*lat, g, 0.5), 1e-12);
}

TEST(VfNorm, HandEvaluatedExamples)
{
  const auto lat = make_lattice(1, 3);
  QuadHam P(lat, 3, {0.1, 1.0, 0.0, 0.0});
  EXPECT_EQ(vf_norm(P), 0.0);

  // z_1 zbar_1: both d/dz_1 and d/dzbar_1 contribute 1.
  P[lat->zero()].zzbar(0, 0) = 1.0;
  const auto parts = vf_norm_parts(P, P.analyticity());
  EXPECT_NEAR(parts.z_part, 2.0, EXACT);
  EXPECT_EQ(parts.theta_part, 0.0);

  // Single H11(k0)_{12} = 1 with |k0| = 1: z-part 2 e^{0.1}, theta-part |k0| e^{0.1}.
  QuadHam Q(lat, 3, {0.1, 1.0, 0.0, 0.0});
  Q.at(std::vector<int>{1}).zzbar(0, 1) = 1.0;
  const auto q = vf_norm_parts(Q, Q.analyticity());
  EXPECT_NEAR(q.z_part, 2.0 * std::exp(0.1), EXACT);
  EXPECT_NEAR(q.theta_part, std::exp(0.1), EXACT);
  EXPECT_NEAR(vf_norm(Q), 3.0 * std::exp(0.1), EXACT);
}

TEST(VfNorm, BallRadiusScaling)
{
  const auto lat = make_lattice(1, 2);
  QuadHam P(lat, 2, {0.2, 0.5, 0.0, 0.0});
  P.at(std::vector<int>{1}).zzbar(0, 1) = 1.0;
  const auto parts = vf_norm_parts(P, P.analyticity());
  EXPECT_NEAR(parts.z_part, 0.5 * 2.0 * std::exp(0.2), EXACT);
  EXPECT_NEAR(parts.theta_part, 0.25 * std::exp(0.2), EXACT);
}

TEST(TlSeminorm, ZeroAndHalfWaveDiagonal)
{
  const auto lat = make_lattice(1, 2);
  QuadHam P(lat, 6, {});
  const auto z = tl_seminorm(P, 0.3);
  EXPECT_EQ(z.M1, 0.0);
  EXPECT_EQ(z.M3, 0.0);

  // Constant first off-diagonal 1/2: exactly Toeplitz, so the Lipschitz term vanishes.
  for (int i = 0; i + 1 < 6; ++i)
  {
    P[lat->zero()].zzbar(i, i + 1) = 0.5;
    P[lat->zero()].zzbar(i + 1, i) = 0.5;
  }
  const double rho = 0.3;
  const auto rep = tl_seminorm(P, rho);
  EXPECT_NEAR(rep.M1, 0.5 * std::exp(rho), EXACT);
  EXPECT_EQ(rep.M3, 0.0);
  EXPECT_NEAR(rep.combined(), 0.5 * std::exp(rho), EXACT);
}

TEST(TlSeminorm, MatchesBruteForceOffDiagonalDecay)
{
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ph(0.0, 2.0 * M_PI);
  const auto lat = make_lattice(1, 1);
  const int J = 10;
  const double rho = 0.4;
  QuadHam P(lat, J, {});
  for (int i = 0; i < J; ++i)
  {
    for (int j = 0; j < J; ++j)
    {
      P[lat->zero()].zzbar(i, j) = std::polar(std::exp(-2.0 * rho * std::abs(i - j)), ph(rng));
    }
  }
  double brute = 0.0;
  for (int i = 0; i < J; ++i)
  {
    for (int j = 0; j < J; ++j)
    {
      brute = std::max(brute, std::abs(P[lat->zero()].zzbar(i, j)) * std::exp(rho * std::abs(i - j)));
    }
  }
  const auto rep = tl_seminorm(P, rho);
  EXPECT_NEAR(rep.M1, brute, 1e-14);
  EXPECT_LE(rep.M1, 1.0 + 1e-15);
}

TEST(TlSeminorm, InjectedLimitsOverrideReference)
{
  const auto lat = make_lattice(1, 1);
  const int J = 4;
  QuadHam P(lat, J, {});
  for (int i = 0; i < J; ++i)
  {
    P[lat->zero()].zzbar(i, i) = 1.0 + 1.0 / (i + 1);
  }
  DiagonalLimits lim;
  lim.zzbar.assign(2 * J - 1, Series(lat->size()));
  lim.zzbar[J - 1][lat->zero()] = 1.0;
  // |1/i| * min(i, i) = 1 on every diagonal entry against the true limit 1.
  EXPECT_NEAR(tl_seminorm(P, 0.1, &lim).M3, 1.0, EXACT);
  // Against the deepest entry 1.25 the weighted gaps are 0.75, 0.5, 0.25.
  const double empirical = tl_seminorm(P, 0.1).M3;
  EXPECT_NEAR(empirical, std::max({1.0 * 0.75, 2.0 * 0.25, 3.0 * (1.0 / 3.0 - 0.25)}), EXACT);
}

TEST(PoissonBracket, DefiningSumExample)
{
  // {z_1 zbar_2, z_2 zbar_1} = i sum_k (dR/dz_k dF/dzbar_k - dR/dzbar_k dF/dz_k)
  //                          = i (z_2 zbar_2 - z_1 zbar_1).
  const auto lat = make_lattice(1, 1);
  QuadHam R(lat, 2, {}), F(lat, 2, {});
  R[0].zzbar(0, 1) = 1.0;
  F[0].zzbar(1, 0) = 1.0;
  const auto B = poisson_bracket(R, F);
  EXPECT_NEAR(std::abs(B[0].zzbar(0, 0) - cplx{0.0, -1.0}), 0.0, EXACT);
  EXPECT_NEAR(std::abs(B[0].zzbar(1, 1) - cplx{0.0, 1.0}), 0.0, EXACT);
  EXPECT_EQ(B[0].zzbar(0, 1), cplx{});
  EXPECT_TRUE(B[0].zz.isZero(0.0));
  EXPECT_TRUE(B[0].zbarzbar.isZero(0.0));
}

TEST(PoissonBracket, MatchesHessianOracle)
{
  std::mt19937_64 rng(11);
  const auto lat = make_lattice(2, 4);
  for (int trial = 0; trial < 5; ++trial)
  {
    const auto R = random_tl_ham(lat, 5, 0.3, 2, rng);
    const auto F = random_tl_ham(lat, 5, 0.3, 2, rng);
    EXPECT_LT(max_abs_diff(poisson_bracket(R, F), bracket_oracle(R, F)), 1e-12);
  }
}

TEST(PoissonBracket, AntisymmetryAndSelfBracket)
{
  std::mt19937_64 rng(12);
  const auto lat = make_lattice(1, 4);
  for (int trial = 0; trial < 10; ++trial)
  {
    const auto R = random_tl_ham(lat, 6, 0.3, 2, rng);
    const auto F = random_tl_ham(lat, 6, 0.3, 2, rng);
    EXPECT_LT(max_abs_diff(poisson_bracket(R, F), -1.0 * poisson_bracket(F, R)), EXACT);
    const auto self = poisson_bracket(R, R);
    EXPECT_LT(max_abs_diff(self, QuadHam(lat, 6, {})), EXACT);
  }
}

TEST(PoissonBracket, JacobiIdentity)
{
  std::mt19937_64 rng(13);
  const auto lat = make_lattice(2, 4);
  for (int trial = 0; trial < 10; ++trial)
  {
    const int J = 2 + trial % 7;
    const auto A = random_tl_ham(lat, J, 0.3, 1, rng);
    const auto B = random_tl_ham(lat, J, 0.3, 1, rng);
    const auto C = random_tl_ham(lat, J, 0.3, 1, rng);
    const auto cyc = poisson_bracket(poisson_bracket(A, B), C) + poisson_bracket(poisson_bracket(B, C), A) +
                     poisson_bracket(poisson_bracket(C, A), B);
    EXPECT_EQ(cyc.tail_norm(), 0.0);
    EXPECT_LE(vf_norm(cyc), 1e-10 * vf_norm(A) * vf_norm(B) * vf_norm(C));
  }
}

TEST(PoissonBracket, SupportIsSumOfSupports)
{
  const auto lat = make_lattice(2, 4);
  QuadHam R(lat, 3, {}), F(lat, 3, {});
  R.at(std::vector<int>{1, 0}).zzbar(0, 1) = 1.0;
  F.at(std::vector<int>{0, -2}).zzbar(1, 2) = 1.0;
  F.at(std::vector<int>{0, -2}).zz(1, 1) = 1.0;
  const auto B = poisson_bracket(R, F);
  const auto supp = B.support();
  ASSERT_EQ(supp.size(), 1u);
  EXPECT_EQ(supp[0], lat->index(std::vector<int>{1, -2}));
}

TEST(PoissonBracket, CapacityOverflowGoesToTail)
{
  const auto lat = make_lattice(1, 2);
  QuadHam R(lat, 2, {}), F(lat, 2, {});
  R.at(std::vector<int>{2}).zzbar(0, 1) = 1.0;
  F.at(std::vector<int>{1}).zzbar(1, 0) = 1.0;
  const auto B = poisson_bracket(R, F);
  EXPECT_TRUE(B.is_zero());
  EXPECT_GT(B.tail_norm(), 0.0);
}

TEST(PoissonBracket, PreservesReality)
{
  std::mt19937_64 rng(14);
  const auto lat = make_lattice(2, 4);
  const auto R = random_tl_ham(lat, 5, 0.3, 2, rng);
  const auto F = random_tl_ham(lat, 5, 0.3, 2, rng);
  EXPECT_LT(R.reality_defect(), EXACT);
  EXPECT_LT(poisson_bracket(R, F).reality_defect(), EXACT);
}

TEST(PoissonBracket, DimensionMismatchThrows)
{
  const auto lat = make_lattice(1, 2);
  EXPECT_THROW(poisson_bracket(QuadHam(lat, 2, {}), QuadHam(lat, 3, {})), std::invalid_argument);
}

TEST(PoissonBracket, ToeplitzLipschitzProductBound)
{
  // <{R,F}>_{rho - delta} <= (4 / delta) <R>_rho <F>_rho on random TL-structured pairs.
  std::mt19937_64 rng(15);
  std::uniform_real_distribution<double> dd(0.05, 0.3);
  const auto lat = make_lattice(1, 6);
  const double rho = 0.6;
  for (int trial = 0; trial < 100; ++trial)
  {
    const int J = 4 + trial % 9;
    const auto R = random_tl_ham(lat, J, rho, 3, rng);
    const auto F = random_tl_ham(lat, J, rho, 3, rng);
    const double delta = dd(rng);
    const double lhs = tl_seminorm(poisson_bracket(R, F), rho - delta).combined();
    const double rhs = 4.0 / delta * tl_seminorm(R, rho).combined() * tl_seminorm(F, rho).combined();
    EXPECT_LE(lhs, rhs) << "trial " << trial;
  }
}

TEST(ExponentialSum, BoundedByFourOverDelta)
{
  for (double delta : {0.05, 0.1, 0.2, 0.5, 1.0})
  {
    for (int i = -50; i <= 50; i += 5)
    {
      for (int j = -50; j <= 50; j += 5)
      {
        double s = 0.0;
        for (int k = -10000; k <= 10000; ++k)
        {
          s += std::exp(-delta * (std::abs(i - k) + std::abs(k - j)));
        }
        EXPECT_LE(s, 4.0 / delta) << delta << ' ' << i << ' ' << j;
      }
    }
  }
}

TEST(Truncation, SplitsSupport)
{
  const auto lat = make_lattice(2, 6);
  QuadHam P(lat, 2, {0.5, 1.0, 0.0, 0.0});
  P[lat->zero()].zzbar(0, 0) = 1.0;
  auto t = truncate_fourier(P, 1, 0.1);
  EXPECT_TRUE(t.remainder.is_zero());
  EXPECT_EQ(t.remainder_norm, 0.0);

  QuadHam Q(lat, 2, {0.5, 1.0, 0.0, 0.0});
  Q.at(std::vector<int>{3, -2}).zzbar(0, 1) = 1.0;
  t = truncate_fourier(Q, 3, 0.1);
  EXPECT_TRUE(t.head.is_zero());
  EXPECT_EQ(max_abs_diff(t.remainder, Q), 0.0);
  // Strict cut: |k| = K is discarded.
  QuadHam E(lat, 2, {0.5, 1.0, 0.0, 0.0});
  E.at(std::vector<int>{2, 1}).zzbar(0, 1) = 1.0;
  EXPECT_TRUE(truncate_fourier(E, 3, 0.1).head.is_zero());
  EXPECT_THROW(truncate_fourier(Q, 0, 0.1), DomainError);
  EXPECT_THROW(truncate_fourier(Q, 3, 0.3), DomainError);
}

TEST(Truncation, RemainderWithinBoundAndReal)
{
  std::mt19937_64 rng(16);
  const auto lat = make_lattice(1, 16);
  for (int trial = 0; trial < 20; ++trial)
  {
    Analyticity an{0.8, 1.0, 0.0, 0.0};
    const auto P = random_tl_ham(lat, 5, 0.3, 16, rng, an);
    const double sigma = an.r / 4.0;
    const auto t = truncate_fourier(P, 8, sigma);
    EXPECT_TRUE(t.within_bound);
    EXPECT_LE(t.remainder_norm, 32.0 / (sigma * sigma) * std::exp(-8.0 * sigma) * vf_norm(P));
    EXPECT_LT(t.head.reality_defect(), EXACT);
    EXPECT_LT(t.remainder.reality_defect(), EXACT);
    EXPECT_LT(max_abs_diff(t.head + t.remainder, P), EXACT);
  }
}

TEST(HessianMatrix, LayoutAndNormIdentity)
{
  const auto lat = make_lattice(1, 2);
  QuadHam F(lat, 3, {});
  EXPECT_TRUE(hessian_matrix(F).coef[0].isZero(0.0));

  F[0].zzbar(0, 0) = 1.0;
  const auto A = hessian_matrix(F);
  Matrix expect = Matrix::Zero(6, 6);
  expect(0, 0) = 1.0;
  expect(1, 1) = -1.0;
  EXPECT_EQ((A.coef[0] - expect).cwiseAbs().maxCoeff(), 0.0);
  const auto a = tl_matnorm(A, 0.2, 0.5), b = tl_seminorm(F, 0.2, 0.5);
  EXPECT_EQ(a.M1, b.M1);
  EXPECT_EQ(a.M3, b.M3);
}

TEST(HessianMatrix, NormIdentityOnRandomHamiltonians)
{
  std::mt19937_64 rng(17);
  const auto lat = make_lattice(2, 3);
  for (int trial = 0; trial < 20; ++trial)
  {
    const auto F = random_tl_ham(lat, 3 + trial % 6, 0.4, 3, rng);
    const auto a = tl_matnorm(hessian_matrix(F), 0.4, 0.5);
    const auto b = tl_seminorm(F, 0.4, 0.5);
    EXPECT_NEAR(a.M1, b.M1, 1e-12 * b.M1);
    EXPECT_NEAR(a.M3, b.M3, 1e-12 * b.M3);
  }
}

TEST(HessianMatrix, IsSymplecticUnitTimesZHessian)
{
  std::mt19937_64 rng(18);
  const auto lat = make_lattice(1, 2);
  const auto F = random_tl_ham(lat, 4, 0.3, 2, rng);
  const auto A = hessian_matrix(F);
  const Matrix Jm = symplectic_unit(4);
  for (std::size_t idx = 0; idx < lat->size(); ++idx)
  {
    EXPECT_LT((A.coef[idx] - Jm * z_hessian(F[idx])).cwiseAbs().maxCoeff(), EXACT);
    const auto back = from_z_hessian(z_hessian(F[idx]));
    EXPECT_LT((back.zzbar - F[idx].zzbar).cwiseAbs().maxCoeff(), EXACT);
    EXPECT_LT((back.zz - F[idx].zz).cwiseAbs().maxCoeff(), EXACT);
  }
}

TEST(TlMatrix, IdentityAndProduct)
{
  std::mt19937_64 rng(19);
  const auto lat = make_lattice(1, 4);
  const auto Id = TLMatrix::identity(lat, 4);
  const auto idn = tl_matnorm(Id, 0.3, 0.5);
  EXPECT_EQ(idn.M1, 1.0);
  EXPECT_EQ(idn.M3, 0.0);
  const auto A = hessian_matrix(random_tl_ham(lat, 4, 0.3, 2, rng));
  const auto P = matmul(Id, A, 0.5);
  for (std::size_t i = 0; i < lat->size(); ++i)
  {
    EXPECT_EQ((P.coef[i] - A.coef[i]).cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(TlMatrix, SingleBlockProduct)
{
  const auto lat = make_lattice(1, 2);
  auto A = TLMatrix::zero(lat, 3), B = TLMatrix::zero(lat, 3);
  A.coef[0](0, 3) = 2.0;
  B.coef[0](3, 5) = 3.0;
  const auto C = matmul(A, B, 0.1);
  EXPECT_EQ(C.coef[0](0, 5), cplx(6.0));
  EXPECT_EQ(C.coef[0].cwiseAbs().sum(), 6.0);
}

TEST(TlMatrix, ProductBoundOnRandomMatrices)
{
  std::mt19937_64 rng(20);
  std::uniform_real_distribution<double> dd(0.05, 0.3);
  const auto lat = make_lattice(1, 6);
  const double rho = 0.6, r = 0.5;
  for (int trial = 0; trial < 100; ++trial)
  {
    const int J = 4 + trial % 9;
    const auto A = hessian_matrix(random_tl_ham(lat, J, rho, 3, rng));
    const auto B = hessian_matrix(random_tl_ham(lat, J, rho, 3, rng));
    const double delta = dd(rng);
    const double lhs = tl_matnorm(matmul(A, B, r), rho - delta, r).combined();
    const double rhs =
        4.0 / delta * tl_matnorm(A, rho, r).combined() * tl_matnorm(B, rho, r).combined();
    EXPECT_LE(lhs, rhs) << "trial " << trial;
  }
}

}  // namespace
