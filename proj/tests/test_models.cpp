// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "kamreduce/errors.hpp"
#include "kamreduce/models.hpp"

namespace
{

using namespace kamreduce;

constexpr double PI = std::numbers::pi;

Potential constant_harmonic(const LatticePtr &lat, int j, double c)
{
  Potential V;
  V.lattice = lat;
  V.harmonics.assign(static_cast<std::size_t>(j) + 1, Series(lat->size(), cplx{}));
  V.harmonics[static_cast<std::size_t>(j)][lat->zero()] = c;
  V.declared_bound = V.norm(0.5);
  return V;
}

// Trapezoid rule over the even 2 pi-periodic extension: exact for trig polynomials of
// degree below the node count.
cplx quadrature_coupling(const Potential &V, std::size_t idx, int i, int j)
{
  constexpr int NODES = 512;
  cplx acc{};
  for (int q = 0; q < NODES; ++q)
  {
    const double x = 2.0 * PI * q / NODES;
    cplx v{};
    for (int l = 0; l <= V.degree(); ++l)
    {
      v += V.harmonics[static_cast<std::size_t>(l)][idx] * std::cos(l * x);
    }
    acc += v * (2.0 / PI) * std::sin(i * x) * std::sin(j * x);
  }
  return 0.5 * acc * (2.0 * PI / NODES);
}

TEST(Potential, PresetNormsAndReality)
{
  const auto lat = make_lattice(1, 4);
  const auto V = single_cosine(lat, 1.0, 0.25, 1.0, 0.5);
  // j = 1: 1^1 e^{0.5} (1 + 2 * 0.5 e^{1})
  EXPECT_NEAR(V.norm(0.5), std::exp(0.5) * (1.0 + std::exp(1.0)), 1e-14);
  EXPECT_EQ(V.reality_defect(), 0.0);
  const auto R = random_analytic(lat, 0.7, 0.25, 1.0, 0.5, 12, 3, 99);
  EXPECT_NEAR(R.norm(0.5), 0.7, 1e-14);
  EXPECT_EQ(R.reality_defect(), 0.0);
  const auto R2 = random_analytic(lat, 0.7, 0.25, 1.0, 0.5, 12, 3, 99);
  EXPECT_EQ(R.harmonics, R2.harmonics);
  const auto G = geometric_potential(lat, 1.0, 0.25, 1.0, 20);
  EXPECT_EQ(G.harmonic(0)[lat->zero()], cplx{});
  EXPECT_NEAR(G.harmonic(3)[lat->zero()].real(), std::exp(-1.5) / 3.0, 1e-16);
}

TEST(Dirichlet, ClosedFormMatchesQuadrature)
{
  const auto lat = make_lattice(2, 3);
  const auto V = random_analytic(lat, 1.0, 0.2, 1.0, 0.5, 40, 3, 7);
  for (int i = 1; i <= 18; i += 3)
  {
    for (int j = 1; j <= 18; j += 2)
    {
      const auto p = dirichlet_coupling(V, i, j);
      for (std::size_t idx = 0; idx < lat->size(); idx += 5)
      {
        EXPECT_LT(std::abs(p[idx] - quadrature_coupling(V, idx, i, j)), 1e-14) << i << ' ' << j;
      }
    }
  }
}

TEST(Models, ZeroPotentialGivesPureNormalForm)
{
  const auto lat = make_lattice(1, 2);
  const auto V = constant_harmonic(lat, 0, 0.0);
  const auto w = wave_hamiltonian(1.0, 1e-3, V, 6, {}, {1.0});
  const auto h = halfwave_hamiltonian(1e-3, V, 6, {}, {1.0});
  EXPECT_TRUE(w.P.is_zero());
  EXPECT_TRUE(h.P.is_zero());
  for (const auto &m : {w, h})
  {
    const auto rep = verify_assumptions(m.N.shift_bound > 1.0 ? ModelKind::Wave : ModelKind::HalfWave, m, V,
                                        1e-3, 0.5);
    EXPECT_TRUE(rep.pass());
    for (const auto &c : rep.checks)
    {
      if (c.name.starts_with("A3") || c.name.starts_with("A4"))
      {
        EXPECT_EQ(c.value, 0.0);
      }
    }
  }
}

TEST(Models, WaveSingleHarmonicCouplings)
{
  const auto lat = make_lattice(1, 2);
  const double eps = 1e-3;
  const auto w = wave_hamiltonian(0.0, eps, constant_harmonic(lat, 1, 1.0), 8, {}, {1.0});
  const auto &b = w.P[lat->zero()];
  for (int i = 0; i + 1 < 8; ++i)
  {
    EXPECT_EQ(b.zzbar(i, i + 1), cplx(0.5 * eps));
    EXPECT_EQ(b.zz(i, i + 1), cplx(0.25 * eps));
    EXPECT_EQ(b.zzbar(i, i), cplx{});
    if (i + 2 < 8)
    {
      EXPECT_EQ(b.zzbar(i, i + 2), cplx{});
    }
  }
  for (double s : w.N.shift)
  {
    EXPECT_EQ(s, 0.0);
  }
}

TEST(Models, WaveMassShift)
{
  const auto lat = make_lattice(1, 1);
  const auto w = wave_hamiltonian(1.0, 0.0, constant_harmonic(lat, 0, 0.0), 400, {}, {1.0});
  EXPECT_NEAR(w.N.shift[0], 0.41421356237309515, 1e-16);
  EXPECT_NEAR(w.N.shift[399] * 2.0 * 400.0, 1.0, 1e-5);
  EXPECT_EQ(w.N.shift_bound, 2.0);
}

TEST(Models, HalfWaveSecondHarmonic)
{
  const auto lat = make_lattice(1, 1);
  const auto h = halfwave_hamiltonian(1.0, constant_harmonic(lat, 2, 1.0), 5, {}, {1.0});
  const auto &b = h.P[lat->zero()];
  EXPECT_EQ(b.zzbar(0, 0), cplx(-0.5));
  EXPECT_EQ(b.zzbar(0, 2), cplx(0.5));
  EXPECT_EQ(b.zzbar(1, 1), cplx{});
  EXPECT_TRUE(b.zz.isZero(0.0));
  EXPECT_TRUE(b.zbarzbar.isZero(0.0));
  for (double s : h.N.shift)
  {
    EXPECT_EQ(s, 0.0);
  }
}

TEST(Models, StructuralInvariantsOnRandomPotentials)
{
  const auto lat = make_lattice(2, 3);
  for (std::uint64_t seed = 0; seed < 10; ++seed)
  {
    const auto V = random_analytic(lat, 1.0, 0.3, 1.0, 0.5, 10, 3, seed);
    const int J = 12;
    const auto w = wave_hamiltonian(0.5, 1e-2, V, J, {}, {1.0, 1.5});
    EXPECT_EQ(w.warnings.size(), 1u);
    EXPECT_LE(w.P.reality_defect(), 1e-16);
    for (std::size_t idx = 0; idx < lat->size(); ++idx)
    {
      const auto &b = w.P[idx];
      EXPECT_TRUE((2.0 * b.zz).isApprox(b.zzbar, 0.0) || b.zzbar.isZero(0.0));
      EXPECT_TRUE(b.zz.isApprox(b.zbarzbar, 0.0) || b.zz.isZero(0.0));
      EXPECT_TRUE(b.zzbar.isApprox(b.zzbar.transpose(), 0.0) || b.zzbar.isZero(0.0));
      // Beyond the potential's degree every diagonal is constant and equals the limit.
      for (int d = -3; d <= 3; ++d)
      {
        const cplx lim = w.limits.zzbar[static_cast<std::size_t>(d + J - 1)][idx];
        for (int i = 1; i <= J; ++i)
        {
          const int j = i - d;
          if (j >= 1 && j <= J && i + j > V.degree())
          {
            EXPECT_EQ(b.zzbar(i - 1, j - 1), lim);
          }
        }
      }
    }
  }
}

TEST(Assumptions, WaveCosineExample)
{
  const auto lat = make_lattice(1, 2);
  auto V = constant_harmonic(lat, 1, 1.0);
  V.a = 0.25;
  V.p = 1.0;
  const auto w = wave_hamiltonian(1.0, 1e-3, V, 32, {0.5, 1.0, 0.25, 1.0}, {1.0});
  const auto rep = verify_assumptions(ModelKind::Wave, w, V, 1e-3, 0.5);
  const double vf = vf_norm(w.P, w.P.analyticity());
  EXPECT_LE(vf, (4.0 + 12.0 + 36.0) * 1.0 * 1e-3);
  EXPECT_NEAR(rep.C_V, std::exp(0.5), 1e-15);
  ASSERT_EQ(rep.checks.size(), 5u);
  EXPECT_TRUE(rep.checks[1].pass());  // A1
  EXPECT_TRUE(rep.checks[3].pass());  // A3 with 16
  EXPECT_DOUBLE_EQ(rep.checks[2].bound + 4.0 * rep.C_V * 1e-3, rep.checks[3].bound);
  // The z z block does not decay like e^{-2a(i+j)} near the diagonal, so the TL check at
  // rho = 2a fails for J = 32.
  EXPECT_FALSE(rep.checks[4].pass());
  EXPECT_FALSE(rep.pass());
}

TEST(Assumptions, HalfWaveCosinePasses)
{
  const auto lat = make_lattice(1, 4);
  const auto V = single_cosine(lat, 1.0);
  const auto h = halfwave_hamiltonian(1e-3, V, 32, {0.5, 1.0, 0.25, 1.0}, {1.0});
  const auto rep = verify_assumptions(ModelKind::HalfWave, h, V, 1e-3, 0.5);
  EXPECT_TRUE(rep.pass());
  for (const auto &c : rep.checks)
  {
    EXPECT_TRUE(c.pass()) << c.name << ' ' << c.value << ' ' << c.bound;
  }
  // Every zzbar diagonal equals its limit, so only the decay term contributes.
  EXPECT_EQ(tl_seminorm(h.P, 0.5, &h.limits).M3, 0.0);
}

TEST(Models, RejectsBadArguments)
{
  const auto lat = make_lattice(1, 1);
  const auto V = constant_harmonic(lat, 1, 1.0);
  EXPECT_THROW(wave_hamiltonian(1.0, 1e-3, V, 1, {}, {1.0}), DomainError);
  EXPECT_THROW(wave_hamiltonian(-1.0, 1e-3, V, 4, {}, {1.0}), DomainError);
  EXPECT_THROW(halfwave_hamiltonian(1e-3, V, 4, {}, {1.0, 2.0}), DomainError);
  EXPECT_THROW(dirichlet_coupling(V, 0, 1), DomainError);
}

}  // namespace
