// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <random>

#include "kamreduce/hamrep.hpp"

namespace kamreduce::testing
{

// Seeded inputs for property checks (tests and the selftest command).

// Real quadratic with TL structure: zzbar_ij = (toeplitz(i - j) + u_ij / min(i, j)) e^{-rho|i-j|},
// zz_ij = u_ij e^{-rho(i+j)} / min(i, j), Fourier modes |k|_1 <= radius with e^{-|k|} decay.
inline QuadHam random_tl_ham(const LatticePtr &lat, int J, double rho, int radius, std::mt19937_64 &rng,
                             Analyticity an = {})
{
  std::uniform_real_distribution<double> g(-1.0, 1.0);
  auto c = [&] { return cplx{g(rng), g(rng)}; };
  QuadHam P(lat, J, an);
  std::vector<double> decay(2 * J + 1);
  for (int d = 0; d <= 2 * J; ++d)
  {
    decay[d] = std::exp(-rho * d);
  }
  for (std::size_t idx = 0; idx < lat->size(); ++idx)
  {
    if (lat->l1(idx) > radius)
    {
      continue;
    }
    const double fk = std::exp(-static_cast<double>(lat->l1(idx)));
    std::vector<cplx> toe(2 * J);
    for (auto &t : toe)
    {
      t = c();
    }
    auto &b = P[idx];
    for (int i = 1; i <= J; ++i)
    {
      for (int j = 1; j <= J; ++j)
      {
        const double m = std::min(i, j);
        b.zzbar(i - 1, j - 1) = fk * (toe[i - j + J] + c() / m) * decay[std::abs(i - j)];
        b.zz(i - 1, j - 1) = fk * c() / m * decay[i + j];
        b.zbarzbar(i - 1, j - 1) = fk * c() / m * decay[i + j];
      }
    }
  }
  P.enforce_reality();
  return P;
}

// Independent bracket oracle: with P = (1/2) Z^T S Z the defining sum gives the Hessian
// i (S_R Jm S_F - S_F Jm S_R), convolved over Fourier modes.
inline QuadHam bracket_oracle(const QuadHam &R, const QuadHam &F)
{
  const auto &lat = R.lattice();
  const Matrix Jm = symplectic_unit(R.modes());
  QuadHam out(R.lattice_ptr(), R.modes(), R.analyticity());
  std::vector<Matrix> acc(lat.size(), Matrix::Zero(2 * R.modes(), 2 * R.modes()));
  for (std::size_t a = 0; a < lat.size(); ++a)
  {
    const Matrix Sr = z_hessian(R[a]);
    for (std::size_t b = 0; b < lat.size(); ++b)
    {
      const auto t = lat.sum(a, b);
      if (t == FourierLattice::npos)
      {
        continue;
      }
      const Matrix Sf = z_hessian(F[b]);
      acc[t] += cplx{0.0, 1.0} * (Sr * Jm * Sf - Sf * Jm * Sr);
    }
  }
  for (std::size_t t = 0; t < lat.size(); ++t)
  {
    out[t] = from_z_hessian(acc[t]);
  }
  return out;
}

}  // namespace kamreduce::testing
