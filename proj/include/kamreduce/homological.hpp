// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <limits>
#include <vector>

#include "kamreduce/approxfn.hpp"
#include "kamreduce/hamrep.hpp"
#include "kamreduce/smalldiv.hpp"

namespace kamreduce
{

enum class QuadBlockKind
{
  ZZ,        // z_i z_j
  ZZbar,     // z_i zbar_j
  ZbarZbar   // zbar_i zbar_j
};

const char *to_string(QuadBlockKind b);

struct DivisorRecord
{
  std::vector<int> k;
  int i = 0;
  int j = 0;
  QuadBlockKind block = QuadBlockKind::ZZbar;
  double divisor = 0.0;      // signed: k.omega + Omega_i +- Omega_j
  double coefficient = 0.0;  // |R coefficient|
};

struct HomologicalSolution
{
  QuadHam F;
  std::vector<double> correction;  // theta-means of the diagonal R^{11}_{jj}
  double worst_margin = std::numeric_limits<double>::infinity();  // min |d| Delta(|k|) / gamma
  std::vector<DivisorRecord> smallest;  // up to `keep` smallest touched divisors, ascending
};

struct SolveOptions
{
  ApproximationFunction af = ApproximationFunction::constant();
  double gamma = 0.1;
  int K = 8;  // R must vanish for |k|_1 >= K
  std::size_t keep = 100;
};

// {N, F} + R = N_hat with [F] = 0. Throws DivisorViolation on any touched divisor below
// gamma / Delta(|k|).
HomologicalSolution solve_homological(const NormalForm &N, const QuadHam &R, const SolveOptions &opt);

// N_hat = sum_j correction_j z_j zbar_j at k = 0.
QuadHam correction_part(const std::vector<double> &correction, const QuadHam &like);

// {N, F} + R - N_hat assembled from the bracket and the angle derivative.
QuadHam homological_defect(const NormalForm &N, const QuadHam &F, const QuadHam &R,
                           const std::vector<double> &correction);
double homological_residual(const NormalForm &N, const QuadHam &F, const QuadHam &R,
                            const std::vector<double> &correction);

struct EstimateRatios
{
  double vf = 0.0;  // ||X_F||_{r - sigma} / (gamma^-2 Gamma_12(sigma) ||X_R||_r)
  double tl = 0.0;  // <F>_{rho, r - sigma} / (gamma^-3 Gamma_13(sigma) <R>_rho)
  double C0 = 0.0;  // n |omega|_inf + 2 sup |d shift / d omega| (0 for fixed spectra)
  bool within() const { return vf <= 1.0 + C0 && tl <= 1.0 + C0; }
};

EstimateRatios verify_estimate(const HomologicalSolution &sol, const NormalForm &N, const QuadHam &R,
                               const ApproximationFunction &af, double gamma, double sigma, double rho);

}  // namespace kamreduce
