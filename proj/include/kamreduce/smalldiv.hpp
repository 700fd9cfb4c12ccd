// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "kamreduce/approxfn.hpp"
#include "kamreduce/hamrep.hpp"

namespace kamreduce
{

struct ResonanceQuery
{
  ApproximationFunction af = ApproximationFunction::constant();
  double gamma = 0.1;
  int K = 8;
  int J = 32;
  double A2 = 1.0;  // "minus" pairs restricted to |i - j| <= A2 |k|
};

enum class DivisorType
{
  Frequency,  // k . omega
  Plus,       // k . omega + Omega_i + Omega_j
  Minus       // k . omega + Omega_i - Omega_j
};

std::string to_string(DivisorType t);

struct DivisorSite
{
  std::vector<int> k;
  int i = 0;  // 1-based, 0 for the frequency family
  int j = 0;
  DivisorType type = DivisorType::Frequency;
};

// Smallest |divisor| Delta(|k|) over the checked families; independent of gamma.
struct DivisorScan
{
  double value = std::numeric_limits<double>::infinity();
  double divisor = 0.0;  // signed divisor at the argmin
  DivisorSite site;
};

// Exact minimum (nearest-neighbour search when Omega is increasing, exhaustive otherwise).
// Stops as soon as the running minimum drops below stop_below.
DivisorScan scan_divisors(std::span<const double> omega, const NormalForm &N, const ResonanceQuery &q,
                          double stop_below = -std::numeric_limits<double>::infinity());

// Reference implementation: plain enumeration of every divisor.
DivisorScan scan_divisors_exhaustive(std::span<const double> omega, const NormalForm &N,
                                     const ResonanceQuery &q);

struct MarginReport
{
  double worst = std::numeric_limits<double>::infinity();  // min |divisor| Delta(|k|) / gamma
  double divisor = 0.0;
  DivisorSite argmin;
  bool nonresonant() const { return worst >= 1.0; }
};

MarginReport min_margin(std::span<const double> omega, const NormalForm &N, const ResonanceQuery &q);

// A2 = (1 + 2 A1 + 2 A0) / A1 with A1 the smallest gap slope |Omega_i - Omega_j| / |i - j|.
double gap_slope(const NormalForm &N);
double pair_range_constant(const NormalForm &N);

using NormalFormBuilder = std::function<NormalForm(std::span<const double>)>;

// Grid midpoints 2 pi (m + 1/2) / grid per dimension.
std::vector<double> parameter_grid(int grid);

// Fraction of grid samples with min_margin < 1, one entry per gamma (gamma in q is ignored).
// Samples are independent; threads > 1 splits the grid.
std::vector<double> excluded_fractions(const ResonanceQuery &q, std::span<const double> gammas,
                                       const NormalFormBuilder &builder, int dim, int grid,
                                       int threads = 1);
double excluded_fraction(const ResonanceQuery &q, const NormalFormBuilder &builder, int dim, int grid,
                         int threads = 1);

// Union of the exclusion strips over all divisors, as a fraction of [0, 2pi)^dim. Needs an
// omega-independent normal form.
double union_bound(const ResonanceQuery &q, const NormalForm &N, int dim);

struct SlopeFit
{
  double slope = 0.0;
  double intercept = 0.0;
  int points = 0;
};

// Least-squares fit of log fraction against log gamma over entries with fraction > 0.
SlopeFit fit_loglog(std::span<const double> gammas, std::span<const double> fractions);

struct RussmannReport
{
  double measured = 0.0;  // length of {|f| <= eps} on the grid
  double bound = 0.0;     // 4 (q! eps / (2 beta))^{1/q}
  double slack = 0.0;     // grid resolution
  bool precondition_verified = false;  // |f^(q)| >= beta on every grid point
  bool holds() const { return measured <= bound + slack; }
};

RussmannReport russmann_check(const std::function<double(double)> &f, double a, double b, int q,
                              double beta, double eps, int samples);

}  // namespace kamreduce
