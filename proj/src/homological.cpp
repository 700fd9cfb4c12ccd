// SPDX-License-Identifier: Apache-2.0
#include "kamreduce/homological.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "kamreduce/errors.hpp"

namespace kamreduce
{

namespace
{

constexpr cplx I1{0.0, 1.0};

struct Candidate
{
  double magnitude;
  std::size_t k_idx;
  int i, j;
  QuadBlockKind block;
  double divisor, coefficient;
  bool operator<(const Candidate &o) const { return magnitude < o.magnitude; }
};

}  // namespace

const char *to_string(QuadBlockKind b)
{
  switch (b)
  {
    case QuadBlockKind::ZZ:
      return "20";
    case QuadBlockKind::ZZbar:
      return "11";
    case QuadBlockKind::ZbarZbar:
      return "02";
  }
  return "?";
}

HomologicalSolution solve_homological(const NormalForm &N, const QuadHam &R, const SolveOptions &opt)
{
  const int J = R.modes();
  if (N.modes() < J || static_cast<int>(N.omega.size()) != R.dim())
  {
    throw std::invalid_argument("normal form and perturbation dimensions differ");
  }
  if (!(opt.gamma > 0.0))
  {
    throw DomainError("solve needs gamma > 0");
  }
  const auto &lat = R.lattice();
  HomologicalSolution sol{QuadHam(R.lattice_ptr(), J, R.analyticity()), std::vector<double>(J, 0.0), std::numeric_limits<double>::infinity(), {}};
  std::vector<double> Om(J);
  for (int j = 1; j <= J; ++j)
  {
    Om[j - 1] = N.frequency(j);
  }
  std::priority_queue<Candidate> heap;  // max-heap of the `keep` smallest
  auto record = [&](const Candidate &c) {
    if (opt.keep == 0)
    {
      return;
    }
    if (heap.size() < opt.keep)
    {
      heap.push(c);
    }
    else if (c.magnitude < heap.top().magnitude)
    {
      heap.pop();
      heap.push(c);
    }
  };

  for (std::size_t idx = 0; idx < lat.size(); ++idx)
  {
    const auto &Rb = R[idx];
    if (Rb.is_zero())
    {
      continue;
    }
    const int l1 = lat.l1(idx);
    if (l1 >= opt.K)
    {
      throw DomainError("solve needs R = T_K R (support |k| < K)");
    }
    const double threshold = opt.gamma / std::exp(opt.af.log_delta(l1));
    const double kw = dot_compensated(lat.mode(idx), N.omega);
    auto &Fb = sol.F[idx];
    auto divide = [&](const cplx &coef, double d, int i, int j, QuadBlockKind block) -> cplx {
      const double m = std::abs(d) / threshold;
      sol.worst_margin = std::min(sol.worst_margin, m);
      record({std::abs(d), idx, i, j, block, d, std::abs(coef)});
      if (!(m >= 1.0))
      {
        const auto k = lat.mode(idx);
        throw DivisorViolation(std::vector<int>(k.begin(), k.end()), i, j, d, threshold);
      }
      return coef / (I1 * d);
    };
    for (int i = 0; i < J; ++i)
    {
      for (int j = 0; j < J; ++j)
      {
        if (Rb.zz(i, j) != cplx{})
        {
          Fb.zz(i, j) = divide(Rb.zz(i, j), kw + Om[i] + Om[j], i + 1, j + 1, QuadBlockKind::ZZ);
        }
        if (Rb.zbarzbar(i, j) != cplx{})
        {
          Fb.zbarzbar(i, j) =
              divide(Rb.zbarzbar(i, j), kw - Om[i] - Om[j], i + 1, j + 1, QuadBlockKind::ZbarZbar);
        }
        if (Rb.zzbar(i, j) == cplx{})
        {
          continue;
        }
        if (l1 == 0 && i == j)
        {
          sol.correction[i] = Rb.zzbar(i, i).real();  // mean goes to the normal form; [F] = 0
          continue;
        }
        Fb.zzbar(i, j) = divide(Rb.zzbar(i, j), kw + Om[i] - Om[j], i + 1, j + 1, QuadBlockKind::ZZbar);
      }
    }
  }
  sol.smallest.resize(heap.size());
  for (auto it = sol.smallest.rbegin(); it != sol.smallest.rend(); ++it)
  {
    const auto &c = heap.top();
    const auto k = lat.mode(c.k_idx);
    *it = {std::vector<int>(k.begin(), k.end()), c.i, c.j, c.block, c.divisor, c.coefficient};
    heap.pop();
  }
  return sol;
}

QuadHam correction_part(const std::vector<double> &correction, const QuadHam &like)
{
  QuadHam out(like.lattice_ptr(), like.modes(), like.analyticity());
  auto &b = out[like.lattice().zero()];
  for (int j = 0; j < like.modes(); ++j)
  {
    b.zzbar(j, j) = correction[j];
  }
  return out;
}

QuadHam homological_defect(const NormalForm &N, const QuadHam &F, const QuadHam &R,
                           const std::vector<double> &correction)
{
  // {N, F} = -omega . d_theta F + z-bracket(N, F)
  const auto Nq = normal_form_part(N, F.lattice_ptr(), F.analyticity());
  auto out = poisson_bracket(Nq, F);
  out -= angle_derivative(F, N.omega);
  out += R;
  out -= correction_part(correction, R);
  return out;
}

double homological_residual(const NormalForm &N, const QuadHam &F, const QuadHam &R,
                            const std::vector<double> &correction)
{
  return vf_norm(homological_defect(N, F, R, correction));
}

EstimateRatios verify_estimate(const HomologicalSolution &sol, const NormalForm &N, const QuadHam &R,
                               const ApproximationFunction &af, double gamma, double sigma, double rho)
{
  const auto &an = R.analyticity();
  if (!(sigma > 0.0 && 5.0 * sigma < an.r))
  {
    throw DomainError("verify_estimate needs 0 < 5 sigma < r");
  }
  EstimateRatios out;
  double wmax = 0.0;
  for (double w : N.omega)
  {
    wmax = std::max(wmax, std::abs(w));
  }
  out.C0 = static_cast<double>(N.omega.size()) * wmax;
  Analyticity narrow = an;
  narrow.r = an.r - sigma;
  const double rn = vf_norm(R);
  if (rn > 0.0)
  {
    out.vf = vf_norm(sol.F, narrow) / (gamma_ab(af, {1, 2, sigma}) / (gamma * gamma) * rn);
  }
  const double rt = tl_seminorm(R, rho).combined();
  if (rt > 0.0)
  {
    out.tl = tl_seminorm(sol.F, rho, narrow.r).combined() /
             (gamma_ab(af, {1, 3, sigma}) / (gamma * gamma * gamma) * rt);
  }
  return out;
}

}  // namespace kamreduce
