// SPDX-License-Identifier: Apache-2.0
#include "kamreduce/kamloop.hpp"

#include <algorithm>
#include <chrono>
#include <climits>
#include <cmath>
#include <sstream>

#include "kamreduce/errors.hpp"
#include "kamreduce/smalldiv.hpp"

namespace kamreduce
{

namespace
{

constexpr double EPS_FLOOR = 1e-15;

template <class T>
const T &clamped(const std::vector<T> &v, int nu)
{
  return v[static_cast<std::size_t>(std::min<int>(nu, static_cast<int>(v.size()) - 1))];
}

// max over grid points of the l1-induced norm of W (L - I) W^-1, W = diag(w_j) on both
// interleaved components of mode j.
double weighted_deviation(const SymplecticMap &map, const Analyticity &an)
{
  const int n = 2 * map.modes;
  std::vector<double> w(static_cast<std::size_t>(n));
  for (int j = 1; j <= map.modes; ++j)
  {
    w[static_cast<std::size_t>(2 * j - 2)] = w[static_cast<std::size_t>(2 * j - 1)] = an.weight(j);
  }
  double worst = 0.0;
  for (const auto &B : map.B)
  {
    for (int c = 0; c < n; ++c)
    {
      double col = 0.0;
      for (int r = 0; r < n; ++r)
      {
        col += std::abs(B(r, c)) * w[static_cast<std::size_t>(r)] / w[static_cast<std::size_t>(c)];
      }
      worst = std::max(worst, col);
    }
  }
  return worst;
}

QuadHam on_strip(QuadHam P, double r)
{
  auto an = P.analyticity();
  an.r = r;
  P.set_analyticity(an);
  return P;
}

}  // namespace

KamSchedule build_schedule(const ScheduleParams &p)
{
  if (!(p.gamma0 > 0.0) || !(p.rho0 > 0.0) || !(p.r0 > 0.0) || !(p.s0 > 0.0) || !(p.eps0 >= 0.0) ||
      !(p.C_star > 0.0) || !(p.kappa > 1.0) || p.nu_max < 1 || p.K0 < 1 || p.K_cap < 1)
  {
    throw DomainError("schedule parameters out of range");
  }
  if (!(6.0 * p.sigma_total < p.r0) || !(p.sigma_total > 0.0))
  {
    throw DomainError("schedule needs 0 < 6 sigma < r0");
  }
  KamSchedule s;
  s.params = p;
  const double T = p.T ? *p.T : xi_auto_T(p.af, p.sigma_total, p.kappa);
  s.xi = xi_schedule(p.af, p.sigma_total, p.kappa, T);

  const double delta0 = p.rho0 / 16.0;
  const double g5 = std::pow(p.C_star * p.gamma0 * 32.0, 1.5);
  s.gate_main = std::min(0.25 * p.gamma0 * (std::sqrt(eval_delta(p.af, 1.0)) - 1.0), g5);
  s.gate_strict = std::min({g5, std::pow(delta0, 12.0), std::pow(p.gamma0 * delta0, 4.5)});
  s.gate_ok = p.eps0 < s.gate_main;
  if (p.strict_gate && !s.gate_ok)
  {
    std::ostringstream msg;
    msg << "eps0 = " << p.eps0 << " fails the smallness gate " << s.gate_main;
    throw DomainError(msg.str());
  }

  double rho = p.rho0, r = p.r0, sv = p.s0, sigma_sum = 0.0;
  double log_eps = p.eps0 > 0.0 ? std::log(p.eps0) : -INFINITY;
  for (int nu = 0; nu <= p.nu_max; ++nu)
  {
    const double sigma = clamped(s.xi.sigma, nu);
    const double gamma = 0.5 * p.gamma0 * (1.0 + std::ldexp(1.0, -nu));
    const double delta = std::ldexp(p.rho0, -(nu + 4));
    const double log_G = std::log(2.0 * p.C_star) + log_gamma_ab(p.af, {2, 3, sigma}).log_value;
    // C* e^{-K sigma} = Gamma eps^{1/2}
    const double k_real = (std::log(p.C_star) - log_G - 0.5 * log_eps) / sigma;
    const int K = !std::isfinite(k_real) || k_real > INT_MAX / 2 ? INT_MAX / 2
                                                                 : std::max(1, static_cast<int>(std::ceil(k_real)));
    s.gamma.push_back(gamma);
    s.delta.push_back(delta);
    s.rho.push_back(rho);
    s.sigma.push_back(sigma);
    s.log_Gamma.push_back(log_G);
    s.log_eps.push_back(log_eps);
    s.K_sched.push_back(K);
    s.K_used.push_back(std::min(p.K_cap, std::max(p.K0, K)));
    s.r.push_back(r);
    s.s.push_back(sv);
    if (log_eps < std::log(EPS_FLOOR))
    {
      break;
    }
    rho -= 4.0 * delta;
    sigma_sum += sigma;
    r = p.r0 - 3.0 * sigma_sum;
    sv *= 0.25;
    log_eps = log_G + p.kappa * log_eps;
  }
  return s;
}

double perturbation_size(const QuadHam &P, double rho, double r, const DiagonalLimits *limits)
{
  auto an = P.analyticity();
  an.r = r;
  return vf_norm(P, an) + tl_seminorm(P, rho, r, limits).combined();
}

StepResult kam_step(const Hamiltonian &H, const KamSchedule &sched, int nu, const StepOptions &opt,
                    const DiagonalLimits *limits)
{
  if (nu < 0 || nu >= sched.steps())
  {
    throw DomainError("step index outside the schedule");
  }
  const auto t0 = std::chrono::steady_clock::now();
  const auto i = static_cast<std::size_t>(nu);
  const int K = sched.K_used[i];
  const double sigma = sched.sigma[i], gamma = sched.gamma[i], rho = sched.rho[i], r = sched.r[i];
  const double r_next = i + 1 < sched.r.size() ? sched.r[i + 1] : r - 3.0 * sigma;
  const auto &af = sched.params.af;

  StepReport rep;
  rep.nu = nu;
  rep.K = K;
  rep.gamma = gamma;
  const QuadHam P = on_strip(H.P, r);
  rep.P_vf = vf_norm(P);
  rep.P_tl = tl_seminorm(P, rho, r, limits).combined();
  rep.P_size = rep.P_vf + rep.P_tl;
  rep.worst_margin = std::numeric_limits<double>::infinity();

  if (opt.scan_divisors)
  {
    const ResonanceQuery q{af, gamma, K, P.modes(), opt.A2};
    const auto m = min_margin(H.N.omega, H.N, q);
    rep.worst_margin = m.worst;
    if (!m.nonresonant())
    {
      int l1 = 0;
      for (int k : m.argmin.k)
      {
        l1 += std::abs(k);
      }
      throw DivisorViolation(m.argmin.k, m.argmin.i, m.argmin.j, std::abs(m.divisor),
                             gamma / std::exp(af.log_delta(l1)));
    }
  }

  const auto trunc = truncate_fourier(P, K, sigma);
  const auto sol = solve_homological(H.N, trunc.head, {af, gamma, K, 100});
  rep.worst_margin = std::min(rep.worst_margin, sol.worst_margin);

  FlowOptions fo;
  fo.grid = opt.grid;
  fo.tol = opt.flow_tol;
  if (opt.gate_constant)
  {
    if (opt.enforce_gate)
    {
      fo.gate = FlowGate{sigma, rho, *opt.gate_constant};
    }
    auto narrow = sol.F.analyticity();
    narrow.r -= sigma;
    rep.gate_ratio = (vf_norm(sol.F, narrow) + tl_seminorm(sol.F, rho, narrow.r).combined()) /
                     (*opt.gate_constant * sigma);
  }
  auto map = flow_map(sol.F, fo);

  auto Hp = transform_flow({H.N, P}, map);
  for (int j = 0; j < Hp.N.modes(); ++j)
  {
    const double c = sol.correction[static_cast<std::size_t>(j)];
    Hp.N.shift[static_cast<std::size_t>(j)] += c;
    rep.omega_update = std::max(rep.omega_update, std::abs(c));
  }
  Hp.P -= correction_part(sol.correction, Hp.P);
  Hp.P = on_strip(std::move(Hp.P), r_next);

  const double rho_next = i + 1 < sched.rho.size() ? sched.rho[i + 1] : rho - 4.0 * sched.delta[i];
  rep.next_vf = vf_norm(Hp.P);
  rep.next_tl = tl_seminorm(Hp.P, rho_next, r_next).combined();
  rep.next_size = rep.next_vf + rep.next_tl;
  rep.phi_dev = weighted_deviation(map, P.analyticity());
  rep.tail_norm = Hp.P.tail_norm();
  rep.tail_growth = std::max(0.0, Hp.P.tail_norm() - P.tail_norm());
  rep.symplectic_defect = map.symplectic_defect();
  rep.flow_error = map.error_estimate;
  if (opt.record_timing)
  {
    rep.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  }
  return {std::move(Hp), std::move(map), rep};
}

ReduceResult reduce(const Hamiltonian &H0, const KamSchedule &sched, const ReduceOptions &opt,
                    const DiagonalLimits *limits0)
{
  ReduceResult out{H0.N, H0.P, {}, {}, false};
  const int last = std::min(opt.nu_max, sched.steps());
  for (int nu = 0; nu < last; ++nu)
  {
    const auto i = static_cast<std::size_t>(nu);
    const DiagonalLimits *lim = nu == 0 ? limits0 : nullptr;
    const double size = perturbation_size(out.P, sched.rho[i], sched.r[i], lim);
    if (size < opt.stop_tol)
    {
      out.converged = true;
      if (out.table.empty())
      {
        StepReport idle;
        idle.stepped = false;
        idle.P_size = idle.next_size = size;
        out.table.push_back(idle);
      }
      return out;
    }
    auto step = kam_step({out.N, out.P}, sched, nu, opt.step, lim);
    out.N = std::move(step.H.N);
    out.P = std::move(step.H.P);
    out.chain.push_back(std::move(step.map));
    out.table.push_back(step.report);
  }
  out.converged = !out.table.empty() && out.table.back().next_size < opt.stop_tol;
  return out;
}

SymplecticMap compose_transform(const std::vector<SymplecticMap> &chain)
{
  if (chain.empty())
  {
    throw DomainError("compose_transform needs a non-empty chain");
  }
  SymplecticMap out = chain.front();
  out.B2.clear();
  out.M2.clear();
  out.generator.reset();
  for (std::size_t c = 1; c < chain.size(); ++c)
  {
    const auto &next = chain[c];
    if (!(next.grid == out.grid) || next.modes != out.modes)
    {
      throw DomainError("compose_transform: grid or mode mismatch");
    }
    for (std::size_t g = 0; g < out.L.size(); ++g)
    {
      // (Phi_a o Phi_b): L = L_a L_b, M = M_b + L_b^T M_a L_b.
      for (std::size_t h = 0; h < out.M[g].size(); ++h)
      {
        Matrix m = next.M[g][h] + next.L[g].transpose() * out.M[g][h] * next.L[g];
        out.M[g][h] = 0.5 * (m + m.transpose());
      }
      out.B[g] = (out.B[g] + next.B[g] + out.B[g] * next.B[g]).eval();
      out.L[g] = out.L[g] * next.L[g];
    }
    out.error_estimate += next.error_estimate;
  }
  return out;
}

std::vector<double> contraction_ratios(const std::vector<StepReport> &table)
{
  std::vector<double> out;
  for (const auto &r : table)
  {
    if (r.stepped)
    {
      out.push_back(std::log(r.next_size) / std::log(r.P_size));
    }
  }
  return out;
}

}  // namespace kamreduce
