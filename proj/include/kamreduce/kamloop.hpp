// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kamreduce/approxfn.hpp"
#include "kamreduce/flow.hpp"
#include "kamreduce/hamrep.hpp"
#include "kamreduce/homological.hpp"

namespace kamreduce
{

struct ScheduleParams
{
  double gamma0 = 0.1;
  double rho0 = 0.02;
  double r0 = 0.5;
  double s0 = 1.0;
  double sigma_total = 0.08;  // 6 sigma < r0
  double kappa = 4.0 / 3.0;
  double C_star = 2.0;
  double eps0 = 1e-3;
  ApproximationFunction af = ApproximationFunction::power(0.5);
  int nu_max = 8;
  int K0 = 8;
  int K_cap = 16;               // lattice capacity; K_used never exceeds it
  std::optional<double> T;      // xi_auto_T when empty
  bool strict_gate = false;     // throw when eps0 fails the smallness gate
};

// Sequences indexed by nu. Gamma_nu and eps_nu are kept as logs: Gamma_23 overflows
// double range for every sigma the schedule produces with non-constant Delta.
struct KamSchedule
{
  ScheduleParams params;
  XiSchedule xi;
  std::vector<double> gamma;
  std::vector<double> delta;
  std::vector<double> rho;
  std::vector<double> sigma;
  std::vector<double> log_Gamma;
  std::vector<double> log_eps;
  std::vector<int> K_sched;  // from C* e^{-K sigma} = Gamma eps^{1/2}, at least 1
  std::vector<int> K_used;   // min(K_cap, max(K0, K_sched))
  std::vector<double> r;
  std::vector<double> s;
  double gate_main = 0.0;  // min{gamma0/4 (sqrt Delta(1) - 1), (C* gamma0 2^5)^{3/2}}
  double gate_strict = 0.0;    // min{(C* gamma0 2^5)^{3/2}, delta0^12, (gamma0 delta0)^{9/2}}
  bool gate_ok = false;       // eps0 below gate_main

  int steps() const { return static_cast<int>(gamma.size()); }
};

// Throws InfeasibleScheduleError from the xi schedule, DomainError on bad parameters or a
// failed smallness gate under strict_gate.
KamSchedule build_schedule(const ScheduleParams &p);

// ||X_P||_r + <P>_{rho, r}, the implemented [P].
double perturbation_size(const QuadHam &P, double rho, double r, const DiagonalLimits *limits = nullptr);

struct StepOptions
{
  std::optional<AngleGrid> grid;
  double flow_tol = 1e-12;
  // Flow gate ||X_F|| + <F> < constant * sigma_nu. The ratio is always reported; the flow
  // is exact for any F, so the gate only aborts when enforce_gate is set.
  std::optional<double> gate_constant = 0.25;
  bool enforce_gate = false;
  bool scan_divisors = true;  // full min_margin scan before solving
  double A2 = 1.0;
  bool record_timing = false;
};

struct StepReport
{
  int nu = 0;
  bool stepped = true;
  double P_vf = 0.0;
  double P_tl = 0.0;
  double P_size = 0.0;       // [P_nu]
  double next_vf = 0.0;
  double next_tl = 0.0;
  double next_size = 0.0;    // [P_{nu+1}]
  int K = 0;
  double gamma = 0.0;
  double worst_margin = 0.0;
  double phi_dev = 0.0;      // max over the grid of the weighted l1 operator norm of L - I
  double omega_update = 0.0; // max_j |Omega_hat_j|
  double tail_norm = 0.0;
  double tail_growth = 0.0;
  double gate_ratio = 0.0;   // generator size / (constant sigma)
  double symplectic_defect = 0.0;
  double flow_error = 0.0;
  double wall_ms = 0.0;
};

struct StepResult
{
  Hamiltonian H;
  SymplecticMap map;
  StepReport report;
};

// Truncate, solve, flow, transform and update the normal form. The incoming P is read on
// the strip r_nu; the outgoing P carries r_{nu+1}.
StepResult kam_step(const Hamiltonian &H, const KamSchedule &sched, int nu, const StepOptions &opt = {},
                    const DiagonalLimits *limits = nullptr);

struct ReduceOptions
{
  int nu_max = 8;
  double stop_tol = 1e-12;
  StepOptions step;
};

struct ReduceResult
{
  NormalForm N;
  QuadHam P;
  std::vector<SymplecticMap> chain;
  std::vector<StepReport> table;
  bool converged = false;
};

// Iterates kam_step until [P_nu] < stop_tol or nu_max steps. limits0 are the analytic
// diagonal limits of P_0 (used for the nu = 0 TL seminorm only).
ReduceResult reduce(const Hamiltonian &H0, const KamSchedule &sched, const ReduceOptions &opt = {},
                    const DiagonalLimits *limits0 = nullptr);

// Phi_1 o Phi_2 o ...: L = L_1 L_2 ..., M accumulated by pullback. Throws DomainError on an
// empty chain or a grid mismatch.
SymplecticMap compose_transform(const std::vector<SymplecticMap> &chain);

// log [P_{nu+1}] / log [P_nu] for each performed step.
std::vector<double> contraction_ratios(const std::vector<StepReport> &table);

}  // namespace kamreduce
