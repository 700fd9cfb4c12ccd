// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <ostream>
#include <vector>

#include <Eigen/Dense>

#include "kamreduce/flow.hpp"
#include "kamreduce/hamrep.hpp"

namespace kamreduce
{

using State = Eigen::VectorXcd;  // interleaved (z_1, zbar_1, ..., z_J, zbar_J)

struct Trajectory
{
  std::vector<double> times;
  std::vector<State> states;
  std::vector<double> norms;       // ||z(t)||_{a,p} = sum_j e^{a j} j^p |z_j|
  double conjugate_defect = 0.0;   // max_t max_j |zbar_j - conj(z_j)| / ||z(0)||_{a,p}
  double energy_drift = 0.0;       // direct runs: max_t |E_N(t) - E_N(0)| / E_N(0), E_N = sum_j Omega_j |z_j|^2
  double modulus_drift = 0.0;      // reduced runs: max_t max_j ||Z_j(t)| - |Z_j(0)||
  double interpolation_error = 0.0;
  bool unstable = false;           // direct runs: stopped at norm > blowup * initial
  bool interpolation_flag = false; // reduced runs: grid interpolant off by more than its tolerance
  double dt = 0.0;
};

// ||z||_{a,p} over the z components of an interleaved state.
double state_norm(const State &Z, const Analyticity &an);

// Real initial data: zbar = conj(z).
State real_state(const std::vector<cplx> &z);

struct DirectOptions
{
  double T = 100.0;
  int samples = 1000;               // recorded at t = s T / samples
  double dt_factor = 0.02;          // dt <= dt_factor / (J + max Omega), and T / dt an integer
  std::optional<double> dt;         // explicit step; must satisfy dt <= 0.1 / (J + max Omega)
  double blowup = 1e6;
  int resync = 64;                  // half steps between exact phase resynchronisation
  Analyticity an;
};

// Classical RK4 on dZ/dt = i J_m (S_N + S_P(omega t)) Z. The theta dependence enters through
// per-axis phases advanced by fixed increments e^{i omega_d dt / 2}. Throws DomainError on a
// step above the stability bound or a mismatched state size.
Trajectory integrate_direct(const NormalForm &N, const QuadHam &P, const State &z0, const DirectOptions &opt = {});

struct ReducedOptions
{
  double T = 100.0;
  int samples = 1000;
  int probes = 8;                   // off-grid angles compared against the exact chain product
  double interpolation_tol = 1e-10;
  Analyticity an;
};

// Z(t) = Phi(omega t) e^{i Omega_inf t} Phi(0)^{-1} z0 with Phi the composed chain,
// interpolated trigonometrically from its grid. An empty chain is the identity. The
// interpolant is compared with the exact product of exponentials at `probes` midpoints when
// every chain element carries its generator.
Trajectory integrate_reduced(const NormalForm &N_inf, const std::vector<SymplecticMap> &chain, const State &z0,
                             const ReducedOptions &opt = {});

// max_t ||z(t)||_{a,p} / ||z(0)||_{a,p}. Throws DomainError on an empty trajectory or a zero
// initial norm.
double stability_ratio(const Trajectory &traj);

// max_t ||a(t) - b(t)||_{a,p} / ||a(0)||_{a,p}; the sample times must coincide.
double sup_relative_error(const Trajectory &a, const Trajectory &b, const Analyticity &an);

// Integrator error (Richardson estimate) + [P_final] T growth.
double comparison_budget(double integrator_error, double P_final, double T, double growth);

// t, |z_1| .. |z_J|, norm; 17 significant digits, '.' decimal.
void write_trajectory_csv(std::ostream &os, const Trajectory &traj);

}  // namespace kamreduce
