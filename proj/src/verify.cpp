// SPDX-License-Identifier: Apache-2.0
#include "kamreduce/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "kamreduce/csv.hpp"
#include "kamreduce/errors.hpp"
#include "kamreduce/kamloop.hpp"

namespace kamreduce
{

namespace
{

constexpr cplx I1{0.0, 1.0};
constexpr double TWO_PI = 2.0 * std::numbers::pi;

double max_frequency(const NormalForm &N)
{
  double m = 0.0;
  for (int j = 1; j <= N.modes(); ++j)
  {
    m = std::max(m, std::abs(N.frequency(j)));
  }
  return m;
}

double conjugate_defect(const State &Z)
{
  double d = 0.0;
  for (Eigen::Index j = 0; j + 1 < Z.size(); j += 2)
  {
    d = std::max(d, std::abs(Z(j + 1) - std::conj(Z(j))));
  }
  return d;
}

double normal_energy(const NormalForm &N, const State &Z)
{
  double e = 0.0;
  for (int j = 1; j <= N.modes(); ++j)
  {
    e += N.frequency(j) * std::norm(Z(2 * j - 2));
  }
  return e;
}

// Trigonometric interpolation kernel for an odd number of equispaced points.
double dirichlet(double x, int G)
{
  const double s = std::sin(0.5 * x);
  if (std::abs(s) < 1e-12)
  {
    return std::cos(0.5 * G * x) / std::cos(0.5 * x);
  }
  return std::sin(0.5 * G * x) / (G * s);
}

Matrix interpolate(const SymplecticMap &phi, std::span<const double> theta)
{
  const int G = phi.grid.points;
  const int dim = phi.grid.dim;
  std::vector<std::vector<double>> w(static_cast<std::size_t>(dim), std::vector<double>(static_cast<std::size_t>(G)));
  for (int d = 0; d < dim; ++d)
  {
    for (int q = 0; q < G; ++q)
    {
      w[static_cast<std::size_t>(d)][static_cast<std::size_t>(q)] = dirichlet(theta[d] - TWO_PI * q / G, G);
    }
  }
  Matrix out = Matrix::Zero(phi.L.front().rows(), phi.L.front().cols());
  for (std::size_t g = 0; g < phi.grid.size(); ++g)
  {
    double weight = 1.0;
    std::size_t rest = g;
    for (int d = dim - 1; d >= 0; --d)
    {
      weight *= w[static_cast<std::size_t>(d)][rest % static_cast<std::size_t>(G)];
      rest /= static_cast<std::size_t>(G);
    }
    out += weight * phi.L[g];
  }
  return out;
}

// L_1(theta) L_2(theta) ... from the generators.
Matrix exact_product(const std::vector<SymplecticMap> &chain, std::span<const double> theta)
{
  const int J = chain.front().modes;
  const Matrix Jm = symplectic_unit(J);
  Matrix out = Matrix::Identity(2 * J, 2 * J);
  for (const auto &m : chain)
  {
    const QuadHam &F = *m.generator;
    Matrix S = Matrix::Zero(2 * J, 2 * J);
    for (std::size_t idx = 0; idx < F.lattice().size(); ++idx)
    {
      if (F.allocated(idx) && !F[idx].is_zero())
      {
        S += std::polar(1.0, dot_compensated(F.lattice().mode(idx), theta)) * z_hessian(F[idx]);
      }
    }
    out = (out * expm(I1 * (Jm * S))).eval();
  }
  return out;
}

void record(Trajectory &tr, double t, const State &Z, const Analyticity &an)
{
  tr.times.push_back(t);
  tr.states.push_back(Z);
  tr.norms.push_back(state_norm(Z, an));
}

}  // namespace

double state_norm(const State &Z, const Analyticity &an)
{
  double s = 0.0;
  for (Eigen::Index j = 0; 2 * j < Z.size(); ++j)
  {
    s += an.weight(static_cast<int>(j) + 1) * std::abs(Z(2 * j));
  }
  return s;
}

State real_state(const std::vector<cplx> &z)
{
  State Z(2 * static_cast<Eigen::Index>(z.size()));
  for (std::size_t j = 0; j < z.size(); ++j)
  {
    Z(2 * static_cast<Eigen::Index>(j)) = z[j];
    Z(2 * static_cast<Eigen::Index>(j) + 1) = std::conj(z[j]);
  }
  return Z;
}

Trajectory integrate_direct(const NormalForm &N, const QuadHam &P, const State &z0, const DirectOptions &opt)
{
  const int J = P.modes();
  const int n = P.dim();
  if (N.modes() != J || z0.size() != 2 * J || static_cast<int>(N.omega.size()) != n)
  {
    throw DomainError("integrate_direct: state, normal form and perturbation sizes differ");
  }
  if (!(opt.T > 0.0) || opt.samples < 1 || opt.resync < 1)
  {
    throw DomainError("integrate_direct: T and samples must be positive");
  }
  const double bound = 0.1 / (J + max_frequency(N));
  long long substeps = 0;
  double dt = 0.0;
  if (opt.dt)
  {
    dt = *opt.dt;
    const double per_sample = opt.T / opt.samples / dt;
    substeps = std::llround(per_sample);
    if (!(dt > 0.0) || dt > bound || substeps < 1 || std::abs(per_sample - substeps) > 1e-9 * per_sample)
    {
      throw DomainError("integrate_direct: dt above 0.1 / (J + max Omega) or not dividing T / samples");
    }
    dt = opt.T / (static_cast<double>(opt.samples) * substeps);
  }
  else
  {
    if (!(opt.dt_factor > 0.0) || opt.dt_factor > 0.1)
    {
      throw DomainError("integrate_direct: dt_factor must lie in (0, 0.1]");
    }
    substeps = static_cast<long long>(std::ceil(opt.T / opt.samples / (opt.dt_factor / (J + max_frequency(N)))));
    dt = opt.T / (static_cast<double>(opt.samples) * substeps);
  }

  const Matrix Jm = symplectic_unit(J);
  State diag(2 * J);
  for (int j = 1; j <= J; ++j)
  {
    diag(2 * j - 2) = I1 * N.frequency(j);
    diag(2 * j - 1) = -I1 * N.frequency(j);
  }
  std::vector<Matrix> A;
  std::vector<std::vector<int>> modes;
  int radius = 0;
  for (std::size_t idx = 0; idx < P.lattice().size(); ++idx)
  {
    if (P.allocated(idx) && !P[idx].is_zero())
    {
      A.push_back(I1 * (Jm * z_hessian(P[idx])));
      const auto k = P.lattice().mode(idx);
      modes.emplace_back(k.begin(), k.end());
      radius = std::max(radius, P.lattice().l1(idx));
    }
  }

  // u_d = e^{i omega_d t} at the current half step, advanced by fixed increments and
  // resynchronised from the exact phase every opt.resync half steps.
  const double h = 0.5 * dt;
  std::vector<cplx> u(static_cast<std::size_t>(n), cplx{1.0}), inc(static_cast<std::size_t>(n));
  for (int d = 0; d < n; ++d)
  {
    inc[static_cast<std::size_t>(d)] = std::polar(1.0, N.omega[static_cast<std::size_t>(d)] * h);
  }
  long long half_steps = 0;
  auto advance = [&] {
    ++half_steps;
    if (half_steps % opt.resync == 0)
    {
      for (int d = 0; d < n; ++d)
      {
        const double t = static_cast<double>(half_steps) * h;
        u[static_cast<std::size_t>(d)] = std::polar(1.0, std::fmod(N.omega[static_cast<std::size_t>(d)] * t, TWO_PI));
      }
    }
    else
    {
      for (int d = 0; d < n; ++d)
      {
        u[static_cast<std::size_t>(d)] *= inc[static_cast<std::size_t>(d)];
      }
    }
  };
  const auto width = static_cast<std::size_t>(2 * radius + 1);
  std::vector<cplx> powers(static_cast<std::size_t>(n) * width);
  auto mode_phases = [&](std::vector<cplx> &ph) {
    for (int d = 0; d < n; ++d)
    {
      cplx *row = powers.data() + static_cast<std::size_t>(d) * width;
      const cplx ud = u[static_cast<std::size_t>(d)];
      row[radius] = 1.0;
      for (int k = 1; k <= radius; ++k)
      {
        row[radius + k] = row[radius + k - 1] * ud;
        row[radius - k] = std::conj(row[radius + k]);
      }
    }
    ph.resize(A.size());
    for (std::size_t t = 0; t < A.size(); ++t)
    {
      cplx p = 1.0;
      for (int d = 0; d < n; ++d)
      {
        p *= powers[static_cast<std::size_t>(d) * width + static_cast<std::size_t>(radius + modes[t][static_cast<std::size_t>(d)])];
      }
      ph[t] = p;
    }
  };
  State tmp(2 * J);
  auto rhs = [&](const std::vector<cplx> &ph, const State &Z, State &out) {
    out = diag.cwiseProduct(Z);
    for (std::size_t t = 0; t < A.size(); ++t)
    {
      tmp.noalias() = A[t] * Z;
      out += ph[t] * tmp;
    }
  };

  Trajectory tr;
  tr.dt = dt;
  record(tr, 0.0, z0, opt.an);
  const double norm0 = tr.norms.front();
  const double energy0 = normal_energy(N, z0);
  const double scale = norm0 > 0.0 ? norm0 : 1.0;
  tr.conjugate_defect = conjugate_defect(z0) / scale;

  State Z = z0, k1(2 * J), k2(2 * J), k3(2 * J), k4(2 * J), Y(2 * J);
  std::vector<cplx> ph0, ph_half, ph1;
  mode_phases(ph0);
  for (int s = 1; s <= opt.samples; ++s)
  {
    for (long long q = 0; q < substeps; ++q)
    {
      rhs(ph0, Z, k1);
      advance();
      mode_phases(ph_half);
      Y = Z + h * k1;
      rhs(ph_half, Y, k2);
      Y = Z + h * k2;
      rhs(ph_half, Y, k3);
      advance();
      mode_phases(ph1);
      Y = Z + dt * k3;
      rhs(ph1, Y, k4);
      Z += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      std::swap(ph0, ph1);
    }
    record(tr, opt.T * s / opt.samples, Z, opt.an);
    tr.conjugate_defect = std::max(tr.conjugate_defect, conjugate_defect(Z) / scale);
    if (energy0 > 0.0)
    {
      tr.energy_drift = std::max(tr.energy_drift, std::abs(normal_energy(N, Z) - energy0) / energy0);
    }
    if (!Z.allFinite() || tr.norms.back() > opt.blowup * norm0)
    {
      tr.unstable = true;
      break;
    }
  }
  return tr;
}

Trajectory integrate_reduced(const NormalForm &N_inf, const std::vector<SymplecticMap> &chain, const State &z0,
                             const ReducedOptions &opt)
{
  const int J = N_inf.modes();
  const int n = static_cast<int>(N_inf.omega.size());
  if (z0.size() != 2 * J || !(opt.T > 0.0) || opt.samples < 1)
  {
    throw DomainError("integrate_reduced: bad state size, T or samples");
  }
  std::optional<SymplecticMap> phi;
  if (!chain.empty())
  {
    phi = compose_transform(chain);
    if (phi->modes != J || phi->grid.dim != n)
    {
      throw DomainError("integrate_reduced: chain does not match the normal form");
    }
  }
  const Matrix Jm = symplectic_unit(J);
  Trajectory tr;
  State Znew0 = z0;
  if (phi)
  {
    // Grid point 0 is theta = 0; L^{-1} = -J_m L^T J_m.
    Znew0 = -(Jm * (phi->L.front().transpose() * (Jm * z0)));
    const bool exact = std::all_of(chain.begin(), chain.end(), [](const auto &m) { return m.generator.has_value(); });
    if (exact && opt.probes > 0)
    {
      const int G = phi->grid.points;
      for (int q = 0; q < opt.probes; ++q)
      {
        const double base = TWO_PI * (static_cast<double>(q) * G / opt.probes + 0.5) / G;
        const std::vector<double> theta(static_cast<std::size_t>(n), base);
        const double err = (interpolate(*phi, theta) - exact_product(chain, theta)).cwiseAbs().maxCoeff();
        tr.interpolation_error = std::max(tr.interpolation_error, err);
      }
      tr.interpolation_flag = tr.interpolation_error > opt.interpolation_tol;
    }
  }

  const double scale = std::max(state_norm(z0, opt.an), 1e-300);
  State Znew(2 * J), Z(2 * J);
  std::vector<double> theta(static_cast<std::size_t>(n));
  for (int s = 0; s <= opt.samples; ++s)
  {
    const double t = opt.T * s / opt.samples;
    for (int j = 1; j <= J; ++j)
    {
      const double phase = std::fmod(N_inf.frequency(j) * t, TWO_PI);
      Znew(2 * j - 2) = Znew0(2 * j - 2) * std::polar(1.0, phase);
      Znew(2 * j - 1) = Znew0(2 * j - 1) * std::polar(1.0, -phase);
    }
    tr.modulus_drift = std::max(tr.modulus_drift, (Znew.cwiseAbs() - Znew0.cwiseAbs()).cwiseAbs().maxCoeff());
    if (phi)
    {
      for (int d = 0; d < n; ++d)
      {
        theta[static_cast<std::size_t>(d)] = std::fmod(N_inf.omega[static_cast<std::size_t>(d)] * t, TWO_PI);
      }
      Z.noalias() = interpolate(*phi, theta) * Znew;
    }
    else
    {
      Z = Znew;
    }
    record(tr, t, Z, opt.an);
    tr.conjugate_defect = std::max(tr.conjugate_defect, conjugate_defect(Z) / scale);
  }
  return tr;
}

double stability_ratio(const Trajectory &traj)
{
  if (traj.norms.empty() || !(traj.norms.front() > 0.0))
  {
    throw DomainError("stability_ratio needs a non-empty trajectory with non-zero initial norm");
  }
  return *std::max_element(traj.norms.begin(), traj.norms.end()) / traj.norms.front();
}

double sup_relative_error(const Trajectory &a, const Trajectory &b, const Analyticity &an)
{
  if (a.times.size() != b.times.size() || a.states.empty())
  {
    throw DomainError("sup_relative_error: trajectories sampled differently");
  }
  const double scale = state_norm(a.states.front(), an);
  if (!(scale > 0.0))
  {
    throw DomainError("sup_relative_error: zero initial norm");
  }
  double worst = 0.0;
  for (std::size_t s = 0; s < a.states.size(); ++s)
  {
    if (std::abs(a.times[s] - b.times[s]) > 1e-12 * (1.0 + std::abs(a.times[s])))
    {
      throw DomainError("sup_relative_error: sample times differ");
    }
    worst = std::max(worst, state_norm(a.states[s] - b.states[s], an));
  }
  return worst / scale;
}

double comparison_budget(double integrator_error, double P_final, double T, double growth)
{
  return integrator_error + P_final * T * growth;
}

void write_trajectory_csv(std::ostream &os, const Trajectory &traj)
{
  const auto J = traj.states.empty() ? 0 : traj.states.front().size() / 2;
  std::vector<std::string> cells{"t"};
  for (Eigen::Index j = 1; j <= J; ++j)
  {
    cells.push_back("abs_z" + std::to_string(j));
  }
  cells.emplace_back("norm");
  os << csv_row(cells);
  for (std::size_t s = 0; s < traj.states.size(); ++s)
  {
    cells.assign(1, format_real(traj.times[s]));
    for (Eigen::Index j = 0; j < J; ++j)
    {
      cells.push_back(format_real(std::abs(traj.states[s](2 * j))));
    }
    cells.push_back(format_real(traj.norms[s]));
    os << csv_row(cells);
  }
}

}  // namespace kamreduce
