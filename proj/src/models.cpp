// SPDX-License-Identifier: Apache-2.0
#include "kamreduce/models.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "kamreduce/errors.hpp"

namespace kamreduce
{

namespace
{

// 1 + cos theta_1 on the lattice.
Series one_plus_cos(const FourierLattice &lat, double c)
{
  Series s(lat.size(), cplx{});
  s[lat.zero()] = c;
  if (lat.capacity() >= 1)
  {
    std::vector<int> k(lat.dim(), 0);
    k[0] = 1;
    s[lat.index(k)] += 0.5 * c;
    k[0] = -1;
    s[lat.index(k)] += 0.5 * c;
  }
  return s;
}

double envelope(int j, double a, double p)
{
  return j == 0 ? 1.0 : std::exp(-2.0 * a * j) * std::pow(static_cast<double>(j), -p);
}

void check_model_args(int J, const Potential &V, std::span<const double> omega)
{
  if (J < 2)
  {
    throw DomainError("model needs J >= 2");
  }
  if (!V.lattice || static_cast<int>(omega.size()) != V.lattice->dim())
  {
    throw DomainError("omega dimension must match the potential's angle dimension");
  }
}

// P = c20 p z z + c11 p z zbar + c02 p zbar zbar with p_ij the Dirichlet couplings.
ModelHamiltonian assemble(const Potential &V, int J, const Analyticity &an, double c20, double c11)
{
  const auto &lat = *V.lattice;
  ModelHamiltonian out{NormalForm{}, QuadHam(V.lattice, J, an), DiagonalLimits{}, {}};
  if (V.degree() < 2 * J)
  {
    std::ostringstream msg;
    msg << "potential degree " << V.degree() << " < 2J = " << 2 * J
        << "; couplings beyond its support are zero";
    out.warnings.push_back(msg.str());
  }
  for (int i = 1; i <= J; ++i)
  {
    for (int j = i; j <= J; ++j)
    {
      const Series pij = dirichlet_coupling(V, i, j);
      for (std::size_t idx = 0; idx < lat.size(); ++idx)
      {
        if (pij[idx] == cplx{})
        {
          continue;
        }
        auto &b = out.P[idx];
        b.zzbar(i - 1, j - 1) = c11 * pij[idx];
        b.zzbar(j - 1, i - 1) = c11 * pij[idx];
        if (c20 != 0.0)
        {
          b.zz(i - 1, j - 1) = b.zz(j - 1, i - 1) = c20 * pij[idx];
          b.zbarzbar(i - 1, j - 1) = b.zbarzbar(j - 1, i - 1) = c20 * pij[idx];
        }
      }
    }
  }
  // lim_t zzbar_{i+t, j+t} = c11 (Vt_0 if d = 0 else Vt_|d| / 2)
  out.limits.zzbar.resize(static_cast<std::size_t>(2 * J - 1));
  for (int d = -(J - 1); d <= J - 1; ++d)
  {
    Series lim = V.harmonic(std::abs(d));
    const double f = d == 0 ? c11 : 0.5 * c11;
    for (auto &v : lim)
    {
      v *= f;
    }
    out.limits.zzbar[static_cast<std::size_t>(d + J - 1)] = std::move(lim);
  }
  return out;
}

}  // namespace

Series Potential::harmonic(int j) const
{
  if (j < 0 || j > degree())
  {
    return Series(lattice->size(), cplx{});
  }
  return harmonics[static_cast<std::size_t>(j)];
}

double Potential::norm(double r) const
{
  double acc = 0.0;
  for (int j = 0; j <= degree(); ++j)
  {
    const double w = j == 0 ? 1.0 : std::pow(static_cast<double>(j), p) * std::exp(2.0 * a * j);
    acc += w * coeff_fourier_norm(*lattice, harmonics[static_cast<std::size_t>(j)], 2.0 * r);
  }
  return acc;
}

double Potential::reality_defect() const
{
  double worst = 0.0;
  for (const auto &h : harmonics)
  {
    for (std::size_t idx = 0; idx < lattice->size(); ++idx)
    {
      worst = std::max(worst, std::abs(h[lattice->negate(idx)] - std::conj(h[idx])));
    }
  }
  return worst;
}

Potential single_cosine(const LatticePtr &lattice, double c, double a, double p, double r)
{
  Potential V;
  V.lattice = lattice;
  V.a = a;
  V.p = p;
  V.harmonics.assign(2, Series(lattice->size(), cplx{}));
  V.harmonics[1] = one_plus_cos(*lattice, c);
  V.declared_bound = V.norm(r);
  return V;
}

Potential geometric_potential(const LatticePtr &lattice, double c, double a, double p, int degree, double r)
{
  if (degree < 1)
  {
    throw DomainError("geometric potential needs degree >= 1");
  }
  Potential V;
  V.lattice = lattice;
  V.a = a;
  V.p = p;
  V.harmonics.assign(static_cast<std::size_t>(degree) + 1, Series(lattice->size(), cplx{}));
  for (int j = 1; j <= degree; ++j)
  {
    V.harmonics[static_cast<std::size_t>(j)] = one_plus_cos(*lattice, c * envelope(j, a, p));
  }
  V.declared_bound = V.norm(r);
  return V;
}

Potential random_analytic(const LatticePtr &lattice, double c, double a, double p, double r, int degree,
                          int radius, std::uint64_t seed)
{
  if (degree < 0 || !(c > 0.0))
  {
    throw DomainError("random potential needs degree >= 0 and c > 0");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto &lat = *lattice;
  Potential V;
  V.lattice = lattice;
  V.a = a;
  V.p = p;
  V.harmonics.assign(static_cast<std::size_t>(degree) + 1, Series(lat.size(), cplx{}));
  for (int j = 0; j <= degree; ++j)
  {
    auto &h = V.harmonics[static_cast<std::size_t>(j)];
    for (std::size_t idx = 0; idx < lat.size(); ++idx)
    {
      const auto neg = lat.negate(idx);
      if (neg < idx || lat.l1(idx) > radius)
      {
        continue;
      }
      const double env = envelope(j, a, p) * std::exp(-2.0 * r * lat.l1(idx));
      const cplx v = neg == idx ? cplx(u(rng) * env) : cplx(u(rng) * env, u(rng) * env);
      h[idx] = v;
      h[neg] = std::conj(v);
    }
  }
  const double n = V.norm(r);
  if (n > 0.0)
  {
    for (auto &h : V.harmonics)
    {
      for (auto &v : h)
      {
        v *= c / n;
      }
    }
  }
  V.declared_bound = c;
  return V;
}

Series dirichlet_coupling(const Potential &V, int i, int j)
{
  if (i < 1 || j < 1)
  {
    throw DomainError("Dirichlet modes start at 1");
  }
  Series out = V.harmonic(i + j);
  if (i == j)
  {
    const Series v0 = V.harmonic(0);
    for (std::size_t idx = 0; idx < out.size(); ++idx)
    {
      out[idx] = v0[idx] - 0.5 * out[idx];
    }
    return out;
  }
  const Series vd = V.harmonic(std::abs(i - j));
  for (std::size_t idx = 0; idx < out.size(); ++idx)
  {
    out[idx] = 0.5 * (vd[idx] - out[idx]);
  }
  return out;
}

ModelHamiltonian wave_hamiltonian(double m, double eps, const Potential &V, int J, const Analyticity &an,
                                  std::vector<double> omega)
{
  check_model_args(J, V, omega);
  if (!(m >= 0.0))
  {
    throw DomainError("wave model needs m >= 0");
  }
  auto out = assemble(V, J, an, 0.5 * eps, eps);
  out.N.omega = std::move(omega);
  for (int j = 1; j <= J; ++j)
  {
    out.N.shift.push_back(m / (std::sqrt(static_cast<double>(j) * j + m) + j));  // sqrt(j^2+m) - j
  }
  out.N.shift_bound = 1.0 + m;
  out.N.shift_limit = 0.0;
  return out;
}

ModelHamiltonian halfwave_hamiltonian(double eps, const Potential &V, int J, const Analyticity &an,
                                      std::vector<double> omega)
{
  check_model_args(J, V, omega);
  auto out = assemble(V, J, an, 0.0, eps);
  out.N.omega = std::move(omega);
  out.N.shift.assign(static_cast<std::size_t>(J), 0.0);
  out.N.shift_bound = 1.0;
  out.N.shift_limit = 0.0;
  return out;
}

bool AssumptionReport::pass() const
{
  return std::all_of(checks.begin(), checks.end(), [](const auto &c) { return !c.asserted || c.pass(); });
}

AssumptionReport verify_assumptions(ModelKind kind, const ModelHamiltonian &model, const Potential &V, double eps,
                                    double r)
{
  if (!(r > 0.0) || !(eps >= 0.0))
  {
    throw DomainError("verify_assumptions needs r > 0 and eps >= 0");
  }
  AssumptionReport rep;
  const double n = model.P.dim();
  rep.C_V = V.norm(r);
  const double cn = kind == ModelKind::Wave ? 18.0 * n / r : n / (2.0 * r);
  const double base = std::pow(2.0, V.p + 1.0) + cn;
  rep.eps0 = (base + 16.0) * rep.C_V * eps;

  rep.checks.push_back({"potential norm C_V", rep.C_V, V.declared_bound * (1.0 + 1e-12)});
  double shift = 0.0;
  for (double s : model.N.shift)
  {
    shift = std::max(shift, std::abs(s));
  }
  rep.checks.push_back({"A1 |shift_j| <= A0", shift, model.N.shift_bound});
  Analyticity an = model.P.analyticity();
  an.r = r;
  const double vf = vf_norm(model.P, an);
  rep.checks.push_back({"A3 vector field (constant 12)", vf, (base + 12.0) * rep.C_V * eps, false});
  rep.checks.push_back({"A3 vector field (constant 16)", vf, (base + 16.0) * rep.C_V * eps});
  const double rho = 2.0 * V.a;
  rep.checks.push_back(
      {"A4 TL seminorm at rho = 2a", tl_seminorm(model.P, rho, r, &model.limits).combined(), rep.eps0});
  return rep;
}

}  // namespace kamreduce
