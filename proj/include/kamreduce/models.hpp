// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kamreduce/hamrep.hpp"

namespace kamreduce
{

// V(theta, x) = sum_{j >= 0} Vt_j(theta) cos(j x), each Vt_j a real theta-Fourier series.
struct Potential
{
  LatticePtr lattice;
  std::vector<Series> harmonics;  // index j = 0 .. J_V
  double a = 0.25;                // x-analyticity: |Im x| < 2a
  double p = 1.0;
  double declared_bound = 1.0;    // C_V, against norm(r) on the theta strip 2r

  int degree() const { return static_cast<int>(harmonics.size()) - 1; }
  // Vt_j, zero beyond the stored degree.
  Series harmonic(int j) const;
  // ||Vt_0||_{2r} + sum_{j >= 1} j^p e^{2 a j} ||Vt_j||_{2r}
  double norm(double r) const;
  // max |Vt_j(-k) - conj(Vt_j(k))|
  double reality_defect() const;
};

// Presets declare C_V = norm(r).
// Vt_1 = c (1 + cos theta_1).
Potential single_cosine(const LatticePtr &lattice, double c, double a = 0.25, double p = 1.0, double r = 0.5);
// Vt_j = c e^{-2 a j} j^-p (1 + cos theta_1) for 1 <= j <= degree; Vt_0 = 0.
Potential geometric_potential(const LatticePtr &lattice, double c, double a, double p, int degree,
                              double r = 0.5);
// Random real coefficients under the envelope e^{-2 a j} j^-p e^{-2 r |k|}, rescaled so that
// norm(r) equals c. Theta modes up to |k|_1 <= radius.
Potential random_analytic(const LatticePtr &lattice, double c, double a, double p, double r, int degree,
                          int radius, std::uint64_t seed);

// p_ij = int_0^pi V phi_i phi_j dx with phi_j = sqrt(2/pi) sin(j x), in closed form.
Series dirichlet_coupling(const Potential &V, int i, int j);

struct ModelHamiltonian
{
  NormalForm N;
  QuadHam P;
  DiagonalLimits limits;  // large-index limits of the zzbar entries
  std::vector<std::string> warnings;
};

// omega . I + sum_j sqrt(j^2 + m) |z_j|^2 + (eps / 2) sum p_ij (z_i + zbar_i)(z_j + zbar_j).
ModelHamiltonian wave_hamiltonian(double m, double eps, const Potential &V, int J, const Analyticity &an,
                                  std::vector<double> omega);
// omega . I + sum_j j |z_j|^2 + eps sum p_ij z_i zbar_j.
ModelHamiltonian halfwave_hamiltonian(double eps, const Potential &V, int J, const Analyticity &an,
                                      std::vector<double> omega);

enum class ModelKind
{
  Wave,
  HalfWave
};

struct AssumptionCheck
{
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  bool asserted = true;  // informational rows do not affect AssumptionReport::pass
  bool pass() const { return value <= bound; }
};

struct AssumptionReport
{
  double C_V = 0.0;
  double eps0 = 0.0;  // (2^{p+1} + 16 + c_n) C_V eps with c_n = 18 n / r (wave) or n / (2 r)
  std::vector<AssumptionCheck> checks;
  bool pass() const;
};

// (A1) |shift_j| <= A_0; (A3) vector-field bound with both printed constants (12 and 16);
// (A4) TL seminorm at rho = 2a against eps0, using the model's analytic limits.
AssumptionReport verify_assumptions(ModelKind kind, const ModelHamiltonian &model, const Potential &V, double eps,
                                    double r);

}  // namespace kamreduce
