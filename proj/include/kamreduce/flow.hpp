// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <vector>

#include "kamreduce/hamrep.hpp"

namespace kamreduce
{

// Equispaced angle grid theta_q = 2 pi q / points in every dimension. Point indices are
// row-major over the per-dimension indices.
struct AngleGrid
{
  int dim = 1;
  int points = 1;  // per dimension, odd

  std::size_t size() const;
  std::vector<double> angles(std::size_t g) const;
  // Frequencies -(points-1)/2 .. (points-1)/2 are resolved exactly.
  int max_frequency() const { return (points - 1) / 2; }
  bool operator==(const AngleGrid &) const = default;
};

// 4 K_cap + 1 points per dimension: products of two capacity-supported series are alias free.
AngleGrid default_grid(const FourierLattice &lat);

// Time-1 map of a quadratic F, pointwise on the grid:
//   Z = L(theta) Z0,  I = I0 + (1/2) Z0^T M_h(theta) Z0 (component h),  theta = theta0.
struct SymplecticMap
{
  AngleGrid grid;
  int modes = 0;
  std::vector<Matrix> L;               // per grid point, 2J x 2J
  std::vector<Matrix> B;               // L - I, computed without forming L first
  std::vector<std::vector<Matrix>> M;  // per grid point, one symmetric 2J x 2J per angle
  double error_estimate = 0.0;         // largest Gauss-Kronrod disagreement in M

  // Set by flow_map only. transform_flow takes the O(F) part of the pullback from the
  // coefficient-space bracket; on the grid it would leave roundoff of size eps J |F| in
  // every Fourier mode, which the analytic weights then amplify.
  std::vector<Matrix> B2;                // L - I - A
  std::vector<std::vector<Matrix>> M2;   // M_h + d_theta_h S_F
  std::optional<QuadHam> generator;

  static SymplecticMap identity(const AngleGrid &grid, int modes);
  // max over grid points of max |L^T J L - J|.
  double symplectic_defect() const;
};

struct FlowGate
{
  double sigma = 0.1;
  double rho = 0.3;
  double constant = 0.25;  // ||X_F||_{r-sigma} + <F>_{rho, r-sigma} < constant * sigma
};

struct FlowOptions
{
  std::optional<AngleGrid> grid;  // default_grid when empty
  double tol = 1e-12;
  int kronrod = 15;               // Gauss-Kronrod points, raised to 31 and 61 while the
                                  // embedded Gauss estimate disagrees
  std::optional<FlowGate> gate;
};

// exp(A) and exp(A) - I by scaling and squaring with diagonal Pade approximants of degree
// 3, 5, 7, 9 or 13 chosen by the 1-norm.
Matrix expm(const Matrix &A);
Matrix expm1(const Matrix &A);

// Throws FlowDomainError when the gate is set and violated.
SymplecticMap flow_map(const QuadHam &F, const FlowOptions &opt = {});

// The full quadratic Hamiltonian omega . I + sum_j Omega_j |z_j|^2 + P.
struct Hamiltonian
{
  NormalForm N;
  QuadHam P;
};

// H o X^1_F: S_+ = L^T S L + sum_h omega_h M_h, returned as the same N and a new P.
// The N part is transformed through B = L - I so that L^T S_N L - S_N keeps its accuracy;
// for maps from flow_map its first-order part comes from {N, F} - omega . d_theta F.
// Grid modes outside the lattice go to the tail.
Hamiltonian transform_flow(const Hamiltonian &H, const SymplecticMap &map);

// R o X^1_F for an action-free quadratic R: L^T S_R L on the grid.
QuadHam compose_quadratic(const QuadHam &R, const SymplecticMap &map);

struct LieOptions
{
  int max_terms = 20;
  double tol = 1e-15;  // stop once a term's vf norm falls below tol * (1 + ||P||)
};

struct LieResult
{
  Hamiltonian H;
  int terms = 0;
  double tail_bound = 0.0;  // geometric bound on the omitted terms plus bracket overflow
};

// sum_m ad_F^m(H) / m! with ad_F(G) = {G, F} and ad_F(omega . I) = -omega . d_theta F.
// Throws LieDivergence when the term norms stop decreasing before convergence.
LieResult transform_lie(const Hamiltonian &H, const QuadHam &F, const LieOptions &opt = {});

// Fourier coefficients of L(theta) - I on the lattice, in the TL block layout. Grid modes
// outside the lattice add their entrywise l1 norm to tail_norm.
TLMatrix jacobian_deviation(const SymplecticMap &map, const LatticePtr &lattice);

// cond_2(L) per grid point.
std::vector<double> condition_numbers(const SymplecticMap &map);

}  // namespace kamreduce
