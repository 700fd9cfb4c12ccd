// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "kamreduce/lattice.hpp"

namespace kamreduce
{

using Matrix = Eigen::MatrixXcd;

// Strip width r, ball radius s, and the mode weight w_j = e^{a j} j^p.
struct Analyticity
{
  double r = 0.5;
  double s = 1.0;
  double a = 0.0;
  double p = 0.0;
  double weight(int j) const;
};

// Monomial coefficients of one Fourier mode:
//   sum_ij zz_ij z_i z_j + zzbar_ij z_i zbar_j + zbarzbar_ij zbar_i zbar_j
// with zz and zbarzbar symmetric. Mode indices are 1..J, stored 0-based.
struct QuadBlock
{
  Matrix zz, zzbar, zbarzbar;
  bool is_zero() const;
};

// theta-Fourier-indexed quadratic Hamiltonian (the action-linear part lives in NormalForm).
class QuadHam
{
public:
  QuadHam(LatticePtr lattice, int modes, Analyticity an);

  const FourierLattice &lattice() const { return *lattice_; }
  const LatticePtr &lattice_ptr() const { return lattice_; }
  int dim() const { return lattice_->dim(); }
  int capacity() const { return lattice_->capacity(); }
  int modes() const { return modes_; }
  const Analyticity &analyticity() const { return an_; }
  void set_analyticity(const Analyticity &an) { an_ = an; }

  // Blocks are allocated on first mutable access; absent blocks read as zero.
  QuadBlock &operator[](std::size_t idx);
  const QuadBlock &operator[](std::size_t idx) const { return blocks_[idx] ? *blocks_[idx] : zero_; }
  bool allocated(std::size_t idx) const { return blocks_[idx].has_value(); }
  QuadBlock &at(std::span<const int> k);
  const QuadBlock &at(std::span<const int> k) const;

  double tail_norm() const { return tail_; }
  void add_tail(double v);
  void reset_tail() { tail_ = 0.0; }

  bool is_zero() const;
  std::vector<std::size_t> support() const;
  int support_radius() const;  // max |k|_1 over the support, -1 if zero

  void symmetrize();
  void enforce_reality();
  // Max deviation from the reality relations over all coefficients.
  double reality_defect() const;

  QuadHam &operator+=(const QuadHam &o);
  QuadHam &operator-=(const QuadHam &o);
  QuadHam &operator*=(cplx c);

private:
  void check_compatible(const QuadHam &o) const;

  LatticePtr lattice_;
  int modes_;
  Analyticity an_;
  std::vector<std::optional<QuadBlock>> blocks_;
  QuadBlock zero_;
  double tail_ = 0.0;
};

QuadHam operator+(QuadHam a, const QuadHam &b);
QuadHam operator-(QuadHam a, const QuadHam &b);
QuadHam operator*(cplx c, QuadHam a);

// Largest coefficient difference, entrywise over all modes and blocks.
double max_abs_diff(const QuadHam &a, const QuadHam &b);

// Tangential frequencies omega and normal frequencies Omega_j = j + shift_j.
struct NormalForm
{
  std::vector<double> omega;
  std::vector<double> shift;
  double shift_bound = 1.0;            // A_0
  std::optional<double> shift_limit;   // analytic limit of shift_j as j -> inf

  int modes() const { return static_cast<int>(shift.size()); }
  double frequency(int j) const { return j + shift[j - 1]; }
};

// sum_j Omega_j z_j zbar_j as a theta-independent QuadHam.
QuadHam normal_form_part(const NormalForm &N, const LatticePtr &lattice, const Analyticity &an);

// omega . d_theta F
QuadHam angle_derivative(const QuadHam &F, std::span<const double> omega);

struct VfNorm
{
  double z_part = 0.0;
  double theta_part = 0.0;
  double total() const { return z_part + theta_part; }
};

VfNorm vf_norm_parts(const QuadHam &P, const Analyticity &an);
double vf_norm(const QuadHam &P);
double vf_norm(const QuadHam &P, const Analyticity &an);

// Norm bound of a single Fourier mode (used for discarded capacity overflow).
double mode_vf_bound(const QuadBlock &b, int l1, const Analyticity &an);

// Analytic limits of the zzbar second derivatives along each diagonal offset
// d = i - j, stored at index d + J - 1. The zz / zbarzbar limits are 0 in the lift.
struct DiagonalLimits
{
  std::vector<Series> zzbar;
};

struct TLReport
{
  double M1 = 0.0;
  double M3 = 0.0;
  double combined() const { return std::max(M1, M3); }
};

TLReport tl_seminorm(const QuadHam &P, double rho, const DiagonalLimits *limits = nullptr);
TLReport tl_seminorm(const QuadHam &P, double rho, double r, const DiagonalLimits *limits = nullptr);

// z-part bracket i sum_k (dR/dz_k dF/dzbar_k - dR/dzbar_k dF/dz_k) of two
// action-independent quadratics; theta products by truncated convolution.
QuadHam poisson_bracket(const QuadHam &R, const QuadHam &F);

struct Truncation
{
  QuadHam head;        // |k|_1 < K
  QuadHam remainder;
  double remainder_norm = 0.0;  // on the strip r - 2 sigma
  double bound = 0.0;           // 32 sigma^-2 e^{-K sigma} ||P||_r
  bool within_bound = true;
};

Truncation truncate_fourier(const QuadHam &P, int K, double sigma);

// Hessian in the interleaved ordering Z = (z_1, zbar_1, ..., z_J, zbar_J):
// P = (1/2) Z^T S Z.
Matrix z_hessian(const QuadBlock &b);
QuadBlock from_z_hessian(const Matrix &S);

// Block matrix over the interleaved ordering, one 2J x 2J matrix per Fourier mode.
struct TLMatrix
{
  LatticePtr lattice;
  int modes = 0;
  std::vector<Matrix> coef;
  double tail_norm = 0.0;

  static TLMatrix zero(LatticePtr lattice, int modes);
  static TLMatrix identity(LatticePtr lattice, int modes);
};

// A = J d^2_Z F with J = blockdiag([[0, 1], [-1, 0]]).
TLMatrix hessian_matrix(const QuadHam &F);

TLReport tl_matnorm(const TLMatrix &A, double rho, double r);

TLMatrix matmul(const TLMatrix &A, const TLMatrix &B, double r);

// blockdiag([[0, 1], [-1, 0]]) of size 2J.
Matrix symplectic_unit(int modes);

}  // namespace kamreduce
